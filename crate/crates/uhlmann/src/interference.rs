//! Mach–Zehnder predictions for the total anholonomy: matrix path, closed
//! forms and an operator-level simulator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::clifford::{pauli, GammaRep};
use crate::error::{Result, UhlError};
use crate::geometry::fidelity_closed;
use crate::holonomy::{loop_unitary, LoopSpec, TransportPath};
use crate::matcore::{kron, matrix_sqrt_psd, partial_trace, ComplexMatrix, Side, C64, I, ONE, ZERO};
use crate::tfd::{c_of, dot, norm, scaled, tfd_vector, u_polar, wrap_angle};

/// Gauge unitary of the segment preparation:
/// `e^{iχ/2} sqrt((coshβ+1)/(coshβ+cosχ)) [cos(χ/2) I + i sin(χ/2) a·Γ]`.
pub fn ua_interference(chi: f64, a: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    u_polar(chi, &scaled(a, -1.0), rep)
}

/// `𝒰 = U_a^{-1} ℛ^{-1}` for a loop based at `a` (half-angle coordinates).
pub fn total_anholonomy(chi: f64, a: &[f64], spec: &LoopSpec) -> Result<ComplexMatrix> {
    let rep = spec.gamma_rep()?;
    let verts = spec.half_angle_vertices()?;
    let d: Vec<f64> = verts[0].iter().zip(a).map(|(x, y)| x - y).collect();
    if verts[0].len() != a.len() || norm(&d) > 1e-12 {
        return Err(UhlError::LoopAnchorMismatch);
    }
    let r = loop_unitary(spec, TransportPath::Closed)?;
    Ok(ua_interference(chi, a, &rep)?.adjoint().matmul(&r.adjoint()))
}

fn complex_pair<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct InterferenceResult {
    #[serde(serialize_with = "complex_pair")]
    pub z: C64,
    pub visibility: f64,
    pub phase_shift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<(f64, f64)>>,
}

impl InterferenceResult {
    pub fn from_z(z: C64) -> Self {
        Self { z, visibility: z.norm(), phase_shift: wrap_angle(z.arg()), curve: None }
    }

    /// Attaches `1 + ν cos(χ̃ + arg z)` sampled on `grid`.
    pub fn with_curve(mut self, grid: &[f64]) -> Self {
        self.curve = Some(intensity_curve(self.z, grid));
        self
    }
}

/// `z = Tr(𝒰 ρ)`.
pub fn interference_observables(u: &ComplexMatrix, rho: &ComplexMatrix) -> Result<InterferenceResult> {
    if u.dim() != rho.dim() {
        return Err(UhlError::DimMismatch { expected: rho.dim(), got: u.dim() });
    }
    Ok(InterferenceResult::from_z(u.matmul(rho).trace()))
}

fn segment_parts(chi: f64, c_u: f64) -> Result<(f64, f64)> {
    if !(c_u > 0.0 && c_u <= 1.0) {
        return Err(UhlError::ChartDomain(format!("C_u = {c_u} outside (0, 1]")));
    }
    let (ch, sh) = ((chi / 2.0).cos(), (chi / 2.0).sin());
    let den = ch * ch + (1.0 - c_u) / (1.0 + c_u) * sh * sh;
    let (py, px) = (c_u * chi.sin(), 2.0 - c_u + c_u * chi.cos());
    if 1.0 + c_u * chi.cos() <= 1e-12 {
        return Err(UhlError::ChartDomain("chi = pi at C_u = 1".into()));
    }
    let vis = ((ch * ch + (1.0 - c_u).powi(2) * sh * sh) / den).sqrt();
    Ok((wrap_angle(py.atan2(px) - chi), vis))
}

/// `(Φ - χ, ν)` for the segment preparation, with
/// `tan Φ = C sinχ / (2 - C + C cosχ)` and
/// `ν = sqrt[(1 + (1-C)² tan²(χ/2)) / (1 + (1-C)/(1+C) tan²(χ/2))]`.
pub fn phase_visibility_segment(chi: f64, c_u: f64) -> Result<(f64, f64)> {
    segment_parts(chi, c_u)
}

pub fn segment_z(chi: f64, c_u: f64) -> Result<C64> {
    let (phase, vis) = segment_parts(chi, c_u)?;
    Ok(C64::from_polar(vis, phase))
}

/// Coefficients of `ρ_a U_a^{-1} = e^{-iχ} (A I + B u·Γ)`.
pub fn segment_coefficients(chi: f64, c_u: f64, n_qubits: usize) -> (C64, C64) {
    let d = (1u64 << n_qubits) as f64;
    let q = 1.0 + c_u * chi.cos();
    let h = C64::from_polar(c_u, chi / 2.0);
    let a = ((1.0 + c_u) / q).sqrt() * (ONE + I * h * (chi / 2.0).sin()) / d;
    let b = (ONE + h * (chi / 2.0).cos()) / (((1.0 + c_u) * q).sqrt() * d);
    (a, b)
}

fn cross3(v: &[f64], w: &[f64]) -> [f64; 3] {
    [v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]]
}

/// Closed-form `z` for the triangle loop `u → v → w → u` (ball coordinates, anchor `u`).
///
/// For `N ≥ 2` this is `cos(δ/2)` times the segment value. For `N = 1` the
/// volume term `V = u·(v×w)` contributes:
/// `z = 2^N e^{-iχ} [A (ΣF - 1) + (i/2) B V] / (2 sqrt(F_uv F_vw F_wu))`.
pub fn phase_visibility_triangle(chi: f64, u: &[f64], v: &[f64], w: &[f64], n_qubits: usize) -> Result<C64> {
    let len = 2 * n_qubits + 1;
    for x in [u, v, w] {
        if x.len() != len {
            return Err(UhlError::LengthMismatch { expected: len, got: x.len() });
        }
    }
    let c_u = c_of(u);
    let fs = [fidelity_closed(u, v)?, fidelity_closed(v, w)?, fidelity_closed(w, u)?];
    let sum = fs.iter().sum::<f64>() - 1.0;
    let root = (fs[0] * fs[1] * fs[2]).sqrt();
    if n_qubits >= 2 {
        return Ok(segment_z(chi, c_u)? * (sum / (2.0 * root)));
    }
    if 1.0 + c_u * chi.cos() <= 1e-12 {
        return Err(UhlError::ChartDomain("chi = pi at C_u = 1".into()));
    }
    let (a, b) = segment_coefficients(chi, c_u, n_qubits);
    let vol = dot(u, &cross3(v, w));
    let d = (1u64 << n_qubits) as f64;
    Ok(C64::from_polar(d / (2.0 * root), -chi) * (a * sum + I * b * (0.5 * vol)))
}

/// `ℐ(χ̃) = 1 + |z| cos(χ̃ + arg z)`.
pub fn intensity_curve(z: C64, grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter().map(|&t| (t, 1.0 + z.norm() * (t + z.arg()).cos())).collect()
}

/// `k` evenly spaced points on `[0, 2π)`.
pub fn uniform_grid(k: usize) -> Vec<f64> {
    (0..k).map(|i| 2.0 * PI * i as f64 / k as f64).collect()
}

fn hadamard() -> ComplexMatrix {
    (&pauli(1) + &pauli(3)).scale_real(std::f64::consts::FRAC_1_SQRT_2)
}

fn ket0_proj() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i == 0 && j == 0 { ONE } else { ZERO })
}

fn ket1_proj() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i == 1 && j == 1 { ONE } else { ZERO })
}

/// Interferometer on `system ⊗ qubit`: splitter, arms `V⊗|1⟩⟨1| + e^{iχ̃} I⊗|0⟩⟨0|`, splitter.
fn interferometer(v: &ComplexMatrix, chi_tilde: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(v.dim());
    let h = kron(&id, &hadamard());
    let arms = &kron(v, &ket1_proj()) + &kron(&id, &ket0_proj()).scale(C64::from_polar(1.0, chi_tilde));
    h.matmul(&arms).matmul(&h)
}

/// Detector intensity `2 Tr[(I⊗|0⟩⟨0|) M (ω⊗|0⟩⟨0|) M†]` with the right-acting arm `conj(𝒰)`.
pub fn mach_zehnder_simulate(u: &ComplexMatrix, omega: &ComplexMatrix, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if u.dim() != omega.dim() {
        return Err(UhlError::DimMismatch { expected: omega.dim(), got: u.dim() });
    }
    let input = kron(omega, &ket0_proj());
    let det = kron(&ComplexMatrix::identity(u.dim()), &ket0_proj());
    let arm = u.conj();
    Ok(grid
        .iter()
        .map(|&t| {
            let m = interferometer(&arm, t);
            let out = m.matmul(&input).matmul(&m.adjoint());
            (t, 2.0 * det.matmul(&out).trace().re)
        })
        .collect())
}

/// Same intensity on `left ⊗ right ⊗ qubit` starting from the purification `vec ρ^{1/2}`.
pub fn mach_zehnder_full(u: &ComplexMatrix, rho: &ComplexMatrix, chi_tilde: f64) -> Result<f64> {
    if u.dim() != rho.dim() {
        return Err(UhlError::DimMismatch { expected: rho.dim(), got: u.dim() });
    }
    let d = u.dim();
    let psi = tfd_vector(&matrix_sqrt_psd(rho)?);
    let mut input = vec![ZERO; 2 * d * d];
    for (k, p) in psi.iter().enumerate() {
        input[2 * k] = *p;
    }
    let m = kron(&ComplexMatrix::identity(d), &interferometer(&u.conj(), chi_tilde));
    let out = m.mat_vec(&input);
    Ok(2.0 * out.iter().step_by(2).map(|x| x.norm_sqr()).sum::<f64>())
}

/// `‖conj(ω') - 𝒰 ρ 𝒰†‖` where `ω'` is the right marginal of `(I ⊗ conj 𝒰) vec ρ^{1/2}`.
pub fn right_marginal_residual(u: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    let d = u.dim();
    let psi = tfd_vector(&matrix_sqrt_psd(rho)?);
    let out = kron(&ComplexMatrix::identity(d), &u.conj()).mat_vec(&psi);
    let proj = ComplexMatrix::from_fn(d * d, |i, j| out[i] * out[j].conj());
    let omega = partial_trace(&proj, Side::Right, d)?;
    Ok(omega.conj().distance(&u.matmul(rho).matmul(&u.adjoint())))
}

/// Least-squares fit `ℐ ≈ c0 + c1 cos χ̃ - c2 sin χ̃`; returns `(c0, ν, arg z)`.
pub fn fit_curve(curve: &[(f64, f64)]) -> (f64, f64, f64) {
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(t, y) in curve {
        let row = [1.0, t.cos(), -t.sin()];
        for i in 0..3 {
            atb[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let x = solve3(ata, atb);
    (x[0], x[1].hypot(x[2]), x[2].atan2(x[1]))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
        a.swap(c, p);
        b.swap(c, p);
        if a[c][c] == 0.0 {
            continue;
        }
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| a[c][k] * x[k]).sum();
        x[c] = if a[c][c] == 0.0 { 0.0 } else { (b[c] - s) / a[c][c] };
    }
    x
}

/// Serialized curve row.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CurvePoint {
    pub chi_tilde: f64,
    pub intensity: f64,
}
