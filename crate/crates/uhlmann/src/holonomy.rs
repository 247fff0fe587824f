//! Uhlmann transport unitaries, boost composition, polygon anholonomy and the
//! left/right duality.

use serde::{Deserialize, Serialize};

use crate::clifford::{gamma_rep, pauli, GammaRep, RepKind};
use crate::error::{Result, UhlError};
use crate::geometry::fidelity_closed;
use crate::matcore::{
    geometric_mean, kron, matrix_inv_sqrt_pd, matrix_inverse_pd, matrix_sqrt_psd, ComplexMatrix, I,
};
use crate::tfd::{ball_from_half, c_of, dot, half_from_ball, norm, rho_ball, scaled, BOUNDARY_EPS};

/// `U_ij = ρ_i^{-1/2} ρ_j^{-1/2} (ρ_j^{1/2} ρ_i ρ_j^{1/2})^{1/2}`
pub fn transport_unitary_oracle(rho_i: &ComplexMatrix, rho_j: &ComplexMatrix) -> Result<ComplexMatrix> {
    let isi = matrix_inv_sqrt_pd(rho_i)?;
    let isj = matrix_inv_sqrt_pd(rho_j)?;
    let sj = matrix_sqrt_psd(rho_j)?;
    let inner = sj.matmul(rho_i).matmul(&sj).hermitian_part();
    Ok(isi.matmul(&isj).matmul(&matrix_sqrt_psd(&inner)?))
}

/// `L_ij = ρ_i # ρ_j^{-1}`
pub fn filter_operator(rho_i: &ComplexMatrix, rho_j: &ComplexMatrix) -> Result<ComplexMatrix> {
    geometric_mean(rho_i, &matrix_inverse_pd(rho_j)?)
}

fn interior_half(a: &[f64]) -> Result<()> {
    let r = norm(a);
    if r >= 1.0 - BOUNDARY_EPS {
        Err(UhlError::BoundaryState(r))
    } else {
        Ok(())
    }
}

/// `U_ab = [(1 + a·b) I + ½[a·Γ, b·Γ]] / sqrt(1 + 2a·b + a²b²)` in half-angle coordinates.
pub fn transport_unitary_closed(a: &[f64], b: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    interior_half(a)?;
    interior_half(b)?;
    spin_rotor(a, b, rep)
}

/// `[(1 + p·q) I + ½[p·Γ, q·Γ]] / sqrt(1 + 2p·q + p²q²)` for arbitrary vectors.
fn spin_rotor(p: &[f64], q: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    let pq = dot(p, q);
    let den = (1.0 + 2.0 * pq + dot(p, p) * dot(q, q)).sqrt();
    let c = rep.slash(p)?.commutator(&rep.slash(q)?).scale_real(0.5);
    Ok((&c + &rep.identity().scale_real(1.0 + pq)).scale_real(1.0 / den))
}

/// `tan(δ/2) = sqrt(a²b² - (a·b)²)/(1 + a·b)`, returned as `δ ∈ [0, 2π)`.
pub fn rotation_angle_half(a: &[f64], b: &[f64]) -> f64 {
    let ab = dot(a, b);
    let s = (dot(a, a) * dot(b, b) - ab * ab).max(0.0).sqrt();
    2.0 * s.atan2(1.0 + ab)
}

/// Same angle in ball coordinates:
/// `tan(δ/2) = sqrt(u²v² - (u·v)²)/((1 + C_u)(1 + C_v) + u·v)`.
pub fn rotation_angle_ball(u: &[f64], v: &[f64]) -> f64 {
    let uv = dot(u, v);
    let s = (dot(u, u) * dot(v, v) - uv * uv).max(0.0).sqrt();
    2.0 * s.atan2((1.0 + c_of(u)) * (1.0 + c_of(v)) + uv)
}

/// Composes rapidities: `L(v) L²(u) L(v) = L²(w)`; returns `(β_w, ŵ)`.
pub fn boost_compose(beta_u: f64, u_hat: &[f64], beta_v: f64, v_hat: &[f64]) -> (f64, Vec<f64>) {
    let uv = dot(u_hat, v_hat);
    let (chu, shu, chv, shv) = (beta_u.cosh(), beta_u.sinh(), beta_v.cosh(), beta_v.sinh());
    let sw: Vec<f64> = u_hat
        .iter()
        .zip(v_hat)
        .map(|(x, y)| chu * shv * y + shu * (chv - 1.0) * uv * y + shu * x)
        .collect();
    let sinh_w = norm(&sw);
    let beta_w = sinh_w.asinh();
    let dir = if sinh_w > 0.0 { scaled(&sw, 1.0 / sinh_w) } else { u_hat.to_vec() };
    (beta_w, dir)
}

/// `cosh β_w` from the composition law.
pub fn boost_cosh(beta_u: f64, u_hat: &[f64], beta_v: f64, v_hat: &[f64]) -> f64 {
    beta_u.cosh() * beta_v.cosh() + beta_u.sinh() * beta_v.sinh() * dot(u_hat, v_hat)
}

/// `L(u) = cosh(β/2) 1 + sinh(β/2) (û·γ)γ⁰` with `γ⁰ = σ1⊗iI`, `γ^k = σ2⊗Γ_{k-1}`.
pub fn boost_matrix(beta: f64, u_hat: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    rep.check_len(u_hat)?;
    let g0 = kron(&pauli(1), &rep.identity().scale(I));
    let mut ug = ComplexMatrix::zeros(2 * rep.dim());
    for (k, &c) in u_hat.iter().enumerate() {
        ug += &kron(&pauli(2), rep.gamma(k)).scale_real(c);
    }
    let gen = ug.matmul(&g0);
    Ok(&ComplexMatrix::identity(2 * rep.dim()).scale_real((beta / 2.0).cosh()) + &gen.scale_real((beta / 2.0).sinh()))
}

/// Point reflected through the sphere about `a` of radius² `1+a²`, then through the unit sphere.
pub fn double_inversion(a: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let d: Vec<f64> = x.iter().zip(a).map(|(p, q)| p - q).collect();
    let d2 = dot(&d, &d);
    if d2.sqrt() <= 1e-10 {
        return Err(UhlError::DegenerateTriangle(0, 1));
    }
    let k = (1.0 + dot(a, a)) / d2;
    let y: Vec<f64> = a.iter().zip(&d).map(|(p, q)| p + k * q).collect();
    Ok(scaled(&y, 1.0 / dot(&y, &y)))
}

/// `(j, k, b_{jk})` entries with `j < k`.
pub type Bivector = Vec<(usize, usize, f64)>;

/// Anholonomy unitary with extracted angle and bivector.
#[derive(Clone, Debug)]
pub struct HolonomyResult {
    pub unitary: ComplexMatrix,
    pub delta: f64,
    /// `b_{jk}` for `j < k`, normalized so that `Σ b² = 1`.
    pub bivector: Option<Bivector>,
}

impl HolonomyResult {
    pub fn from_unitary(u: ComplexMatrix, rep: &GammaRep) -> Self {
        match extract_angle_axis(&u, rep) {
            Ok((delta, bivector)) => Self { unitary: u, delta, bivector },
            Err(_) => {
                let c = (u.trace().re / rep.dim() as f64).clamp(-1.0, 1.0);
                Self { delta: 2.0 * c.acos(), unitary: u, bivector: None }
            }
        }
    }

    pub fn identity(rep: &GammaRep) -> Self {
        Self { unitary: rep.identity(), delta: 0.0, bivector: None }
    }
}

/// Splits `U = cos(δ/2) I + sin(δ/2) Σ b_{jk} Γ_j Γ_k` into `δ ∈ [0, 2π)` and `b`.
pub fn extract_angle_axis(u: &ComplexMatrix, rep: &GammaRep) -> Result<(f64, Option<Bivector>)> {
    let dim = rep.dim() as f64;
    let c = u.trace().re / dim;
    let k = u - &rep.identity().scale_real(c);
    let s = k.frobenius_norm() / dim.sqrt();
    let delta = 2.0 * s.atan2(c);
    if s < 1e-10 {
        let r = k.frobenius_norm();
        return if r > 1e-8 { Err(UhlError::NotRotationForm(r)) } else { Ok((delta, None)) };
    }
    let mut b = Vec::new();
    let mut rec = rep.identity().scale_real(c);
    for j in 0..rep.len() {
        for l in j + 1..rep.len() {
            let gg = rep.gamma(j).matmul(rep.gamma(l));
            let coef = (gg.adjoint().matmul(&k).trace() / (dim * s)).re;
            if coef.abs() > 1e-14 {
                rec += &gg.scale_real(s * coef);
                b.push((j, l, coef));
            }
        }
    }
    let r = rec.distance(u);
    if r > 1e-8 {
        return Err(UhlError::NotRotationForm(r));
    }
    Ok((delta, Some(b)))
}

/// `cos(δ/2) = (F_uv + F_vw + F_wu - 1) / (2 sqrt(F_uv F_vw F_wu))` in ball coordinates.
pub fn triangle_cos_half_delta(u: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    let (f1, f2, f3) = (fidelity_closed(u, v)?, fidelity_closed(v, w)?, fidelity_closed(w, u)?);
    Ok((f1 + f2 + f3 - 1.0) / (2.0 * (f1 * f2 * f3).sqrt()))
}

/// `R(a,b,c) = U(p,q)` with `p`, `q` the double inversions of `c`, `b` about `a`.
pub fn triangle_anholonomy(a: &[f64], b: &[f64], c: &[f64], rep: &GammaRep) -> Result<HolonomyResult> {
    for v in [a, b, c] {
        rep.check_len(v)?;
        interior_half(v)?;
    }
    let close = |x: &[f64], y: &[f64]| norm(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>()) <= 1e-10;
    let (ab, bc, ca) = (close(a, b), close(b, c), close(c, a));
    if ab && bc {
        return Ok(HolonomyResult::identity(rep));
    }
    if ab {
        return Err(UhlError::DegenerateTriangle(0, 1));
    }
    if bc {
        return Err(UhlError::DegenerateTriangle(1, 2));
    }
    if ca {
        return Err(UhlError::DegenerateTriangle(2, 0));
    }
    let p = double_inversion(a, c)?;
    let q = double_inversion(a, b)?;
    Ok(HolonomyResult::from_unitary(spin_rotor(&p, &q, rep)?, rep))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopChart {
    HalfAngle,
    Ball,
}

fn default_true() -> bool {
    true
}

/// Ordered vertex list of a piecewise-geodesic loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub rep: RepKind,
    pub chart: LoopChart,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default = "default_true")]
    pub closed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportPath {
    Closed,
    Oracle,
}

impl LoopSpec {
    pub fn half_angle(n: usize, rep: RepKind, vertices: Vec<Vec<f64>>) -> Self {
        Self { n, rep, chart: LoopChart::HalfAngle, vertices, closed: true }
    }

    pub fn gamma_rep(&self) -> Result<std::sync::Arc<GammaRep>> {
        gamma_rep(self.n, self.rep)
    }

    /// Vertices in half-angle coordinates, validated.
    pub fn half_angle_vertices(&self) -> Result<Vec<Vec<f64>>> {
        let len = 2 * self.n + 1;
        if self.vertices.is_empty() {
            return Err(UhlError::LengthMismatch { expected: len, got: 0 });
        }
        let mut out = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if v.len() != len {
                return Err(UhlError::LengthMismatch { expected: len, got: v.len() });
            }
            let r = norm(v);
            if r >= 1.0 - BOUNDARY_EPS {
                return Err(UhlError::BoundaryState(r));
            }
            out.push(match self.chart {
                LoopChart::HalfAngle => v.clone(),
                LoopChart::Ball => half_from_ball(v),
            });
        }
        Ok(out)
    }

    /// Vertices in ball coordinates.
    pub fn ball_vertices(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self.half_angle_vertices()?.iter().map(|a| ball_from_half(a)).collect())
    }

    /// Reversed traversal with the same base point.
    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        if r.vertices.len() > 1 {
            r.vertices[1..].reverse();
        }
        r
    }
}

/// `𝒰 = U_{1k} U_{k,k-1} ⋯ U_{21}`.
pub fn loop_unitary(spec: &LoopSpec, path: TransportPath) -> Result<ComplexMatrix> {
    if !spec.closed {
        return Err(UhlError::OpenLoop);
    }
    let rep = spec.gamma_rep()?;
    let a = spec.half_angle_vertices()?;
    let k = a.len();
    let mut u = rep.identity();
    for step in 0..k {
        if k == 1 {
            break;
        }
        let (from, to) = (step, (step + 1) % k);
        let t = match path {
            TransportPath::Closed => transport_unitary_closed(&a[to], &a[from], &rep)?,
            TransportPath::Oracle => {
                let ri = rho_ball(&ball_from_half(&a[to]), &rep)?;
                let rj = rho_ball(&ball_from_half(&a[from]), &rep)?;
                transport_unitary_oracle(&ri, &rj)?
            }
        };
        u = t.matmul(&u);
    }
    Ok(u)
}

pub fn loop_anholonomy(spec: &LoopSpec) -> Result<HolonomyResult> {
    let rep = spec.gamma_rep()?;
    Ok(HolonomyResult::from_unitary(loop_unitary(spec, TransportPath::Closed)?, &rep))
}

/// `‖(L_{1k}⋯L_{21} ⊗ I)|φ⟩ - (I ⊗ R_{12}⋯R_{k1})|φ⟩‖` with `|φ⟩ = vec ρ_1^{1/2}` and `R = conj U`.
pub fn left_right_duality_check(spec: &LoopSpec) -> Result<f64> {
    if !spec.closed {
        return Err(UhlError::OpenLoop);
    }
    let rep = spec.gamma_rep()?;
    let rhos: Vec<ComplexMatrix> =
        spec.ball_vertices()?.iter().map(|u| rho_ball(u, &rep)).collect::<Result<_>>()?;
    let k = rhos.len();
    let dim = rep.dim();
    let mut left = ComplexMatrix::identity(dim);
    let mut right = ComplexMatrix::identity(dim);
    for step in 0..k {
        if k == 1 {
            break;
        }
        let (j, i) = (step, (step + 1) % k);
        left = filter_operator(&rhos[i], &rhos[j])?.matmul(&left);
        right = right.matmul(&transport_unitary_oracle(&rhos[i], &rhos[j])?.transpose());
    }
    let phi = crate::tfd::tfd_vector(&matrix_sqrt_psd(&rhos[0])?);
    let id = ComplexMatrix::identity(dim);
    let lv = kron(&left, &id).mat_vec(&phi);
    let rv = kron(&id, &right).mat_vec(&phi);
    let nl = lv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nr = rv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(lv.iter().zip(&rv).map(|(x, y)| (x / nl - y / nr).norm_sqr()).sum::<f64>().sqrt())
}
