//! Holonomic two-qubit gates from geodesic triangles.

use serde::{Serialize, Serializer};

use crate::clifford::{gamma_rep, pauli, GammaRep, RepKind};
use crate::error::{Result, UhlError};
use crate::holonomy::{loop_unitary, triangle_anholonomy, triangle_cos_half_delta, HolonomyResult, LoopSpec, TransportPath};
use crate::matcore::{kron, kron_all, ComplexMatrix, I, ONE, ZERO};
use crate::tfd::ball_from_half;

/// Vertex radius `tanh(β/2)` at `β = log(1 + √2)`.
pub const ISWAP_RADIUS: f64 = std::f64::consts::SQRT_2 - 1.0;

/// `min_θ ‖U - e^{iθ} V‖_F = sqrt(2d - 2|Tr(V† U)|)`, evaluated at the optimal `θ = arg Tr(V† U)`.
pub fn gate_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(UhlError::DimMismatch { expected: v.dim(), got: u.dim() });
    }
    let t = v.adjoint().matmul(u).trace();
    let phase = if t.norm() > 0.0 { t / t.norm() } else { ONE };
    Ok(u.distance(&v.scale(phase)))
}

/// `sqrt(2d - 2|Tr(V† U)|)` as written; loses precision near zero.
pub fn gate_distance_trace(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(UhlError::DimMismatch { expected: v.dim(), got: u.dim() });
    }
    let d = u.dim() as f64;
    Ok((2.0 * d - 2.0 * v.adjoint().matmul(u).trace().norm()).max(0.0).sqrt())
}

/// Triangle `(0, b e_i, c e_j)`:
/// `R = [I + ½ bc [Γ_j, Γ_i]] / sqrt(1 + b²c²)`, `tan(δ/2) = bc`.
pub fn axis_triangle(rep: &GammaRep, i: usize, j: usize, b: f64, c: f64) -> Result<HolonomyResult> {
    let len = rep.len();
    for k in [i, j] {
        if k >= len {
            return Err(UhlError::IndexRange(k));
        }
    }
    if i == j {
        return Err(UhlError::IndexRange(j));
    }
    let mut vb = vec![0.0; len];
    let mut vc = vec![0.0; len];
    vb[i] = b;
    vc[j] = c;
    triangle_anholonomy(&vec![0.0; len], &vb, &vc, rep)
}

pub fn axis_triangle_closed(rep: &GammaRep, i: usize, j: usize, b: f64, c: f64) -> Result<ComplexMatrix> {
    if i >= rep.len() || j >= rep.len() {
        return Err(UhlError::IndexRange(i.max(j)));
    }
    let comm = rep.gamma(j).commutator(rep.gamma(i)).scale_real(0.5 * b * c);
    Ok((&rep.identity() + &comm).scale_real(1.0 / (1.0 + b * b * c * c).sqrt()))
}

/// Isosceles triangle on the sphere of radius `s` in the `(e_p, e_q)` plane:
/// `a = s e_p`, `b, c = s (cosφ e_p ± sinφ e_q)`.
pub fn inscribed_triangle(len: usize, p: usize, q: usize, radius: f64, phi: f64) -> [Vec<f64>; 3] {
    let mut a = vec![0.0; len];
    let mut b = vec![0.0; len];
    let mut c = vec![0.0; len];
    a[p] = radius;
    b[p] = radius * phi.cos();
    b[q] = radius * phi.sin();
    c[p] = radius * phi.cos();
    c[q] = -radius * phi.sin();
    [a, b, c]
}

fn inscribed_cos_half_delta(radius: f64, phi: f64) -> Result<f64> {
    let [a, b, c] = inscribed_triangle(3, 0, 1, radius, phi);
    triangle_cos_half_delta(&ball_from_half(&a), &ball_from_half(&b), &ball_from_half(&c))
}

/// Opening angle `φ` at which the inscribed triangle of radius `s` has anholonomy angle `δ`.
pub fn solve_inscribed_angle(radius: f64, delta: f64) -> Result<f64> {
    let target = (delta / 2.0).cos();
    let (mut lo, mut hi) = (1e-6, 2.0 * std::f64::consts::PI / 3.0);
    let (flo, fhi) = (inscribed_cos_half_delta(radius, lo)?, inscribed_cos_half_delta(radius, hi)?);
    if !(flo >= target && fhi <= target) {
        return Err(UhlError::ChartDomain(format!("delta {delta} not reachable at radius {radius}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inscribed_cos_half_delta(radius, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Embedded `exp(iπ/4 (X⊗X + Y⊗Y))` on the qubit pair.
pub fn iswap_target(pair: (usize, usize)) -> Result<ComplexMatrix> {
    let z = ZERO;
    let sw = ComplexMatrix::from_vec(vec![ONE, z, z, z, z, z, I, z, z, I, z, z, z, z, z, ONE]);
    let id = ComplexMatrix::identity(2);
    match pair {
        (1, 2) => Ok(kron(&sw, &id)),
        (2, 3) => Ok(kron(&id, &sw)),
        (p, q) => Err(UhlError::UnsupportedPair(p, q)),
    }
}

/// Gamma index pairs realizing `X⊗X` and `Y⊗Y` on the qubit pair (JW, N=3).
fn pair_table(pair: (usize, usize)) -> Result<[((usize, usize), usize); 2]> {
    match pair {
        (1, 2) => Ok([((1, 2), 1), ((0, 3), 2)]),
        (2, 3) => Ok([((3, 4), 1), ((2, 5), 2)]),
        (p, q) => Err(UhlError::UnsupportedPair(p, q)),
    }
}

fn two_qubit_pauli(pair: (usize, usize), k: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let s = pauli(k);
    if pair == (1, 2) {
        kron_all(&[&s, &s, &id])
    } else {
        kron_all(&[&id, &s, &s])
    }
}

fn complex_rows<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<[f64; 2]> = m.entries().iter().map(|z| [z.re, z.im]).collect();
    v.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct GatePlan {
    #[serde(rename = "N")]
    pub n: usize,
    pub rep_kind: RepKind,
    pub pair: (usize, usize),
    pub radius: f64,
    pub phi: f64,
    pub triangles: Vec<[Vec<f64>; 3]>,
    #[serde(serialize_with = "complex_rows")]
    pub target: ComplexMatrix,
    #[serde(serialize_with = "complex_rows")]
    pub achieved: ComplexMatrix,
    pub phase_error: f64,
}

impl GatePlan {
    /// Ordered product of the triangle anholonomies through the matrix-function transport.
    pub fn oracle_product(&self) -> Result<ComplexMatrix> {
        let rep = gamma_rep(self.n, self.rep_kind)?;
        let mut acc = rep.identity();
        for t in &self.triangles {
            let spec = LoopSpec::half_angle(self.n, self.rep_kind, t.to_vec());
            acc = loop_unitary(&spec, TransportPath::Oracle)?.matmul(&acc);
        }
        Ok(acc)
    }
}

/// Four inscribed triangles, two per `σ⊗σ` factor, each with `δ = π/4`.
/// `radius` defaults to `√2 - 1`; the opening angle is always solved at that radius.
pub fn iswap_synthesize(pair: (usize, usize), radius: Option<f64>) -> Result<GatePlan> {
    let table = pair_table(pair)?;
    let target = iswap_target(pair)?;
    let rep = gamma_rep(3, RepKind::JordanWigner)?;
    let phi = solve_inscribed_angle(ISWAP_RADIUS, std::f64::consts::FRAC_PI_4)?;
    let s = radius.unwrap_or(ISWAP_RADIUS);
    let eighth = std::f64::consts::FRAC_PI_8;
    let mut triangles = Vec::new();
    for ((p, q), k) in table {
        let want = &rep.identity().scale_real(eighth.cos()) + &two_qubit_pauli(pair, k).scale(I * eighth.sin());
        let [a, b, c] = inscribed_triangle(rep.len(), p, q, ISWAP_RADIUS, phi);
        let r = triangle_anholonomy(&a, &b, &c, &rep)?.unitary;
        let tri = inscribed_triangle(rep.len(), p, q, s, phi);
        let tri = if r.distance(&want) < r.distance(&want.adjoint()) {
            tri
        } else {
            let [a, b, c] = tri;
            [a, c, b]
        };
        triangles.push(tri.clone());
        triangles.push(tri);
    }
    let mut achieved = rep.identity();
    for [a, b, c] in &triangles {
        achieved = triangle_anholonomy(a, b, c, &rep)?.unitary.matmul(&achieved);
    }
    let phase_error = gate_distance(&achieved, &target)? / target.frobenius_norm();
    Ok(GatePlan { n: 3, rep_kind: RepKind::JordanWigner, pair, radius: s, phi, triangles, target, achieved, phase_error })
}
