//! Ball-class states: chart conversions, density matrices, purifications,
//! thermofield-double vectors, entropy and PPT checks.

use std::f64::consts::{LN_2, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clifford::GammaRep;
use crate::error::{Result, UhlError};
use crate::matcore::{
    hermitian_eig, matrix_exp_hermitian, partial_transpose, ComplexMatrix, C64, I, ONE,
};

/// Full-rank guard on `1 - |u|`.
pub const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    ChiBeta,
    TauR,
    Ball,
    Sphere,
}

/// A point of the parameter manifold in one of four charts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum StateCoords {
    ChiBeta { chi: f64, beta: f64, n: Vec<f64> },
    TauR { tau: f64, r: f64, n: Vec<f64> },
    Ball { u: Vec<f64> },
    /// `X = (X_0, X_1..X_{2N+1}, X_{2N+2})` on the unit sphere in `2N+3` dimensions.
    Sphere { x: Vec<f64> },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

fn unit_check(n: &[f64]) -> Result<()> {
    let r = norm(n);
    if (r - 1.0).abs() > 1e-12 {
        return Err(UhlError::ChartDomain(format!("|n| = {r} is not 1")));
    }
    Ok(())
}

fn default_direction(len: usize) -> Vec<f64> {
    let mut n = vec![0.0; len];
    n[0] = 1.0;
    n
}

impl StateCoords {
    pub fn chart(&self) -> Chart {
        match self {
            Self::ChiBeta { .. } => Chart::ChiBeta,
            Self::TauR { .. } => Chart::TauR,
            Self::Ball { .. } => Chart::Ball,
            Self::Sphere { .. } => Chart::Sphere,
        }
    }

    /// Length `2N+1` of the direction vector.
    pub fn vector_len(&self) -> usize {
        match self {
            Self::ChiBeta { n, .. } | Self::TauR { n, .. } => n.len(),
            Self::Ball { u } => u.len(),
            Self::Sphere { x } => x.len().saturating_sub(2),
        }
    }

    /// Canonical `(χ, β, n)` with `χ ∈ [0, 2π)`.
    pub fn to_chi_beta(&self) -> Result<(f64, f64, Vec<f64>)> {
        let (chi, beta, n) = match self {
            Self::ChiBeta { chi, beta, n } => {
                unit_check(n)?;
                if *beta < 0.0 {
                    return Err(UhlError::ChartDomain(format!("beta = {beta} < 0")));
                }
                (*chi, *beta, n.clone())
            }
            Self::TauR { tau, r, n } => {
                unit_check(n)?;
                if *r < 0.0 {
                    return Err(UhlError::ChartDomain(format!("r = {r} < 0")));
                }
                let x = tau_r_to_sphere(*tau, *r, n);
                return Self::Sphere { x }.to_chi_beta().map(|(c, b, m)| {
                    (c, b, if *r == 0.0 { n.clone() } else { m })
                });
            }
            Self::Ball { u } => {
                let r = norm(u);
                if r >= 1.0 - BOUNDARY_EPS {
                    return Err(UhlError::BoundaryState(r));
                }
                if r == 0.0 {
                    (0.0, 0.0, default_direction(u.len()))
                } else {
                    (0.0, r.atanh(), scaled(u, -1.0 / r))
                }
            }
            Self::Sphere { x } => {
                let s = norm(x);
                if (s - 1.0).abs() > 1e-12 {
                    return Err(UhlError::ChartDomain(format!("|X| = {s} is not 1")));
                }
                let last = x.len() - 1;
                let (x0, xl) = (x[0], x[last]);
                let c = x0.hypot(xl);
                let xv = &x[1..last];
                let t = norm(xv);
                if c <= 0.0 || t >= 1.0 - BOUNDARY_EPS {
                    return Err(UhlError::BoundaryState(t));
                }
                let beta = (1.0 / c).acosh();
                let n = if t == 0.0 { default_direction(xv.len()) } else { scaled(xv, 1.0 / t) };
                (x0.atan2(xl), beta, n)
            }
        };
        let chi = chi.rem_euclid(TAU);
        if beta.cosh() + chi.cos() <= 1e-12 {
            return Err(UhlError::ChartDomain("cosh(beta) + cos(chi) = 0".into()));
        }
        if beta.tanh() >= 1.0 - BOUNDARY_EPS {
            return Err(UhlError::BoundaryState(beta.tanh()));
        }
        Ok((chi, beta, n))
    }

    pub fn convert(&self, target: Chart) -> Result<StateCoords> {
        let (chi, beta, n) = self.to_chi_beta()?;
        Ok(match target {
            Chart::ChiBeta => Self::ChiBeta { chi, beta, n },
            Chart::TauR => {
                let (tau, r) = chi_beta_to_tau_r(chi, beta);
                Self::TauR { tau, r, n }
            }
            Chart::Ball => Self::Ball { u: scaled(&n, -beta.tanh()) },
            Chart::Sphere => {
                let mut x = Vec::with_capacity(n.len() + 2);
                x.push(chi.sin() / beta.cosh());
                x.extend(n.iter().map(|v| v * beta.tanh()));
                x.push(chi.cos() / beta.cosh());
                Self::Sphere { x }
            }
        })
    }

    /// Ball vector `u = -tanh(β) n`.
    pub fn ball_vector(&self) -> Result<Vec<f64>> {
        let (_, beta, n) = self.to_chi_beta()?;
        Ok(scaled(&n, -beta.tanh()))
    }

    /// Half-angle vector `a = -tanh(β/2) n`.
    pub fn half_angle_vector(&self) -> Result<Vec<f64>> {
        let (_, beta, n) = self.to_chi_beta()?;
        Ok(scaled(&n, -(beta / 2.0).tanh()))
    }
}

/// `τ = sinχ Ω`, `r = sinhβ Ω`, `Ω = 1/(coshβ + cosχ)`.
pub fn chi_beta_to_tau_r(chi: f64, beta: f64) -> (f64, f64) {
    let omega = 1.0 / (beta.cosh() + chi.cos());
    (chi.sin() * omega, beta.sinh() * omega)
}

fn tau_r_to_sphere(tau: f64, r: f64, n: &[f64]) -> Vec<f64> {
    let d = 1.0 + tau * tau + r * r;
    let mut x = Vec::with_capacity(n.len() + 2);
    x.push(2.0 * tau / d);
    x.extend(n.iter().map(|v| 2.0 * r * v / d));
    x.push((1.0 - tau * tau - r * r) / d);
    x
}

/// `C_u = sqrt(1 - |u|²)`
pub fn c_of(u: &[f64]) -> f64 {
    (1.0 - dot(u, u)).max(0.0).sqrt()
}

/// Ball vector from half-angle vector: `u = 2a/(1+a²)`.
pub fn ball_from_half(a: &[f64]) -> Vec<f64> {
    scaled(a, 2.0 / (1.0 + dot(a, a)))
}

/// Half-angle vector from ball vector: `a = u/(1+C_u)`.
pub fn half_from_ball(u: &[f64]) -> Vec<f64> {
    scaled(u, 1.0 / (1.0 + c_of(u)))
}

/// A ball-class state `ρ = (I + u·Γ)/2^N` with `u = -tanh(β) n`.
#[derive(Clone, Debug)]
pub struct BallState {
    pub u: Vec<f64>,
    pub rep: Arc<GammaRep>,
}

impl BallState {
    pub fn new(u: Vec<f64>, rep: Arc<GammaRep>) -> Result<Self> {
        rep.check_len(&u)?;
        let r = norm(&u);
        if r >= 1.0 - BOUNDARY_EPS {
            return Err(UhlError::BoundaryState(r));
        }
        Ok(Self { u, rep })
    }

    pub fn from_coords(c: &StateCoords, rep: Arc<GammaRep>) -> Result<Self> {
        Self::new(c.ball_vector()?, rep)
    }

    pub fn rho(&self) -> ComplexMatrix {
        rho_ball(&self.u, &self.rep).expect("validated on construction")
    }

    pub fn c(&self) -> f64 {
        c_of(&self.u)
    }

    pub fn beta(&self) -> f64 {
        norm(&self.u).atanh()
    }
}

/// `(I + u·Γ)/2^N`
pub fn rho_ball(u: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    rep.check_len(u)?;
    let r = norm(u);
    if r >= 1.0 - BOUNDARY_EPS {
        return Err(UhlError::BoundaryState(r));
    }
    Ok(rep.affine(ONE, u)?.scale_real(1.0 / rep.dim() as f64))
}

/// `e^{-βH(n)} / Tr e^{-βH(n)}` with `H(n) = n·Γ`, by spectral exponential.
pub fn thermal_rho(beta: f64, n: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    let h = rep.slash(n)?.scale_real(-beta);
    let e = matrix_exp_hermitian(&h)?;
    let z = e.trace().re;
    Ok(e.scale_real(1.0 / z))
}

/// `W(τ,r,n) = [(1+iτ)I - r n·Γ] / sqrt(2^N(1+τ²+r²))`
pub fn purification_w(c: &StateCoords, rep: &GammaRep) -> Result<ComplexMatrix> {
    let (chi, beta, n) = c.to_chi_beta()?;
    rep.check_len(&n)?;
    let (tau, r) = chi_beta_to_tau_r(chi, beta);
    let norm = 1.0 / ((rep.dim() as f64) * (1.0 + tau * tau + r * r)).sqrt();
    let mut w = rep.slash(&n)?.scale_real(-r);
    w += &rep.identity().scale(C64::new(1.0, tau));
    Ok(w.scale_real(norm))
}

/// `det W = (e^{iχ}/(2^N coshβ))^{2^{N-1}}`
pub fn det_w_closed(chi: f64, beta: f64, n_qubits: usize) -> C64 {
    let base = C64::from_polar(1.0 / ((1u64 << n_qubits) as f64 * beta.cosh()), chi);
    base.powu(1 << (n_qubits - 1))
}

/// Closed-form polar factors `(ρ^{1/2}, U)` of `W`.
pub fn polar_factors(c: &StateCoords, rep: &GammaRep) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (chi, beta, n) = c.to_chi_beta()?;
    rep.check_len(&n)?;
    let a = scaled(&n, -(beta / 2.0).tanh());
    let a2 = dot(&a, &a);
    let sqrt_rho = rep.affine(ONE, &a)?.scale_real(1.0 / ((rep.dim() as f64) * (1.0 + a2)).sqrt());
    Ok((sqrt_rho, u_polar(chi, &a, rep)?))
}

/// Unitary polar factor of `W`:
/// `e^{iχ/2} sqrt((coshβ+1)/(coshβ+cosχ)) [cos(χ/2) I - i sin(χ/2) a·Γ]`.
pub fn u_polar(chi: f64, a: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    let a2 = dot(a, a);
    if a2.sqrt() >= 1.0 - BOUNDARY_EPS {
        return Err(UhlError::BoundaryState(a2.sqrt()));
    }
    let cosh_b = (1.0 + a2) / (1.0 - a2);
    let denom = cosh_b + chi.cos();
    if denom <= 1e-12 {
        return Err(UhlError::ChartDomain("cosh(beta) + cos(chi) = 0".into()));
    }
    let pref = C64::from_polar(((cosh_b + 1.0) / denom).sqrt(), chi / 2.0);
    let m = rep.slash(a)?.scale(-I * (chi / 2.0).sin());
    let m = &m + &rep.identity().scale_real((chi / 2.0).cos());
    Ok(m.scale(pref))
}

/// `Ψ_{(I,J)} = W_{IJ}` with `I` slow.
pub fn tfd_vector(w: &ComplexMatrix) -> Vec<C64> {
    w.entries().to_vec()
}

/// `|Ψ⟩⟨Ψ|`
pub fn projector(psi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
}

/// `S = log(2^N coshβ) - β tanhβ`
pub fn entropy(beta: f64, n_qubits: usize) -> f64 {
    n_qubits as f64 * LN_2 + log_cosh(beta) - beta * beta.tanh()
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `-Tr(ρ log ρ)` from the spectrum.
pub fn entropy_oracle(rho: &ComplexMatrix) -> Result<f64> {
    let e = hermitian_eig(rho)?;
    Ok(-e.eigenvalues.iter().filter(|&&l| l > 0.0).map(|l| l * l.ln()).sum::<f64>())
}

/// Minimum partial-transpose eigenvalue for each qubit subset.
#[derive(Clone, Debug, Serialize)]
pub struct PptReport {
    pub minima: Vec<(u64, f64)>,
}

impl PptReport {
    pub fn min(&self) -> f64 {
        self.minima.iter().map(|m| m.1).fold(f64::INFINITY, f64::min)
    }
}

/// Partial transposes over every nonempty proper qubit subset.
pub fn ppt_check(state: &BallState) -> Result<PptReport> {
    let n = state.rep.n();
    if n < 2 {
        return Err(UhlError::NOutOfRange(n));
    }
    let rho = state.rho();
    let mut minima = Vec::new();
    for mask in 1..(1u64 << n) - 1 {
        let pt = partial_transpose(&rho, mask, n)?;
        minima.push((mask, hermitian_eig(&pt)?.eigenvalues[0]));
    }
    Ok(PptReport { minima })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{gamma_rep, RepKind};
    use crate::matcore::{partial_trace, polar_decompose, Side};

    fn unit(v: &[f64]) -> Vec<f64> {
        scaled(v, 1.0 / norm(v))
    }

    #[test]
    fn center_maps_to_origin() {
        let c = StateCoords::ChiBeta { chi: 0.0, beta: 0.0, n: vec![0.0, 1.0, 0.0] };
        match c.convert(Chart::TauR).unwrap() {
            StateCoords::TauR { tau, r, .. } => assert!(tau == 0.0 && r == 0.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn sphere_coordinates() {
        let n = unit(&[0.3, -0.1, 0.5, 0.2, 0.4]);
        let (chi, beta) = (1.3, 0.7);
        let c = StateCoords::ChiBeta { chi, beta, n: n.clone() };
        let StateCoords::Sphere { x } = c.convert(Chart::Sphere).unwrap() else { unreachable!() };
        assert!((x[0] - chi.sin() / beta.cosh()).abs() < 1e-15);
        assert!((x[6] - chi.cos() / beta.cosh()).abs() < 1e-15);
        assert!((norm(&x) - 1.0).abs() < 1e-14);
        let StateCoords::TauR { tau, .. } = c.convert(Chart::TauR).unwrap() else { unreachable!() };
        assert!((tau - x[0] / (1.0 + x[6])).abs() < 1e-14);
    }

    #[test]
    fn singular_chart_point() {
        let c = StateCoords::ChiBeta { chi: PI, beta: 0.0, n: vec![1.0, 0.0, 0.0] };
        assert!(matches!(c.convert(Chart::TauR), Err(UhlError::ChartDomain(_))));
    }

    #[test]
    fn boundary_rejected() {
        let rep = gamma_rep(1, RepKind::Recursive).unwrap();
        assert!(matches!(rho_ball(&[1.0, 0.0, 0.0], &rep), Err(UhlError::BoundaryState(_))));
        assert!(BallState::new(vec![0.0, 0.0, 0.999_999_999_5], rep).is_err());
    }

    #[test]
    fn maximally_mixed_at_origin() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let rho = rho_ball(&[0.0; 5], &rep).unwrap();
        assert!(rho.distance(&rep.identity().scale_real(0.25)) < 1e-16);
    }

    #[test]
    fn eigenvalues_at_half_radius() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let u = scaled(&unit(&[1.0, 2.0, -1.0, 0.5, 0.3]), 0.5);
        let e = hermitian_eig(&rho_ball(&u, &rep).unwrap()).unwrap();
        let want = [0.125, 0.125, 0.375, 0.375];
        for (a, b) in e.eigenvalues.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_form_matches() {
        let rep = gamma_rep(3, RepKind::Recursive).unwrap();
        let n = unit(&[0.2, 0.1, -0.7, 0.3, 0.3, -0.2, 0.4]);
        let beta: f64 = 0.83;
        let u = scaled(&n, -beta.tanh());
        assert!(rho_ball(&u, &rep).unwrap().distance(&thermal_rho(beta, &n, &rep).unwrap()) < 1e-12);
    }

    #[test]
    fn purification_properties() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let n = unit(&[0.4, -0.3, 0.1, 0.8, -0.2]);
        let (chi, beta) = (2.1, 0.9);
        let c = StateCoords::ChiBeta { chi, beta, n: n.clone() };
        let w = purification_w(&c, &rep).unwrap();
        let rho = rho_ball(&scaled(&n, -beta.tanh()), &rep).unwrap();
        assert!(w.matmul(&w.adjoint()).distance(&rho) < 1e-11);
        assert!((w.frobenius_norm() - 1.0).abs() < 1e-11);
        assert!((w.determinant() - det_w_closed(chi, beta, 2)).norm() < 1e-10);
        assert!(w.matmul(&w.adjoint()).distance(&w.adjoint().matmul(&w)) < 1e-11);
    }

    #[test]
    fn vacuum_purification() {
        let rep = gamma_rep(2, RepKind::JordanWigner).unwrap();
        let c = StateCoords::TauR { tau: 0.0, r: 0.0, n: vec![1.0, 0.0, 0.0, 0.0, 0.0] };
        let w = purification_w(&c, &rep).unwrap();
        assert!(w.distance(&rep.identity().scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn polar_closed_vs_generic() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let c = StateCoords::ChiBeta { chi: 0.9, beta: 1.4, n: unit(&[1.0, 0.0, 2.0, -1.0, 0.5]) };
        let w = purification_w(&c, &rep).unwrap();
        let (s, u) = polar_factors(&c, &rep).unwrap();
        let (p, v) = polar_decompose(&w).unwrap();
        assert!(s.distance(&p) < 1e-10);
        assert!(u.distance(&v) < 1e-10);
        assert!(s.matmul(&u).distance(&w) < 1e-10);
        assert!(s.commutator(&u).max_abs() < 1e-12);
        let c0 = StateCoords::ChiBeta { chi: 0.0, beta: 1.4, n: unit(&[1.0, 0.0, 2.0, -1.0, 0.5]) };
        let (_, u0) = polar_factors(&c0, &rep).unwrap();
        assert!(u0.distance(&rep.identity()) < 1e-12);
    }

    #[test]
    fn tfd_left_marginal() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let c = StateCoords::ChiBeta { chi: 0.4, beta: 0.6, n: unit(&[0.0, 1.0, 1.0, 0.0, 1.0]) };
        let w = purification_w(&c, &rep).unwrap();
        let psi = tfd_vector(&w);
        let left = partial_trace(&projector(&psi), Side::Left, 4).unwrap();
        assert!(left.distance(&w.matmul(&w.adjoint())) < 1e-14);
    }

    #[test]
    fn entropy_limits() {
        assert!((entropy(0.0, 3) - 3.0 * LN_2).abs() < 1e-15);
        assert!((entropy(30.0, 2) - LN_2).abs() < 1e-8);
        let rep = gamma_rep(3, RepKind::Recursive).unwrap();
        let beta: f64 = 0.77;
        let u = scaled(&unit(&[1.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.5]), -beta.tanh());
        let s = entropy_oracle(&rho_ball(&u, &rep).unwrap()).unwrap();
        assert!((s - entropy(beta, 3)).abs() < 1e-10);
    }

    #[test]
    fn ppt_at_origin() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let st = BallState::new(vec![0.0; 5], rep).unwrap();
        let r = ppt_check(&st).unwrap();
        assert_eq!(r.minima.len(), 2);
        for (_, m) in r.minima {
            assert!((m - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn coords_json_round_trip() {
        let c = StateCoords::ChiBeta { chi: 0.1, beta: 1.0 / 3.0, n: vec![0.6, 0.0, 0.8] };
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with("{\"chart\":\"chi_beta\""));
        let back: StateCoords = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
