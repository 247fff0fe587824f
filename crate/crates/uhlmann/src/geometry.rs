//! Bures geometry of the ball class: fidelity, metric, geodesics, the optimal
//! measurement operator, the Uhlmann connection and the instanton gauge fields.

use crate::clifford::GammaRep;
use crate::error::{Result, UhlError};
use crate::matcore::{
    hermitian_eig, matrix_exp_anti_hermitian, matrix_sqrt_psd, ComplexMatrix, C64, I, ONE,
};
use crate::tfd::{c_of, dot, norm, rho_ball, scaled, BOUNDARY_EPS};

fn interior(u: &[f64]) -> Result<()> {
    let r = norm(u);
    if r >= 1.0 - BOUNDARY_EPS {
        Err(UhlError::BoundaryState(r))
    } else {
        Ok(())
    }
}

/// `F(u,v) = ½(1 + C_u C_v + u·v)`
pub fn fidelity_closed(u: &[f64], v: &[f64]) -> Result<f64> {
    interior(u)?;
    interior(v)?;
    Ok(0.5 * (1.0 + c_of(u) * c_of(v) + dot(u, v)))
}

/// `[Tr (ρ1^{1/2} ρ2 ρ1^{1/2})^{1/2}]²`
pub fn fidelity_oracle(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<f64> {
    let s1 = matrix_sqrt_psd(rho1)?;
    let inner = s1.matmul(rho2).matmul(&s1).hermitian_part();
    let t = matrix_sqrt_psd(&inner)?.trace().re;
    Ok(t * t)
}

fn check_state(rho: &ComplexMatrix) -> Result<()> {
    let tr = rho.trace();
    if (tr - ONE).norm() > 1e-10 {
        return Err(UhlError::NotState(format!("trace {tr}")));
    }
    let e = hermitian_eig(rho).map_err(|e| UhlError::NotState(e.to_string()))?;
    if e.eigenvalues[0] <= 0.0 {
        return Err(UhlError::NotState(format!("min eigenvalue {}", e.eigenvalues[0])));
    }
    Ok(())
}

/// `d = sqrt(2(1 - sqrt F))` from the matrix fidelity.
pub fn bures_distance_oracle(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<f64> {
    check_state(rho1)?;
    check_state(rho2)?;
    let f = fidelity_oracle(rho1, rho2)?;
    Ok((2.0 * (1.0 - f.sqrt().min(1.0))).max(0.0).sqrt())
}

/// Bures metric `g_{jk}` at a ball point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    pub g: Vec<Vec<f64>>,
}

impl MetricTensor {
    pub fn contract(&self, a: &[f64], b: &[f64]) -> f64 {
        self.g.iter().zip(a).map(|(row, x)| x * dot(row, b)).sum()
    }
}

/// `g_{jk} = ¼[δ_{jk} + |u|²/(1-|u|²) û_j û_k]`
pub fn bures_metric(u: &[f64]) -> Result<MetricTensor> {
    interior(u)?;
    let u2 = dot(u, u);
    let k = 1.0 / (1.0 - u2);
    let g = (0..u.len())
        .map(|j| {
            (0..u.len())
                .map(|l| 0.25 * (if j == l { 1.0 } else { 0.0 } + k * u[j] * u[l]))
                .collect()
        })
        .collect();
    Ok(MetricTensor { g })
}

/// `ds² = (dβ² + sinh²β |dn|²) / (4 cosh²β)`
pub fn hyperbolic_line_element(beta: f64, dbeta: f64, dn: &[f64]) -> f64 {
    (dbeta * dbeta + beta.sinh().powi(2) * dot(dn, dn)) / (4.0 * beta.cosh().powi(2))
}

/// Geodesic length `D` with `cos D = sqrt F`, in `[0, π/2]`.
pub fn geodesic_length(u: &[f64], v: &[f64]) -> Result<f64> {
    Ok(fidelity_closed(u, v)?.sqrt().min(1.0).acos())
}

fn sin2d(u: &[f64], v: &[f64]) -> Result<(f64, f64)> {
    let d = geodesic_length(u, v)?;
    let s = (2.0 * d).sin();
    if s < 1e-12 {
        return Err(UhlError::CollinearDegenerate);
    }
    Ok((d, s))
}

/// `m(t) = [sin(2t) v + sin(2D-2t) u] / sin(2D)`
pub fn geodesic_point(u: &[f64], v: &[f64], t: f64) -> Result<Vec<f64>> {
    let (d, s) = sin2d(u, v)?;
    let (a, b) = ((2.0 * t).sin() / s, (2.0 * d - 2.0 * t).sin() / s);
    Ok(u.iter().zip(v).map(|(x, y)| b * x + a * y).collect())
}

/// `|m(t)|² = 1 - [C_v sin2t + C_u sin(2D-2t)]² / sin²2D`
pub fn geodesic_norm_sq(u: &[f64], v: &[f64], t: f64) -> Result<f64> {
    let (d, s) = sin2d(u, v)?;
    let k = c_of(v) * (2.0 * t).sin() + c_of(u) * (2.0 * d - 2.0 * t).sin();
    Ok(1.0 - k * k / (s * s))
}

/// Parameter `t*` at which the extended geodesic reaches the boundary.
pub fn boundary_parameter(u: &[f64], v: &[f64]) -> Result<f64> {
    let (cu, cv) = (c_of(u), c_of(v));
    let c2d = dot(u, v) + cu * cv;
    let cot = (c2d - cv / cu) / (1.0 - c2d * c2d).sqrt();
    Ok(0.5 * (1.0f64).atan2(cot))
}

/// `M = [(1 + C_v/C_u) I + v·Γ - (C_v/C_u) u·Γ] / (2 cos D)`
pub fn optimal_measurement(u: &[f64], v: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    let f = fidelity_closed(u, v)?;
    let k = c_of(v) / c_of(u);
    let w: Vec<f64> = u.iter().zip(v).map(|(x, y)| y - k * x).collect();
    Ok(rep.affine(C64::new(1.0 + k, 0.0), &w)?.scale_real(0.5 / f.sqrt()))
}

/// Eigenvalues `(M_+, M_-)` of the optimal measurement.
pub fn measurement_eigenvalues(u: &[f64], v: &[f64]) -> Result<(f64, f64)> {
    let cd = fidelity_closed(u, v)?.sqrt();
    let (cu, cv) = (c_of(u), c_of(v));
    let ar = 0.5 * (cu + cv);
    let ge = (cu * cv).sqrt();
    let root = (1.0 - (ge / ar).powi(2) * cd * cd).max(0.0).sqrt();
    let pre = ar / (cu * cd);
    Ok((pre * (1.0 + root), pre * (1.0 - root)))
}

/// `W(t) = (I cos t + (M - I cos D) sin t / sin D) ρ_u^{1/2}`
pub fn parallel_lift(u: &[f64], v: &[f64], t: f64, rep: &GammaRep) -> Result<ComplexMatrix> {
    let (d, _) = sin2d(u, v)?;
    let m = optimal_measurement(u, v, rep)?;
    let x = &m.scale_real(t.sin() / d.sin()) + &rep.identity().scale_real(t.cos() - d.cos() * t.sin() / d.sin());
    let sqrt_rho = matrix_sqrt_psd(&rho_ball(u, rep)?)?;
    Ok(x.matmul(&sqrt_rho))
}

fn tangent(n: &[f64], dn: &[f64]) -> Result<()> {
    let p = dot(n, dn);
    if p.abs() > 1e-10 {
        return Err(UhlError::NotTangent(p));
    }
    let r = norm(n);
    if (r - 1.0).abs() > 1e-10 {
        return Err(UhlError::ChartDomain(format!("|n| = {r} is not 1")));
    }
    Ok(())
}

/// `𝒜 = ¼(1 - sech β)[n·Γ, δn·Γ]`
pub fn uhlmann_connection(beta: f64, n: &[f64], _dbeta: f64, dn: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    tangent(n, dn)?;
    let c = rep.slash(n)?.commutator(&rep.slash(dn)?);
    Ok(c.scale_real(0.25 * (1.0 - 1.0 / beta.cosh())))
}

/// Eigenbasis form of the connection for a smooth full-rank family `ρ(s)` at
/// `s = 0`, using spectral projectors of eigenvalue clusters:
/// `𝒜 = -Σ_{k≠l} (√λ_k - √λ_l)²/(λ_k + λ_l) P_k dP_l P_l`.
pub fn connection_oracle(family: &dyn Fn(f64) -> Result<ComplexMatrix>, h: f64) -> Result<ComplexMatrix> {
    let clusters = |rho: &ComplexMatrix| -> Result<Vec<(f64, ComplexMatrix)>> {
        let e = hermitian_eig(rho)?;
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (k, &l) in e.eigenvalues.iter().enumerate() {
            match out.last_mut() {
                Some((l0, idx)) if (l - *l0).abs() <= 1e-9 => idx.push(k),
                _ => out.push((l, vec![k])),
            }
        }
        let v = &e.eigenvectors;
        Ok(out
            .into_iter()
            .map(|(l, idx)| {
                let p = ComplexMatrix::from_fn(v.dim(), |i, j| idx.iter().map(|&k| v[(i, k)] * v[(j, k)].conj()).sum());
                (l, p)
            })
            .collect())
    };
    let c0 = clusters(&family(0.0)?)?;
    let cp = clusters(&family(h)?)?;
    let cm = clusters(&family(-h)?)?;
    if cp.len() != c0.len() || cm.len() != c0.len() {
        return Err(UhlError::NotPositive(f64::NAN));
    }
    let dim = c0[0].1.dim();
    let mut a = ComplexMatrix::zeros(dim);
    for (l, (ll, pl)) in c0.iter().enumerate() {
        let dp = (&cp[l].1 - &cm[l].1).scale_real(0.5 / h);
        for (k, (lk, pk)) in c0.iter().enumerate() {
            if k == l {
                continue;
            }
            let w = (lk.sqrt() - ll.sqrt()).powi(2) / (lk + ll);
            a += &pk.matmul(&dp).matmul(pl).scale_real(-w);
        }
    }
    Ok(a)
}

/// `ρ(β + sδβ, (n + sδn)/|n + sδn|)` with `u = -tanh(β) n`.
pub fn beta_n_family<'a>(
    beta: f64,
    n: &'a [f64],
    dbeta: f64,
    dn: &'a [f64],
    rep: &'a GammaRep,
) -> impl Fn(f64) -> Result<ComplexMatrix> + 'a {
    move |s| {
        let m: Vec<f64> = n.iter().zip(dn).map(|(a, b)| a + s * b).collect();
        let m = scaled(&m, 1.0 / norm(&m));
        rho_ball(&scaled(&m, -(beta + s * dbeta).tanh()), rep)
    }
}

/// Parallel-translation operator with `δρ = 𝒢ρ + ρ𝒢`:
/// `𝒢 = -½[tanhβ δβ I + (n·Γ) δβ + tanhβ (δn·Γ)]`.
pub fn parallel_translation_g(beta: f64, n: &[f64], dbeta: f64, dn: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    tangent(n, dn)?;
    let t = beta.tanh();
    let v: Vec<f64> = n.iter().zip(dn).map(|(a, b)| a * dbeta + t * b).collect();
    Ok(rep.affine(C64::new(t * dbeta, 0.0), &v)?.scale_real(-0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Charge {
    Plus,
    Minus,
}

impl Charge {
    fn sign(self) -> f64 {
        match self {
            Charge::Plus => 1.0,
            Charge::Minus => -1.0,
        }
    }
}

/// `A_± = ±i(r dτ - τ dr)·Γ/(1+R²) + ½[r·Γ, dr·Γ]/(1+R²)` with Cartesian `r`.
pub fn instanton_gauge_cartesian(
    tau: f64,
    r: &[f64],
    dtau: f64,
    dr: &[f64],
    charge: Charge,
    rep: &GammaRep,
) -> Result<ComplexMatrix> {
    let d = 1.0 + tau * tau + dot(r, r);
    let w: Vec<f64> = r.iter().zip(dr).map(|(a, b)| a * dtau - tau * b).collect();
    let lin = rep.slash(&w)?.scale(I * charge.sign() / d);
    let quad = rep.slash(r)?.commutator(&rep.slash(dr)?).scale_real(0.5 / d);
    Ok(&lin + &quad)
}

/// Instanton field in polar form `(τ, r, n)` with tangent `(δτ, δr, δn)`.
#[allow(clippy::too_many_arguments)]
pub fn instanton_gauge(
    tau: f64,
    r: f64,
    n: &[f64],
    dtau: f64,
    dr: f64,
    dn: &[f64],
    charge: Charge,
    rep: &GammaRep,
) -> Result<ComplexMatrix> {
    tangent(n, dn)?;
    let rv = scaled(n, r);
    let drv: Vec<f64> = n.iter().zip(dn).map(|(a, b)| dr * a + r * b).collect();
    instanton_gauge_cartesian(tau, &rv, dtau, &drv, charge, rep)
}

/// `X = X_0 I - i X·Γ` on the sphere image of `(τ, r)`, with `X_{2N+2}`.
fn embedding(tau: f64, r: &[f64], rep: &GammaRep) -> Result<(ComplexMatrix, f64)> {
    let d = 1.0 + tau * tau + dot(r, r);
    let xv = scaled(r, 2.0 / d);
    let x = &rep.identity().scale_real(2.0 * tau / d) - &rep.slash(&xv)?.scale(I);
    Ok((x, (1.0 - tau * tau - dot(r, r)) / d))
}

/// `A_+ = Im(X*dX)/(2(1+X_{2N+2}))`, `A_- = Im(X dX*)/(2(1+X_{2N+2}))`, with
/// `dX` by central differences.
pub fn instanton_from_embedding(
    tau: f64,
    r: &[f64],
    dtau: f64,
    dr: &[f64],
    charge: Charge,
    rep: &GammaRep,
    h: f64,
) -> Result<ComplexMatrix> {
    let shift = |s: f64| -> Vec<f64> { r.iter().zip(dr).map(|(a, b)| a + s * b).collect() };
    let (x, xl) = embedding(tau, r, rep)?;
    let (xp, _) = embedding(tau + h * dtau, &shift(h), rep)?;
    let (xm, _) = embedding(tau - h * dtau, &shift(-h), rep)?;
    let dx = (&xp - &xm).scale_real(0.5 / h);
    let prod = match charge {
        Charge::Plus => x.adjoint().matmul(&dx),
        Charge::Minus => x.matmul(&dx.adjoint()),
    };
    Ok(prod.anti_hermitian_part().scale_real(0.5 / (1.0 + xl)))
}

/// `g = (τ I - i r·Γ)/R`
pub fn gauge_g(tau: f64, r: &[f64], rep: &GammaRep) -> Result<ComplexMatrix> {
    let big_r = (tau * tau + dot(r, r)).sqrt();
    let g = &rep.identity().scale_real(tau) - &rep.slash(r)?.scale(I);
    Ok(g.scale_real(1.0 / big_r))
}

/// `g*dg` (plus) or `g dg*` (minus), by central differences.
pub fn pure_gauge(tau: f64, r: &[f64], dtau: f64, dr: &[f64], charge: Charge, rep: &GammaRep, h: f64) -> Result<ComplexMatrix> {
    let shift = |s: f64| -> Vec<f64> { r.iter().zip(dr).map(|(a, b)| a + s * b).collect() };
    let g = gauge_g(tau, r, rep)?;
    let gp = gauge_g(tau + h * dtau, &shift(h), rep)?;
    let gm = gauge_g(tau - h * dtau, &shift(-h), rep)?;
    let dg = (&gp - &gm).scale_real(0.5 / h);
    Ok(match charge {
        Charge::Plus => g.adjoint().matmul(&dg),
        Charge::Minus => g.matmul(&dg.adjoint()),
    })
}

/// Holonomy defect `‖P - I‖_F / ε²` of the instanton field around a square of
/// side `ε` spanned by unit directions `e1, e2` in `(τ, r)` space.
pub fn plaquette_curvature(point: &[f64], e1: &[f64], e2: &[f64], eps: f64, charge: Charge, rep: &GammaRep) -> Result<f64> {
    let at = |p: &[f64], dir: &[f64], len: f64| -> Result<ComplexMatrix> {
        let mid: Vec<f64> = p.iter().zip(dir).map(|(a, b)| a + 0.5 * len * b).collect();
        let a = instanton_gauge_cartesian(mid[0], &mid[1..], dir[0] * len, &scaled(&dir[1..], len), charge, rep)?;
        matrix_exp_anti_hermitian(&a.scale_real(-1.0))
    };
    let corners = [
        point.to_vec(),
        point.iter().zip(e1).map(|(a, b)| a + eps * b).collect::<Vec<_>>(),
        point.iter().zip(e1).zip(e2).map(|((a, b), c)| a + eps * (b + c)).collect(),
        point.iter().zip(e2).map(|(a, b)| a + eps * b).collect(),
    ];
    let dirs = [e1.to_vec(), e2.to_vec(), scaled(e1, -1.0), scaled(e2, -1.0)];
    let mut p = rep.identity();
    for (c, d) in corners.iter().zip(&dirs) {
        p = at(c, d, eps)?.matmul(&p);
    }
    Ok((&p - &rep.identity()).frobenius_norm() / (eps * eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{gamma_rep, RepKind};

    fn unit(v: &[f64]) -> Vec<f64> {
        scaled(v, 1.0 / norm(v))
    }

    fn project_out(dn: &[f64], n: &[f64]) -> Vec<f64> {
        let p = dot(dn, n);
        dn.iter().zip(n).map(|(a, b)| a - p * b).collect()
    }

    #[test]
    fn fidelity_special_values() {
        let u = [0.3, -0.4, 0.1];
        assert!((fidelity_closed(&u, &u).unwrap() - 1.0).abs() < 1e-15);
        let f0 = fidelity_closed(&u, &[0.0; 3]).unwrap();
        assert!((f0 - 0.5 * (1.0 + c_of(&u))).abs() < 1e-15);
        assert!(fidelity_closed(&[1.0, 0.0, 0.0], &u).is_err());
    }

    #[test]
    fn fidelity_matches_oracle() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let u = [0.3, -0.2, 0.5, 0.1, 0.0];
        let v = [-0.1, 0.6, 0.2, -0.3, 0.25];
        let fo = fidelity_oracle(&rho_ball(&u, &rep).unwrap(), &rho_ball(&v, &rep).unwrap()).unwrap();
        assert!((fo - fidelity_closed(&u, &v).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn bures_distance_is_zero_on_diagonal() {
        let rep = gamma_rep(1, RepKind::Recursive).unwrap();
        let r = rho_ball(&[0.2, 0.3, -0.1], &rep).unwrap();
        assert!(bures_distance_oracle(&r, &r).unwrap() < 1e-7);
        let bad = ComplexMatrix::identity(2);
        assert!(matches!(bures_distance_oracle(&bad, &r), Err(UhlError::NotState(_))));
    }

    #[test]
    fn metric_at_center_is_isotropic() {
        let g = bures_metric(&[0.0; 5]).unwrap();
        for j in 0..5 {
            for k in 0..5 {
                assert_eq!(g.g[j][k], if j == k { 0.25 } else { 0.0 });
            }
        }
    }

    #[test]
    fn metric_matches_hyperbolic_form() {
        let n = unit(&[0.2, 0.5, -0.3]);
        let dn = project_out(&[0.1, -0.2, 0.4], &n);
        let (beta, dbeta): (f64, f64) = (0.8, 0.3);
        let u = scaled(&n, -beta.tanh());
        let du: Vec<f64> = n.iter().zip(&dn).map(|(a, b)| -(a * dbeta / beta.cosh().powi(2) + beta.tanh() * b)).collect();
        let lhs = bures_metric(&u).unwrap().contract(&du, &du);
        assert!((lhs - hyperbolic_line_element(beta, dbeta, &dn)).abs() < 1e-14);
    }

    #[test]
    fn geodesic_endpoints_and_norm() {
        let u = [0.3, -0.2, 0.4];
        let v = [-0.5, 0.1, 0.2];
        let d = geodesic_length(&u, &v).unwrap();
        let m0 = geodesic_point(&u, &v, 0.0).unwrap();
        let m1 = geodesic_point(&u, &v, d).unwrap();
        for k in 0..3 {
            assert!((m0[k] - u[k]).abs() < 1e-12 && (m1[k] - v[k]).abs() < 1e-12);
        }
        let t = 0.37 * d;
        let m = geodesic_point(&u, &v, t).unwrap();
        assert!((dot(&m, &m) - geodesic_norm_sq(&u, &v, t).unwrap()).abs() < 1e-12);
        let ts = boundary_parameter(&u, &v).unwrap();
        assert!(ts > d);
        assert!((geodesic_norm_sq(&u, &v, ts).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(geodesic_point(&u, &u, 0.0), Err(UhlError::CollinearDegenerate)));
    }

    #[test]
    fn measurement_special_cases() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let u = [0.1, 0.2, -0.3, 0.05, 0.0];
        assert!(optimal_measurement(&u, &u, &rep).unwrap().distance(&rep.identity()) < 1e-14);
        let v = [0.4, -0.1, 0.2, 0.0, 0.3];
        let m = optimal_measurement(&[0.0; 5], &v, &rep).unwrap();
        let s = matrix_sqrt_psd(&rho_ball(&v, &rep).unwrap()).unwrap().scale_real(2.0);
        assert!(m.distance(&s) < 1e-12);
    }

    #[test]
    fn connection_vanishes_at_center_and_is_traceless() {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let n = unit(&[1.0, 0.0, 1.0, 0.0, -1.0]);
        let dn = project_out(&[0.3, 0.2, 0.1, -0.4, 0.0], &n);
        assert!(uhlmann_connection(0.0, &n, 0.1, &dn, &rep).unwrap().max_abs() < 1e-16);
        let a = uhlmann_connection(1.1, &n, 0.1, &dn, &rep).unwrap();
        assert!(a.trace().norm() < 1e-12);
        assert!((&a + &a.adjoint()).max_abs() < 1e-12);
        assert!(matches!(uhlmann_connection(1.0, &n, 0.0, &n, &rep), Err(UhlError::NotTangent(_))));
    }

    #[test]
    fn instanton_tau_zero_slice_matches_connection() {
        let rep = gamma_rep(2, RepKind::JordanWigner).unwrap();
        let n = unit(&[0.3, 0.1, -0.5, 0.7, 0.2]);
        let dn = project_out(&[0.2, -0.3, 0.1, 0.0, 0.5], &n);
        let beta: f64 = 0.9;
        let r = (beta / 2.0).tanh();
        let a = uhlmann_connection(beta, &n, 0.0, &dn, &rep).unwrap();
        for q in [Charge::Plus, Charge::Minus] {
            let b = instanton_gauge(0.0, r, &n, 0.0, 0.3, &dn, q, &rep).unwrap();
            assert!(a.distance(&b) < 1e-12);
        }
    }
}
