//! Seeded oracle-versus-closed-form suites driving `uhl validate`.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::clifford::{equivalence_permutation, gamma_rep, intertwiner, pauli, GammaRep, RepKind};
use crate::error::{Result, UhlError};
use crate::gates::{axis_triangle, axis_triangle_closed, gate_distance, iswap_synthesize, ISWAP_RADIUS};
use crate::geometry::{
    beta_n_family, bures_distance_oracle, bures_metric, connection_oracle, fidelity_closed, fidelity_oracle,
    instanton_from_embedding, instanton_gauge, instanton_gauge_cartesian, measurement_eigenvalues,
    optimal_measurement, parallel_translation_g, uhlmann_connection, Charge,
};
use crate::holonomy::{
    boost_compose, boost_matrix, extract_angle_axis, left_right_duality_check, loop_unitary, rotation_angle_ball,
    rotation_angle_half, transport_unitary_closed, transport_unitary_oracle, triangle_anholonomy,
    triangle_cos_half_delta, LoopSpec, TransportPath,
};
use crate::interference::{
    fit_curve, intensity_curve, interference_observables, mach_zehnder_full, mach_zehnder_simulate,
    phase_visibility_triangle, right_marginal_residual, segment_z, total_anholonomy, ua_interference, uniform_grid,
};
use crate::matcore::{hermitian_eig, kron_all, ComplexMatrix, I};
use crate::tfd::{
    ball_from_half, c_of, det_w_closed, dot, entropy, entropy_oracle, norm, ppt_check, purification_w, rho_ball,
    polar_factors, scaled, thermal_rho, BallState, StateCoords,
};

pub const SUITES: [&str; 9] =
    ["clifford", "state", "fidelity", "transport", "connection", "triangle", "duality", "interference", "gates"];

pub const DEFAULT_SEED: u64 = 0xDEFA17;

#[derive(Clone, Debug)]
pub struct ValidateConfig {
    pub n: usize,
    pub rep: RepKind,
    pub seed: u64,
    pub tol_scale: f64,
    pub smoke: bool,
    pub suite: Option<String>,
}

impl ValidateConfig {
    pub fn new(n: usize) -> Self {
        Self { n, rep: RepKind::Recursive, seed: DEFAULT_SEED, tol_scale: 1.0, smoke: false, suite: None }
    }

    fn count(&self, full: usize) -> usize {
        if self.smoke {
            (full / 10).max(2)
        } else {
            full
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub rep: RepKind,
    pub seed: u64,
    pub smoke: bool,
    pub tol_scale: f64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

/// Running worst case of one residual family.
struct Tally {
    name: &'static str,
    cases: usize,
    worst: f64,
    bound: Bound,
    tol: f64,
}

impl Tally {
    fn at_most(name: &'static str, tol: f64) -> Self {
        Self { name, cases: 0, worst: 0.0, bound: Bound::AtMost, tol }
    }

    fn at_least(name: &'static str, tol: f64) -> Self {
        Self { name, cases: 0, worst: f64::INFINITY, bound: Bound::AtLeast, tol }
    }

    fn push(&mut self, x: f64) {
        self.cases += 1;
        let worse = match self.bound {
            Bound::AtMost => x.is_nan() || x > self.worst,
            Bound::AtLeast => x.is_nan() || x < self.worst,
        };
        if worse && !self.worst.is_nan() {
            self.worst = x;
        }
    }

    fn finish(self, scale: f64) -> Check {
        let tolerance = match self.bound {
            Bound::AtMost => self.tol * scale,
            Bound::AtLeast => self.tol,
        };
        let pass = self.cases > 0
            && match self.bound {
                Bound::AtMost => self.worst <= tolerance,
                Bound::AtLeast => self.worst >= tolerance,
            };
        Check { name: self.name.to_string(), cases: self.cases, value: self.worst, bound: self.bound, tolerance, pass }
    }
}

struct Suite {
    tallies: Vec<Tally>,
}

impl Suite {
    fn new() -> Self {
        Self { tallies: Vec::new() }
    }

    fn at_most(&mut self, name: &'static str, tol: f64) -> usize {
        self.tallies.push(Tally::at_most(name, tol));
        self.tallies.len() - 1
    }

    fn at_least(&mut self, name: &'static str, tol: f64) -> usize {
        self.tallies.push(Tally::at_least(name, tol));
        self.tallies.len() - 1
    }

    fn push(&mut self, k: usize, x: f64) {
        self.tallies[k].push(x);
    }

    fn finish(self, name: &str, scale: f64) -> SuiteReport {
        let checks: Vec<Check> = self.tallies.into_iter().map(|t| t.finish(scale)).collect();
        SuiteReport { name: name.to_string(), pass: checks.iter().all(|c| c.pass), checks, error: None }
    }
}

pub fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let idx = SUITES.iter().position(|s| *s == suite).unwrap_or(SUITES.len()) as u64;
    ChaCha8Rng::seed_from_u64(seed ^ (idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-6 {
            return scaled(&v, 1.0 / r);
        }
    }
}

/// Uniform direction, radius uniform on `[0, rmax)`.
pub fn random_ball<R: Rng + ?Sized>(rng: &mut R, len: usize, rmax: f64) -> Vec<f64> {
    let r = rng.random_range(0.0..rmax);
    scaled(&random_unit(rng, len), r)
}

pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, n: &[f64]) -> Vec<f64> {
    let v = random_unit(rng, n.len());
    let p = dot(&v, n);
    v.iter().zip(n).map(|(a, b)| a - p * b).collect()
}

fn both_reps(n: usize) -> Result<[std::sync::Arc<GammaRep>; 2]> {
    Ok([gamma_rep(n, RepKind::Recursive)?, gamma_rep(n, RepKind::JordanWigner)?])
}

/// Independent Jordan–Wigner table built from Pauli strings.
pub fn jordan_wigner_table(n: usize) -> Vec<ComplexMatrix> {
    let string = |q: usize, k: usize| -> ComplexMatrix {
        let f: Vec<ComplexMatrix> = (1..=n).map(|i| if i < q { pauli(3) } else if i == q { pauli(k) } else { pauli(0) }).collect();
        kron_all(&f.iter().collect::<Vec<_>>())
    };
    let mut out = Vec::new();
    for q in 1..=n {
        out.push(string(q, 1));
        out.push(string(q, 2));
    }
    let z: Vec<ComplexMatrix> = (0..n).map(|_| pauli(3)).collect();
    out.push(kron_all(&z.iter().collect::<Vec<_>>()));
    out
}

/// Two-qubit recursive table `σ1⊗1, σ2⊗σ1, σ2⊗σ2, σ2⊗σ3, σ3⊗1`.
pub fn recursive_table_n2() -> Vec<ComplexMatrix> {
    let p = pauli;
    [(1, 0), (2, 1), (2, 2), (2, 3), (3, 0)].iter().map(|&(a, b)| kron_all(&[&p(a), &p(b)])).collect()
}

fn table_residual(rep: &GammaRep, table: &[ComplexMatrix]) -> f64 {
    rep.gammas().iter().zip(table).map(|(g, t)| (g - t).max_abs()).fold(0.0, f64::max)
}

pub fn suite_clifford(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut s = Suite::new();
    let anti = s.at_most("anticommutator", 1e-12);
    let herm = s.at_most("hermitian_traceless", 1e-12);
    let jw = s.at_most("jordan_wigner_table", 1e-12);
    let equiv = s.at_most("intertwiner", 1e-10);
    let reps = both_reps(cfg.n)?;
    for rep in &reps {
        s.push(anti, rep.anticommutator_residual());
        for g in rep.gammas() {
            s.push(herm, g.hermiticity_residual().max(g.trace().norm()));
        }
    }
    s.push(jw, table_residual(&reps[1], &jordan_wigner_table(cfg.n)));
    if cfg.n == 2 {
        let k = s.at_most("recursive_table_n2", 1e-12);
        s.push(k, table_residual(&reps[0], &recursive_table_n2()));
    }
    let perm = equivalence_permutation(&reps[0], &reps[1]);
    match intertwiner(&reps[0], &reps[1], &perm) {
        Some(v) => {
            let r = (0..reps[0].len())
                .map(|j| reps[0].gamma(j).matmul(&v).distance(&v.matmul(reps[1].gamma(perm[j]))))
                .fold(0.0, f64::max);
            s.push(equiv, r);
        }
        None => s.push(equiv, f64::INFINITY),
    }
    Ok(s.finish("clifford", cfg.tol_scale))
}

fn random_chi_beta<R: Rng + ?Sized>(rng: &mut R, len: usize) -> StateCoords {
    StateCoords::ChiBeta { chi: rng.random_range(-3.0..3.0), beta: rng.random_range(0.05..2.5), n: random_unit(rng, len) }
}

pub fn suite_state(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "state");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let d = rep.dim() as f64;
    let mut s = Suite::new();
    let spec = s.at_most("spectrum", 1e-12);
    let ww = s.at_most("ww_thermal", 1e-11);
    let det = s.at_most("det_w_relative", 1e-10);
    let ent = s.at_most("entropy", 1e-10);
    let pol = s.at_most("polar_factors", 1e-10);
    let ppt = if cfg.n >= 2 { Some(s.at_most("ppt_negativity", 1e-10)) } else { None };
    for _ in 0..cfg.count(100) {
        let c = random_chi_beta(&mut rng, rep.len());
        let (chi, beta, n) = c.to_chi_beta()?;
        let u = c.ball_vector()?;
        let rho = rho_ball(&u, &rep)?;
        let ev = hermitian_eig(&rho)?.eigenvalues;
        let half = ev.len() / 2;
        let r = norm(&u);
        let worst = ev
            .iter()
            .enumerate()
            .map(|(k, l)| (l - if k < half { (1.0 - r) / d } else { (1.0 + r) / d }).abs())
            .fold(0.0, f64::max);
        s.push(spec, worst);
        let w = purification_w(&c, &rep)?;
        s.push(ww, w.matmul(&w.adjoint()).distance(&thermal_rho(beta, &n, &rep)?));
        let dc = det_w_closed(chi, beta, cfg.n);
        s.push(det, (w.determinant() - dc).norm() / dc.norm());
        s.push(ent, (entropy(beta, cfg.n) - entropy_oracle(&rho)?).abs());
        let (sq, uu) = polar_factors(&c, &rep)?;
        s.push(pol, sq.matmul(&uu).distance(&w));
        if let Some(k) = ppt {
            let m = ppt_check(&BallState::new(u.clone(), rep.clone())?)?.min();
            s.push(k, (-m).max(0.0));
        }
    }
    Ok(s.finish("state", cfg.tol_scale))
}

pub fn suite_fidelity(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "fidelity");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let len = rep.len();
    let mut s = Suite::new();
    let fid = s.at_most("fidelity_closed_vs_oracle", 1e-10);
    let met = s.at_most("metric_vs_distance_relative", 1e-4);
    let meas = s.at_most("measurement_spectrum", 1e-10);
    for _ in 0..cfg.count(200) {
        let u = random_ball(&mut rng, len, 0.95);
        let v = random_ball(&mut rng, len, 0.95);
        let fo = fidelity_oracle(&rho_ball(&u, &rep)?, &rho_ball(&v, &rep)?)?;
        s.push(fid, (fo - fidelity_closed(&u, &v)?).abs());
    }
    let h = 1e-3;
    for _ in 0..cfg.count(20) {
        let u = random_ball(&mut rng, len, 0.8);
        let du = random_unit(&mut rng, len);
        let p: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + 0.5 * h * b).collect();
        let m: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a - 0.5 * h * b).collect();
        let dist = bures_distance_oracle(&rho_ball(&p, &rep)?, &rho_ball(&m, &rep)?)?;
        let g = bures_metric(&u)?.contract(&du, &du);
        s.push(met, (dist * dist / (h * h) - g).abs() / g);
    }
    for _ in 0..cfg.count(20) {
        let u = random_ball(&mut rng, len, 0.9);
        let v = random_ball(&mut rng, len, 0.9);
        let (mp, mm) = measurement_eigenvalues(&u, &v)?;
        let ev = hermitian_eig(&optimal_measurement(&u, &v, &rep)?.hermitian_part())?.eigenvalues;
        s.push(meas, ev.iter().map(|l| (l - mp).abs().min((l - mm).abs())).fold(0.0, f64::max));
    }
    Ok(s.finish("fidelity", cfg.tol_scale))
}

pub fn suite_transport(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "transport");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let len = rep.len();
    let mut s = Suite::new();
    let cl = s.at_most("closed_vs_oracle", 1e-10);
    let inv = s.at_most("inverse_pair", 1e-10);
    let ang = s.at_most("rotation_angle", 1e-9);
    let charts = s.at_most("angle_chart_agreement", 1e-9);
    let boost = s.at_most("boost_composition", 1e-10);
    for _ in 0..cfg.count(200) {
        let a = random_ball(&mut rng, len, 0.9);
        let b = random_ball(&mut rng, len, 0.9);
        let closed = transport_unitary_closed(&a, &b, &rep)?;
        let ra = rho_ball(&ball_from_half(&a), &rep)?;
        let rb = rho_ball(&ball_from_half(&b), &rep)?;
        let uab = transport_unitary_oracle(&ra, &rb)?;
        let uba = transport_unitary_oracle(&rb, &ra)?;
        s.push(cl, closed.distance(&uab));
        s.push(inv, uab.matmul(&uba).distance(&rep.identity()));
        let dh = rotation_angle_half(&a, &b);
        let (dx, _) = extract_angle_axis(&closed, &rep)?;
        s.push(ang, (dh - dx).abs());
        s.push(charts, (dh - rotation_angle_ball(&ball_from_half(&a), &ball_from_half(&b))).abs());
    }
    for _ in 0..cfg.count(20) {
        let (bu, bv) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let uh = random_unit(&mut rng, len);
        let vh = random_unit(&mut rng, len);
        let (bw, wh) = boost_compose(bu, &uh, bv, &vh);
        let lu = boost_matrix(bu, &uh, &rep)?;
        let lv = boost_matrix(bv, &vh, &rep)?;
        let lw = boost_matrix(bw, &wh, &rep)?;
        let lhs = lv.matmul(&lu).matmul(&lu).matmul(&lv);
        s.push(boost, lhs.distance(&lw.matmul(&lw)) / lhs.frobenius_norm());
    }
    Ok(s.finish("transport", cfg.tol_scale))
}

pub fn suite_connection(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "connection");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let len = rep.len();
    let mut s = Suite::new();
    let anti = s.at_most("traceless_anti_hermitian", 1e-12);
    let orc = s.at_most("connection_vs_projector_oracle", 1e-6);
    let inst = s.at_most("instanton_restriction", 1e-12);
    let emb = s.at_most("instanton_vs_embedding", 1e-8);
    let gg = s.at_most("parallel_translation_g", 1e-10);
    for _ in 0..cfg.count(20) {
        let beta = rng.random_range(0.1..2.0);
        let dbeta = rng.random_range(-1.0..1.0);
        let n = random_unit(&mut rng, len);
        let dn = random_tangent(&mut rng, &n);
        let a = uhlmann_connection(beta, &n, dbeta, &dn, &rep)?;
        s.push(anti, a.trace().norm().max((&a + &a.adjoint()).max_abs()));
        let fam = beta_n_family(beta, &n, dbeta, &dn, &rep);
        s.push(orc, connection_oracle(&fam, 1e-5)?.distance(&a));
        let r = (beta / 2.0).tanh();
        for q in [Charge::Plus, Charge::Minus] {
            let dr = rng.random_range(-1.0..1.0);
            s.push(inst, instanton_gauge(0.0, r, &n, 0.0, dr, &dn, q, &rep)?.distance(&a));
        }
        let tau = rng.random_range(-1.0..1.0);
        let rv = random_ball(&mut rng, len, 1.5);
        let dtau = rng.random_range(-1.0..1.0);
        let drv = random_unit(&mut rng, len);
        for q in [Charge::Plus, Charge::Minus] {
            let closed = instanton_gauge_cartesian(tau, &rv, dtau, &drv, q, &rep)?;
            s.push(emb, closed.distance(&instanton_from_embedding(tau, &rv, dtau, &drv, q, &rep, 1e-5)?));
        }
        let g = parallel_translation_g(beta, &n, dbeta, &dn, &rep)?;
        let rho = rho_ball(&scaled(&n, -beta.tanh()), &rep)?;
        let du: Vec<f64> =
            n.iter().zip(&dn).map(|(x, y)| -(dbeta / beta.cosh().powi(2)) * x - beta.tanh() * y).collect();
        let drho = rep.slash(&du)?.scale_real(1.0 / rep.dim() as f64);
        s.push(gg, g.anticommutator(&rho).distance(&drho));
    }
    Ok(s.finish("connection", cfg.tol_scale))
}

fn random_triangle<R: Rng + ?Sized>(rng: &mut R, len: usize) -> [Vec<f64>; 3] {
    loop {
        let t = [random_ball(rng, len, 0.9), random_ball(rng, len, 0.9), random_ball(rng, len, 0.9)];
        let sep = |x: &[f64], y: &[f64]| norm(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());
        if sep(&t[0], &t[1]) > 1e-3 && sep(&t[1], &t[2]) > 1e-3 && sep(&t[2], &t[0]) > 1e-3 {
            return t;
        }
    }
}

pub fn suite_triangle(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "triangle");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let mut s = Suite::new();
    let orc = s.at_most("inversion_vs_oracle_chain", 1e-10);
    let cos = s.at_most("fidelity_angle", 1e-10);
    let cov = s.at_most("base_point_covariance", 1e-9);
    let back = s.at_most("out_and_back", 1e-12);
    for _ in 0..cfg.count(100) {
        let [a, b, c] = random_triangle(&mut rng, rep.len());
        let tri = triangle_anholonomy(&a, &b, &c, &rep)?;
        let spec = LoopSpec::half_angle(cfg.n, cfg.rep, vec![a.clone(), b.clone(), c.clone()]);
        s.push(orc, tri.unitary.distance(&loop_unitary(&spec, TransportPath::Oracle)?));
        let ch = triangle_cos_half_delta(&ball_from_half(&a), &ball_from_half(&b), &ball_from_half(&c))?;
        s.push(cos, ((tri.delta / 2.0).cos() - ch).abs());
        let rot = triangle_anholonomy(&b, &c, &a, &rep)?.unitary;
        let uba = transport_unitary_closed(&b, &a, &rep)?;
        s.push(cov, rot.distance(&uba.matmul(&tri.unitary).matmul(&uba.adjoint())));
        let ob = LoopSpec::half_angle(cfg.n, cfg.rep, vec![a.clone(), b.clone()]);
        s.push(back, loop_unitary(&ob, TransportPath::Closed)?.distance(&rep.identity()));
    }
    Ok(s.finish("triangle", cfg.tol_scale))
}

pub fn suite_duality(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "duality");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let mut s = Suite::new();
    let tri = s.at_most("triangle_left_vs_right", 1e-9);
    let quad = s.at_most("quadrilateral_left_vs_right", 1e-9);
    for _ in 0..cfg.count(10) {
        let t = random_triangle(&mut rng, rep.len());
        s.push(tri, left_right_duality_check(&LoopSpec::half_angle(cfg.n, cfg.rep, t.to_vec()))?);
    }
    for _ in 0..cfg.count(5).min(5) {
        let [a, b, c] = random_triangle(&mut rng, rep.len());
        let d = random_ball(&mut rng, rep.len(), 0.9);
        s.push(quad, left_right_duality_check(&LoopSpec::half_angle(cfg.n, cfg.rep, vec![a, b, c, d]))?);
    }
    Ok(s.finish("duality", cfg.tol_scale))
}

pub fn suite_interference(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg.seed, "interference");
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    let len = rep.len();
    let mut s = Suite::new();
    let seg = s.at_most("segment_matrix_vs_closed", 1e-10);
    let tri = s.at_most("triangle_matrix_vs_closed", 1e-10);
    let sim = s.at_most("simulator_vs_closed_curve", 1e-9);
    let fit = s.at_most("curve_fit_visibility_phase", 1e-9);
    let full = s.at_most("full_space_vs_reduced", 1e-10);
    let marg = s.at_most("right_marginal_law", 1e-10);
    let bound = s.at_most("visibility_excess", 0.0);
    let grid = uniform_grid(64);
    for case in 0..cfg.count(20) {
        let chi = if case == 0 { std::f64::consts::PI } else { rng.random_range(-3.1..3.1) };
        let a = random_ball(&mut rng, len, 0.9);
        let u = ball_from_half(&a);
        let rho = rho_ball(&u, &rep)?;
        let z = interference_observables(&ua_interference(chi, &a, &rep)?.adjoint(), &rho)?.z;
        s.push(seg, (z - segment_z(chi, c_of(&u))?).norm());

        let [_, b, c] = random_triangle(&mut rng, len);
        let spec = LoopSpec::half_angle(cfg.n, cfg.rep, vec![a.clone(), b.clone(), c.clone()]);
        let big_u = total_anholonomy(chi, &a, &spec)?;
        let res = interference_observables(&big_u, &rho)?;
        let zc = phase_visibility_triangle(chi, &u, &ball_from_half(&b), &ball_from_half(&c), cfg.n)?;
        s.push(tri, (res.z - zc).norm());
        s.push(bound, (res.visibility - 1.0).max(0.0));

        if case < 5 {
            let curve = mach_zehnder_simulate(&big_u, &rho.conj(), &grid)?;
            let closed = intensity_curve(res.z, &grid);
            s.push(sim, curve.iter().zip(&closed).map(|(x, y)| (x.1 - y.1).abs()).fold(0.0, f64::max));
            let (off, nu, ph) = fit_curve(&curve);
            let dph = crate::tfd::wrap_angle(ph - res.phase_shift).abs();
            s.push(fit, (off - 1.0).abs().max((nu - res.visibility).abs()).max(if nu > 1e-6 { dph } else { 0.0 }));
            s.push(marg, right_marginal_residual(&big_u, &rho)?);
            if cfg.n <= 2 {
                let t = grid[case * 7];
                s.push(full, (mach_zehnder_full(&big_u, &rho, t)? - curve[case * 7].1).abs());
            }
        }
    }
    if cfg.n > 2 {
        s.tallies.retain(|t| t.name != "full_space_vs_reduced");
    }
    Ok(s.finish("interference", cfg.tol_scale))
}

pub fn suite_gates(cfg: &ValidateConfig) -> Result<SuiteReport> {
    let mut s = Suite::new();
    let iswap = s.at_most("iswap_phase_error", 1e-10);
    let orc = s.at_most("iswap_oracle_reverification", 1e-9);
    let radius = s.at_most("vertex_radius", 1e-15);
    let order = s.at_most("commuting_block_order", 1e-10);
    let neg = s.at_least("negative_control_phase_error", 1e-2);
    let axis = s.at_most("axis_triangle_closed_form", 1e-12);
    let table = s.at_most("commutator_table_signs", 1e-12);
    let rep3 = gamma_rep(3, RepKind::JordanWigner)?;
    for pair in [(1, 2), (2, 3)] {
        let plan = iswap_synthesize(pair, None)?;
        s.push(iswap, plan.phase_error);
        s.push(orc, gate_distance(&plan.oracle_product()?, &plan.target)? / plan.target.frobenius_norm());
        for t in &plan.triangles {
            for v in t {
                s.push(radius, (norm(v) - ISWAP_RADIUS).abs());
            }
        }
        let mut swapped = rep3.identity();
        for k in [2, 3, 0, 1] {
            let [a, b, c] = &plan.triangles[k];
            swapped = triangle_anholonomy(a, b, c, &rep3)?.unitary.matmul(&swapped);
        }
        s.push(order, swapped.distance(&plan.achieved));
        let wrong = iswap_synthesize(pair, Some((0.25f64).tanh()))?;
        s.push(neg, wrong.phase_error);
    }
    let rep = gamma_rep(cfg.n, cfg.rep)?;
    for (i, j) in [(0, 1), (1, 2), (0, rep.len() - 1)] {
        let general = axis_triangle(&rep, i, j, 0.3, 0.45)?.unitary;
        s.push(axis, general.distance(&axis_triangle_closed(&rep, i, j, 0.3, 0.45)?));
    }
    let id = ComplexMatrix::identity(2);
    let xx = kron_all(&[&pauli(1), &pauli(1), &id]).scale(2.0 * I);
    let yy = kron_all(&[&pauli(2), &pauli(2), &id]).scale(-2.0 * I);
    s.push(table, rep3.gamma(1).commutator(rep3.gamma(2)).distance(&xx));
    s.push(table, rep3.gamma(0).commutator(rep3.gamma(3)).distance(&yy));
    Ok(s.finish("gates", cfg.tol_scale))
}

pub fn run_suite(name: &str, cfg: &ValidateConfig) -> Result<SuiteReport> {
    match name {
        "clifford" => suite_clifford(cfg),
        "state" => suite_state(cfg),
        "fidelity" => suite_fidelity(cfg),
        "transport" => suite_transport(cfg),
        "connection" => suite_connection(cfg),
        "triangle" => suite_triangle(cfg),
        "duality" => suite_duality(cfg),
        "interference" => suite_interference(cfg),
        "gates" => suite_gates(cfg),
        other => Err(UhlError::ChartDomain(format!("unknown suite {other}"))),
    }
}

/// Worker count from `UHL_THREADS`, else the available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("UHL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|k| k.get()).unwrap_or(1))
}

/// Runs `jobs` on up to `threads` workers; results keep input order.
pub fn par_map<T: Sync, U: Send>(jobs: &[T], threads: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<U>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= jobs.len() {
                    break;
                }
                let out = f(&jobs[k]);
                *slots[k].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("job ran")).collect()
}

pub fn validate(cfg: &ValidateConfig) -> Result<ValidationReport> {
    if !(1..=4).contains(&cfg.n) {
        return Err(UhlError::NOutOfRange(cfg.n));
    }
    let names: Vec<&str> = match &cfg.suite {
        Some(name) => {
            if !SUITES.contains(&name.as_str()) {
                return Err(UhlError::ChartDomain(format!("unknown suite {name}")));
            }
            vec![name.as_str()]
        }
        None => SUITES.to_vec(),
    };
    let suites = par_map(&names, thread_cap(), |name| {
        run_suite(name, cfg).unwrap_or_else(|e| SuiteReport {
            name: name.to_string(),
            pass: false,
            checks: Vec::new(),
            error: Some(e.to_string()),
        })
    });
    Ok(ValidationReport {
        n: cfg.n,
        rep: cfg.rep,
        seed: cfg.seed,
        smoke: cfg.smoke,
        tol_scale: cfg.tol_scale,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}
