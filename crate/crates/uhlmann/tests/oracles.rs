//! Values frozen from an independent dense-matrix computation.

use uhlmann::clifford::{gamma_rep, RepKind};
use uhlmann::gates::{axis_triangle, solve_inscribed_angle, ISWAP_RADIUS};
use uhlmann::geometry::fidelity_closed;
use uhlmann::holonomy::{loop_unitary, triangle_anholonomy, LoopSpec, TransportPath};
use uhlmann::interference::{interference_observables, phase_visibility_triangle, total_anholonomy};
use uhlmann::matcore::C64;
use uhlmann::tfd::{ball_from_half, entropy, entropy_oracle, rho_ball, thermal_rho};

#[test]
fn fidelity_n2() {
    let u = [0.3, -0.2, 0.5, 0.1, 0.0];
    let v = [-0.1, 0.6, 0.2, -0.3, 0.25];
    assert!((fidelity_closed(&u, &v).unwrap() - 0.7182997289971471).abs() < 1e-13);
}

#[test]
fn triangle_n2_trace_and_angle() {
    let rep = gamma_rep(2, RepKind::Recursive).unwrap();
    let a = [0.1, 0.2, -0.1, 0.0, 0.1];
    let b = [-0.2, 0.1, 0.3, 0.1, 0.0];
    let c = [0.3, -0.2, 0.1, -0.1, 0.2];
    let r = triangle_anholonomy(&a, &b, &c, &rep).unwrap();
    assert!((r.unitary.trace() - C64::new(3.857489203917039, 0.0)).norm() < 1e-12);
    assert!((r.delta - 0.5354720366371066).abs() < 1e-12);
    let spec = LoopSpec::half_angle(2, RepKind::Recursive, vec![a.to_vec(), b.to_vec(), c.to_vec()]);
    assert!((loop_unitary(&spec, TransportPath::Oracle).unwrap().trace().re - 3.857489203917039).abs() < 1e-10);
}

#[test]
fn entropy_n2() {
    let rep = gamma_rep(2, RepKind::Recursive).unwrap();
    let want = 1.145818505234005;
    assert!((entropy(0.8, 2) - want).abs() < 1e-13);
    let rho = thermal_rho(0.8, &[1.0, 0.0, 0.0, 0.0, 0.0], &rep).unwrap();
    assert!((entropy_oracle(&rho).unwrap() - want).abs() < 1e-12);
}

#[test]
fn interference_n1_triangle() {
    let rep = gamma_rep(1, RepKind::Recursive).unwrap();
    let (a, b, c) = ([0.2, -0.1, 0.3], [0.0, 0.4, 0.1], [-0.3, 0.0, 0.2]);
    let spec = LoopSpec::half_angle(1, RepKind::Recursive, vec![a.to_vec(), b.to_vec(), c.to_vec()]);
    let big_u = total_anholonomy(1.1, &a, &spec).unwrap();
    let z = interference_observables(&big_u, &rho_ball(&ball_from_half(&a), &rep).unwrap()).unwrap().z;
    let want = C64::new(0.8189070581415461, -0.5490249290850084);
    assert!((z - want).norm() < 1e-12);
    let closed = phase_visibility_triangle(1.1, &ball_from_half(&a), &ball_from_half(&b), &ball_from_half(&c), 1).unwrap();
    assert!((closed - want).norm() < 1e-12);
}

#[test]
fn inscribed_angle_for_iswap() {
    let phi = solve_inscribed_angle(ISWAP_RADIUS, std::f64::consts::FRAC_PI_4).unwrap();
    assert!((phi - 1.6893934077083639).abs() < 1e-12);
}

#[test]
fn axis_triangle_at_iswap_radius() {
    let rep = gamma_rep(3, RepKind::JordanWigner).unwrap();
    let r = axis_triangle(&rep, 1, 2, ISWAP_RADIUS, ISWAP_RADIUS).unwrap();
    assert!((r.delta - 0.3398369094541221).abs() < 1e-13);
    assert!((r.delta - std::f64::consts::FRAC_PI_4).abs() > 0.4);
}
