use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uhlmann::clifford::{gamma_rep, RepKind};
use uhlmann::gates::{gate_distance, gate_distance_trace};
use uhlmann::geometry::{fidelity_closed, fidelity_oracle};
use uhlmann::holonomy::{
    boost_compose, boost_cosh, transport_unitary_closed, transport_unitary_oracle, triangle_anholonomy,
    triangle_cos_half_delta,
};
use uhlmann::interference::{interference_observables, phase_visibility_segment, segment_z, ua_interference};
use uhlmann::matcore::{random_pd, random_unitary, C64};
use uhlmann::output::to_json;
use uhlmann::tfd::{ball_from_half, c_of, half_from_ball, rho_ball, wrap_angle, Chart, StateCoords};

fn ball(len: usize, rmax: f64) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0f64..1.0, len), 0.0..rmax).prop_map(|(v, r)| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-9 {
            vec![0.0; v.len()]
        } else {
            v.iter().map(|x| x * r / n).collect()
        }
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_symmetric_bounded_and_exact(u in ball(5, 0.95), v in ball(5, 0.95)) {
        let rep = gamma_rep(2, RepKind::Recursive).unwrap();
        let f = fidelity_closed(&u, &v).unwrap();
        prop_assert!((f - fidelity_closed(&v, &u).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&f));
        let fo = fidelity_oracle(&rho_ball(&u, &rep).unwrap(), &rho_ball(&v, &rep).unwrap()).unwrap();
        prop_assert!((f - fo).abs() < 1e-10);
    }

    #[test]
    fn transport_is_unitary_and_inverse(a in ball(5, 0.9), b in ball(5, 0.9)) {
        let rep = gamma_rep(2, RepKind::JordanWigner).unwrap();
        let uab = transport_unitary_closed(&a, &b, &rep).unwrap();
        let uba = transport_unitary_closed(&b, &a, &rep).unwrap();
        prop_assert!(uab.unitarity_residual() < 1e-12);
        prop_assert!(uab.matmul(&uba).distance(&rep.identity()) < 1e-12);
        let ra = rho_ball(&ball_from_half(&a), &rep).unwrap();
        let rb = rho_ball(&ball_from_half(&b), &rep).unwrap();
        prop_assert!(uab.distance(&transport_unitary_oracle(&ra, &rb).unwrap()) < 1e-10);
    }

    #[test]
    fn triangle_angle_matches_fidelities(a in ball(3, 0.9), b in ball(3, 0.9), c in ball(3, 0.9)) {
        prop_assume!(dist(&a, &b) > 1e-3 && dist(&b, &c) > 1e-3 && dist(&c, &a) > 1e-3);
        let rep = gamma_rep(1, RepKind::Recursive).unwrap();
        let r = triangle_anholonomy(&a, &b, &c, &rep).unwrap();
        let ch = triangle_cos_half_delta(&ball_from_half(&a), &ball_from_half(&b), &ball_from_half(&c)).unwrap();
        prop_assert!(((r.delta / 2.0).cos() - ch).abs() < 1e-10);
        prop_assert!(r.unitary.unitarity_residual() < 1e-12);
        let rev = triangle_anholonomy(&a, &c, &b, &rep).unwrap();
        prop_assert!(rev.unitary.distance(&r.unitary.adjoint()) < 1e-10);
    }

    #[test]
    fn half_angle_and_ball_charts_invert(u in ball(7, 0.99)) {
        let back = ball_from_half(&half_from_ball(&u));
        prop_assert!(dist(&back, &u) < 1e-12);
    }

    #[test]
    fn chart_round_trip(chi in -3.0f64..3.0, beta in 0.01f64..3.0, v in ball(3, 1.0)) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-4);
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let n: Vec<f64> = v.iter().map(|x| x / r).collect();
        let c = StateCoords::ChiBeta { chi, beta, n: n.clone() };
        let back = c.convert(Chart::TauR).unwrap().convert(Chart::ChiBeta).unwrap();
        match back {
            StateCoords::ChiBeta { chi: c2, beta: b2, n: n2 } => {
                prop_assert!(wrap_angle(c2 - chi).abs() < 1e-10);
                prop_assert!((b2 - beta).abs() < 1e-9);
                prop_assert!(dist(&n2, &n) < 1e-10);
            }
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn boost_rapidity_is_consistent(bu in 0.0f64..3.0, bv in 0.0f64..3.0, u in ball(3, 1.0), v in ball(3, 1.0)) {
        let unit = |x: &[f64]| {
            let r = x.iter().map(|y| y * y).sum::<f64>().sqrt();
            if r < 1e-6 { vec![1.0, 0.0, 0.0] } else { x.iter().map(|y| y / r).collect() }
        };
        let (uh, vh) = (unit(&u), unit(&v));
        let (bw, _) = boost_compose(bu, &uh, bv, &vh);
        let ch = boost_cosh(bu, &uh, bv, &vh);
        prop_assert!((bw.cosh() - ch).abs() < 1e-9 * ch);
    }

    #[test]
    fn gate_distance_ignores_global_phase(seed in any::<u64>(), theta in -3.2f64..3.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, 4);
        let v = random_unitary(&mut rng, 4);
        prop_assert!(gate_distance(&u, &u.scale(C64::from_polar(1.0, theta))).unwrap() < 1e-13);
        let d = gate_distance(&u, &v).unwrap();
        prop_assert!((d - gate_distance_trace(&u, &v).unwrap()).abs() < 1e-6);
        prop_assert!((d - gate_distance(&v, &u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn visibility_never_exceeds_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, 4);
        let rho = random_pd(&mut rng, 4, true);
        let res = interference_observables(&u, &rho).unwrap();
        prop_assert!(res.visibility <= 1.0 + 1e-12);
        prop_assert!(res.phase_shift > -std::f64::consts::PI && res.phase_shift <= std::f64::consts::PI);
    }

    #[test]
    fn segment_closed_form_matches_matrix(chi in -3.1f64..3.1, a in ball(3, 0.95)) {
        let rep = gamma_rep(1, RepKind::JordanWigner).unwrap();
        let u = ball_from_half(&a);
        let rho = rho_ball(&u, &rep).unwrap();
        let z = interference_observables(&ua_interference(chi, &a, &rep).unwrap().adjoint(), &rho).unwrap().z;
        prop_assert!((z - segment_z(chi, c_of(&u)).unwrap()).norm() < 1e-10);
        let (_, vis) = phase_visibility_segment(chi, c_of(&u)).unwrap();
        prop_assert!(vis <= 1.0 + 1e-12);
    }

    #[test]
    fn wrap_angle_range(x in -1e3f64..1e3) {
        let w = wrap_angle(x);
        prop_assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
        prop_assert!(((x - w) / std::f64::consts::TAU - ((x - w) / std::f64::consts::TAU).round()).abs() < 1e-9);
    }

    #[test]
    fn json_floats_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let s = to_json(&x).unwrap();
        let back: f64 = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}
