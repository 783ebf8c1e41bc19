use halfwave::hardy_ops::*;
use halfwave::linalg::{c, frob};
use halfwave::random::{random_map, rng};
use halfwave::rational_maps::{energy, GrassmannTarget, RationalMap, ResiduePair};
use halfwave::solitons::{multi_soliton, single_soliton};
use halfwave::CVec;
use rand::Rng;
use std::f64::consts::PI;

fn unit_vector<R: Rng>(r: &mut R, n: usize) -> CVec {
    let v = CVec::from_fn(n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / c(n, 0.0)
}

#[test]
fn soliton_lax_matrix_is_velocity() {
    for v in [0.0, 0.5, -0.8] {
        let s = single_soliton(v, 1.2, 0.7).unwrap();
        let b = build_h1(&s.profile);
        assert_eq!(b.n, 1);
        assert!((b.t[(0, 0)] - c(v, 0.0)).norm() < 1e-14);
        let spec = lax_spectrum(&b).unwrap();
        assert!(spec.simple);
        assert!(spec.min_gap.is_none());
        assert!((spec.eigenvalues[0] - v).abs() < 1e-14);
        assert!((spec.traces["2"] - (1.0 - v * v)).abs() < 1e-14);
    }
}

#[test]
fn gram_single_pole() {
    let e = vec![CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])];
    let g = gram_matrix(&[c(0.0, -1.0)], &e);
    assert!((g[(0, 0)] - c(PI, 0.0)).norm() < 1e-15);
    let g = gram_matrix(&[c(3.0, -0.25)], &e);
    assert!((g[(0, 0)] - c(PI / 0.25, 0.0)).norm() < 1e-13);
}

#[test]
fn iplus_single_pole() {
    let e = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let map = RationalMap::new(
        GrassmannTarget::sigma3(),
        vec![ResiduePair::from_factors(c(0.0, -1.0), e.clone(), CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]))],
    )
    .unwrap();
    let b = build_h1(&map);
    let ip = iplus(&b, &CVec::from_vec(vec![c(1.0, 0.0)]));
    assert!((ip[0] - c(0.0, -2.0 * PI)).norm() < 1e-15);
    assert!(ip[1].norm() == 0.0);
}

#[test]
fn empty_basis() {
    let b = build_h1(&RationalMap::constant(GrassmannTarget::sigma3()));
    assert!(b.is_empty());
    let spec = lax_spectrum(&b).unwrap();
    assert!(spec.eigenvalues.is_empty());
    assert!(spec.simple);
    assert_eq!(conserved_traces(&b, &[2.0]).unwrap(), vec![0.0]);
}

#[test]
fn commutator_identity_and_self_adjointness() {
    let mut r = rng(11);
    for d in [2, 3, 4] {
        for n in 1..=4 {
            let m = random_map(&mut r, d, n).unwrap();
            let b = build_h1(&m);
            assert!(commutator_defect(&b) < 1e-12, "d={d} n={n}");
            assert!(self_adjointness_defect(&b) < 1e-10 * frob(&b.g).max(1.0), "d={d} n={n}");
        }
    }
}

#[test]
fn imaginary_part_identity() {
    let mut r = rng(12);
    for _ in 0..20 {
        let m = random_map(&mut r, 2, 3).unwrap();
        let b = build_h1(&m);
        for _ in 0..5 {
            let a = unit_vector(&mut r, b.n);
            let lhs = b.g_inner(&(&b.zmat * &a), &a).im;
            let rhs = -iplus(&b, &a).norm_squared() / (4.0 * PI);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }
}

#[test]
fn reproducing_formula() {
    let mut r = rng(13);
    let m = random_map(&mut r, 3, 3).unwrap();
    let b = build_h1(&m);
    for _ in 0..10 {
        let z = c(r.gen_range(-3.0..3.0), r.gen_range(0.1..3.0));
        let a = unit_vector(&mut r, b.n);
        let shifted = &b.zmat - halfwave::CMat::identity(b.n, b.n) * z;
        let sol = shifted.lu().solve(&a).unwrap();
        let lhs = iplus(&b, &sol) / c(0.0, 2.0 * PI);
        let rhs = eval_coeffs(&b, &a, z);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn energy_is_pi_times_trace() {
    let mut r = rng(14);
    for k in 0..20 {
        let d = 2 + k % 2;
        let m = random_map(&mut r, d, 1 + k % 4).unwrap();
        let b = build_h1(&m);
        let i2 = conserved_traces(&b, &[2.0]).unwrap()[0];
        let e = energy(&m);
        assert!((e - ENERGY_PER_TRACE * i2).abs() < 1e-9 * e, "{e} vs {}", PI * i2);
    }
}

#[test]
fn lax_spectrum_in_open_interval() {
    let mut r = rng(15);
    for _ in 0..20 {
        let m = random_map(&mut r, 2, 4).unwrap();
        let spec = lax_spectrum(&build_h1(&m)).unwrap();
        assert_eq!(spec.eigenvalues.len(), 4);
        assert!(spec.eigenvalues.iter().all(|l| l.abs() < 1.0));
        assert!(spec.max_imag < 1e-8);
        assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn two_soliton_spectrum() {
    let m = multi_soliton(&[-0.5, 0.5], &[c(-500.0, -1.0), c(500.0, -1.0)]).unwrap();
    let spec = lax_spectrum(&build_h1(&m.map)).unwrap();
    assert!(spec.simple);
    assert!((spec.eigenvalues[0] + 0.5).abs() < 2e-3);
    assert!((spec.eigenvalues[1] - 0.5).abs() < 2e-3);
    // symmetric speeds: T^2 is degenerate even though T is simple
    assert!(!spec.simple_squared);
    let m = multi_soliton(&[-0.5, 0.3], &[c(-500.0, -1.0), c(500.0, -1.0)]).unwrap();
    let spec = lax_spectrum(&build_h1(&m.map)).unwrap();
    assert!(spec.simple && spec.simple_squared);
    assert!(spec.discriminant.abs() > 1e-6);
}

#[test]
fn equal_speeds_are_degenerate() {
    let m = multi_soliton(&[0.2, 0.2], &[c(-500.0, -1.0), c(500.0, -1.0)]).unwrap();
    assert!(!m.warnings.is_empty());
    let spec = lax_spectrum(&build_h1(&m.map)).unwrap();
    assert!(spec.min_gap_t.unwrap() < 1e-2);
}

#[test]
fn conserved_traces_soliton() {
    let s = single_soliton(0.6, 0.0, 1.0).unwrap();
    let tr = conserved_traces(&build_h1(&s.profile), &[2.0, 4.0, 1.0]).unwrap();
    assert!((tr[0] - 0.64).abs() < 1e-14);
    assert!((tr[1] - 0.64 * 0.64).abs() < 1e-14);
    assert!((tr[2] - 0.8).abs() < 1e-14);
}

#[test]
fn discriminant_from_traces_matches_roots() {
    // diagonal T: K = 1 - T^2 has roots 1 - l^2; discriminant = prod (mu_i - mu_j)^2
    let l = [0.1, -0.4, 0.7];
    let t = halfwave::CMat::from_diagonal(&CVec::from_iterator(3, l.iter().map(|&x| c(x, 0.0))));
    let mu: Vec<f64> = l.iter().map(|x| 1.0 - x * x).collect();
    let mut want = 1.0;
    for i in 0..3 {
        for j in i + 1..3 {
            want *= (mu[i] - mu[j]).powi(2);
        }
    }
    assert!((discriminant_from_traces(&t) - want).abs() < 1e-12);
}
