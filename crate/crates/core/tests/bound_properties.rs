use std::f64::consts::PI;

use proptest::prelude::*;
use sparse_omp::bounds::{
    corollary6_measurements, theorem1_bound, theorem2_measurements, tropp_bound,
    tropp_measurements, tropp_measurements_in_zeta, MeasurementBoundQuery, RecoveryBoundQuery,
};
use sparse_omp::PhiFunction;

/// Direct product form (no logs) maximised on a uniform grid of `points`.
fn direct_grid_oracle(m: usize, n: usize, k: usize, phi: &PhiFunction, points: usize) -> f64 {
    let mf = m as f64;
    let eps_max = 1.0 - (k as f64 / mf).sqrt() - (2.0 * phi.eval(k as f64).unwrap() / (mf * PI)).sqrt();
    if eps_max <= 0.0 {
        return 0.0;
    }
    let phis: Vec<f64> = (1..=k).map(|i| phi.eval(i as f64).unwrap()).collect();
    let mut best = 0.0f64;
    for j in 1..=points {
        let eps = eps_max * j as f64 / points as f64;
        let eta = 1.0 - (k as f64 / mf).sqrt() - eps;
        let mut prod = 1.0 - (-eps * eps * mf / 2.0).exp();
        for &p in &phis {
            let tail = (-eta * eta * mf / (2.0 * p)).exp() / ((PI * mf / (2.0 * p)).sqrt() * eta);
            prod *= (1.0 - tail).powf((n - k) as f64);
        }
        best = best.max(prod);
    }
    best.clamp(0.0, 1.0)
}

fn families() -> Vec<PhiFunction> {
    vec![
        PhiFunction::CauchySchwarz,
        PhiFunction::strongly_decaying(1.1).unwrap(),
        PhiFunction::strongly_decaying(1.2).unwrap(),
    ]
}

#[test]
fn theorem1_matches_high_resolution_oracle() {
    for phi in families() {
        for m in [250, 400, 550, 700, 1000] {
            let got = theorem1_bound(&RecoveryBoundQuery::new(m, 1024, 15, phi)).unwrap();
            let want = direct_grid_oracle(m, 1024, 15, &phi, 1_000_000);
            assert!((got - want).abs() <= 1e-6, "{phi} m={m}: {got} vs {want}");
        }
    }
}

#[test]
fn theorem1_nondecreasing_in_m() {
    let mut fams = families();
    fams.push(PhiFunction::gaussian_piecewise(15).unwrap());
    for phi in fams {
        let mut prev = 0.0;
        for m in (100..=1000).step_by(50) {
            let v = theorem1_bound(&RecoveryBoundQuery::new(m, 1024, 15, phi)).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev, "{phi} decreased at m={m}");
            prev = v;
        }
    }
}

#[test]
fn theorem1_improves_with_alpha() {
    for k in [15, 30] {
        for m in (100..=1000).step_by(50) {
            let b = |a: f64| {
                theorem1_bound(&RecoveryBoundQuery::new(m, 1024, k, PhiFunction::strongly_decaying(a).unwrap()))
                    .unwrap()
            };
            let (b11, b12, b20) = (b(1.1), b(1.2), b(2.0));
            assert!(b12 >= b11 && b20 >= b12, "K={k} m={m}");
        }
    }
}

#[test]
fn theorem2_ordering_and_corollary6_envelope() {
    for k in [5, 15, 30, 60] {
        for zi in 1..=10 {
            let zeta = zi as f64 / 100.0;
            let q = |phi| MeasurementBoundQuery { n: 1024, k, zeta, phi };
            let cs = theorem2_measurements(&q(PhiFunction::CauchySchwarz)).unwrap();
            let d11 = theorem2_measurements(&q(PhiFunction::strongly_decaying(1.1).unwrap())).unwrap();
            let d12 = theorem2_measurements(&q(PhiFunction::strongly_decaying(1.2).unwrap())).unwrap();
            assert!(d12 <= d11 && d11 <= cs, "K={k} ζ={zeta}");
            for (alpha, pipeline) in [(1.1, d11), (1.2, d12)] {
                assert!(corollary6_measurements(1024, k, zeta, alpha).unwrap() >= pipeline);
            }
        }
    }
}

#[test]
fn tropp_forms_agree_on_query_grid() {
    let mut count = 0;
    for n in [256, 512, 1024, 4096, 100_000] {
        for k in [1, 5, 15, 30] {
            for z in [0.001, 0.01, 0.05, 0.1, 0.5] {
                let a = tropp_measurements(n, k, z).unwrap().m;
                let b = tropp_measurements_in_zeta(n, k, z).unwrap();
                assert!((a - b).abs() <= 1e-10 * a, "n={n} K={k} ζ={z}");
                count += 1;
            }
        }
    }
    assert_eq!(count, 100);
}

proptest! {
    #[test]
    fn bounds_are_probabilities(m in 1usize..1200, k in 1usize..40, extra in 1usize..2000, alpha in 1.001f64..5.0) {
        let n = k + extra;
        for phi in [PhiFunction::CauchySchwarz, PhiFunction::strongly_decaying(alpha).unwrap()] {
            let v = theorem1_bound(&RecoveryBoundQuery::new(m, n, k, phi).with_grid(256)).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let t = tropp_bound(m, n, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
    }
}
