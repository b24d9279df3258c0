use proptest::prelude::*;
use sparse_omp::phi::{ratio_probability_bound, ratio_probability_bound_095, RATIO_BOUND_GAMMA};
use sparse_omp::PhiFunction;

#[test]
fn nondecreasing_on_integer_grid() {
    let families = [
        PhiFunction::CauchySchwarz,
        PhiFunction::strongly_decaying(1.01).unwrap(),
        PhiFunction::strongly_decaying(1.5).unwrap(),
        PhiFunction::strongly_decaying(2.5).unwrap(),
        PhiFunction::gaussian_piecewise(200).unwrap(),
        PhiFunction::gaussian_piecewise(30).unwrap(),
    ];
    for f in families {
        let top = match f {
            PhiFunction::GaussianPiecewise { sparsity } => sparsity,
            _ => 200,
        };
        let mut prev = 0.0;
        for t in 1..=top {
            let v = f.eval(t as f64).unwrap();
            assert!(v >= prev, "{f} decreased at t={t}");
            assert!(v > 0.0 && v <= t as f64 + 1e-12, "{f} out of (0, t] at t={t}");
            prev = v;
        }
    }
}

#[test]
fn decaying_tends_to_t_near_one() {
    let f = PhiFunction::strongly_decaying(1.0 + 1e-6).unwrap();
    for t in 1..=20 {
        let t = t as f64;
        assert!((f.eval(t).unwrap() - t).abs() <= 1e-3, "t={t}");
    }
}

#[test]
fn decaying_nonincreasing_in_alpha() {
    for t in 2..=40 {
        let mut prev = f64::INFINITY;
        let mut alpha = 1.01;
        while alpha <= 3.0 + 1e-12 {
            let v = PhiFunction::strongly_decaying(alpha).unwrap().eval(t as f64).unwrap();
            assert!(v <= prev + 1e-12, "t={t} alpha={alpha}");
            prev = v;
            alpha += 0.01;
        }
    }
}

#[test]
fn specialised_ratio_bound_matches_general_form() {
    for p in 1..=50 {
        let general = ratio_probability_bound(0.95, RATIO_BOUND_GAMMA, p).unwrap();
        let rounded = ratio_probability_bound_095(p);
        let scale = general.abs().max(rounded.abs());
        assert!((general - rounded).abs() <= 1e-2 * scale, "p={p}: {general} vs {rounded}");
    }
}

proptest! {
    #[test]
    fn decaying_bounded_by_supremum(alpha in 1.0001f64..10.0, t in 0.01f64..500.0) {
        let f = PhiFunction::strongly_decaying(alpha).unwrap();
        let v = f.eval(t).unwrap();
        let sup = f.supremum().unwrap();
        // Strict wherever tanh(t ln α / 2) is still representably below 1.
        if 0.5 * t * alpha.ln() < 18.0 {
            prop_assert!(v < sup);
        } else {
            prop_assert!(v <= sup);
        }
        prop_assert!(v > 0.0);
        if t >= 1.0 {
            prop_assert!(v <= t * (1.0 + 1e-12));
        }
    }
}
