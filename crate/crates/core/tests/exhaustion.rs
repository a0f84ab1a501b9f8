use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use selab_core::exhaustion::*;
use selab_core::manifold::{hessian_spectrum, make_warped_chart, Chart, CurvatureRegime, ScalarField};
use selab_core::Error;

fn sorted_a(rng: &mut StdRng, m: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..4.0)).collect();
    a.sort_by(f64::total_cmp);
    a
}

fn box_sample(m: usize) -> Vec<Vec<f64>> {
    grid_sample(&vec![-1.0; m], &vec![1.0; m], 5)
}

#[test]
fn real_quadratic_constants() {
    let mut rng = StdRng::seed_from_u64(21);
    let mut done = 0;
    while done < 5 {
        let m = rng.gen_range(2..=5);
        let p = rng.gen_range(0..=m / 2);
        let a = sorted_a(&mut rng, m);
        let k1 = a.iter().map(|ai| 2.0 / ai).sum::<f64>() - 4.0 * p as f64 / a[0];
        if k1 <= 0.0 {
            continue;
        }
        let exh = Exhaustion::quadratic(&a);
        let chart = Chart::flat(m, 10.0);
        let sample = box_sample(m);
        let r = growth_constants_real(&ExhaustionSpec::new(&exh, &chart, p, &sample)).unwrap();
        assert!((r.k1 - k1).abs() < 1e-12, "{a:?} p={p}: {} vs {k1}", r.k1);
        assert!(r.k2 <= 1.0 + 1e-12);
        assert_eq!(r.status, ExhaustionStatus::Valid);
        assert_eq!(r.excluded, 1);
        done += 1;
    }

    let chart = Chart::flat(3, 10.0);
    let exh = Exhaustion::quadratic(&[1.0, 1.0, 1.0]);
    let sample = box_sample(3);
    let r = growth_constants_real(&ExhaustionSpec::new(&exh, &chart, 1, &sample)).unwrap();
    assert!((r.k1 - 2.0).abs() < 1e-12 && (r.k2 - 1.0).abs() < 1e-12);
    assert!((r.lambda.unwrap() - 1.0).abs() < 1e-12);
    let r = growth_constants_real(&ExhaustionSpec::new(&exh, &chart, 0, &sample)).unwrap();
    assert!((r.lambda.unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn complex_quadratic_constants() {
    let mut rng = StdRng::seed_from_u64(22);
    let mut done = 0;
    while done < 5 {
        let m = rng.gen_range(1..=3);
        let p = rng.gen_range(0..=m);
        let a = sorted_a(&mut rng, m);
        let k1 = a.iter().map(|ai| 2.0 / ai).sum::<f64>() - 2.0 * p as f64 / a[0];
        if k1 <= 0.0 {
            continue;
        }
        let exh = Exhaustion::complex_quadratic(&a);
        let chart = Chart::flat_complex(m, 10.0);
        let sample = box_sample(2 * m);
        let r = growth_constants_complex(&ExhaustionSpec::new(&exh, &chart, p, &sample)).unwrap();
        assert!((r.k1 - k1).abs() < 1e-12, "{a:?} p={p}: {} vs {k1}", r.k1);
        done += 1;
    }

    let chart = Chart::flat_complex(2, 10.0);
    let exh = Exhaustion::complex_quadratic(&[1.0, 1.0]);
    let sample = box_sample(4);
    let r = growth_constants_complex(&ExhaustionSpec::new(&exh, &chart, 1, &sample)).unwrap();
    assert!((r.k1 - 2.0).abs() < 1e-12 && (r.lambda.unwrap() - 2.0).abs() < 1e-12);

    let flat = Chart::flat(4, 10.0);
    assert_eq!(growth_constants_complex(&ExhaustionSpec::new(&exh, &flat, 1, &sample)).unwrap_err(), Error::NoComplexStructure);
}

#[test]
fn critical_points_are_excluded() {
    let chart = Chart::flat(2, 10.0);
    let exh = Exhaustion::quadratic(&[1.0, 1.0]);
    let only_origin = vec![vec![0.0, 0.0]];
    assert_eq!(growth_constants_real(&ExhaustionSpec::new(&exh, &chart, 0, &only_origin)).unwrap_err(), Error::EmptySample);
    assert_eq!(growth_constants_real(&ExhaustionSpec::new(&exh, &chart, 0, &[])).unwrap_err(), Error::EmptySample);

    let r = growth_constants_real(&ExhaustionSpec::new(&exh, &chart, 2, &box_sample(2))).unwrap();
    assert_eq!(r.status, ExhaustionStatus::NonPositiveK1);
}

#[test]
fn refinement_is_monotone() {
    let w = make_warped_chart(&CurvatureRegime::QuadraticDecay { a: 1.0, b: 0.4 }, 2).unwrap();
    let exh = Exhaustion::from_phi(ScalarField::coordinate(2, 0), vec![0.0, 0.0]);
    let mut prev: Option<GrowthOrderReport> = None;
    for n in [3, 5, 9, 17] {
        // each grid contains the previous one
        let sample = grid_sample(&[0.2, 0.5], &[4.2, 2.5], n);
        let r = growth_constants_real(&ExhaustionSpec::new(&exh, &w.chart, 1, &sample)).unwrap();
        if let Some(q) = &prev {
            assert!(r.k1 <= q.k1 && r.k2 >= q.k2);
        }
        prev = Some(r);
    }
}

#[test]
fn hyperbolic_distance_constants() {
    let w = make_warped_chart(&CurvatureRegime::constant_negative(1.0), 3).unwrap();
    let exh = Exhaustion::from_phi(ScalarField::coordinate(3, 0), vec![0.0; 3]);
    let sample: Vec<Vec<f64>> = (0..50).map(|i| w.point_at_radius(0.1 + 4.9 * i as f64 / 49.0)).collect();
    let r = growth_constants_real(&ExhaustionSpec::new(&exh, &w.chart, 1, &sample)).unwrap();
    // Hess(r²) has eigenvalues 2 and 2r coth r (twice), so Σλ − 2λ_max = 2
    assert!((r.k1 - 2.0).abs() < 1e-6, "{r:?}");
    assert!((r.k2 - 1.0).abs() < 1e-9);
    assert!((r.lambda.unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn lemma_bounds_hold_on_warped_charts() {
    for regime in [CurvatureRegime::Hyperbolic { alpha: 1.5, beta: 0.5 }, CurvatureRegime::constant_negative(1.0)] {
        let (m, p) = (3, 1);
        let w = make_warped_chart(&regime, m).unwrap();
        let psi = ScalarField::square_of(&ScalarField::coordinate(m, 0));
        for i in 0..50 {
            let r = 0.1 + 4.9 * i as f64 / 49.0;
            let ev = hessian_spectrum(&w.chart, &psi, &w.point_at_radius(r)).unwrap();
            let term = ev.iter().sum::<f64>() - 2.0 * p as f64 * ev[m - 1];
            let (h1, h2) = regime.hess_r_bounds(r).unwrap();
            let b = hessian_r2_eigen_bounds(h1, h2, r, m, p, GrowthKind::Real).unwrap();
            assert!(term >= b.value - 1e-6, "r={r}: {term} < {}", b.value);
        }
    }
}

#[test]
fn lemma_bound_branches() {
    let b = hessian_r2_eigen_bounds(1.5, 1.5, 1.0, 3, 1, GrowthKind::Real).unwrap();
    assert_eq!((b.value, b.branch), (2.0, BoundBranch::Large));
    let b = hessian_r2_eigen_bounds(1.0, 1.0, 0.5, 3, 0, GrowthKind::Real).unwrap();
    assert_eq!((b.value, b.branch), (4.0, BoundBranch::Small));
    let b = hessian_r2_eigen_bounds(2.0, 2.0, 1.0, 2, 1, GrowthKind::Complex).unwrap();
    assert_eq!(b.value, 3.0);
    assert_eq!(hessian_r2_eigen_bounds(2.0, 1.0, 1.0, 2, 1, GrowthKind::Real).unwrap_err(), Error::BadBounds);
}

#[test]
fn closed_forms_match_formula_oracles() {
    let mut rng = StdRng::seed_from_u64(23);
    let (mut real, mut ch, mut cp, mut cq, mut vol) = (0, 0, 0, 0, 0);
    while real < 10 || ch < 10 || cp < 10 || cq < 10 || vol < 10 {
        let m = rng.gen_range(2..=6);
        let p = rng.gen_range(0..=2);
        let (mf, pf) = (m as f64, p as f64);
        let a: f64 = rng.gen_range(0.0..1.0);
        let b: f64 = rng.gen_range(0.0..0.5);
        let s = 1.0 + (1.0 - 4.0 * b * b).sqrt();
        let t = 1.0 + (1.0 + 4.0 * a * a).sqrt();

        if real < 10 && 2.0 + (mf - 2.0) * s - (2.0 * pf - 1.0) * t > 0.0 {
            let want = (2.0 + (mf - 1.0) * s - 2.0 * pf * t) / 2.0;
            if want > 0.0 {
                let got = lambda_closed_form(ClosedFormRegime::RealQuadratic { a, b, m, p }).unwrap();
                assert!((got - want).abs() < 1e-12);
                real += 1;
            }
        }
        if cq < 10 && 2.0 + (2.0 * mf - 1.0) * s - 2.0 * pf * t > 0.0 {
            let got = lambda_closed_form(ClosedFormRegime::ComplexQuadratic { a, b, m, p }).unwrap();
            assert!((got - (1.0 + (2.0 * mf - 1.0) * s / 2.0 - pf * t)).abs() < 1e-12);
            cq += 1;
        }
        let beta = rng.gen_range(0.2..2.0);
        let alpha = beta * rng.gen_range(1.0..1.5);
        if ch < 10 && (2.0 * mf - 1.0) * beta - 2.0 * pf * alpha > 0.0 {
            let got = lambda_closed_form(ClosedFormRegime::ComplexHyperbolic { alpha, beta, m, p }).unwrap();
            assert!((got - 2.0 * (mf - pf * alpha / beta)).abs() < 1e-12);
            ch += 1;
        }
        let eps = rng.gen_range(0.1..1.0);
        let bb = rng.gen_range(0.0..2.0 * eps);
        let v = 1.0 + (2.0 * mf - 1.0) * (1.0 - bb / (2.0 * eps)) - 2.0 * pf * (a / (2.0 * eps)).exp();
        if cp < 10 && v > 0.0 {
            let got = lambda_closed_form(ClosedFormRegime::ComplexPower { a, b: bb, epsilon: eps, m, p }).unwrap();
            assert!((got - v).abs() < 1e-12);
            cp += 1;
        }
        if vol < 10 {
            let r = rng.gen_range(0.1..5.0);
            let got = lambda_closed_form(ClosedFormRegime::VolumeHyperbolic { beta, m, r: Some(r) }).unwrap();
            assert!((got - (1.0 + (mf - 1.0) * beta * r / (beta * r).tanh())).abs() < 1e-12);
            let got = lambda_closed_form(ClosedFormRegime::VolumePower { b: bb, epsilon: eps, m }).unwrap();
            assert!((got - mf * (1.0 - bb / (2.0 * eps))).abs() < 1e-12);
            let got = lambda_closed_form(ClosedFormRegime::VolumeQuadratic { b, m }).unwrap();
            assert!((got - mf * s / 2.0).abs() < 1e-12);
            vol += 1;
        }
    }
}

#[test]
fn closed_form_examples_and_rejections() {
    let l = |r| lambda_closed_form(r).unwrap();
    assert_eq!(l(ClosedFormRegime::RealQuadratic { a: 0.0, b: 0.0, m: 5, p: 1 }), 3.0);
    assert_eq!(l(ClosedFormRegime::ComplexHyperbolic { alpha: 1.0, beta: 1.0, m: 3, p: 1 }), 4.0);
    assert_eq!(l(ClosedFormRegime::VolumePower { b: 0.0, epsilon: 0.5, m: 4 }), 4.0);
    assert!(matches!(
        lambda_closed_form(ClosedFormRegime::RealQuadratic { a: 0.0, b: 0.6, m: 5, p: 1 }),
        Err(Error::HypothesisViolated(_))
    ));
    assert!(matches!(
        lambda_closed_form(ClosedFormRegime::ComplexHyperbolic { alpha: 3.0, beta: 1.0, m: 2, p: 1 }),
        Err(Error::HypothesisViolated(_))
    ));
}
