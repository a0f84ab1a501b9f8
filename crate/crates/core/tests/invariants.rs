use proptest::prelude::*;

use selab_core::catalog;
use selab_core::exhaustion::{hessian_r2_eigen_bounds, lambda_closed_form, BoundBranch, ClosedFormRegime, GrowthKind};
use selab_core::forms::{div_stress_energy, index_sets, j_invariance_defect, norm_sq, odot_tensor, stress_energy_at, BundleValuedForm, DivRoute};
use selab_core::manifold::Chart;
use selab_core::monotonicity::geometric_grid;
use selab_core::quadrature::pairwise_sum;
use selab_core::submanifold::{extrinsic_rho_hessian_check, induced_geometry_at, MINIMALITY_TOL};

/// Affine coefficients `c0 + c1 x_k` on every basis p-form.
fn form_text(m: usize, p: usize, coeffs: &[(f64, f64, usize)]) -> String {
    let mut terms = Vec::new();
    for (idx, &(c0, c1, k)) in index_sets(m, p).iter().zip(coeffs.iter().cycle()) {
        let dx = idx.iter().map(|i| format!("dx{}", i + 1)).collect::<Vec<_>>().join("^");
        let tail = if dx.is_empty() { String::new() } else { format!("*{dx}") };
        terms.push((c0, format!("{}{tail}", c0.abs())));
        terms.push((c1, format!("{}*x{}{tail}", c1.abs(), k % m + 1)));
    }
    let mut s = String::new();
    for (i, (c, t)) in terms.iter().enumerate() {
        if i == 0 {
            s += if *c < 0.0 { "-" } else { "" };
        } else {
            s += if *c < 0.0 { " - " } else { " + " };
        }
        s += t;
    }
    s
}

fn chart_for(m: usize, curved: bool) -> Chart {
    match (m, curved) {
        (2, true) => catalog::chart("conformal-R2").unwrap().chart,
        (3, true) => catalog::chart("conformal-R3").unwrap().chart,
        _ => Chart::flat(m, 10.0),
    }
}

/// (m, p, curved, coefficients, point, vector)
type Case = (usize, usize, bool, Vec<(f64, f64, usize)>, Vec<f64>, Vec<f64>);

fn case() -> impl Strategy<Value = Case> {
    (2usize..=4, any::<bool>()).prop_flat_map(|(m, curved)| {
        (
            Just(m),
            0..=m,
            Just(curved),
            prop::collection::vec((-2.0..2.0f64, -1.0..1.0f64, 0usize..4), 1..6),
            prop::collection::vec(-1.0..1.0f64, m),
            prop::collection::vec(-1.0..1.0f64, m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trace_identities((m, p, curved, coeffs, x, _v) in case()) {
        let chart = chart_for(m, curved);
        let w = BundleValuedForm::parse(m, &form_text(m, p, &coeffs)).unwrap();
        let n = norm_sq(&w, &chart, &x).unwrap();
        let t = odot_tensor(&w, &chart, &x).unwrap().g_trace(&chart).unwrap();
        prop_assert!((t - p as f64 * n).abs() <= 1e-10 * (1.0 + n));
        let s = stress_energy_at(&w, &chart, &x).unwrap().g_trace(&chart).unwrap();
        prop_assert!((s - (m as f64 / 2.0 - p as f64) * n).abs() <= 1e-10 * (1.0 + n));
    }

    #[test]
    fn divergence_routes_agree((m, p, curved, coeffs, x, v) in case()) {
        let chart = chart_for(m, curved);
        let w = BundleValuedForm::parse(m, &form_text(m, p, &coeffs)).unwrap();
        let a = div_stress_energy(&w, &chart, &x, &v, DivRoute::Definition).unwrap();
        let b = div_stress_energy(&w, &chart, &x, &v, DivRoute::Identity).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "{a} {b}");
    }

    #[test]
    fn kahler_top_forms_are_j_invariant(c in -3.0..3.0f64, x in prop::collection::vec(-2.0..2.0f64, 4)) {
        let chart = Chart::flat_complex(2, 10.0);
        let w = BundleValuedForm::parse(4, &format!("{}*dx1^dx2 + {}*dx3^dx4", c.abs(), c.abs())).unwrap();
        prop_assert!(j_invariance_defect(&w, &chart, &x).unwrap() <= 1e-9);
    }

    #[test]
    fn pairwise_sum_is_accurate(v in prop::collection::vec(-1e3..1e3f64, 0..300)) {
        let exact: f64 = v.iter().sum();
        let scale: f64 = v.iter().map(|x| x.abs()).sum();
        prop_assert!((pairwise_sum(&v) - exact).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn geometric_grid_is_increasing(a in 0.01..5.0f64, f in 1.01..20.0f64, n in 2usize..30) {
        let g = geometric_grid(a, a * f, n);
        prop_assert_eq!(g.len(), n);
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        prop_assert!((g[0] - a).abs() < 1e-12 * a && (g[n - 1] - a * f).abs() < 1e-12 * a * f);
    }

    #[test]
    fn eigen_bound_branch_follows_rh2(h1 in 0.01..3.0f64, dh in 0.0..3.0f64, r in 0.01..5.0f64, m in 2usize..6, p in 0usize..3) {
        let b = hessian_r2_eigen_bounds(h1, h1 + dh, r, m, p, GrowthKind::Real).unwrap();
        prop_assert_eq!(b.branch == BoundBranch::Large, r * (h1 + dh) >= 1.0);
        prop_assert!(b.value.is_finite());
    }

    #[test]
    fn closed_forms_are_positive_or_rejected(a in 0.0..2.0f64, b in 0.0..0.6f64, m in 2usize..8, p in 0usize..4) {
        match lambda_closed_form(ClosedFormRegime::RealQuadratic { a, b, m, p }) {
            Ok(l) => prop_assert!(l > 0.0),
            Err(e) => prop_assert!(matches!(e, selab_core::Error::HypothesisViolated(_))),
        }
    }

    #[test]
    fn minimal_catalog_has_zero_mean_curvature(id in prop::sample::select(vec!["catenoid", "helicoid", "enneper", "cplx-z2", "cplx-z3"]), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let imm = catalog::immersion(id).unwrap().immersion;
        let g = induced_geometry_at(&imm, &[s, t]).unwrap();
        prop_assert!(g.mean_curvature_norm() <= MINIMALITY_TOL);
    }

    #[test]
    fn extrinsic_rho_hessian_identity(id in prop::sample::select(vec!["plane", "catenoid", "helicoid", "enneper", "cplx-z2", "paraboloid"]), s in -1.5..1.5f64, t in -1.5..1.5f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let imm = catalog::immersion(id).unwrap().immersion;
        let x = [s, t];
        let u = imm.position(&x);
        let o = imm.position(imm.center());
        let d: f64 = u.iter().zip(&o).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        prop_assume!(d > 1e-3 && (a * a + b * b) > 1e-4);
        prop_assert!(extrinsic_rho_hessian_check(&imm, &x, &[a, b]).unwrap() <= 1e-6);
    }
}
