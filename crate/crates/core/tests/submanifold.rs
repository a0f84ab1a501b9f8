use std::f64::consts::PI;

use selab_core::catalog::immersion;
use selab_core::forms::j_invariance_defect;
use selab_core::monotonicity::{geometric_grid, QuadratureConfig, DEFAULT_GRID_POINTS};
use selab_core::quadrature::Sequential;
use selab_core::submanifold::*;
use selab_core::Error;

fn imm(id: &str) -> Immersion {
    immersion(id).unwrap().immersion
}

#[test]
fn plane_and_catenoid_geometry() {
    let g = induced_geometry_at(&imm("plane"), &[0.7, -1.1]).unwrap();
    assert_eq!(g.norm_a_sq, 0.0);
    assert_eq!(g.mean_curvature_norm(), 0.0);

    let cat = imm("catenoid");
    let g = induced_geometry_at(&cat, &[0.0, 0.4]).unwrap();
    assert!((g.norm_a_sq - 2.0).abs() < 1e-12);
    assert!(g.mean_curvature_norm() < 1e-12);
    assert!(g.tangent_defect < 1e-9);
    assert!((gauss_map_energy_density(&cat, &[1.0, 2.0]).unwrap() - 2.0 / 1f64.cosh().powi(4)).abs() < 1e-12);
    assert!((gauss_map_energy_density(&cat, &[1.0, 2.0]).unwrap() - 0.35276).abs() < 1e-5);
}

#[test]
fn complex_curve_second_fundamental_form() {
    // oracle: at z = 0 the only second derivative is ∂xx u = (0,0,2,0) = −∂yy u,
    // ∂xy u = (0,0,0,2); all are normal, so ‖A‖² = 4 + 4 + 4 + 4 = 16
    let c = imm("cplx-z2");
    let g = induced_geometry_at(&c, &[0.0, 0.0]).unwrap();
    assert!(g.mean_curvature_norm() < 1e-12);
    assert!((g.norm_a_sq - 16.0).abs() < 1e-12);
}

#[test]
fn catalog_minimality() {
    for id in ["plane", "catenoid", "helicoid", "enneper", "cplx-line", "cplx-z2", "cplx-z3"] {
        let i = imm(id);
        for k in 0..50 {
            let x = [-1.2 + 0.05 * k as f64, 0.9 - 0.037 * k as f64];
            let g = induced_geometry_at(&i, &x).unwrap();
            assert!(g.mean_curvature_norm() <= MINIMALITY_TOL, "{id} at {x:?}");
            assert!(g.tangent_defect <= 1e-9);
        }
    }
    let g = induced_geometry_at(&imm("paraboloid"), &[0.3, 0.2]).unwrap();
    assert!(g.mean_curvature_norm() > 0.1);
}

#[test]
fn rho_hessian_identity() {
    let plane = imm("plane");
    assert!(extrinsic_rho_hessian_check(&plane, &[1.0, 2.0], &[0.3, -0.7]).unwrap() < 1e-12);
    let cat = imm("catenoid");
    assert!(extrinsic_rho_hessian_check(&cat, &[0.5, 0.0], &[1.0, 0.0]).unwrap() < 1e-6);
    let par = imm("paraboloid");
    assert!(extrinsic_rho_hessian_check(&par, &[0.4, -0.3], &[1.0, 0.0]).unwrap() < 1e-6);
    assert_eq!(extrinsic_rho_hessian_check(&cat, &[0.0, 0.0], &[1.0, 0.0]).unwrap_err(), Error::BasePointCoincides);
}

#[test]
fn volume_ratios() {
    let cfg = QuadratureConfig::default();
    let grid = geometric_grid(0.5, 6.0, DEFAULT_GRID_POINTS);
    let r = volume_ratio_scan(&imm("plane"), 2.0, &grid, &cfg, &Sequential).unwrap();
    assert!(r.rows.iter().all(|row| (row.scaled - PI).abs() < 1e-3));
    assert!(r.constant_within_errors());

    let r = volume_ratio_scan(&imm("catenoid"), 2.0, &grid, &cfg, &Sequential).unwrap();
    assert!(r.is_nondecreasing(), "{r:?}");
    let last = r.rows.last().unwrap().scaled;
    assert!(last > PI && last < 2.0 * PI, "{last}");

    let r = volume_ratio_scan(&imm("enneper"), 2.0, &grid, &cfg, &Sequential).unwrap();
    assert!(r.is_nondecreasing(), "{r:?}");

    let err = volume_ratio_scan(&imm("enneper"), 2.0, &[20.0], &cfg, &Sequential).unwrap_err();
    assert_eq!(err, Error::WindowTooSmall);
}

#[test]
fn bernstein_reports() {
    let cfg = QuadratureConfig::default();
    let p = bernstein_report(&imm("plane"), 5.0, None, &cfg, &Sequential).unwrap();
    assert_eq!(p.delta, 0.0);
    assert_eq!(p.mu1, 0.0);
    assert_eq!(p.total_scalar_curvature, 0.0);
    assert_eq!(p.boundary_condition.min_slack, 0.0);
    // the theorem needs m ≥ 3, so the 2-plane only passes the boundary condition
    assert_eq!(p.part_ii.verdict, WindowVerdict::NotApplicable);

    let p3 = bernstein_report(&imm("plane3"), 5.0, None, &cfg.clone().with_rays(800), &Sequential).unwrap();
    assert!(p3.all_hypotheses_hold(), "{p3:?}");
    assert_eq!(p3.mu1, 1.0);

    let c = bernstein_report(&imm("catenoid"), 6.0, None, &cfg, &Sequential).unwrap();
    assert!(c.delta > 0.0 && c.mu2 < 0.0);
    assert_eq!(c.part_ii.verdict, WindowVerdict::NotApplicable);
    // finite total curvature: ∫‖A‖² → 8π
    let e = c.energy_rows.last().unwrap().energy;
    assert!(e < 8.0 * PI && e > 7.0 * PI, "{e}");

    let z2 = bernstein_report(&imm("cplx-z2"), 2.0, Some(1.0), &cfg, &Sequential).unwrap();
    assert!(z2.boundary_condition.holds && z2.boundary_condition.min_slack >= -1e-12, "{:?}", z2.boundary_condition);
}

#[test]
fn complex_gauss_map_energy() {
    let line = complex_gauss_energy_check(&imm("cplx-line"), &[0.3, 0.1]).unwrap();
    assert!(line.dgc_sq.abs() < 1e-20 && line.a_sq.abs() < 1e-20);

    let z2 = complex_gauss_energy_check(&imm("cplx-z2"), &[0.0, 0.0]).unwrap();
    assert!(z2.gap <= 1e-9 && z2.antiholomorphic_defect <= 1e-9, "{z2:?}");
    assert!((z2.a_sq - 16.0).abs() < 1e-12);

    let z3 = complex_gauss_energy_check(&imm("cplx-z3"), &[0.5, 0.0]).unwrap();
    assert!(z3.gap <= 1e-6 && z3.antiholomorphic_defect <= 1e-6, "{z3:?}");
    assert!(z3.a_sq > 0.0);

    assert_eq!(complex_gauss_energy_check(&imm("catenoid"), &[0.1, 0.1]).unwrap_err(), Error::NotKahlerCatalog);
}

#[test]
fn second_fundamental_form_is_j_invariant() {
    for id in ["cplx-z2", "cplx-z3"] {
        let i = imm(id);
        let a = second_fundamental_form(&i).unwrap();
        let d = j_invariance_defect(&a, &i.chart(), &[0.4, -0.3]).unwrap();
        assert!(d <= 1e-9, "{id}: {d}");
    }
}
