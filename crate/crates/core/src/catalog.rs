//! Named charts, forms and immersions used by scenarios and tests.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{BundleValuedForm, Connection};
use crate::linalg::Matrix;
use crate::manifold::{make_warped_chart, Chart, WarpedChart, ConformalMetric, CurvatureRegime, DomainBox, JetMode};
use crate::math::{cos, cosh, sin, sinh};
use crate::monotonicity::RegionMethod;
use crate::submanifold::{Immersion, ImmersionModel};

/// A chart together with a compact box for random sampling.
#[derive(Clone, Debug)]
pub struct CatalogChart {
    pub id: &'static str,
    pub chart: Chart,
    pub sample_box: DomainBox,
    pub description: &'static str,
}

pub const CHART_IDS: &[&str] = &[
    "flat-R2",
    "flat-R3",
    "flat-R4",
    "scaled-R2",
    "polar-R2",
    "conformal-R2",
    "conformal-R3",
    "flat-C1",
    "flat-C2",
    "warped-hyperbolic-R2",
    "warped-hyperbolic-R3",
    "warped-pinched-R3",
    "warped-power-R3",
    "warped-quadratic-R3",
];

fn warped_box(m: usize) -> DomainBox {
    let mut lo = vec![0.5];
    let mut hi = vec![3.0];
    for _ in 1..m - 1 {
        lo.push(0.3);
        hi.push(PI - 0.3);
    }
    lo.push(-PI);
    hi.push(PI);
    DomainBox::new(lo, hi)
}

/// Regime, dimension and description behind each warped catalog chart.
fn warped_entry(id: &str) -> Option<(CurvatureRegime, usize, &'static str)> {
    Some(match id {
        "polar-R2" => (CurvatureRegime::flat(), 2, "flat plane in polar coordinates (r, theta)"),
        "warped-hyperbolic-R2" => (CurvatureRegime::constant_negative(1.0), 2, "hyperbolic plane, K = -1"),
        "warped-hyperbolic-R3" => (CurvatureRegime::constant_negative(1.0), 3, "hyperbolic space, K = -1"),
        "warped-pinched-R3" => {
            (CurvatureRegime::Hyperbolic { alpha: 1.5, beta: 0.5 }, 3, "radial curvature oscillating in [-2.25, -0.25]")
        }
        "warped-power-R3" => (
            CurvatureRegime::PowerDecay { a: 0.5, b: 0.5, epsilon: 0.5 },
            3,
            "radial curvature within +-0.5/(1+r^2)^1.5",
        ),
        "warped-quadratic-R3" => (
            CurvatureRegime::QuadraticDecay { a: 1.0, b: 0.4 },
            3,
            "radial curvature between -1/(1+r^2) and 0.16/(1+r^2)",
        ),
        _ => return None,
    })
}

/// The warped catalog chart `id` together with its tabulated profile.
pub fn warped_chart(id: &str) -> Result<WarpedChart> {
    let (regime, m, _) =
        warped_entry(id).ok_or_else(|| Error::InvalidInput(format!("'{id}' is not a warped catalog chart")))?;
    let w = make_warped_chart(&regime, m)?;
    Ok(WarpedChart { chart: w.chart.with_label(id), ..w })
}

pub fn chart(id: &str) -> Result<CatalogChart> {
    let flat = |id: &'static str, m: usize| CatalogChart {
        id,
        chart: Chart::flat(m, 10.0).with_label(id),
        sample_box: DomainBox::cube(m, 2.0),
        description: "Euclidean coordinates",
    };
    let conformal = |id: &'static str, linear: Vec<f64>, quadratic: Vec<f64>| {
        let m = linear.len();
        CatalogChart {
            id,
            chart: Chart::new(Arc::new(ConformalMetric { linear, quadratic }), JetMode::Analytic, DomainBox::cube(m, 5.0), id),
            sample_box: DomainBox::cube(m, 1.5),
            description: "conformally flat metric exp(2 phi) I with quadratic phi",
        }
    };
    if let Some((_, m, description)) = warped_entry(id) {
        let id = CHART_IDS.iter().copied().find(|k| *k == id).unwrap_or("polar-R2");
        return Ok(CatalogChart { id, chart: warped_chart(id)?.chart, sample_box: warped_box(m), description });
    }
    let c = match id {
        "flat-R2" => flat("flat-R2", 2),
        "flat-R3" => flat("flat-R3", 3),
        "flat-R4" => flat("flat-R4", 4),
        "scaled-R2" => CatalogChart {
            id: "scaled-R2",
            chart: Chart::scaled_flat(2, 4.0, 10.0).with_label("scaled-R2"),
            sample_box: DomainBox::cube(2, 2.0),
            description: "constant metric 4 I",
        },
        "conformal-R2" => conformal("conformal-R2", vec![0.1, -0.05], vec![0.02, 0.03]),
        "conformal-R3" => conformal("conformal-R3", vec![0.1, -0.05, 0.08], vec![0.02, 0.03, -0.01]),
        "flat-C1" => CatalogChart {
            id: "flat-C1",
            chart: Chart::flat_complex(1, 10.0).with_label("flat-C1"),
            sample_box: DomainBox::cube(2, 2.0),
            description: "C with coordinates (x1, y1)",
        },
        "flat-C2" => CatalogChart {
            id: "flat-C2",
            chart: Chart::flat_complex(2, 10.0).with_label("flat-C2"),
            sample_box: DomainBox::cube(4, 2.0),
            description: "C^2 with coordinates (x1, y1, x2, y2)",
        },
        other => return Err(Error::InvalidInput(format!("unknown chart id '{other}'"))),
    };
    Ok(c)
}

/// Point of `b` at unit-cube coordinates `u`.
pub fn box_point(b: &DomainBox, u: &[f64]) -> Vec<f64> {
    (0..b.dim()).map(|k| b.lower[k] + u[k] * (b.upper[k] - b.lower[k])).collect()
}

#[derive(Clone, Debug)]
pub struct CatalogForm {
    pub id: &'static str,
    pub chart_id: &'static str,
    pub form: BundleValuedForm,
    pub conserved: bool,
    pub j_invariant: bool,
    pub description: &'static str,
}

pub const FORM_IDS: &[&str] = &[
    "dx1-R2",
    "dx1-R3",
    "dx12-R3",
    "unit-R3",
    "rotation-R2",
    "kahler-C2",
    "holo-z2-C1",
    "poly2-conformal-R3",
    "section-connection-R2",
    "dr-hyperbolic-R3",
];

pub fn form(id: &str) -> Result<CatalogForm> {
    let entry = |id, chart_id, form: BundleValuedForm, conserved, j_invariant, description| CatalogForm {
        id,
        chart_id,
        form: form.with_label(id),
        conserved,
        j_invariant,
        description,
    };
    let f = match id {
        "dx1-R2" => entry("dx1-R2", "flat-R2", BundleValuedForm::parse(2, "dx1")?, true, false, "constant 1-form"),
        "dx1-R3" => entry("dx1-R3", "flat-R3", BundleValuedForm::parse(3, "dx1")?, true, false, "constant 1-form"),
        "dx12-R3" => entry("dx12-R3", "flat-R3", BundleValuedForm::parse(3, "dx1^dx2")?, true, false, "constant 2-form"),
        "unit-R3" => entry("unit-R3", "flat-R3", BundleValuedForm::parse(3, "1")?, true, false, "constant section, p = 0"),
        "rotation-R2" => entry(
            "rotation-R2",
            "flat-R2",
            BundleValuedForm::parse(2, "x2*dx1 - x1*dx2")?,
            false,
            false,
            "co-closed but not closed 1-form",
        ),
        "kahler-C2" => entry(
            "kahler-C2",
            "flat-C2",
            BundleValuedForm::parse(4, "dx1^dx2 + dx3^dx4")?,
            true,
            true,
            "Kähler form of C^2",
        ),
        "holo-z2-C1" => entry(
            "holo-z2-C1",
            "flat-C1",
            BundleValuedForm::parse_vector(2, &["2*x1*dx1 - 2*x2*dx2", "2*x2*dx1 + 2*x1*dx2"])?,
            true,
            true,
            "differential of the holomorphic map z -> z^2",
        ),
        "poly2-conformal-R3" => entry(
            "poly2-conformal-R3",
            "conformal-R3",
            BundleValuedForm::parse(3, "x1*dx1^dx2 + x3^2*dx2^dx3 - 0.5*dx1^dx3")?,
            false,
            false,
            "polynomial 2-form on a curved chart",
        ),
        "section-connection-R2" => {
            let a1 = Matrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0]);
            let a2 = Matrix::from_row_slice(2, 2, &[0.0, 0.3, -0.3, 0.0]);
            let form = BundleValuedForm::parse_vector(2, &["x1*dx1 + dx2", "x2*dx2 - 0.5*x1*dx1"])?
                .with_connection(Connection::Constant(vec![a1, a2]));
            entry("section-connection-R2", "conformal-R2", form, false, false, "rank-2 valued 1-form with a metric connection")
        }
        "dr-hyperbolic-R3" => entry(
            "dr-hyperbolic-R3",
            "warped-hyperbolic-R3",
            BundleValuedForm::parse(3, "dx1")?,
            false,
            false,
            "dr on hyperbolic space",
        ),
        other => return Err(Error::InvalidInput(format!("unknown form id '{other}'"))),
    };
    Ok(f)
}

/// Real-analytic surfaces and Kähler curves with exact jets.
#[derive(Clone, Debug)]
enum Surface {
    Plane(usize),
    Catenoid,
    Helicoid,
    Enneper,
    Paraboloid,
    /// `z ↦ (p_1(z), …, p_k(z))` with polynomial components.
    Holomorphic(Vec<Vec<Complex64>>),
}

fn poly(c: &[Complex64], z: Complex64) -> [Complex64; 3] {
    // value, first and second derivative by Horner
    let zero = Complex64::new(0.0, 0.0);
    let (mut p, mut dp, mut ddp) = (zero, zero, zero);
    for a in c.iter().rev() {
        ddp = ddp * z + dp * 2.0;
        dp = dp * z + p;
        p = p * z + a;
    }
    [p, dp, ddp]
}

impl ImmersionModel for Surface {
    fn param_dim(&self) -> usize {
        match self {
            Surface::Plane(m) => *m,
            _ => 2,
        }
    }

    fn ambient_dim(&self) -> usize {
        match self {
            Surface::Plane(m) => m + 1,
            Surface::Holomorphic(c) => 2 * c.len(),
            _ => 3,
        }
    }

    fn position(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Surface::Plane(m) => {
                let mut u = x[..*m].to_vec();
                u.push(0.0);
                u
            }
            Surface::Catenoid => vec![cosh(x[0]) * cos(x[1]), cosh(x[0]) * sin(x[1]), x[0]],
            Surface::Helicoid => vec![x[0] * cos(x[1]), x[0] * sin(x[1]), x[1]],
            Surface::Enneper => {
                let (u, v) = (x[0], x[1]);
                vec![u - u * u * u / 3.0 + u * v * v, -v + v * v * v / 3.0 - u * u * v, u * u - v * v]
            }
            Surface::Paraboloid => vec![x[0], x[1], x[0] * x[0] + x[1] * x[1]],
            Surface::Holomorphic(c) => {
                let z = Complex64::new(x[0], x[1]);
                c.iter().flat_map(|p| {
                    let v = poly(p, z)[0];
                    [v.re, v.im]
                })
                .collect()
            }
        }
    }

    fn jacobian(&self, x: &[f64]) -> Option<Matrix> {
        let cols: Vec<Vec<f64>> = match self {
            Surface::Plane(m) => (0..*m)
                .map(|i| {
                    let mut c = vec![0.0; m + 1];
                    c[i] = 1.0;
                    c
                })
                .collect(),
            Surface::Catenoid => {
                let (s, t) = (x[0], x[1]);
                vec![vec![sinh(s) * cos(t), sinh(s) * sin(t), 1.0], vec![-cosh(s) * sin(t), cosh(s) * cos(t), 0.0]]
            }
            Surface::Helicoid => {
                let (s, t) = (x[0], x[1]);
                vec![vec![cos(t), sin(t), 0.0], vec![-s * sin(t), s * cos(t), 1.0]]
            }
            Surface::Enneper => {
                let (u, v) = (x[0], x[1]);
                vec![vec![1.0 - u * u + v * v, -2.0 * u * v, 2.0 * u], vec![2.0 * u * v, -1.0 + v * v - u * u, -2.0 * v]]
            }
            Surface::Paraboloid => vec![vec![1.0, 0.0, 2.0 * x[0]], vec![0.0, 1.0, 2.0 * x[1]]],
            Surface::Holomorphic(c) => {
                let z = Complex64::new(x[0], x[1]);
                let d: Vec<Complex64> = c.iter().map(|p| poly(p, z)[1]).collect();
                // ∂_x = f', ∂_y = i f'
                vec![d.iter().flat_map(|w| [w.re, w.im]).collect(), d.iter().flat_map(|w| [-w.im, w.re]).collect()]
            }
        };
        let n = self.ambient_dim();
        Some(Matrix::from_fn(n, cols.len(), |a, i| cols[i][a]))
    }

    fn second(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        let out = match self {
            Surface::Plane(m) => vec![vec![0.0; m + 1]; m * m],
            Surface::Catenoid => {
                let (s, t) = (x[0], x[1]);
                let st = vec![-sinh(s) * sin(t), sinh(s) * cos(t), 0.0];
                vec![
                    vec![cosh(s) * cos(t), cosh(s) * sin(t), 0.0],
                    st.clone(),
                    st,
                    vec![-cosh(s) * cos(t), -cosh(s) * sin(t), 0.0],
                ]
            }
            Surface::Helicoid => {
                let (s, t) = (x[0], x[1]);
                let st = vec![-sin(t), cos(t), 0.0];
                vec![vec![0.0; 3], st.clone(), st, vec![-s * cos(t), -s * sin(t), 0.0]]
            }
            Surface::Enneper => {
                let (u, v) = (x[0], x[1]);
                let uv = vec![2.0 * v, -2.0 * u, 0.0];
                vec![vec![-2.0 * u, -2.0 * v, 2.0], uv.clone(), uv, vec![2.0 * u, 2.0 * v, -2.0]]
            }
            Surface::Paraboloid => {
                vec![vec![0.0, 0.0, 2.0], vec![0.0; 3], vec![0.0; 3], vec![0.0, 0.0, 2.0]]
            }
            Surface::Holomorphic(c) => {
                let z = Complex64::new(x[0], x[1]);
                let d: Vec<Complex64> = c.iter().map(|p| poly(p, z)[2]).collect();
                // ∂xx = f'', ∂xy = i f'', ∂yy = −f''
                let xx: Vec<f64> = d.iter().flat_map(|w| [w.re, w.im]).collect();
                let xy: Vec<f64> = d.iter().flat_map(|w| [-w.im, w.re]).collect();
                let yy: Vec<f64> = xx.iter().map(|v| -v).collect();
                vec![xx, xy.clone(), xy, yy]
            }
        };
        Some(out)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogImmersion {
    pub id: &'static str,
    pub immersion: Immersion,
    pub minimal: bool,
    pub kahler: bool,
    pub description: &'static str,
}

pub const IMMERSION_IDS: &[&str] =
    &["plane", "plane3", "catenoid", "helicoid", "enneper", "cplx-line", "cplx-z2", "cplx-z3", "paraboloid"];

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn immersion(id: &str) -> Result<CatalogImmersion> {
    let build = |s: Surface, domain: DomainBox, center: Vec<f64>, id: &'static str| Immersion::new(Arc::new(s), domain, center, id);
    let holo = |tail: Vec<Complex64>, id: &'static str| -> Result<Immersion> {
        let s = Surface::Holomorphic(vec![vec![cz(0.0, 0.0), cz(1.0, 0.0)], tail]);
        build(s, DomainBox::cube(2, 3.0), vec![0.0, 0.0], id)?.with_complex_structure()
    };
    let (imm, minimal, kahler, description) = match id {
        "plane" => (build(Surface::Plane(2), DomainBox::cube(2, 10.0), vec![0.0; 2], "plane")?, true, false, "affine 2-plane in R^3"),
        "plane3" => (build(Surface::Plane(3), DomainBox::cube(3, 10.0), vec![0.0; 3], "plane3")?, true, false, "affine 3-plane in R^4"),
        "catenoid" => {
            let domain = DomainBox::new(vec![-3.0, -PI], vec![3.0, PI]).with_periodic(1);
            let imm = build(Surface::Catenoid, domain, vec![0.0, 0.0], "catenoid")?
                .with_method(RegionMethod::Grid { line_axis: Some(0) });
            (imm, true, false, "catenoid (cosh s cos t, cosh s sin t, s), base point on the neck")
        }
        "helicoid" => (
            build(Surface::Helicoid, DomainBox::cube(2, 8.0), vec![0.0; 2], "helicoid")?,
            true,
            false,
            "helicoid (s cos t, s sin t, t)",
        ),
        "enneper" => (build(Surface::Enneper, DomainBox::cube(2, 3.0), vec![0.0; 2], "enneper")?, true, false, "Enneper surface"),
        "cplx-line" => (holo(vec![cz(0.0, 0.0), cz(1.0, 1.0)], "cplx-line")?, true, true, "complex line (z, (1+i) z) in C^2"),
        "cplx-z2" => (holo(vec![cz(0.0, 0.0), cz(0.0, 0.0), cz(1.0, 0.0)], "cplx-z2")?, true, true, "complex curve (z, z^2) in C^2"),
        "cplx-z3" => (
            holo(vec![cz(0.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(1.0, 0.0)], "cplx-z3")?,
            true,
            true,
            "complex curve (z, z^3) in C^2",
        ),
        "paraboloid" => (
            build(Surface::Paraboloid, DomainBox::cube(2, 3.0), vec![0.0; 2], "paraboloid")?,
            false,
            false,
            "paraboloid graph of x1^2 + x2^2 (non-minimal control)",
        ),
        other => return Err(Error::InvalidInput(format!("unknown immersion id '{other}'"))),
    };
    let id = IMMERSION_IDS.iter().copied().find(|k| *k == id).unwrap_or("plane");
    Ok(CatalogImmersion { id, immersion: imm, minimal, kahler, description })
}

/// One-line listing of every catalog entry.
pub fn listing() -> Result<Vec<String>> {
    let mut out = Vec::new();
    for id in CHART_IDS {
        let c = chart(id)?;
        out.push(format!("chart\t{id}\tdim={}\t{}", c.chart.dim(), c.description));
    }
    for id in FORM_IDS {
        let f = form(id)?;
        out.push(format!(
            "form\t{id}\tchart={}\tdegree={}\trank={}\tconserved={}\t{}",
            f.chart_id,
            f.form.degree(),
            f.form.rank(),
            f.conserved,
            f.description
        ));
    }
    for id in IMMERSION_IDS {
        let i = immersion(id)?;
        out.push(format!(
            "immersion\t{id}\tm={}\tN={}\tminimal={}\tkahler={}\t{}",
            i.immersion.param_dim(),
            i.immersion.ambient_dim(),
            i.minimal,
            i.kahler,
            i.description
        ));
    }
    Ok(out)
}
