//! Scenario documents: parsing, reference resolution and validation.
//!
//! A scenario is a JSON object `{id, kind, params, quadrature?, output?}`.
//! `params` is parsed strictly against the struct for `kind`, and every
//! catalog reference is resolved before anything is computed.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use schemars::JsonSchema;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use selab_core::catalog;
use selab_core::exhaustion::{ClosedFormRegime, Exhaustion, GrowthKind};
use selab_core::forms::{BundleValuedForm, Connection};
use selab_core::manifold::{make_warped_chart_with_range, Chart, ConformalMetric, CurvatureRegime, DomainBox, JetMode, ScalarField};
use selab_core::monotonicity::{geometric_grid, QuadratureConfig, RegionMethod};
use selab_core::submanifold::Immersion;
use selab_core::Matrix;

use crate::error::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    GrowthOrder,
    IntegralFormula,
    RatioScan,
    AnnulusScan,
    VolumeScan,
    Bernstein,
    GaussEnergy,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::GrowthOrder,
        Kind::IntegralFormula,
        Kind::RatioScan,
        Kind::AnnulusScan,
        Kind::VolumeScan,
        Kind::Bernstein,
        Kind::GaussEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::GrowthOrder => "growth-order",
            Kind::IntegralFormula => "integral-formula",
            Kind::RatioScan => "ratio-scan",
            Kind::AnnulusScan => "annulus-scan",
            Kind::VolumeScan => "volume-scan",
            Kind::Bernstein => "bernstein",
            Kind::GaussEnergy => "gauss-energy",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The full document for one kind. Only used for parsing and schemas.
#[derive(Debug, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Document<P> {
    /// File stem of the reports: letters, digits, `.`, `_` and `-`.
    pub id: String,
    pub kind: Kind,
    pub params: P,
    #[serde(default)]
    pub quadrature: QuadratureOverrides,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Report directory, relative to the scenario file.
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub grid_resolution: Option<usize>,
    pub boundary_rays: Option<usize>,
    pub method: Option<MethodSpec>,
    pub center: Option<Vec<f64>>,
    pub march_steps: Option<usize>,
    pub critical_cutoff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize, JsonSchema)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodSpec {
    Rays,
    Grid {
        #[serde(default)]
        line_axis: Option<usize>,
    },
}

impl QuadratureOverrides {
    pub fn apply(&self, mut cfg: QuadratureConfig) -> QuadratureConfig {
        if let Some(v) = self.grid_resolution {
            cfg.grid_resolution = v;
        }
        if let Some(v) = self.boundary_rays {
            cfg.boundary_rays = v;
        }
        if let Some(m) = &self.method {
            cfg.method = match m {
                MethodSpec::Rays => RegionMethod::Rays,
                MethodSpec::Grid { line_axis } => RegionMethod::Grid { line_axis: *line_axis },
            };
        }
        if let Some(c) = &self.center {
            cfg.center = Some(c.clone());
        }
        if let Some(v) = self.march_steps {
            cfg.march_steps = v;
        }
        if let Some(v) = self.critical_cutoff {
            cfg.critical_cutoff = v;
        }
        cfg
    }
}

/// A catalog chart ID or an inline chart.
#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(untagged)]
pub enum ChartRef {
    Catalog(String),
    Inline(InlineChart),
}

fn default_half_width() -> f64 {
    10.0
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InlineChart {
    Flat {
        dim: usize,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    FlatComplex {
        complex_dim: usize,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    /// Constant metric `factor · I`.
    Scaled {
        dim: usize,
        factor: f64,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    /// `exp(2φ) I` with `φ = Σ linear_k x_k + Σ quadratic_k x_k²`.
    Conformal {
        linear: Vec<f64>,
        quadratic: Vec<f64>,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    /// Polar coordinates `(r, θ_1, …)` on `dr² + f(r)² g_sphere`.
    Warped {
        dim: usize,
        regime: RegimeSpec,
        #[serde(default)]
        r_max: Option<f64>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(tag = "regime", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegimeSpec {
    Hyperbolic { alpha: f64, beta: f64 },
    PowerDecay { a: f64, b: f64, epsilon: f64 },
    QuadraticDecay { a: f64, b: f64 },
}

impl RegimeSpec {
    fn regime(&self) -> CurvatureRegime {
        match *self {
            RegimeSpec::Hyperbolic { alpha, beta } => CurvatureRegime::Hyperbolic { alpha, beta },
            RegimeSpec::PowerDecay { a, b, epsilon } => CurvatureRegime::PowerDecay { a, b, epsilon },
            RegimeSpec::QuadraticDecay { a, b } => CurvatureRegime::QuadraticDecay { a, b },
        }
    }
}

/// A catalog form ID or an inline polynomial form.
#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(untagged)]
pub enum FormRef {
    Catalog(String),
    Inline(InlineForm),
}

/// Polynomial form text, one expression per fiber slot, e.g.
/// `"x2*dx1 - x1*dx2"` or `"2*dx1^dx2 + x3^2*dx2^dx3"`.
#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct InlineForm {
    pub dim: usize,
    pub slots: Vec<String>,
    /// Constant connection matrices `A_k` (rank × rank, row-major rows),
    /// indexed by coordinate `k`.
    #[serde(default)]
    pub connection: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExhaustionRef {
    /// `Ψ = Σ x_k² / a_k`.
    Quadratic { a: Vec<f64> },
    /// `Ψ = Σ |z_k|² / a_k` in coordinates `(x1, y1, x2, y2, …)`.
    ComplexQuadratic { a: Vec<f64> },
    /// `Φ = |x − center|`, the origin by default.
    Euclidean {
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `Φ = x1`, the distance from the pole on a warped chart.
    Radial,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SampleSpec {
    /// `n` points per axis, endpoints included.
    Grid { lower: Vec<f64>, upper: Vec<f64>, n: usize },
    Points { points: Vec<Vec<f64>> },
    /// Points `(r, π/2, …, π/2, 0)` of a polar chart at evenly spaced radii.
    Radii { from: f64, to: f64, count: usize },
}

/// Explicit radii, or a geometric progression.
#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(untagged)]
pub enum RadiusGrid {
    List(Vec<f64>),
    Geometric { from: f64, to: f64, count: usize },
}

fn default_tol() -> f64 {
    1e-9
}

/// `|actual − value| ≤ tol`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub value: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(tag = "regime", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClosedFormSpec {
    RealQuadratic { a: f64, b: f64, m: usize, p: usize },
    ComplexHyperbolic { alpha: f64, beta: f64, m: usize, p: usize },
    ComplexPower { a: f64, b: f64, epsilon: f64, m: usize, p: usize },
    ComplexQuadratic { a: f64, b: f64, m: usize, p: usize },
    VolumeHyperbolic {
        beta: f64,
        m: usize,
        #[serde(default)]
        r: Option<f64>,
    },
    VolumePower { b: f64, epsilon: f64, m: usize },
    VolumeQuadratic { b: f64, m: usize },
}

impl ClosedFormSpec {
    pub fn regime(&self) -> ClosedFormRegime {
        match *self {
            ClosedFormSpec::RealQuadratic { a, b, m, p } => ClosedFormRegime::RealQuadratic { a, b, m, p },
            ClosedFormSpec::ComplexHyperbolic { alpha, beta, m, p } => ClosedFormRegime::ComplexHyperbolic { alpha, beta, m, p },
            ClosedFormSpec::ComplexPower { a, b, epsilon, m, p } => ClosedFormRegime::ComplexPower { a, b, epsilon, m, p },
            ClosedFormSpec::ComplexQuadratic { a, b, m, p } => ClosedFormRegime::ComplexQuadratic { a, b, m, p },
            ClosedFormSpec::VolumeHyperbolic { beta, m, r } => ClosedFormRegime::VolumeHyperbolic { beta, m, r },
            ClosedFormSpec::VolumePower { b, epsilon, m } => ClosedFormRegime::VolumePower { b, epsilon, m },
            ClosedFormSpec::VolumeQuadratic { b, m } => ClosedFormRegime::VolumeQuadratic { b, m },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum GrowthSpec {
    Real,
    Complex,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrowthExpect {
    pub k1: Option<Target>,
    pub k2: Option<Target>,
    pub lambda: Option<Target>,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrowthOrderParams {
    pub chart: ChartRef,
    pub exhaustion: ExhaustionRef,
    pub p: usize,
    pub growth: GrowthSpec,
    pub sample: SampleSpec,
    #[serde(default)]
    pub critical_cutoff: Option<f64>,
    /// Reported next to the estimate; never asserted.
    #[serde(default)]
    pub closed_form: Option<ClosedFormSpec>,
    #[serde(default)]
    pub expect: GrowthExpect,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct IntegralExpect {
    pub lhs: Option<Target>,
    pub rhs: Option<Target>,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct IntegralFormulaParams {
    /// Defaults to the catalog form's own chart.
    #[serde(default)]
    pub chart: Option<ChartRef>,
    pub form: FormRef,
    #[serde(default)]
    pub exhaustion: Option<ExhaustionRef>,
    pub t: f64,
    #[serde(default)]
    pub expect: IntegralExpect,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScanExpect {
    #[serde(default = "yes")]
    pub nondecreasing: bool,
    #[serde(default)]
    pub strictly_increasing: bool,
    /// Scaled values agree within three error bars.
    #[serde(default)]
    pub constant: bool,
    /// Every scaled value.
    #[serde(default)]
    pub scaled: Option<Target>,
    /// Open interval for the last scaled value.
    #[serde(default)]
    pub final_scaled_between: Option<[f64; 2]>,
    /// Annulus scans only.
    #[serde(default)]
    pub boundary_holds: Option<bool>,
}

impl Default for ScanExpect {
    fn default() -> Self {
        Self {
            nondecreasing: true,
            strictly_increasing: false,
            constant: false,
            scaled: None,
            final_scaled_between: None,
            boundary_holds: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RatioScanParams {
    #[serde(default)]
    pub chart: Option<ChartRef>,
    pub form: FormRef,
    #[serde(default)]
    pub exhaustion: Option<ExhaustionRef>,
    pub lambda: f64,
    pub radii: RadiusGrid,
    /// Certify the conservation law on level-set samples first.
    #[serde(default)]
    pub certify: bool,
    #[serde(default)]
    pub expect: ScanExpect,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AnnulusScanParams {
    #[serde(default)]
    pub chart: Option<ChartRef>,
    pub form: FormRef,
    #[serde(default)]
    pub exhaustion: Option<ExhaustionRef>,
    pub r0: f64,
    pub lambda: f64,
    pub radii: RadiusGrid,
    #[serde(default)]
    pub certify: bool,
    #[serde(default)]
    pub expect: ScanExpect,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct VolumeScanParams {
    pub immersion: String,
    /// Defaults to the dimension of the immersion.
    #[serde(default)]
    pub lambda: Option<f64>,
    pub radii: RadiusGrid,
    #[serde(default)]
    pub expect: ScanExpect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictSpec {
    HoldsOnWindow,
    Fails,
    NotApplicable,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BernsteinExpect {
    pub delta: Option<Target>,
    pub total_scalar_curvature: Option<Target>,
    pub minimal: Option<bool>,
    pub boundary_condition: Option<bool>,
    pub part_i: Option<VerdictSpec>,
    pub part_ii: Option<VerdictSpec>,
    pub all_hypotheses_hold: Option<bool>,
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BernsteinParams {
    pub immersion: String,
    pub window: f64,
    /// Radius for the boundary condition; the window when absent.
    #[serde(default)]
    pub r0: Option<f64>,
    #[serde(default)]
    pub expect: BernsteinExpect,
}

fn default_gauss_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GaussEnergyParams {
    pub immersion: String,
    pub points: Vec<Vec<f64>>,
    /// Bound on both the energy gap and the anti-holomorphic defect.
    #[serde(default = "default_gauss_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub enum Params {
    GrowthOrder(GrowthOrderParams),
    IntegralFormula(IntegralFormulaParams),
    RatioScan(RatioScanParams),
    AnnulusScan(AnnulusScanParams),
    VolumeScan(VolumeScanParams),
    Bernstein(BernsteinParams),
    GaussEnergy(GaussEnergyParams),
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub kind: Kind,
    pub params: Params,
    pub quadrature: QuadratureOverrides,
    pub output: OutputSpec,
}

#[derive(Deserialize)]
struct Header {
    kind: Option<String>,
}

fn config(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn strict<P: DeserializeOwned>(text: &str) -> Result<Document<P>, RunError> {
    serde_json::from_str(text).map_err(|e| config(format!("scenario does not match its kind: {e}")))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, RunError> {
        let header: Header = serde_json::from_str(text).map_err(|e| config(format!("scenario is not valid JSON: {e}")))?;
        let name = header.kind.ok_or_else(|| config("missing \"kind\""))?;
        let kind = Kind::parse(&name).ok_or_else(|| config(format!("unknown kind '{name}'")))?;
        macro_rules! doc {
            ($p:ty, $v:ident) => {{
                let d = strict::<$p>(text)?;
                (d.id, Params::$v(d.params), d.quadrature, d.output)
            }};
        }
        let (id, params, quadrature, output) = match kind {
            Kind::GrowthOrder => doc!(GrowthOrderParams, GrowthOrder),
            Kind::IntegralFormula => doc!(IntegralFormulaParams, IntegralFormula),
            Kind::RatioScan => doc!(RatioScanParams, RatioScan),
            Kind::AnnulusScan => doc!(AnnulusScanParams, AnnulusScan),
            Kind::VolumeScan => doc!(VolumeScanParams, VolumeScan),
            Kind::Bernstein => doc!(BernsteinParams, Bernstein),
            Kind::GaussEnergy => doc!(GaussEnergyParams, GaussEnergy),
        };
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-')) || id.starts_with('.') {
            return Err(config(format!("id '{id}' must be a plain file stem")));
        }
        Ok(Scenario { id, kind, params, quadrature, output })
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }
}

/// A scenario with every reference resolved, ready to compute.
pub struct Resolved {
    pub chart: Option<Chart>,
    pub form: Option<BundleValuedForm>,
    pub exhaustion: Option<Exhaustion>,
    pub immersion: Option<Immersion>,
    /// Whether the immersion is catalogued as minimal.
    pub minimal: Option<bool>,
    pub sample: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub quadrature: QuadratureConfig,
}

fn core_err(what: &str) -> impl Fn(selab_core::Error) -> RunError + '_ {
    move |e| config(format!("{what}: {e}"))
}

pub fn resolve_chart(c: &ChartRef) -> Result<Chart, RunError> {
    match c {
        ChartRef::Catalog(id) => Ok(catalog::chart(id).map_err(core_err("chart"))?.chart),
        ChartRef::Inline(inline) => {
            let positive = |w: f64| if w > 0.0 && w.is_finite() { Ok(()) } else { Err(config("half_width must be positive")) };
            let nonzero = |d: usize| if d > 0 { Ok(()) } else { Err(config("chart dimension must be positive")) };
            match inline {
                InlineChart::Flat { dim, half_width } => {
                    nonzero(*dim)?;
                    positive(*half_width)?;
                    Ok(Chart::flat(*dim, *half_width))
                }
                InlineChart::FlatComplex { complex_dim, half_width } => {
                    nonzero(*complex_dim)?;
                    positive(*half_width)?;
                    Ok(Chart::flat_complex(*complex_dim, *half_width))
                }
                InlineChart::Scaled { dim, factor, half_width } => {
                    nonzero(*dim)?;
                    positive(*half_width)?;
                    if !(*factor > 0.0) {
                        return Err(config("scaled chart factor must be positive"));
                    }
                    Ok(Chart::scaled_flat(*dim, *factor, *half_width))
                }
                InlineChart::Conformal { linear, quadratic, half_width } => {
                    nonzero(linear.len())?;
                    positive(*half_width)?;
                    if linear.len() != quadratic.len() {
                        return Err(config("conformal chart needs equally long linear and quadratic tables"));
                    }
                    let m = linear.len();
                    let model = ConformalMetric { linear: linear.clone(), quadratic: quadratic.clone() };
                    Ok(Chart::new(Arc::new(model), JetMode::Analytic, DomainBox::cube(m, *half_width), "inline-conformal"))
                }
                InlineChart::Warped { dim, regime, r_max } => {
                    let r_max = r_max.unwrap_or(selab_core::manifold::DEFAULT_WARP_RANGE);
                    Ok(make_warped_chart_with_range(&regime.regime(), *dim, r_max).map_err(core_err("warped chart"))?.chart)
                }
            }
        }
    }
}

fn resolve_form(f: &FormRef) -> Result<(BundleValuedForm, Option<Chart>), RunError> {
    match f {
        FormRef::Catalog(id) => {
            let entry = catalog::form(id).map_err(core_err("form"))?;
            let chart = catalog::chart(entry.chart_id).map_err(core_err("chart"))?.chart;
            Ok((entry.form, Some(chart)))
        }
        FormRef::Inline(inline) => {
            if inline.slots.is_empty() {
                return Err(config("inline form needs at least one slot"));
            }
            let slots: Vec<&str> = inline.slots.iter().map(String::as_str).collect();
            let mut form = BundleValuedForm::parse_vector(inline.dim, &slots).map_err(core_err("form"))?;
            if let Some(tables) = &inline.connection {
                let k = slots.len();
                if tables.len() != inline.dim {
                    return Err(config(format!("connection needs {} matrices, one per coordinate", inline.dim)));
                }
                let mut mats = Vec::with_capacity(tables.len());
                for t in tables {
                    if t.len() != k || t.iter().any(|row| row.len() != k) {
                        return Err(config(format!("connection matrices must be {k} x {k}")));
                    }
                    let flat: Vec<f64> = t.iter().flatten().copied().collect();
                    mats.push(Matrix::from_row_slice(k, k, &flat));
                }
                form = form.with_connection(Connection::Constant(mats));
            }
            Ok((form, None))
        }
    }
}

fn resolve_exhaustion(e: &ExhaustionRef, dim: usize) -> Result<Exhaustion, RunError> {
    let positive = |a: &[f64]| a.iter().all(|v| *v > 0.0 && v.is_finite());
    let exh = match e {
        ExhaustionRef::Quadratic { a } => {
            if !positive(a) {
                return Err(config("quadratic exhaustion needs positive a_k"));
            }
            Exhaustion::quadratic(a)
        }
        ExhaustionRef::ComplexQuadratic { a } => {
            if !positive(a) {
                return Err(config("complex-quadratic exhaustion needs positive a_k"));
            }
            Exhaustion::complex_quadratic(a)
        }
        ExhaustionRef::Euclidean { center } => Exhaustion::euclidean(center.clone().unwrap_or_else(|| vec![0.0; dim])),
        ExhaustionRef::Radial => {
            let mut center = vec![std::f64::consts::FRAC_PI_2; dim];
            center[0] = 0.0;
            Exhaustion::from_phi(ScalarField::coordinate(dim, 0), center)
        }
    };
    if exh.dim() != dim {
        return Err(config(format!("exhaustion has dimension {}, chart has {dim}", exh.dim())));
    }
    Ok(exh)
}

fn resolve_sample(s: &SampleSpec, dim: usize) -> Result<Vec<Vec<f64>>, RunError> {
    let pts = match s {
        SampleSpec::Grid { lower, upper, n } => {
            if lower.len() != dim || upper.len() != dim {
                return Err(config(format!("sample grid bounds must have {dim} entries")));
            }
            if *n < 2 || lower.iter().zip(upper).any(|(a, b)| !(a < b)) {
                return Err(config("sample grid needs n >= 2 and lower < upper"));
            }
            selab_core::exhaustion::grid_sample(lower, upper, *n)
        }
        SampleSpec::Points { points } => points.clone(),
        SampleSpec::Radii { from, to, count } => {
            if !(*from > 0.0 && from < to) || *count < 2 {
                return Err(config("radii sample needs 0 < from < to and count >= 2"));
            }
            (0..*count)
                .map(|i| {
                    let mut x = vec![std::f64::consts::FRAC_PI_2; dim];
                    x[0] = from + (to - from) * i as f64 / (*count - 1) as f64;
                    if dim >= 2 {
                        x[dim - 1] = 0.0;
                    }
                    x
                })
                .collect()
        }
    };
    if pts.is_empty() {
        return Err(config("sample is empty"));
    }
    if pts.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(config(format!("sample points must have {dim} finite coordinates")));
    }
    Ok(pts)
}

fn resolve_radii(r: &RadiusGrid) -> Result<Vec<f64>, RunError> {
    let radii = match r {
        RadiusGrid::List(v) => v.clone(),
        RadiusGrid::Geometric { from, to, count } => {
            if !(*from > 0.0 && from < to) || *count < 2 {
                return Err(config("geometric radii need 0 < from < to and count >= 2"));
            }
            geometric_grid(*from, *to, *count)
        }
    };
    if radii.is_empty() || radii.iter().any(|v| !(*v > 0.0 && v.is_finite())) || radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(config("radii must be positive and strictly increasing"));
    }
    Ok(radii)
}

fn resolve_immersion(id: &str) -> Result<(Immersion, bool), RunError> {
    let entry = catalog::immersion(id).map_err(core_err("immersion"))?;
    Ok((entry.immersion, entry.minimal))
}

fn check_target(name: &str, t: &Option<Target>) -> Result<(), RunError> {
    match t {
        Some(t) if !(t.value.is_finite() && t.tol >= 0.0) => Err(config(format!("expectation '{name}' needs a finite value and tol >= 0"))),
        _ => Ok(()),
    }
}

fn form_on_chart(
    chart: &Option<ChartRef>,
    form: &FormRef,
    exhaustion: &Option<ExhaustionRef>,
) -> Result<(Chart, BundleValuedForm, Exhaustion), RunError> {
    let (form, own) = resolve_form(form)?;
    let chart = match (chart, own) {
        (Some(c), _) => resolve_chart(c)?,
        (None, Some(c)) => c,
        (None, None) => return Err(config("an inline form needs a chart")),
    };
    let m = chart.dim();
    if form.dim() != m {
        return Err(config(format!("form lives on {} coordinates, chart has {m}", form.dim())));
    }
    if form.degree() > m {
        return Err(config(format!("form degree {} exceeds dimension {m}", form.degree())));
    }
    let exh = resolve_exhaustion(exhaustion.as_ref().unwrap_or(&ExhaustionRef::Euclidean { center: None }), m)?;
    Ok((chart, form, exh))
}

fn finite_positive(name: &str, v: f64) -> Result<(), RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config(format!("{name} must be positive and finite")))
    }
}

/// Resolve every reference and check the kind-specific requirements.
/// `resolution` overrides the grid resolution of the scenario.
pub fn resolve(s: &Scenario, resolution: Option<usize>) -> Result<Resolved, RunError> {
    let mut quadrature = s.quadrature.apply(QuadratureConfig::default());
    if let Some(n) = resolution {
        quadrature.grid_resolution = n;
    }
    quadrature.validate().map_err(core_err("quadrature"))?;
    if !(quadrature.critical_cutoff >= 0.0) {
        return Err(config("critical_cutoff must be nonnegative"));
    }
    let mut r = Resolved {
        chart: None,
        form: None,
        exhaustion: None,
        immersion: None,
        minimal: None,
        sample: Vec::new(),
        radii: Vec::new(),
        quadrature,
    };
    match &s.params {
        Params::GrowthOrder(p) => {
            let chart = resolve_chart(&p.chart)?;
            let m = chart.dim();
            if p.growth == GrowthSpec::Complex && chart.complex_structure().is_none() {
                return Err(config("complex growth constants need a chart with a complex structure"));
            }
            r.exhaustion = Some(resolve_exhaustion(&p.exhaustion, m)?);
            r.sample = resolve_sample(&p.sample, m)?;
            if let Some(c) = p.critical_cutoff {
                if !(c >= 0.0) {
                    return Err(config("critical_cutoff must be nonnegative"));
                }
            }
            for (n, t) in [("k1", &p.expect.k1), ("k2", &p.expect.k2), ("lambda", &p.expect.lambda)] {
                check_target(n, t)?;
            }
            r.chart = Some(chart);
        }
        Params::IntegralFormula(p) => {
            let (chart, form, exh) = form_on_chart(&p.chart, &p.form, &p.exhaustion)?;
            finite_positive("t", p.t)?;
            check_target("lhs", &p.expect.lhs)?;
            check_target("rhs", &p.expect.rhs)?;
            r.chart = Some(chart);
            r.form = Some(form);
            r.exhaustion = Some(exh);
        }
        Params::RatioScan(p) => {
            let (chart, form, exh) = form_on_chart(&p.chart, &p.form, &p.exhaustion)?;
            if !p.lambda.is_finite() {
                return Err(config("lambda must be finite"));
            }
            check_target("scaled", &p.expect.scaled)?;
            if p.expect.boundary_holds.is_some() {
                return Err(config("boundary_holds applies to annulus scans only"));
            }
            r.radii = resolve_radii(&p.radii)?;
            r.chart = Some(chart);
            r.form = Some(form);
            r.exhaustion = Some(exh);
        }
        Params::AnnulusScan(p) => {
            let (chart, form, exh) = form_on_chart(&p.chart, &p.form, &p.exhaustion)?;
            if !p.lambda.is_finite() {
                return Err(config("lambda must be finite"));
            }
            finite_positive("r0", p.r0)?;
            check_target("scaled", &p.expect.scaled)?;
            r.radii = resolve_radii(&p.radii)?;
            if r.radii[0] <= p.r0 {
                return Err(config("annulus radii must exceed r0"));
            }
            r.chart = Some(chart);
            r.form = Some(form);
            r.exhaustion = Some(exh);
        }
        Params::VolumeScan(p) => {
            let (imm, minimal) = resolve_immersion(&p.immersion)?;
            if let Some(l) = p.lambda {
                if !l.is_finite() {
                    return Err(config("lambda must be finite"));
                }
            }
            check_target("scaled", &p.expect.scaled)?;
            if p.expect.boundary_holds.is_some() {
                return Err(config("boundary_holds applies to annulus scans only"));
            }
            r.radii = resolve_radii(&p.radii)?;
            r.quadrature = imm.quadrature_config(&r.quadrature);
            r.immersion = Some(imm);
            r.minimal = Some(minimal);
        }
        Params::Bernstein(p) => {
            let (imm, minimal) = resolve_immersion(&p.immersion)?;
            finite_positive("window", p.window)?;
            if let Some(r0) = p.r0 {
                finite_positive("r0", r0)?;
            }
            check_target("delta", &p.expect.delta)?;
            check_target("total_scalar_curvature", &p.expect.total_scalar_curvature)?;
            r.quadrature = imm.quadrature_config(&r.quadrature);
            r.immersion = Some(imm);
            r.minimal = Some(minimal);
        }
        Params::GaussEnergy(p) => {
            let (imm, minimal) = resolve_immersion(&p.immersion)?;
            if !imm.is_complex() {
                return Err(config(format!("immersion '{}' is not a Kähler catalog entry", p.immersion)));
            }
            if p.points.is_empty() || p.points.iter().any(|x| x.len() != imm.param_dim() || x.iter().any(|v| !v.is_finite())) {
                return Err(config(format!("gauss-energy needs points with {} finite coordinates", imm.param_dim())));
            }
            if !(p.tol >= 0.0) {
                return Err(config("tol must be nonnegative"));
            }
            r.sample = p.points.clone();
            r.immersion = Some(imm);
            r.minimal = Some(minimal);
        }
    }
    Ok(r)
}

impl GrowthSpec {
    pub fn core(self) -> GrowthKind {
        match self {
            GrowthSpec::Real => GrowthKind::Real,
            GrowthSpec::Complex => GrowthKind::Complex,
        }
    }
}
