//! Report payloads. Every report carries the asserted checks that decide the
//! exit status apart from the numbers; heuristic quantities sit under
//! `diagnostic` and never fail a run.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use selab_core::exhaustion::{ExhaustionStatus, GrowthKind, GrowthOrderReport};
use selab_core::monotonicity::{BoundaryCondition, IntegralFormulaReport, MonotonicityReport, QuadratureConfig, RegionMethod, Verdict};
use selab_core::submanifold::{BernsteinReport, GaussEnergyCheck, HypothesisCheck, WindowVerdict};

use crate::scenario::{GrowthSpec, Kind, MethodSpec, VerdictSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct QuadratureSummary {
    pub grid_resolution: usize,
    pub boundary_rays: usize,
    pub method: MethodSpec,
    pub center: Option<Vec<f64>>,
    pub march_steps: usize,
    pub critical_cutoff: f64,
}

impl From<&QuadratureConfig> for QuadratureSummary {
    fn from(c: &QuadratureConfig) -> Self {
        Self {
            grid_resolution: c.grid_resolution,
            boundary_rays: c.boundary_rays,
            method: match c.method {
                RegionMethod::Rays => MethodSpec::Rays,
                RegionMethod::Grid { line_axis } => MethodSpec::Grid { line_axis },
            },
            center: c.center.clone(),
            march_steps: c.march_steps,
            critical_cutoff: c.critical_cutoff,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Report<R> {
    pub id: String,
    pub kind: Kind,
    pub status: Status,
    /// Name of the first failing asserted check, or `computation`.
    pub first_failure: Option<String>,
    pub error: Option<String>,
    pub quadrature: Option<QuadratureSummary>,
    pub asserted: Vec<Check>,
    pub result: Option<R>,
}

impl<R> Report<R> {
    pub fn finish(id: &str, kind: Kind, quadrature: Option<QuadratureSummary>, asserted: Vec<Check>, result: Option<R>) -> Self {
        let first_failure = asserted.iter().find(|c| !c.pass).map(|c| c.name.clone());
        let status = if first_failure.is_some() { Status::Fail } else { Status::Pass };
        Self { id: id.into(), kind, status, first_failure, error: None, quadrature, asserted, result }
    }

    pub fn failed(id: &str, kind: Kind, quadrature: Option<QuadratureSummary>, error: String) -> Self {
        Self {
            id: id.into(),
            kind,
            status: Status::Error,
            first_failure: Some("computation".into()),
            error: Some(error),
            quadrature,
            asserted: Vec::new(),
            result: None,
        }
    }
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn point(x: &[f64]) -> String {
    x.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

/// A plot-ready table with a fixed header per kind.
pub trait Table {
    const HEADER: &'static [&'static str];
    fn rows(&self) -> Vec<Vec<String>>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Window {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SampleRow {
    pub point: Vec<f64>,
    /// `None` for excluded critical points.
    pub k1_term: Option<f64>,
    pub grad_phi_sq: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum ExhaustionStatusDto {
    Valid,
    NonPositiveK1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GrowthDiagnostic {
    /// `|λ − closed form|`; the estimate covers the sample window only.
    pub closed_form_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GrowthOrderResult {
    pub kind: GrowthSpec,
    pub k1: f64,
    pub k2: f64,
    pub lambda: Option<f64>,
    pub closed_form: Option<f64>,
    pub sample_size: usize,
    pub excluded: usize,
    pub window: Window,
    pub status: ExhaustionStatusDto,
    pub samples: Vec<SampleRow>,
    pub diagnostic: GrowthDiagnostic,
}

impl GrowthOrderResult {
    pub fn new(r: &GrowthOrderReport, samples: Vec<SampleRow>) -> Self {
        Self {
            kind: match r.kind {
                GrowthKind::Real => GrowthSpec::Real,
                GrowthKind::Complex => GrowthSpec::Complex,
            },
            k1: r.k1,
            k2: r.k2,
            lambda: r.lambda,
            closed_form: r.closed_form,
            sample_size: r.sample_size,
            excluded: r.excluded,
            window: Window { lower: r.window_lower.clone(), upper: r.window_upper.clone() },
            status: match r.status {
                ExhaustionStatus::Valid => ExhaustionStatusDto::Valid,
                ExhaustionStatus::NonPositiveK1 => ExhaustionStatusDto::NonPositiveK1,
            },
            samples,
            diagnostic: GrowthDiagnostic { closed_form_gap: r.closed_form_gap() },
        }
    }
}

impl Table for GrowthOrderResult {
    const HEADER: &'static [&'static str] = &["index", "point", "k1_term", "grad_phi_sq"];
    fn rows(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| vec![i.to_string(), point(&s.point), opt(s.k1_term), opt(s.grad_phi_sq)])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct IntegralFormulaResult {
    pub t: f64,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    pub rhs_err: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&IntegralFormulaReport> for IntegralFormulaResult {
    fn from(r: &IntegralFormulaReport) -> Self {
        Self {
            t: r.t,
            lhs: r.lhs.value,
            lhs_err: r.lhs.error,
            rhs: r.rhs.value,
            rhs_err: r.rhs.error,
            gap: r.gap,
            relative_gap: r.relative_gap,
            tolerance: r.tolerance,
            pass: r.pass,
        }
    }
}

impl Table for IntegralFormulaResult {
    const HEADER: &'static [&'static str] = &["quantity", "value", "error"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![
            vec!["lhs".into(), num(self.lhs), num(self.lhs_err)],
            vec!["rhs".into(), num(self.rhs), num(self.rhs_err)],
            vec!["gap".into(), num(self.gap), num(self.tolerance)],
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ScanRowDto {
    pub rho: f64,
    pub raw: f64,
    pub raw_err: f64,
    pub scaled: f64,
    /// Error of the scaled value.
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BoundaryDto {
    pub radius: f64,
    pub min_slack: f64,
    pub sample_size: usize,
    pub holds: bool,
}

impl From<&BoundaryCondition> for BoundaryDto {
    fn from(b: &BoundaryCondition) -> Self {
        Self { radius: b.radius, min_slack: b.min_slack, sample_size: b.sample_size, holds: b.holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ScanDiagnostic {
    pub strictly_increasing: bool,
    pub constant_within_errors: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ScanResult {
    pub lambda: f64,
    pub rows: Vec<ScanRowDto>,
    pub nondecreasing: bool,
    /// Pairs `(i, i+1)` that drop beyond the error bars.
    pub violations: Vec<usize>,
    pub slack: f64,
    pub certified: bool,
    pub inner_radius: Option<f64>,
    pub boundary: Option<BoundaryDto>,
    pub diagnostic: ScanDiagnostic,
}

impl From<&MonotonicityReport> for ScanResult {
    fn from(r: &MonotonicityReport) -> Self {
        Self {
            lambda: r.lambda_used,
            rows: r
                .rows
                .iter()
                .map(|w| ScanRowDto { rho: w.rho, raw: w.raw, raw_err: w.raw_err, scaled: w.scaled, err: w.err })
                .collect(),
            nondecreasing: r.is_nondecreasing(),
            violations: match &r.verdict {
                Verdict::Nondecreasing => Vec::new(),
                Verdict::Violated { indices } => indices.clone(),
            },
            slack: r.slack,
            certified: r.asserted,
            inner_radius: r.inner_radius,
            boundary: r.boundary.as_ref().map(BoundaryDto::from),
            diagnostic: ScanDiagnostic {
                strictly_increasing: r.strictly_increasing(),
                constant_within_errors: r.constant_within_errors(),
            },
        }
    }
}

impl Table for ScanResult {
    const HEADER: &'static [&'static str] = &["rho", "raw", "scaled", "err"];
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| vec![num(r.rho), num(r.raw), num(r.scaled), num(r.err)]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct HypothesisDto {
    pub verdict: VerdictSpec,
    pub margin: f64,
    pub reason: String,
}

pub fn verdict(v: WindowVerdict) -> VerdictSpec {
    match v {
        WindowVerdict::HoldsOnWindow => VerdictSpec::HoldsOnWindow,
        WindowVerdict::Fails => VerdictSpec::Fails,
        WindowVerdict::NotApplicable => VerdictSpec::NotApplicable,
    }
}

impl From<&HypothesisCheck> for HypothesisDto {
    fn from(h: &HypothesisCheck) -> Self {
        Self { verdict: verdict(h.verdict), margin: h.margin, reason: h.reason.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct EnergyRowDto {
    pub rho: f64,
    pub energy: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BernsteinDiagnostic {
    /// Log-log slope of the energy rows; the growth hypotheses are little-o
    /// statements, so this is a window heuristic.
    pub energy_slope: Option<f64>,
    pub part_i: HypothesisDto,
    pub part_ii: HypothesisDto,
    pub all_hypotheses_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BernsteinResult {
    pub immersion: String,
    pub m: usize,
    pub window: f64,
    pub sample_size: usize,
    pub delta: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub max_mean_curvature: f64,
    pub minimal: bool,
    pub total_scalar_curvature: f64,
    pub total_scalar_curvature_err: f64,
    pub boundary_condition: BoundaryDto,
    pub energy_rows: Vec<EnergyRowDto>,
    pub diagnostic: BernsteinDiagnostic,
}

impl From<&BernsteinReport> for BernsteinResult {
    fn from(r: &BernsteinReport) -> Self {
        Self {
            immersion: r.immersion.clone(),
            m: r.m,
            window: r.window,
            sample_size: r.sample_size,
            delta: r.delta,
            mu1: r.mu1,
            mu2: r.mu2,
            max_mean_curvature: r.max_mean_curvature,
            minimal: r.minimal,
            total_scalar_curvature: r.total_scalar_curvature,
            total_scalar_curvature_err: r.total_scalar_curvature_err,
            boundary_condition: BoundaryDto::from(&r.boundary_condition),
            energy_rows: r.energy_rows.iter().map(|e| EnergyRowDto { rho: e.rho, energy: e.energy, err: e.err }).collect(),
            diagnostic: BernsteinDiagnostic {
                energy_slope: r.energy_slope,
                part_i: HypothesisDto::from(&r.part_i),
                part_ii: HypothesisDto::from(&r.part_ii),
                all_hypotheses_hold: r.all_hypotheses_hold(),
            },
        }
    }
}

impl Table for BernsteinResult {
    const HEADER: &'static [&'static str] = &["rho", "energy", "err"];
    fn rows(&self) -> Vec<Vec<String>> {
        self.energy_rows.iter().map(|e| vec![num(e.rho), num(e.energy), num(e.err)]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GaussPointDto {
    pub point: Vec<f64>,
    pub dgc_sq: f64,
    pub a_sq: f64,
    pub gap: f64,
    pub antiholomorphic_defect: f64,
}

impl GaussPointDto {
    pub fn new(x: &[f64], c: &GaussEnergyCheck) -> Self {
        Self {
            point: x.to_vec(),
            dgc_sq: c.dgc_sq,
            a_sq: c.a_sq,
            gap: c.gap,
            antiholomorphic_defect: c.antiholomorphic_defect,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GaussEnergyResult {
    pub immersion: String,
    pub points: Vec<GaussPointDto>,
    pub max_gap: f64,
    pub max_defect: f64,
}

impl Table for GaussEnergyResult {
    const HEADER: &'static [&'static str] = &["point", "dgc_sq", "a_sq", "gap", "antiholomorphic_defect"];
    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| vec![point(&p.point), num(p.dgc_sq), num(p.a_sq), num(p.gap), num(p.antiholomorphic_defect)])
            .collect()
    }
}

/// RFC 4180 text: header row, comma separated, CRLF line ends.
pub fn csv_text<T: Table>(t: Option<&T>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(T::HEADER).expect("in-memory csv");
    if let Some(t) = t {
        for row in t.rows() {
            w.write_record(&row).expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}
