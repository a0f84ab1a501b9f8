use std::path::{Path, PathBuf};

use serde::Serialize;

use selab_core::exhaustion::{assemble_report, growth_terms_at, lambda_closed_form, ExhaustionSpec, DEFAULT_CRITICAL_CUTOFF};
use selab_core::monotonicity::{annulus_ratio_scan, ratio_scan_form, verify_integral_formula, MonotonicityReport, QuadratureConfig};
use selab_core::quadrature::Executor;
use selab_core::submanifold::{bernstein_report, complex_gauss_energy_check, volume_ratio_scan};
use selab_core::Error;

use crate::error::RunError;
use crate::exec::RayonExecutor;
use crate::output::{default_out_dir, write_atomic};
use crate::report::*;
use crate::scenario::{resolve, Params, Resolved, Scenario, ScanExpect, Target};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scenario's output directory.
    pub out_dir: Option<PathBuf>,
    /// Overrides `quadrature.grid_resolution`.
    pub resolution: Option<usize>,
    /// Worker threads; the global rayon pool when unset.
    pub threads: Option<usize>,
}

/// Rendered report files of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub id: String,
    pub status: Status,
    pub first_failure: Option<String>,
    pub json: String,
    pub csv: String,
}

impl Rendered {
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Pass => 0,
            Status::Fail | Status::Error => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub rendered: Rendered,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
}

fn render<R: Serialize + Table>(report: Report<R>) -> Rendered {
    let mut json = serde_json::to_string_pretty(&report).expect("reports serialize");
    json.push('\n');
    Rendered {
        id: report.id.clone(),
        status: report.status,
        first_failure: report.first_failure.clone(),
        json,
        csv: csv_text(report.result.as_ref()),
    }
}

fn target(name: &str, actual: Option<f64>, t: &Option<Target>, out: &mut Vec<Check>) {
    if let Some(t) = t {
        let (pass, detail) = match actual {
            Some(a) => ((a - t.value).abs() <= t.tol, format!("{} vs {} (tol {})", num(a), num(t.value), num(t.tol))),
            None => (false, format!("undefined vs {}", num(t.value))),
        };
        out.push(Check::new(name, pass, detail));
    }
}

fn flag(name: &str, actual: bool, expected: Option<bool>, out: &mut Vec<Check>) {
    if let Some(e) = expected {
        out.push(Check::new(name, actual == e, format!("{actual}, expected {e}")));
    }
}

fn scan_checks(r: &ScanResult, e: &ScanExpect, out: &mut Vec<Check>) {
    if e.nondecreasing {
        let detail = if r.nondecreasing {
            format!("slack {}", num(r.slack))
        } else {
            format!("drops beyond error bars after rows {:?}", r.violations)
        };
        out.push(Check::new("nondecreasing", r.nondecreasing, detail));
    }
    if e.strictly_increasing {
        let s = r.diagnostic.strictly_increasing;
        out.push(Check::new("strictly-increasing", s, format!("slack {}", num(r.slack))));
    }
    if e.constant {
        let c = r.diagnostic.constant_within_errors;
        let spread = r.rows.iter().map(|w| w.scaled).fold(f64::NEG_INFINITY, f64::max)
            - r.rows.iter().map(|w| w.scaled).fold(f64::INFINITY, f64::min);
        out.push(Check::new("constant", c, format!("spread {}", num(spread))));
    }
    if let Some(t) = &e.scaled {
        let worst = r.rows.iter().map(|w| (w.scaled - t.value).abs()).fold(0.0, f64::max);
        out.push(Check::new("scaled", worst <= t.tol, format!("max deviation {} (tol {})", num(worst), num(t.tol))));
    }
    if let Some([lo, hi]) = e.final_scaled_between {
        let last = r.rows.last().map_or(f64::NAN, |w| w.scaled);
        out.push(Check::new("final-scaled-between", last > lo && last < hi, format!("{} in ({}, {})", num(last), num(lo), num(hi))));
    }
    if let Some(b) = e.boundary_holds {
        let actual = r.boundary.as_ref().is_some_and(|x| x.holds);
        let slack = r.boundary.as_ref().map_or(f64::NAN, |x| x.min_slack);
        out.push(Check::new("boundary-holds", actual == b, format!("{actual} (min slack {}), expected {b}", num(slack))));
    }
}

/// Scans that certify the conservation law report a failed certification as
/// a failed check rather than an error.
fn scan_report(
    s: &Scenario,
    q: Option<QuadratureSummary>,
    certify: bool,
    expect: &ScanExpect,
    result: selab_core::Result<MonotonicityReport>,
) -> Rendered {
    match result {
        Ok(rep) => {
            let r = ScanResult::from(&rep);
            let mut checks = Vec::new();
            if certify {
                checks.push(Check::new("conservation-certified", true, "div S vanishes on level-set samples".into()));
            }
            scan_checks(&r, expect, &mut checks);
            render(Report::finish(&s.id, s.kind, q, checks, Some(r)))
        }
        Err(Error::HypothesisViolated(msg)) if certify => {
            let checks = vec![Check::new("conservation-certified", false, msg)];
            render(Report::<ScanResult>::finish(&s.id, s.kind, q, checks, None))
        }
        Err(e) => render(Report::<ScanResult>::failed(&s.id, s.kind, q, e.to_string())),
    }
}

fn compute<E: Executor>(s: &Scenario, r: &Resolved, exec: &E) -> Result<Rendered, RunError> {
    let q = Some(QuadratureSummary::from(&r.quadrature));
    let cfg: &QuadratureConfig = &r.quadrature;
    let out = match &s.params {
        Params::GrowthOrder(p) => {
            let chart = r.chart.as_ref().expect("resolved");
            let exh = r.exhaustion.as_ref().expect("resolved");
            let closed = match &p.closed_form {
                Some(c) => Some(lambda_closed_form(c.regime()).map_err(|e| RunError::Config(format!("closed_form: {e}")))?),
                None => None,
            };
            let mut spec = ExhaustionSpec::new(exh, chart, p.p, &r.sample);
            spec.critical_cutoff = p.critical_cutoff.unwrap_or(DEFAULT_CRITICAL_CUTOFF);
            let kind = p.growth.core();
            let terms: selab_core::Result<Vec<_>> =
                exec.map(r.sample.len(), |i| growth_terms_at(&spec, kind, &r.sample[i])).into_iter().collect();
            let assembled = terms.and_then(|t| assemble_report(kind, &r.sample, &t).map(|rep| (rep, t)));
            match assembled {
                Ok((mut rep, t)) => {
                    if let Some(c) = closed {
                        rep = rep.with_closed_form(c);
                    }
                    let samples = r
                        .sample
                        .iter()
                        .zip(&t)
                        .map(|(x, v)| SampleRow { point: x.clone(), k1_term: v.map(|v| v.0), grad_phi_sq: v.map(|v| v.1) })
                        .collect();
                    let res = GrowthOrderResult::new(&rep, samples);
                    let mut checks = vec![Check::new(
                        "p-exhaustion",
                        res.status == ExhaustionStatusDto::Valid,
                        format!("k1 = {} over {} points", num(res.k1), res.sample_size),
                    )];
                    target("k1", Some(res.k1), &p.expect.k1, &mut checks);
                    target("k2", Some(res.k2), &p.expect.k2, &mut checks);
                    target("lambda", res.lambda, &p.expect.lambda, &mut checks);
                    render(Report::finish(&s.id, s.kind, None, checks, Some(res)))
                }
                Err(e) => render(Report::<GrowthOrderResult>::failed(&s.id, s.kind, None, e.to_string())),
            }
        }
        Params::IntegralFormula(p) => {
            let (chart, form, exh) = (r.chart.as_ref().unwrap(), r.form.as_ref().unwrap(), r.exhaustion.as_ref().unwrap());
            match verify_integral_formula(form, exh, chart, p.t, cfg, exec) {
                Ok(rep) => {
                    let res = IntegralFormulaResult::from(&rep);
                    let mut checks = vec![Check::new(
                        "identity",
                        res.pass,
                        format!("gap {} vs 3x combined error {}", num(res.gap), num(res.tolerance)),
                    )];
                    target("lhs", Some(res.lhs), &p.expect.lhs, &mut checks);
                    target("rhs", Some(res.rhs), &p.expect.rhs, &mut checks);
                    render(Report::finish(&s.id, s.kind, q, checks, Some(res)))
                }
                Err(e) => render(Report::<IntegralFormulaResult>::failed(&s.id, s.kind, q, e.to_string())),
            }
        }
        Params::RatioScan(p) => {
            let (chart, form, exh) = (r.chart.as_ref().unwrap(), r.form.as_ref().unwrap(), r.exhaustion.as_ref().unwrap());
            let res = ratio_scan_form(form, exh, chart, p.lambda, &r.radii, p.certify, cfg, exec);
            scan_report(s, q, p.certify, &p.expect, res)
        }
        Params::AnnulusScan(p) => {
            let (chart, form, exh) = (r.chart.as_ref().unwrap(), r.form.as_ref().unwrap(), r.exhaustion.as_ref().unwrap());
            let res = annulus_ratio_scan(form, exh, chart, p.r0, p.lambda, &r.radii, p.certify, cfg, exec);
            scan_report(s, q, p.certify, &p.expect, res)
        }
        Params::VolumeScan(p) => {
            let imm = r.immersion.as_ref().unwrap();
            let lambda = p.lambda.unwrap_or(imm.param_dim() as f64);
            let res = volume_ratio_scan(imm, lambda, &r.radii, cfg, exec);
            scan_report(s, q, false, &p.expect, res)
        }
        Params::Bernstein(p) => {
            let imm = r.immersion.as_ref().unwrap();
            match bernstein_report(imm, p.window, p.r0, cfg, exec) {
                Ok(rep) => {
                    let res = BernsteinResult::from(&rep);
                    let catalogued = r.minimal.unwrap_or(res.minimal);
                    let mut checks = vec![Check::new(
                        "catalog-minimality",
                        res.minimal == catalogued,
                        format!("max |H| = {}, catalogued minimal = {catalogued}", num(res.max_mean_curvature)),
                    )];
                    let e = &p.expect;
                    target("delta", Some(res.delta), &e.delta, &mut checks);
                    target("total-scalar-curvature", Some(res.total_scalar_curvature), &e.total_scalar_curvature, &mut checks);
                    flag("minimal", res.minimal, e.minimal, &mut checks);
                    flag("boundary-condition", res.boundary_condition.holds, e.boundary_condition, &mut checks);
                    if let Some(v) = e.part_i {
                        let a = res.diagnostic.part_i.verdict;
                        checks.push(Check::new("part-i", a == v, format!("{a:?}, expected {v:?}")));
                    }
                    if let Some(v) = e.part_ii {
                        let a = res.diagnostic.part_ii.verdict;
                        checks.push(Check::new("part-ii", a == v, format!("{a:?}, expected {v:?}")));
                    }
                    flag("all-hypotheses-hold", res.diagnostic.all_hypotheses_hold, e.all_hypotheses_hold, &mut checks);
                    render(Report::finish(&s.id, s.kind, q, checks, Some(res)))
                }
                Err(e) => render(Report::<BernsteinResult>::failed(&s.id, s.kind, q, e.to_string())),
            }
        }
        Params::GaussEnergy(p) => {
            let imm = r.immersion.as_ref().unwrap();
            let pts: selab_core::Result<Vec<_>> = exec
                .map(r.sample.len(), |i| complex_gauss_energy_check(imm, &r.sample[i]).map(|c| GaussPointDto::new(&r.sample[i], &c)))
                .into_iter()
                .collect();
            match pts {
                Ok(points) => {
                    let max_gap = points.iter().map(|x| x.gap).fold(0.0, f64::max);
                    let max_defect = points.iter().map(|x| x.antiholomorphic_defect).fold(0.0, f64::max);
                    let checks = vec![
                        Check::new("energy-identity", max_gap <= p.tol, format!("max gap {} (tol {})", num(max_gap), num(p.tol))),
                        Check::new(
                            "anti-holomorphic",
                            max_defect <= p.tol,
                            format!("max defect {} (tol {})", num(max_defect), num(p.tol)),
                        ),
                    ];
                    let res = GaussEnergyResult { immersion: p.immersion.clone(), points, max_gap, max_defect };
                    render(Report::finish(&s.id, s.kind, None, checks, Some(res)))
                }
                Err(e) => render(Report::<GaussEnergyResult>::failed(&s.id, s.kind, None, e.to_string())),
            }
        }
    };
    Ok(out)
}

/// Validate, resolve and compute without touching the file system.
pub fn evaluate(s: &Scenario, opts: &RunOptions) -> Result<Rendered, RunError> {
    let r = resolve(s, opts.resolution)?;
    match opts.threads {
        Some(k) => {
            if k == 0 {
                return Err(RunError::Config("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
            pool.install(|| compute(s, &r, &RayonExecutor))
        }
        None => compute(s, &r, &RayonExecutor),
    }
}

/// Directory for the reports of `s`. `base` is the scenario file's directory.
pub fn out_dir(s: &Scenario, base: Option<&Path>, opts: &RunOptions) -> PathBuf {
    if let Some(d) = &opts.out_dir {
        return d.clone();
    }
    match (&s.output.dir, base) {
        (Some(d), Some(b)) if d.is_relative() => b.join(d),
        (Some(d), _) => d.clone(),
        (None, _) => default_out_dir(),
    }
}

/// Evaluate and write `<id>.json` and `<id>.csv` atomically.
pub fn run_scenario(s: &Scenario, base: Option<&Path>, opts: &RunOptions) -> Result<Outcome, RunError> {
    let rendered = evaluate(s, opts)?;
    let dir = out_dir(s, base, opts);
    let json_path = dir.join(format!("{}.json", s.id));
    let csv_path = dir.join(format!("{}.csv", s.id));
    write_atomic(&json_path, rendered.json.as_bytes())?;
    write_atomic(&csv_path, rendered.csv.as_bytes())?;
    Ok(Outcome { rendered, json_path, csv_path })
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Outcome, RunError> {
    let s = Scenario::load(path)?;
    run_scenario(&s, path.parent(), opts)
}
