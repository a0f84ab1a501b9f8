//! Parameterized immersions `u: D ⊂ R^m → R^N`: induced geometry, the
//! extrinsic distance as an exhaustion, volume scans, Bernstein diagnostics
//! and the complex Gauss map of Kähler curves.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exhaustion::Exhaustion;
use crate::fd;
use crate::forms::{BundleValuedForm, FnForm};
use crate::linalg::{lower_inverse, Matrix};
use crate::manifold::{hessian_at, standard_complex_structure, Chart, DomainBox, FieldJet, JetMode, MetricJet, MetricModel, ScalarField};
use crate::math::{ln, powi, sqrt};
use crate::monotonicity::{
    boundary_condition, geometric_grid, level_set_points, ratio_scan, region_integral, BoundaryCondition,
    MonotonicityReport, QuadratureConfig, RegionMethod, DEFAULT_GRID_POINTS,
};
use crate::quadrature::Executor;

/// Mean-curvature bound under which an immersion counts as minimal.
pub const MINIMALITY_TOL: f64 = 1e-8;

/// Map and analytic derivatives of an immersion.
pub trait ImmersionModel: Send + Sync {
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn position(&self, x: &[f64]) -> Vec<f64>;
    /// `∂_i u` as the columns of an `N × m` matrix.
    fn jacobian(&self, _x: &[f64]) -> Option<Matrix> {
        None
    }
    /// `∂_i ∂_j u` at index `i * m + j`.
    fn second(&self, _x: &[f64]) -> Option<Vec<Vec<f64>>> {
        None
    }
}

#[derive(Clone)]
pub struct Immersion {
    model: Arc<dyn ImmersionModel>,
    mode: JetMode,
    domain: DomainBox,
    base_point: Vec<f64>,
    center: Vec<f64>,
    method: RegionMethod,
    complex: bool,
    id: String,
}

impl core::fmt::Debug for Immersion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Immersion")
            .field("id", &self.id)
            .field("m", &self.param_dim())
            .field("N", &self.ambient_dim())
            .field("base_point", &self.base_point)
            .finish()
    }
}

impl Immersion {
    /// `center` is the parameter point mapped to the base point `o`.
    pub fn new(model: Arc<dyn ImmersionModel>, domain: DomainBox, center: Vec<f64>, id: impl Into<String>) -> Result<Self> {
        let m = model.param_dim();
        if domain.dim() != m || center.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: domain.dim().min(center.len()) });
        }
        if model.ambient_dim() < m {
            return Err(Error::InvalidInput("ambient dimension below parameter dimension".into()));
        }
        let base_point = model.position(&center);
        let mode = if model.jacobian(&center).is_some() && model.second(&center).is_some() {
            JetMode::Analytic
        } else {
            JetMode::FD
        };
        Ok(Self { model, mode, domain, base_point, center, method: RegionMethod::Rays, complex: false, id: id.into() })
    }

    pub fn with_jet_mode(mut self, mode: JetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_method(mut self, method: RegionMethod) -> Self {
        self.method = method;
        self
    }

    /// Declares the standard complex structure on the parameter space.
    pub fn with_complex_structure(mut self) -> Result<Self> {
        if !self.param_dim().is_multiple_of(2) {
            return Err(Error::NotKahlerCatalog);
        }
        self.complex = true;
        Ok(self)
    }

    pub fn with_base_point(mut self, o: Vec<f64>) -> Self {
        self.base_point = o;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn param_dim(&self) -> usize {
        self.model.param_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.model.ambient_dim()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn method(&self) -> RegionMethod {
        self.method
    }

    pub fn jet_mode(&self) -> JetMode {
        self.mode
    }

    pub fn is_complex(&self) -> bool {
        self.complex
    }

    pub fn position(&self, x: &[f64]) -> Vec<f64> {
        self.model.position(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let (n, m) = (self.ambient_dim(), self.param_dim());
        if let (JetMode::Analytic, Some(j)) = (self.mode, self.model.jacobian(x)) {
            return Ok(j);
        }
        let step = match self.mode {
            JetMode::FiniteDifference { step } => step,
            JetMode::Analytic => None,
        };
        let cols = fd::first_derivatives(&|y: &[f64]| self.model.position(y), x, fd::base_step(x, step));
        Ok(Matrix::from_fn(n, m, |a, i| cols[i][a]))
    }

    pub fn second(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if let (JetMode::Analytic, Some(s)) = (self.mode, self.model.second(x)) {
            return Ok(s);
        }
        let step = match self.mode {
            JetMode::FiniteDifference { step } => step,
            JetMode::Analytic => None,
        };
        Ok(fd::second_derivatives(&|y: &[f64]| self.model.position(y), x, fd::base_step(x, step)))
    }

    /// The parameter domain with the induced metric.
    pub fn chart(&self) -> Chart {
        let metric = InducedMetric { imm: self.clone() };
        let chart = Chart::new(Arc::new(metric), self.mode, self.domain.clone(), self.id.clone());
        if self.complex {
            chart.with_complex_structure(standard_complex_structure(self.param_dim() / 2)).expect("standard J")
        } else {
            chart
        }
    }

    /// `Φ = ρ = |u − o|` with `Ψ = ρ²` carrying the exact jet.
    pub fn rho_exhaustion(&self) -> Exhaustion {
        let m = self.param_dim();
        let (a, b) = (self.clone(), self.clone());
        let psi = ScalarField::analytic(
            m,
            move |x| dist_sq(&a.position(x), &a.base_point),
            move |x| {
                let d: Vec<f64> = b.position(x).iter().zip(&b.base_point).map(|(u, o)| u - o).collect();
                let jac = b.jacobian(x).expect("jacobian");
                let sec = b.second(x).expect("second derivatives");
                let col: Vec<Vec<f64>> = (0..m).map(|i| jac.column(i)).collect();
                let gradient = col.iter().map(|c| 2.0 * dot(c, &d)).collect();
                let hessian = Matrix::from_fn(m, m, |i, j| 2.0 * (dot(&col[i], &col[j]) + dot(&sec[i * m + j], &d)));
                FieldJet { value: dot(&d, &d), gradient, hessian }
            },
        );
        let psi = psi.with_jet_mode(JetMode::Analytic);
        Exhaustion::from_psi(psi, self.center.clone())
    }

    /// `cfg` with this immersion's quadrature method and star-shaped center.
    pub fn quadrature_config(&self, cfg: &QuadratureConfig) -> QuadratureConfig {
        QuadratureConfig { method: self.method, center: Some(self.center.clone()), ..cfg.clone() }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct InducedMetric {
    imm: Immersion,
}

impl MetricModel for InducedMetric {
    fn dim(&self) -> usize {
        self.imm.param_dim()
    }

    fn metric(&self, x: &[f64]) -> Matrix {
        let j = self.imm.jacobian(x).expect("jacobian");
        j.transpose().mul(&j)
    }

    fn metric_jet(&self, x: &[f64]) -> Option<MetricJet> {
        if !self.imm.mode.is_analytic() {
            return None;
        }
        let m = self.dim();
        let j = self.imm.model.jacobian(x)?;
        let s = self.imm.model.second(x)?;
        let col: Vec<Vec<f64>> = (0..m).map(|i| j.column(i)).collect();
        let g = j.transpose().mul(&j);
        let dg = (0..m)
            .map(|k| Matrix::from_fn(m, m, |a, b| dot(&s[k * m + a], &col[b]) + dot(&col[a], &s[k * m + b])))
            .collect();
        Some(MetricJet { g, dg })
    }
}

/// Induced metric, second fundamental form and mean curvature at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedGeometry {
    pub g: Matrix,
    /// `A(∂_i, ∂_j)` at index `i * m + j`, vectors in `R^N`.
    pub a: Vec<Vec<f64>>,
    /// `H = g^{ij} A_ij`.
    pub h: Vec<f64>,
    pub norm_a_sq: f64,
    /// Largest tangential component of any `A_ij`.
    pub tangent_defect: f64,
}

impl InducedGeometry {
    /// `A(X, Y)` for parameter vectors.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = x.len();
        let n = self.a[0].len();
        let mut out = vec![0.0; n];
        for i in 0..m {
            for j in 0..m {
                let c = x[i] * y[j];
                if c != 0.0 {
                    for (o, v) in out.iter_mut().zip(&self.a[i * m + j]) {
                        *o += c * v;
                    }
                }
            }
        }
        out
    }

    pub fn mean_curvature_norm(&self) -> f64 {
        sqrt(dot(&self.h, &self.h))
    }
}

pub fn induced_geometry_at(imm: &Immersion, x: &[f64]) -> Result<InducedGeometry> {
    let m = imm.param_dim();
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: x.len() });
    }
    if !imm.domain.contains(x) {
        return Err(Error::OutOfDomain);
    }
    let jac = imm.jacobian(x)?;
    let sec = imm.second(x)?;
    let g = jac.transpose().mul(&jac);
    let ginv = g.inverse_spd().map_err(|_| Error::DegenerateImmersion)?;
    let col: Vec<Vec<f64>> = (0..m).map(|i| jac.column(i)).collect();
    // tangential part of v: J g^{-1} Jᵀ v
    let tangential = |v: &[f64]| -> Vec<f64> {
        let coeff = ginv.mul_vec(&col.iter().map(|c| dot(c, v)).collect::<Vec<_>>());
        let mut t = vec![0.0; v.len()];
        for (ci, c) in coeff.iter().zip(&col) {
            for (ti, cv) in t.iter_mut().zip(c) {
                *ti += ci * cv;
            }
        }
        t
    };
    let mut a = Vec::with_capacity(m * m);
    let mut tangent_defect: f64 = 0.0;
    for s in &sec {
        let t = tangential(s);
        let normal: Vec<f64> = s.iter().zip(&t).map(|(u, v)| u - v).collect();
        tangent_defect = tangent_defect.max(sqrt(dot(&tangential(&normal), &tangential(&normal))));
        a.push(normal);
    }
    let n = imm.ambient_dim();
    let mut h = vec![0.0; n];
    let mut norm_a_sq = 0.0;
    for i in 0..m {
        for j in 0..m {
            for (hv, av) in h.iter_mut().zip(&a[i * m + j]) {
                *hv += ginv[(i, j)] * av;
            }
            for k in 0..m {
                for l in 0..m {
                    norm_a_sq += ginv[(i, k)] * ginv[(j, l)] * dot(&a[i * m + j], &a[k * m + l]);
                }
            }
        }
    }
    Ok(InducedGeometry { g, a, h, norm_a_sq: norm_a_sq.max(0.0), tangent_defect })
}

/// `|dγ|² = ‖A‖²`.
pub fn gauss_map_energy_density(imm: &Immersion, x: &[f64]) -> Result<f64> {
    Ok(induced_geometry_at(imm, x)?.norm_a_sq)
}

/// `|Hess(ρ²)(X,X) − 2⟨X,X⟩ − 2⟨A(X,X), u − o⟩|`, the left side computed
/// intrinsically on the induced chart.
pub fn extrinsic_rho_hessian_check(imm: &Immersion, x: &[f64], v: &[f64]) -> Result<f64> {
    let u = imm.position(x);
    let rel: Vec<f64> = u.iter().zip(&imm.base_point).map(|(a, b)| a - b).collect();
    if sqrt(dot(&rel, &rel)) <= 1e-12 {
        return Err(Error::BasePointCoincides);
    }
    if v.len() != imm.param_dim() {
        return Err(Error::DimensionMismatch { expected: imm.param_dim(), found: v.len() });
    }
    let geo = induced_geometry_at(imm, x)?;
    let chart = imm.chart();
    let exh = imm.rho_exhaustion();
    let lhs = hessian_at(&chart, &exh.psi, x)?.bilinear(v, v);
    let rhs = 2.0 * geo.g.bilinear(v, v) + 2.0 * dot(&geo.eval(v, v), &rel);
    Ok((lhs - rhs).abs())
}

fn window_error(e: Error) -> Error {
    match e {
        Error::LevelSetTouchesBoundary => Error::WindowTooSmall,
        other => other,
    }
}

/// `Vol(M ∩ B(ρ)) / ρ^λ` over the grid.
pub fn volume_ratio_scan<E: Executor>(
    imm: &Immersion,
    lambda: f64,
    grid: &[f64],
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<MonotonicityReport> {
    let chart = imm.chart();
    let exh = imm.rho_exhaustion();
    let cfg = imm.quadrature_config(cfg);
    let one = |_: &[f64]| -> Result<f64> { Ok(1.0) };
    ratio_scan(&one, &exh, &chart, lambda, grid, &cfg, exec).map_err(window_error)
}

/// Three-valued outcome of a hypothesis check on a finite window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum WindowVerdict {
    HoldsOnWindow,
    Fails,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisCheck {
    pub verdict: WindowVerdict,
    pub margin: f64,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyRow {
    pub rho: f64,
    pub energy: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BernsteinReport {
    pub immersion: String,
    pub m: usize,
    /// Extrinsic radius of the window `D(window)`.
    pub window: f64,
    pub sample_size: usize,
    pub delta: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub max_mean_curvature: f64,
    pub minimal: bool,
    pub energy_rows: Vec<EnergyRow>,
    /// Least-squares slope of `log energy` against `log ρ`; `None` when the
    /// energy vanishes on the whole window.
    pub energy_slope: Option<f64>,
    pub total_scalar_curvature: f64,
    pub total_scalar_curvature_err: f64,
    pub boundary_condition: BoundaryCondition,
    pub part_i: HypothesisCheck,
    pub part_ii: HypothesisCheck,
}

impl BernsteinReport {
    pub fn all_hypotheses_hold(&self) -> bool {
        self.part_i.verdict == WindowVerdict::HoldsOnWindow
            && self.part_ii.verdict == WindowVerdict::HoldsOnWindow
            && self.boundary_condition.holds
    }
}

/// `‖i_ν A‖² = Σ_j |A(ν, e_j)|²` over a g-orthonormal frame.
pub fn interior_a_sq(geo: &InducedGeometry, nu: &[f64]) -> Result<f64> {
    let l = geo.g.cholesky()?;
    let frame = lower_inverse(&l).transpose();
    let m = nu.len();
    Ok((0..m).map(|j| {
        let v = geo.eval(nu, &frame.column(j));
        dot(&v, &v)
    })
    .sum())
}

fn log_slope(rows: &[EnergyRow]) -> Option<f64> {
    let top = rows.iter().fold(0.0f64, |a, r| a.max(r.energy.abs()));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.energy > 1e-12 * top.max(1e-300) && r.energy > r.err)
        .map(|r| (ln(r.rho), ln(r.energy)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Slope margin below `μ` required for the little-o growth heuristic.
pub const GROWTH_SLOPE_MARGIN: f64 = 0.1;

fn growth_check(m: usize, mu: f64, minimal: bool, slope: Option<f64>, needs: &str) -> HypothesisCheck {
    if m < 3 {
        return HypothesisCheck { verdict: WindowVerdict::NotApplicable, margin: mu, reason: "dimension below 3".into() };
    }
    if !minimal {
        return HypothesisCheck { verdict: WindowVerdict::NotApplicable, margin: mu, reason: format!("{needs} not certified") };
    }
    if !(mu > 0.0) {
        return HypothesisCheck { verdict: WindowVerdict::NotApplicable, margin: mu, reason: "margin not positive".into() };
    }
    match slope {
        None => HypothesisCheck { verdict: WindowVerdict::HoldsOnWindow, margin: mu, reason: "energy vanishes on window".into() },
        Some(s) if s < mu - GROWTH_SLOPE_MARGIN => {
            HypothesisCheck { verdict: WindowVerdict::HoldsOnWindow, margin: mu - s, reason: format!("energy slope {s:.4}") }
        }
        Some(s) => HypothesisCheck { verdict: WindowVerdict::Fails, margin: mu - s, reason: format!("energy slope {s:.4}") },
    }
}

/// Radii at which δ and |H| are sampled.
pub const BERNSTEIN_SAMPLE_LEVELS: usize = 16;

pub fn bernstein_report<E: Executor>(
    imm: &Immersion,
    window: f64,
    boundary_r0: Option<f64>,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<BernsteinReport> {
    let m = imm.param_dim();
    let chart = imm.chart();
    let exh = imm.rho_exhaustion();
    let cfg = imm.quadrature_config(cfg);
    let coarse = QuadratureConfig { boundary_rays: 256, grid_resolution: cfg.grid_resolution.min(100), ..cfg.clone() };

    let mut sample = vec![imm.center.clone()];
    for k in 1..=BERNSTEIN_SAMPLE_LEVELS {
        let r = window * k as f64 / BERNSTEIN_SAMPLE_LEVELS as f64;
        sample.extend(level_set_points(&exh, &chart, r, &coarse, exec).map_err(window_error)?);
    }
    let per = exec.map(sample.len(), |k| -> Result<(f64, f64)> {
        let geo = induced_geometry_at(imm, &sample[k])?;
        let rho = sqrt(dist_sq(&imm.position(&sample[k]), &imm.base_point));
        Ok((rho * sqrt(geo.norm_a_sq), geo.mean_curvature_norm()))
    });
    let (mut delta, mut max_h) = (0.0f64, 0.0f64);
    for p in per {
        let (d, h) = p?;
        delta = delta.max(d);
        max_h = max_h.max(h);
    }
    let minimal = max_h <= MINIMALITY_TOL;
    let mu1 = m as f64 - 2.0 - m as f64 * delta;
    let mu2 = m as f64 - 2.0 - 2.0 * delta;

    let energy = |x: &[f64]| gauss_map_energy_density(imm, x);
    let mut energy_rows = Vec::new();
    for rho in geometric_grid(window / 8.0, window, DEFAULT_GRID_POINTS) {
        let e = region_integral(&energy, &exh, &chart, rho, &cfg, exec).map_err(window_error)?;
        energy_rows.push(EnergyRow { rho, energy: e.value, err: e.error });
    }
    let scalar = |x: &[f64]| -> Result<f64> { Ok(powi(sqrt(gauss_map_energy_density(imm, x)?), m as i32)) };
    let tsc = region_integral(&scalar, &exh, &chart, window, &cfg, exec).map_err(window_error)?;

    let slack = |x: &[f64], nu: &[f64]| -> Result<f64> {
        let geo = induced_geometry_at(imm, x)?;
        Ok(0.5 * geo.norm_a_sq - interior_a_sq(&geo, nu)?)
    };
    let boundary_condition =
        boundary_condition(&slack, &exh, &chart, boundary_r0.unwrap_or(window), &coarse, exec).map_err(window_error)?;

    let energy_slope = log_slope(&energy_rows);
    Ok(BernsteinReport {
        immersion: imm.id.clone(),
        m,
        window,
        sample_size: sample.len(),
        delta,
        mu1,
        mu2,
        max_mean_curvature: max_h,
        minimal,
        part_i: growth_check(m, mu1, minimal, energy_slope, "parallel mean curvature"),
        part_ii: growth_check(m, mu2, minimal, energy_slope, "minimality"),
        energy_rows,
        energy_slope,
        total_scalar_curvature: tsc.value,
        total_scalar_curvature_err: tsc.error,
        boundary_condition,
    })
}

/// J-adapted g-orthonormal frame `(v_1, Jv_1, …, v_n, Jv_n)` of the
/// parameter space, returned as `(v, Jv)` pairs.
fn unitary_frame(g: &Matrix, j: &Matrix) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let dim = g.rows();
    let inner = |a: &[f64], b: &[f64]| g.bilinear(a, b);
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for k in 0..dim / 2 {
        let mut v = vec![0.0; dim];
        v[2 * k] = 1.0;
        for (a, ja) in &out {
            for basis in [a, ja] {
                let c = inner(&v, basis);
                for (vi, bi) in v.iter_mut().zip(basis.iter()) {
                    *vi -= c * bi;
                }
            }
        }
        let n = sqrt(inner(&v, &v));
        if !(n > 1e-12) {
            return Err(Error::DegenerateImmersion);
        }
        v.iter_mut().for_each(|c| *c /= n);
        let jv = j.mul_vec(&v);
        out.push((v, jv));
    }
    Ok(out)
}

/// `⟨a, b⟩ = Σ a_α conj(b_α)`.
fn herm(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn complex_det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|x, y| a[x * n + c].norm_sqr().total_cmp(&a[y * n + c].norm_sqr())).unwrap_or(c);
        if a[p * n + c].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
            }
            det = -det;
        }
        let piv = a[c * n + c];
        det *= piv;
        for r in c + 1..n {
            let f = a[r * n + c] / piv;
            for k in c..n {
                let v = a[c * n + k];
                a[r * n + k] -= f * v;
            }
        }
    }
    det
}

/// `|Σ_k t_k|²` for decomposable m-vectors `t_k = t_k[0] ∧ … ∧ t_k[m−1]`
/// under the Gram-determinant inner product.
fn wedge_sum_norm_sq(terms: &[Vec<Vec<Complex64>>]) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for s in terms {
        for t in terms {
            let n = s.len();
            let gram = (0..n * n).map(|i| herm(&s[i / n], &t[i % n])).collect();
            total += complex_det(gram, n);
        }
    }
    total.re
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussEnergyCheck {
    pub dgc_sq: f64,
    pub a_sq: f64,
    pub gap: f64,
    /// `max_j |dγᶜ(η_j)|`.
    pub antiholomorphic_defect: f64,
}

/// Tolerance on `g(JX, JY) = g(X, Y)` for the induced metric.
pub const KAHLER_TOL: f64 = 1e-9;

/// `‖dγᶜ‖² = 2 Σ_j |dγᶜ(η̄_j)|²` assembled from `Σ_k η̄_1∧…∧A(X, η̄_k)∧…∧η̄_n`,
/// compared against `‖A‖²`.
pub fn complex_gauss_energy_check(imm: &Immersion, x: &[f64]) -> Result<GaussEnergyCheck> {
    if !imm.complex {
        return Err(Error::NotKahlerCatalog);
    }
    let geo = induced_geometry_at(imm, x)?;
    let dim = imm.param_dim();
    let j = standard_complex_structure(dim / 2);
    let jgj = j.transpose().mul(&geo.g).mul(&j);
    if jgj.sub(&geo.g).max_abs() > KAHLER_TOL * geo.g.max_abs().max(1.0) {
        return Err(Error::NotKahlerCatalog);
    }
    let frame = unitary_frame(&geo.g, &j)?;
    let jac = imm.jacobian(x)?;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let cplx = |re: &[f64], im: &[f64], sign: f64| -> Vec<Complex64> {
        re.iter().zip(im).map(|(a, b)| Complex64::new(s * a, sign * s * b)).collect()
    };
    // parameter-space η̄_k and η_k
    let eta_bar: Vec<Vec<Complex64>> = frame.iter().map(|(v, jv)| cplx(v, jv, 1.0)).collect();
    let eta: Vec<Vec<Complex64>> = frame.iter().map(|(v, jv)| cplx(v, jv, -1.0)).collect();
    let push = |p: &[Complex64]| -> Vec<Complex64> {
        (0..jac.rows())
            .map(|a| p.iter().enumerate().map(|(i, c)| c * jac[(a, i)]).sum())
            .collect()
    };
    let amb_bar: Vec<Vec<Complex64>> = eta_bar.iter().map(|p| push(p)).collect();
    let a_c = |p: &[Complex64], q: &[Complex64]| -> Vec<Complex64> {
        let n = imm.ambient_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..dim {
            for k in 0..dim {
                let c = p[i] * q[k];
                for (o, v) in out.iter_mut().zip(&geo.a[i * dim + k]) {
                    *o += c * v;
                }
            }
        }
        out
    };
    let dgc = |xv: &[Complex64]| -> f64 {
        let terms: Vec<Vec<Vec<Complex64>>> = (0..eta_bar.len())
            .map(|k| {
                let mut t = amb_bar.clone();
                t[k] = a_c(xv, &eta_bar[k]);
                t
            })
            .collect();
        wedge_sum_norm_sq(&terms).max(0.0)
    };
    let dgc_sq = 2.0 * eta_bar.iter().map(|e| dgc(e)).sum::<f64>();
    let antiholomorphic_defect = eta.iter().map(|e| sqrt(dgc(e))).fold(0.0, f64::max);
    Ok(GaussEnergyCheck { dgc_sq, a_sq: geo.norm_a_sq, gap: (dgc_sq - geo.norm_a_sq).abs(), antiholomorphic_defect })
}

/// The second fundamental form as a 1-form with values in `T*M ⊗ R^N`,
/// trivialized by the g-orthonormal frame: `ω_i^{(a,α)} = A(∂_i, f_a)^α`.
pub fn second_fundamental_form(imm: &Immersion) -> Result<BundleValuedForm> {
    let (m, n) = (imm.param_dim(), imm.ambient_dim());
    let im = imm.clone();
    let components = move |x: &[f64]| -> Vec<f64> {
        let Ok(geo) = induced_geometry_at(&im, x) else { return vec![f64::NAN; m * m * n] };
        let Ok(l) = geo.g.cholesky() else { return vec![f64::NAN; m * m * n] };
        let frame = lower_inverse(&l).transpose();
        let mut out = vec![0.0; m * m * n];
        for i in 0..m {
            let mut ei = vec![0.0; m];
            ei[i] = 1.0;
            for a in 0..m {
                let v = geo.eval(&ei, &frame.column(a));
                out[i * m * n + a * n..i * m * n + (a + 1) * n].copy_from_slice(&v);
            }
        }
        out
    };
    let model = FnForm { dim: m, degree: 1, rank: m * n, components: Arc::new(components) };
    BundleValuedForm::new(Arc::new(model), JetMode::FD, format!("A[{}]", imm.id))
}
