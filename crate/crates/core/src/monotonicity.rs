//! Integrals over sublevel sets `{Φ < t}` and their boundaries, the integral
//! formula for the stress-energy tensor, and monotonicity-ratio scans.
//!
//! Sublevel sets are integrated either along rays from a star-shaped center
//! (Gauss-Legendre in the radius, a product rule on the sphere) or along
//! coordinate lines of a tensor grid with exact crossing points. Every value
//! carries an error estimate from one halving of the resolution.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exhaustion::{Exhaustion, DEFAULT_CRITICAL_CUTOFF};
use crate::forms::{interior_product, norm_sq, stress_energy_at, BundleValuedForm, DivRoute};
use crate::forms::{conservation_residual, div_stress_energy};
use crate::manifold::{hessian_at, Chart};
use crate::math::{exp, ln, powi, sqrt};
use crate::quadrature::{gauss_legendre, pairwise_sum, Executor, SphereRule};

/// Pointwise integrand; the volume density `√det g` is applied separately.
pub type Density<'a> = dyn Fn(&[f64]) -> Result<f64> + Sync + 'a;

const ROUNDING: f64 = 64.0 * f64::EPSILON;
const ROOT_REL_TOL: f64 = 1e-13;
pub const SLACK_FLOOR: f64 = 1e-12;
/// Conservation residual accepted when a scan is run in asserted mode.
pub const CERTIFICATION_TOL: f64 = 1e-8;
pub const MIN_RESOLUTION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RegionMethod {
    /// Rays from the star-shaped center.
    Rays,
    /// Coordinate lines along `line_axis` (first non-periodic axis if unset).
    Grid { line_axis: Option<usize> },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct QuadratureConfig {
    /// Grid cells per axis; also sets the radial node count in ray mode.
    pub grid_resolution: usize,
    /// Ray directions for boundary integrals and ray-mode volumes.
    pub boundary_rays: usize,
    pub method: RegionMethod,
    /// Star-shaped center; the exhaustion's own center when unset.
    pub center: Option<Vec<f64>>,
    /// Samples per ray used to detect level crossings.
    pub march_steps: usize,
    /// Minimum `|∇Φ|` on the level set.
    pub critical_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 200,
            boundary_rays: 2000,
            method: RegionMethod::Rays,
            center: None,
            march_steps: 64,
            critical_cutoff: DEFAULT_CRITICAL_CUTOFF,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < MIN_RESOLUTION || self.boundary_rays < MIN_RESOLUTION || self.march_steps < 2 {
            return Err(Error::InvalidInput(format!(
                "quadrature resolutions must be at least {MIN_RESOLUTION} (grid {}, rays {})",
                self.grid_resolution, self.boundary_rays
            )));
        }
        Ok(())
    }

    pub fn with_method(mut self, method: RegionMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_resolution(mut self, n: usize) -> Self {
        self.grid_resolution = n;
        self
    }

    pub fn with_rays(mut self, n: usize) -> Self {
        self.boundary_rays = n;
        self
    }

    fn radial_nodes(&self) -> usize {
        (self.grid_resolution / 4).max(MIN_RESOLUTION)
    }

    fn halved(&self) -> Self {
        let mut c = self.clone();
        c.grid_resolution = (self.grid_resolution / 2).max(2);
        c.boundary_rays = (self.boundary_rays / 2).max(4);
        c
    }
}

/// A quadrature value and its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    value: f64,
    abs: f64,
    root: f64,
}

fn combine(full: Partial, half: Partial) -> Estimate {
    Estimate { value: full.value, error: (full.value - half.value).abs() + ROUNDING * full.abs + full.root }
}

fn center_of(exh: &Exhaustion, cfg: &QuadratureConfig) -> Vec<f64> {
    cfg.center.clone().unwrap_or_else(|| exh.center.clone())
}

fn along(c: &[f64], d: &[f64], s: f64) -> Vec<f64> {
    c.iter().zip(d).map(|(a, b)| a + s * b).collect()
}

/// Radius at which the ray `c + s·d` leaves `{Φ < t}`, and the final
/// bracket width.
fn ray_crossing(exh: &Exhaustion, chart: &Chart, c: &[f64], d: &[f64], t: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let s_max = chart.domain().exit_distance(c, d);
    if !s_max.is_finite() {
        return Err(Error::InvalidInput("ray never leaves the chart domain".into()));
    }
    let f = |s: f64| exh.value(&along(c, d, s)) - t;
    if !(f(0.0) < 0.0) {
        return Err(Error::InvalidInput("center is not inside the sublevel set".into()));
    }
    let n = cfg.march_steps;
    let mut bracket = None;
    let mut changes = 0;
    let mut prev_inside = true;
    let mut prev_s = 0.0;
    for k in 1..=n {
        let s = s_max * k as f64 / n as f64;
        let inside = f(s) < 0.0;
        if inside != prev_inside {
            changes += 1;
            if bracket.is_none() {
                bracket = Some((prev_s, s));
            }
        }
        prev_inside = inside;
        prev_s = s;
    }
    if prev_inside {
        return Err(Error::LevelSetTouchesBoundary);
    }
    if changes > 1 {
        return Err(Error::NotStarShaped);
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::LevelSetTouchesBoundary)?;
    for _ in 0..200 {
        if hi - lo <= ROOT_REL_TOL * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let y = along(c, d, s);
    check_regular(exh, chart, &y, cfg)?;
    // the ray must cross transversally for the ray parameterization
    let dpsi = exh.psi.gradient(&y)?;
    let radial: f64 = dpsi.iter().zip(d).map(|(a, b)| a * b).sum();
    if !(radial > 0.0) {
        return Err(Error::NotStarShaped);
    }
    Ok((s, hi - lo))
}

fn check_regular(exh: &Exhaustion, chart: &Chart, y: &[f64], cfg: &QuadratureConfig) -> Result<()> {
    match exh.gradient_phi_sq(chart, y)? {
        Some(g2) if sqrt(g2) >= cfg.critical_cutoff => Ok(()),
        _ => Err(Error::NonRegularValue),
    }
}

fn rays_partial<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    inner: Option<f64>,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Partial> {
    let m = chart.dim();
    let c = center_of(exh, cfg);
    let rule = SphereRule::new(m, cfg.boundary_rays);
    let (gx, gw) = gauss_legendre(cfg.radial_nodes());
    let per_ray = exec.map(rule.len(), |k| -> Result<Partial> {
        let d = &rule.dirs[k];
        let (r, wr) = ray_crossing(exh, chart, &c, d, t, cfg)?;
        let (r0, w0) = match inner {
            Some(t0) => ray_crossing(exh, chart, &c, d, t0, cfg)?,
            None => (0.0, 0.0),
        };
        if r0 > r {
            return Err(Error::InvalidInput("inner level set is not inside the outer one".into()));
        }
        let half = 0.5 * (r - r0);
        let mut vals = Vec::with_capacity(gx.len());
        let mut abs = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            let s = r0 + half * (1.0 + x);
            let y = along(&c, d, s);
            let v = w * half * density(&y)? * chart.volume_density(&y)? * powi(s, m as i32 - 1);
            abs += v.abs();
            vals.push(v);
        }
        let edge = |s: f64| -> Result<f64> {
            let y = along(&c, d, s);
            Ok((density(&y)? * chart.volume_density(&y)?).abs() * powi(s, m as i32 - 1))
        };
        let mut root = edge(r)? * wr;
        if inner.is_some() {
            root += edge(r0)? * w0;
        }
        let wk = rule.weights[k];
        Ok(Partial { value: wk * pairwise_sum(&vals), abs: wk * abs, root: wk * root })
    });
    reduce(per_ray)
}

fn reduce(parts: Vec<Result<Partial>>) -> Result<Partial> {
    let parts: Vec<Partial> = parts.into_iter().collect::<Result<_>>()?;
    let v: Vec<f64> = parts.iter().map(|p| p.value).collect();
    let a: Vec<f64> = parts.iter().map(|p| p.abs).collect();
    let r: Vec<f64> = parts.iter().map(|p| p.root).collect();
    Ok(Partial { value: pairwise_sum(&v), abs: pairwise_sum(&a), root: pairwise_sum(&r) })
}

struct Lines {
    axis: usize,
    transverse: Vec<usize>,
    n: usize,
    lo: Vec<f64>,
    h: Vec<f64>,
    periodic: Vec<bool>,
}

impl Lines {
    fn new(chart: &Chart, axis: Option<usize>, n: usize) -> Result<Self> {
        let dom = chart.domain();
        let m = dom.dim();
        let axis = match axis {
            Some(a) if a < m => a,
            Some(a) => return Err(Error::InvalidInput(format!("line axis {a} out of range"))),
            None => (0..m).find(|k| !dom.periodic[*k]).unwrap_or(0),
        };
        if (0..m).any(|k| !(dom.lower[k].is_finite() && dom.upper[k].is_finite())) {
            return Err(Error::InvalidInput("grid quadrature needs a bounded domain box".into()));
        }
        let h = (0..m).map(|k| (dom.upper[k] - dom.lower[k]) / n as f64).collect();
        Ok(Self {
            axis,
            transverse: (0..m).filter(|k| *k != axis).collect(),
            n,
            lo: dom.lower.clone(),
            h,
            periodic: dom.periodic.clone(),
        })
    }

    fn count(&self) -> usize {
        self.n.pow(self.transverse.len() as u32)
    }

    /// Base point of line `idx` and whether it sits in an outer cell of a
    /// bounded transverse axis.
    fn base(&self, mut idx: usize) -> (Vec<f64>, bool) {
        let mut x = self.lo.clone();
        let mut outer = false;
        for &k in &self.transverse {
            let i = idx % self.n;
            idx /= self.n;
            x[k] = self.lo[k] + (i as f64 + 0.5) * self.h[k];
            outer |= !self.periodic[k] && (i == 0 || i + 1 == self.n);
        }
        (x, outer)
    }

    fn weight(&self) -> f64 {
        self.transverse.iter().map(|k| self.h[*k]).product()
    }
}

/// Crossings of `{Φ < t}` along one grid line: inside intervals and the
/// boundary points found.
fn line_intervals(
    exh: &Exhaustion,
    chart: &Chart,
    lines: &Lines,
    base: &[f64],
    outer: bool,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<(Vec<(f64, f64)>, Vec<f64>, f64)> {
    let a = lines.axis;
    let at = |z: f64| {
        let mut y = base.to_vec();
        y[a] = z;
        y
    };
    let f = |z: f64| exh.value(&at(z)) - t;
    let n = lines.n;
    let z: Vec<f64> = (0..=n).map(|k| lines.lo[a] + k as f64 * lines.h[a]).collect();
    let inside: Vec<bool> = z.iter().map(|zk| f(*zk) < 0.0).collect();
    if inside.iter().any(|b| *b) && outer {
        return Err(Error::LevelSetTouchesBoundary);
    }
    if !lines.periodic[a] && (inside[0] || inside[n]) {
        return Err(Error::LevelSetTouchesBoundary);
    }
    let mut cells = Vec::new();
    let mut crossings = Vec::new();
    let mut width: f64 = 0.0;
    for k in 0..n {
        let (za, zb) = (z[k], z[k + 1]);
        match (inside[k], inside[k + 1]) {
            (true, true) => cells.push((za, zb)),
            (false, false) => {}
            (ia, _) => {
                let (mut lo, mut hi) = (za, zb);
                for _ in 0..200 {
                    if hi - lo <= ROOT_REL_TOL * zb.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if (f(mid) < 0.0) == ia {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let zc = 0.5 * (lo + hi);
                check_regular(exh, chart, &at(zc), cfg)?;
                crossings.push(zc);
                width = width.max(hi - lo);
                cells.push(if ia { (za, zc) } else { (zc, zb) });
            }
        }
    }
    Ok((cells, crossings, width))
}

fn grid_partial<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    axis: Option<usize>,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Partial> {
    let lines = Lines::new(chart, axis, cfg.grid_resolution)?;
    let (gx, gw) = gauss_legendre(3);
    let wt = lines.weight();
    let per_line = exec.map(lines.count(), |idx| -> Result<Partial> {
        let (base, outer) = lines.base(idx);
        let (cells, crossings, width) = line_intervals(exh, chart, &lines, &base, outer, t, cfg)?;
        let mut vals = Vec::new();
        let mut abs = 0.0;
        let mut y = base.clone();
        for (a, b) in cells {
            let half = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                y[lines.axis] = a + half * (1.0 + x);
                let v = w * half * density(&y)? * chart.volume_density(&y)?;
                abs += v.abs();
                vals.push(v);
            }
        }
        let mut root = 0.0;
        for zc in crossings {
            y[lines.axis] = zc;
            root += (density(&y)? * chart.volume_density(&y)?).abs() * width;
        }
        Ok(Partial { value: wt * pairwise_sum(&vals), abs: wt * abs, root: wt * root })
    });
    reduce(per_line)
}

fn region_partial<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    inner: Option<f64>,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Partial> {
    match cfg.method {
        RegionMethod::Rays => rays_partial(density, exh, chart, inner, t, cfg, exec),
        RegionMethod::Grid { line_axis } => {
            let outer = grid_partial(density, exh, chart, line_axis, t, cfg, exec)?;
            match inner {
                None => Ok(outer),
                Some(t0) => {
                    let i = grid_partial(density, exh, chart, line_axis, t0, cfg, exec)?;
                    Ok(Partial { value: outer.value - i.value, abs: outer.abs + i.abs, root: outer.root + i.root })
                }
            }
        }
    }
}

fn check_inputs(exh: &Exhaustion, chart: &Chart, cfg: &QuadratureConfig) -> Result<()> {
    cfg.validate()?;
    if exh.dim() != chart.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), found: exh.dim() });
    }
    if chart.dim() < 2 {
        return Err(Error::InvalidInput("sublevel quadrature needs dimension at least 2".into()));
    }
    Ok(())
}

/// `∫_{Φ<t} density dv_g`.
pub fn region_integral<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Estimate> {
    check_inputs(exh, chart, cfg)?;
    let full = region_partial(density, exh, chart, None, t, cfg, exec)?;
    let half = region_partial(density, exh, chart, None, t, &cfg.halved(), exec)?;
    Ok(combine(full, half))
}

/// `∫_{t0 ≤ Φ < t} density dv_g`.
pub fn annulus_integral<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    t0: f64,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Estimate> {
    check_inputs(exh, chart, cfg)?;
    if !(t0 < t) {
        return Err(Error::InvalidInput("annulus needs t0 < t".into()));
    }
    let full = region_partial(density, exh, chart, Some(t0), t, cfg, exec)?;
    let half = region_partial(density, exh, chart, Some(t0), t, &cfg.halved(), exec)?;
    Ok(combine(full, half))
}

/// `X = ½∇Ψ` at `x` as a contravariant vector, with `∂Ψ`.
fn position_field(exh: &Exhaustion, chart: &Chart, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let dpsi = exh.psi.gradient(x)?;
    let ginv = chart.inverse_metric(x)?;
    let v = ginv.mul_vec(&dpsi).iter().map(|a| 0.5 * a).collect();
    Ok((v, dpsi))
}

fn flux_partial<E: Executor>(
    form: &BundleValuedForm,
    exh: &Exhaustion,
    chart: &Chart,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Partial> {
    let m = chart.dim();
    let c = center_of(exh, cfg);
    let rule = SphereRule::new(m, cfg.boundary_rays);
    let per_ray = exec.map(rule.len(), |k| -> Result<Partial> {
        let d = &rule.dirs[k];
        let (r, width) = ray_crossing(exh, chart, &c, d, t, cfg)?;
        let y = along(&c, d, r);
        let (x_vec, dpsi) = position_field(exh, chart, &y)?;
        let s = stress_energy_at(form, chart, &y)?;
        let ginv = chart.inverse_metric(&y)?;
        // S(X, ν) ds = √g (g^{ij} S_jk X^k) ∂_iΨ R^{m-1} / (∂Ψ·σ) dσ
        let sx = s.matrix.mul_vec(&x_vec);
        let flux: f64 = ginv.mul_vec(&sx).iter().zip(&dpsi).map(|(a, b)| a * b).sum();
        let radial: f64 = dpsi.iter().zip(d).map(|(a, b)| a * b).sum();
        let v = rule.weights[k] * chart.volume_density(&y)? * flux * powi(r, m as i32 - 1) / radial;
        Ok(Partial { value: v, abs: v.abs(), root: v.abs() * (m as f64 + 1.0) * width / r })
    });
    reduce(per_ray)
}

/// `∫_{∂B_Φ(t)} S_ω(X, ν) ds` with `X = ½∇Ψ`. Always evaluated along rays.
pub fn boundary_flux<E: Executor>(
    form: &BundleValuedForm,
    exh: &Exhaustion,
    chart: &Chart,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Estimate> {
    check_inputs(exh, chart, cfg)?;
    let full = flux_partial(form, exh, chart, t, cfg, exec)?;
    let half = flux_partial(form, exh, chart, t, &cfg.halved(), exec)?;
    Ok(combine(full, half))
}

/// Points of the level set `{Φ = t}`: one per ray direction, or every
/// crossing of the grid lines in grid mode.
pub fn level_set_points<E: Executor>(
    exh: &Exhaustion,
    chart: &Chart,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Vec<Vec<f64>>> {
    check_inputs(exh, chart, cfg)?;
    match cfg.method {
        RegionMethod::Rays => {
            let c = center_of(exh, cfg);
            let rule = SphereRule::new(chart.dim(), cfg.boundary_rays);
            exec.map(rule.len(), |k| {
                let d = &rule.dirs[k];
                ray_crossing(exh, chart, &c, d, t, cfg).map(|(r, _)| along(&c, d, r))
            })
            .into_iter()
            .collect()
        }
        RegionMethod::Grid { line_axis } => {
            let lines = Lines::new(chart, line_axis, cfg.grid_resolution)?;
            let per = exec.map(lines.count(), |idx| -> Result<Vec<Vec<f64>>> {
                let (base, outer) = lines.base(idx);
                let (_, crossings, _) = line_intervals(exh, chart, &lines, &base, outer, t, cfg)?;
                Ok(crossings
                    .into_iter()
                    .map(|z| {
                        let mut y = base.clone();
                        y[lines.axis] = z;
                        y
                    })
                    .collect())
            });
            let mut out = Vec::new();
            for p in per {
                out.extend(p?);
            }
            Ok(out)
        }
    }
}

/// Outward unit normal `ν = ∇Φ/|∇Φ|` as a contravariant vector.
pub fn outward_normal(exh: &Exhaustion, chart: &Chart, x: &[f64]) -> Result<Vec<f64>> {
    let dpsi = exh.psi.gradient(x)?;
    let ginv = chart.inverse_metric(x)?;
    let up = ginv.mul_vec(&dpsi);
    let n = sqrt(up.iter().zip(&dpsi).map(|(a, b)| a * b).sum::<f64>());
    if !(n > 0.0) {
        return Err(Error::NonRegularValue);
    }
    Ok(up.into_iter().map(|a| a / n).collect())
}

/// Both sides of the integral formula on `B_Φ(t)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegralFormulaReport {
    pub t: f64,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub gap: f64,
    pub relative_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Integrand `⟨S_ω, ½ Hess Ψ⟩ + (div S_ω)(X)` of the volume side.
pub fn integral_formula_density(form: &BundleValuedForm, exh: &Exhaustion, chart: &Chart, x: &[f64]) -> Result<f64> {
    let s = stress_energy_at(form, chart, x)?;
    let h = hessian_at(chart, &exh.psi, x)?;
    let ginv = chart.inverse_metric(x)?;
    let pairing = 0.5 * ginv.mul(&s.matrix).mul(&ginv).mul(&h).trace();
    let (v, _) = position_field(exh, chart, x)?;
    Ok(pairing + div_stress_energy(form, chart, x, &v, DivRoute::Definition)?)
}

pub fn verify_integral_formula<E: Executor>(
    form: &BundleValuedForm,
    exh: &Exhaustion,
    chart: &Chart,
    t: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<IntegralFormulaReport> {
    let lhs = boundary_flux(form, exh, chart, t, cfg, exec)?;
    let density = |x: &[f64]| integral_formula_density(form, exh, chart, x);
    let rhs = region_integral(&density, exh, chart, t, cfg, exec)?;
    let gap = (lhs.value - rhs.value).abs();
    let tolerance = 3.0 * (lhs.error + rhs.error);
    Ok(IntegralFormulaReport {
        t,
        lhs,
        rhs,
        gap,
        relative_gap: gap / lhs.value.abs().max(rhs.value.abs()).max(SLACK_FLOOR),
        tolerance,
        pass: gap <= tolerance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRow {
    pub rho: f64,
    pub raw: f64,
    pub raw_err: f64,
    /// `ρ^{−λ} · raw`
    pub scaled: f64,
    /// Error bar of `scaled`.
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "kebab-case"))]
pub enum Verdict {
    Nondecreasing,
    /// Pairs `(i, i+1)` that drop by more than the error bars.
    Violated { indices: Vec<usize> },
}

/// Sampled inner-boundary condition `|ω|²/2 ≥ |i_ν ω|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryCondition {
    pub radius: f64,
    pub min_slack: f64,
    pub sample_size: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotonicityReport {
    pub rows: Vec<ScanRow>,
    pub lambda_used: f64,
    pub verdict: Verdict,
    pub slack: f64,
    /// Whether the conservation law was certified before the scan.
    pub asserted: bool,
    pub inner_radius: Option<f64>,
    pub boundary: Option<BoundaryCondition>,
}

impl MonotonicityReport {
    pub fn from_rows(rows: Vec<ScanRow>, lambda_used: f64) -> Self {
        let mut indices = Vec::new();
        let mut slack = f64::INFINITY;
        for (i, w) in rows.windows(2).enumerate() {
            let diff = w[1].scaled - w[0].scaled;
            if diff < -3.0 * (w[0].err + w[1].err) {
                indices.push(i);
            }
            slack = slack.min(diff / w[0].scaled.max(SLACK_FLOOR));
        }
        let verdict = if indices.is_empty() { Verdict::Nondecreasing } else { Verdict::Violated { indices } };
        Self { rows, lambda_used, verdict, slack, asserted: false, inner_radius: None, boundary: None }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.verdict == Verdict::Nondecreasing
    }

    pub fn strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].scaled > w[0].scaled)
    }

    /// Every scaled value within three error bars of the first one.
    pub fn constant_within_errors(&self) -> bool {
        let Some(first) = self.rows.first() else { return true };
        self.rows.iter().all(|r| (r.scaled - first.scaled).abs() <= 3.0 * (r.err + first.err))
    }
}

/// `n` geometrically spaced radii from `a` to `b`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    let (la, lb) = (ln(a), ln(b));
    (0..n)
        .map(|i| match i {
            0 => a,
            i if i + 1 == n => b,
            i => exp(la + (lb - la) * i as f64 / (n - 1) as f64),
        })
        .collect()
}

pub const DEFAULT_GRID_POINTS: usize = 12;

fn check_grid(grid: &[f64], above: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptySample);
    }
    if grid.iter().any(|r| !(*r > above)) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("radius grid must be increasing and above the inner radius".into()));
    }
    Ok(())
}

fn scan_rows<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    inner: Option<f64>,
    lambda: f64,
    grid: &[f64],
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Vec<ScanRow>> {
    grid.iter()
        .map(|&rho| {
            let e = match inner {
                None => region_integral(density, exh, chart, rho, cfg, exec)?,
                Some(r0) => annulus_integral(density, exh, chart, r0, rho, cfg, exec)?,
            };
            let scale = crate::math::pow(rho, -lambda);
            Ok(ScanRow { rho, raw: e.value, raw_err: e.error, scaled: scale * e.value, err: scale * e.error })
        })
        .collect()
}

/// `ρ ↦ ρ^{−λ} ∫_{B_Φ(ρ)} density dv` on the grid.
pub fn ratio_scan<E: Executor>(
    density: &Density<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    lambda: f64,
    grid: &[f64],
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<MonotonicityReport> {
    check_grid(grid, 0.0)?;
    let rows = scan_rows(density, exh, chart, None, lambda, grid, cfg, exec)?;
    Ok(MonotonicityReport::from_rows(rows, lambda))
}

/// Certification sample: level-set points at the smallest, middle and largest
/// radius, thinned to at most 64 each.
fn certification_sample<E: Executor>(
    exh: &Exhaustion,
    chart: &Chart,
    grid: &[f64],
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<Vec<Vec<f64>>> {
    let coarse = QuadratureConfig { boundary_rays: 64, grid_resolution: cfg.grid_resolution.min(64), ..cfg.clone() };
    let mut out = Vec::new();
    for rho in [grid[0], grid[grid.len() / 2], grid[grid.len() - 1]] {
        let pts = level_set_points(exh, chart, rho, &coarse, exec)?;
        let step = pts.len().div_ceil(64).max(1);
        out.extend(pts.into_iter().step_by(step));
    }
    Ok(out)
}

fn certify<E: Executor>(
    form: &BundleValuedForm,
    exh: &Exhaustion,
    chart: &Chart,
    grid: &[f64],
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<()> {
    let sample = certification_sample(exh, chart, grid, cfg, exec)?;
    let residual = conservation_residual(form, chart, &sample)?;
    if residual > CERTIFICATION_TOL {
        return Err(Error::HypothesisViolated(format!(
            "conservation residual {residual:.3e} exceeds {CERTIFICATION_TOL:.0e}"
        )));
    }
    Ok(())
}

/// Ratio scan of `|ω|²`. In asserted mode the conservation law is certified
/// on level-set samples first.
pub fn ratio_scan_form<E: Executor>(
    form: &BundleValuedForm,
    exh: &Exhaustion,
    chart: &Chart,
    lambda: f64,
    grid: &[f64],
    asserted: bool,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<MonotonicityReport> {
    check_grid(grid, 0.0)?;
    if asserted {
        certify(form, exh, chart, grid, cfg, exec)?;
    }
    let density = |x: &[f64]| norm_sq(form, chart, x);
    let mut report = ratio_scan(&density, exh, chart, lambda, grid, cfg, exec)?;
    report.asserted = asserted;
    Ok(report)
}

/// Pointwise slack of the inner-boundary condition at `x` with unit normal `ν`.
pub type BoundarySlack<'a> = dyn Fn(&[f64], &[f64]) -> Result<f64> + Sync + 'a;

/// `|ω|²/2 − |i_ν ω|²`.
pub fn form_boundary_slack(form: &BundleValuedForm, chart: &Chart, x: &[f64], nu: &[f64]) -> Result<f64> {
    let w2 = norm_sq(form, chart, x)?;
    let i = interior_product(form, nu, chart, x)?;
    let ginv = chart.inverse_metric(x)?;
    let i2 = i.layout.inner(ginv.as_slice(), &i.comps, &i.comps);
    Ok(0.5 * w2 - i2)
}

/// Min of `slack` over the level set `{Φ = r0}`.
pub fn boundary_condition<E: Executor>(
    slack: &BoundarySlack<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    r0: f64,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<BoundaryCondition> {
    let pts = level_set_points(exh, chart, r0, cfg, exec)?;
    if pts.is_empty() {
        return Err(Error::EmptySample);
    }
    let vals = exec.map(pts.len(), |k| -> Result<f64> {
        let nu = outward_normal(exh, chart, &pts[k])?;
        slack(&pts[k], &nu)
    });
    let mut min_slack = f64::INFINITY;
    for v in vals {
        min_slack = min_slack.min(v?);
    }
    Ok(BoundaryCondition { radius: r0, min_slack, sample_size: pts.len(), holds: min_slack >= -1e-12 })
}

/// Annulus scan `ρ ↦ ρ^{−λ} ∫_{R0 ≤ Φ < ρ} density dv` with the inner
/// boundary condition reported as a status.
pub fn annulus_scan<E: Executor>(
    density: &Density<'_>,
    slack: &BoundarySlack<'_>,
    exh: &Exhaustion,
    chart: &Chart,
    r0: f64,
    lambda: f64,
    grid: &[f64],
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<MonotonicityReport> {
    check_grid(grid, r0)?;
    let boundary = boundary_condition(slack, exh, chart, r0, cfg, exec)?;
    let rows = scan_rows(density, exh, chart, Some(r0), lambda, grid, cfg, exec)?;
    let mut report = MonotonicityReport::from_rows(rows, lambda);
    report.inner_radius = Some(r0);
    report.boundary = Some(boundary);
    Ok(report)
}

/// Annulus scan of `|ω|²` outside `B_Φ(R0)`.
#[allow(clippy::too_many_arguments)]
pub fn annulus_ratio_scan<E: Executor>(
    form: &BundleValuedForm,
    exh: &Exhaustion,
    chart: &Chart,
    r0: f64,
    lambda: f64,
    grid: &[f64],
    asserted: bool,
    cfg: &QuadratureConfig,
    exec: &E,
) -> Result<MonotonicityReport> {
    check_grid(grid, r0)?;
    if asserted {
        certify(form, exh, chart, grid, cfg, exec)?;
    }
    let density = |x: &[f64]| norm_sq(form, chart, x);
    let slack = |x: &[f64], nu: &[f64]| form_boundary_slack(form, chart, x, nu);
    let mut report = annulus_scan(&density, &slack, exh, chart, r0, lambda, grid, cfg, exec)?;
    report.asserted = asserted;
    Ok(report)
}
