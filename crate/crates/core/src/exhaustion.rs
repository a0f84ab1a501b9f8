//! Growth constants of exhaustion functions: `k1`, `k2` and the growth order
//! estimated on a sample window, closed-form growth orders for the
//! curvature regimes, and the eigenvalue lower bounds for `Hess(r²)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::manifold::{complex_hessian_spectrum, hessian_spectrum, Chart, ScalarField};
use crate::math::{exp, sqrt, x_coth_x};

pub const DEFAULT_CRITICAL_CUTOFF: f64 = 1e-8;

/// An exhaustion function `Φ ≥ 0` together with `Ψ = Φ²`, so that both can
/// carry exact jets.
#[derive(Clone, Debug)]
pub struct Exhaustion {
    pub phi: ScalarField,
    pub psi: ScalarField,
    /// Star-shaped center of the sublevel sets.
    pub center: Vec<f64>,
}

impl Exhaustion {
    pub fn from_psi(psi: ScalarField, center: Vec<f64>) -> Self {
        Self { phi: ScalarField::sqrt_of(&psi), psi, center }
    }

    pub fn from_phi(phi: ScalarField, center: Vec<f64>) -> Self {
        Self { psi: ScalarField::square_of(&phi), phi, center }
    }

    /// `Ψ = Σ x_k² / a_k` on flat coordinates.
    pub fn quadratic(a: &[f64]) -> Self {
        let w = a.iter().map(|ai| 1.0 / ai).collect();
        Self::from_psi(ScalarField::weighted_square(w, alloc::vec![0.0; a.len()]), alloc::vec![0.0; a.len()])
    }

    /// `Ψ = Σ |z_k|² / a_k` in real coordinates `(x1, y1, x2, y2, …)`.
    pub fn complex_quadratic(a: &[f64]) -> Self {
        let w: Vec<f64> = a.iter().flat_map(|ai| [1.0 / ai, 1.0 / ai]).collect();
        let n = w.len();
        Self::from_psi(ScalarField::weighted_square(w, alloc::vec![0.0; n]), alloc::vec![0.0; n])
    }

    /// `Φ = |x − c|`.
    pub fn euclidean(center: Vec<f64>) -> Self {
        let w = alloc::vec![1.0; center.len()];
        Self::from_psi(ScalarField::weighted_square(w, center.clone()), center)
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.phi.value(x)
    }

    /// `|∇Φ|² = |∇Ψ|² / 4Ψ`; `None` where `Ψ = 0`.
    pub fn gradient_phi_sq(&self, chart: &Chart, x: &[f64]) -> Result<Option<f64>> {
        let psi = self.psi.value(x);
        if !(psi > 0.0) {
            return Ok(None);
        }
        let d = self.psi.gradient(x)?;
        let ginv = chart.inverse_metric(x)?;
        Ok(Some(ginv.bilinear(&d, &d) / (4.0 * psi)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum GrowthKind {
    Real,
    Complex,
}

/// Inputs to the growth-constant estimates.
#[derive(Clone, Debug)]
pub struct ExhaustionSpec<'a> {
    pub exhaustion: &'a Exhaustion,
    pub chart: &'a Chart,
    pub p: usize,
    pub sample: &'a [Vec<f64>],
    pub critical_cutoff: f64,
}

impl<'a> ExhaustionSpec<'a> {
    pub fn new(exhaustion: &'a Exhaustion, chart: &'a Chart, p: usize, sample: &'a [Vec<f64>]) -> Self {
        Self { exhaustion, chart, p, sample, critical_cutoff: DEFAULT_CRITICAL_CUTOFF }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ExhaustionStatus {
    Valid,
    NonPositiveK1,
}

/// Window estimate of the growth constants.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrowthOrderReport {
    pub kind: GrowthKind,
    pub k1: f64,
    pub k2: f64,
    /// `k1/(2 k2)` (real) or `k1/k2` (complex); `None` when `k2 = 0`.
    pub lambda: Option<f64>,
    pub closed_form: Option<f64>,
    pub sample_size: usize,
    pub excluded: usize,
    /// Bounding box of the retained sample.
    pub window_lower: Vec<f64>,
    pub window_upper: Vec<f64>,
    pub status: ExhaustionStatus,
}

impl GrowthOrderReport {
    pub fn closed_form_gap(&self) -> Option<f64> {
        match (self.lambda, self.closed_form) {
            (Some(l), Some(c)) => Some((l - c).abs()),
            _ => None,
        }
    }

    pub fn with_closed_form(mut self, value: f64) -> Self {
        self.closed_form = Some(value);
        self
    }
}

/// Contribution of one sample point: `(k1 term, |∇Φ|²)`, or `None` when the
/// point is critical and must be excluded.
pub fn growth_terms_at(spec: &ExhaustionSpec<'_>, kind: GrowthKind, x: &[f64]) -> Result<Option<(f64, f64)>> {
    let grad = match spec.exhaustion.gradient_phi_sq(spec.chart, x)? {
        Some(g) if sqrt(g) >= spec.critical_cutoff => g,
        _ => return Ok(None),
    };
    let p = spec.p as f64;
    let term = match kind {
        GrowthKind::Real => {
            let ev = hessian_spectrum(spec.chart, &spec.exhaustion.psi, x)?;
            ev.iter().sum::<f64>() - 2.0 * p * ev[ev.len() - 1]
        }
        GrowthKind::Complex => {
            let ev = complex_hessian_spectrum(spec.chart, &spec.exhaustion.psi, x)?;
            ev.iter().sum::<f64>() - p * ev[ev.len() - 1]
        }
    };
    Ok(Some((term, grad)))
}

/// Fold per-point terms (in sample order) into a report.
pub fn assemble_report(kind: GrowthKind, sample: &[Vec<f64>], terms: &[Option<(f64, f64)>]) -> Result<GrowthOrderReport> {
    let mut k1 = f64::INFINITY;
    let mut k2 = f64::NEG_INFINITY;
    let mut excluded = 0;
    let dim = sample.first().map_or(0, |x| x.len());
    let mut lo = alloc::vec![f64::INFINITY; dim];
    let mut hi = alloc::vec![f64::NEG_INFINITY; dim];
    for (x, t) in sample.iter().zip(terms) {
        match t {
            None => excluded += 1,
            Some((a, b)) => {
                k1 = k1.min(*a);
                k2 = k2.max(*b);
                for k in 0..dim {
                    lo[k] = lo[k].min(x[k]);
                    hi[k] = hi[k].max(x[k]);
                }
            }
        }
    }
    if excluded == sample.len() {
        return Err(Error::EmptySample);
    }
    let lambda = if k2 > 0.0 {
        Some(match kind {
            GrowthKind::Real => k1 / (2.0 * k2),
            GrowthKind::Complex => k1 / k2,
        })
    } else {
        None
    };
    Ok(GrowthOrderReport {
        kind,
        k1,
        k2,
        lambda,
        closed_form: None,
        sample_size: sample.len() - excluded,
        excluded,
        window_lower: lo,
        window_upper: hi,
        status: if k1 > 0.0 { ExhaustionStatus::Valid } else { ExhaustionStatus::NonPositiveK1 },
    })
}

fn growth_constants(spec: &ExhaustionSpec<'_>, kind: GrowthKind) -> Result<GrowthOrderReport> {
    if spec.sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if kind == GrowthKind::Complex && spec.chart.complex_structure().is_none() {
        return Err(Error::NoComplexStructure);
    }
    let terms = spec.sample.iter().map(|x| growth_terms_at(spec, kind, x)).collect::<Result<Vec<_>>>()?;
    assemble_report(kind, spec.sample, &terms)
}

/// `k1 = inf (Σλ_i − 2p λ_m)`, `k2 = sup |∇Φ|²`, `λ = k1 / 2k2`.
pub fn growth_constants_real(spec: &ExhaustionSpec<'_>) -> Result<GrowthOrderReport> {
    growth_constants(spec, GrowthKind::Real)
}

/// `k̄1 = inf (Σε_i − p ε_m)`, `k̄2 = sup |∇Φ|²`, `λ̄ = k̄1 / k̄2`.
pub fn growth_constants_complex(spec: &ExhaustionSpec<'_>) -> Result<GrowthOrderReport> {
    growth_constants(spec, GrowthKind::Complex)
}

/// Regimes with a closed-form growth order. `m` is the real dimension for
/// the real and volume cases and the complex dimension for the complex ones.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "regime", rename_all = "kebab-case"))]
pub enum ClosedFormRegime {
    RealQuadratic { a: f64, b: f64, m: usize, p: usize },
    ComplexHyperbolic { alpha: f64, beta: f64, m: usize, p: usize },
    ComplexPower { a: f64, b: f64, epsilon: f64, m: usize, p: usize },
    ComplexQuadratic { a: f64, b: f64, m: usize, p: usize },
    /// At radius `r`, or the infimum over `r > 0` (which is `m`) when absent.
    VolumeHyperbolic { beta: f64, m: usize, r: Option<f64> },
    VolumePower { b: f64, epsilon: f64, m: usize },
    VolumeQuadratic { b: f64, m: usize },
}

fn violated(msg: alloc::string::String) -> Error {
    Error::HypothesisViolated(msg)
}

fn check_quadratic_band(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0) {
        return Err(violated(format!("a >= 0 (a = {a})")));
    }
    if !(b * b <= 0.25) {
        return Err(violated(format!("b^2 in [0, 1/4] (b^2 = {})", b * b)));
    }
    Ok(())
}

fn check_power_band(a: f64, b: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(violated(format!("epsilon > 0 (epsilon = {epsilon})")));
    }
    if !(a >= 0.0) {
        return Err(violated(format!("A >= 0 (A = {a})")));
    }
    if !(b >= 0.0 && b < 2.0 * epsilon) {
        return Err(violated(format!("0 <= B < 2 epsilon (B = {b}, epsilon = {epsilon})")));
    }
    Ok(())
}

/// Closed-form growth order of a curvature regime. Fails with the violated
/// inequality named.
pub fn lambda_closed_form(regime: ClosedFormRegime) -> Result<f64> {
    match regime {
        ClosedFormRegime::RealQuadratic { a, b, m, p } => {
            check_quadratic_band(a, b)?;
            let (m, p) = (m as f64, p as f64);
            let s = 1.0 + sqrt(1.0 - 4.0 * b * b);
            let t = 1.0 + sqrt(1.0 + 4.0 * a * a);
            let hyp = 2.0 + (m - 2.0) * s - (2.0 * p - 1.0) * t;
            if !(hyp > 0.0) {
                return Err(violated(format!("2 + (m-2)(1+sqrt(1-4b^2)) - (2p-1)(1+sqrt(1+4a^2)) > 0 (value {hyp})")));
            }
            let lambda = (2.0 + (m - 1.0) * s - 2.0 * p * t) / 2.0;
            if !(lambda > 0.0) {
                return Err(violated(format!("growth order must be positive (value {lambda})")));
            }
            Ok(lambda)
        }
        ClosedFormRegime::ComplexHyperbolic { alpha, beta, m, p } => {
            if !(alpha > 0.0 && beta > 0.0) {
                return Err(violated(format!("alpha > 0 and beta > 0 (alpha = {alpha}, beta = {beta})")));
            }
            if !(alpha >= beta) {
                return Err(violated(format!("alpha >= beta (alpha = {alpha}, beta = {beta})")));
            }
            let (m, p) = (m as f64, p as f64);
            let hyp = (2.0 * m - 1.0) * beta - 2.0 * p * alpha;
            if !(hyp > 0.0) {
                return Err(violated(format!("(2m-1) beta - 2p alpha > 0 (value {hyp})")));
            }
            Ok(2.0 * (m - p * alpha / beta))
        }
        ClosedFormRegime::ComplexPower { a, b, epsilon, m, p } => {
            check_power_band(a, b, epsilon)?;
            let (m, p) = (m as f64, p as f64);
            let v = 1.0 + (2.0 * m - 1.0) * (1.0 - b / (2.0 * epsilon)) - 2.0 * p * exp(a / (2.0 * epsilon));
            if !(v > 0.0) {
                return Err(violated(format!("1 + (2m-1)(1 - B/2eps) - 2p e^(A/2eps) > 0 (value {v})")));
            }
            Ok(v)
        }
        ClosedFormRegime::ComplexQuadratic { a, b, m, p } => {
            check_quadratic_band(a, b)?;
            let (m, p) = (m as f64, p as f64);
            let s = 1.0 + sqrt(1.0 - 4.0 * b * b);
            let t = 1.0 + sqrt(1.0 + 4.0 * a * a);
            let hyp = 2.0 + (2.0 * m - 1.0) * s - 2.0 * p * t;
            if !(hyp > 0.0) {
                return Err(violated(format!("2 + (2m-1)(1+sqrt(1-4b^2)) - 2p(1+sqrt(1+4a^2)) > 0 (value {hyp})")));
            }
            Ok(1.0 + (2.0 * m - 1.0) * s / 2.0 - p * t)
        }
        ClosedFormRegime::VolumeHyperbolic { beta, m, r } => {
            if !(beta > 0.0) {
                return Err(violated(format!("beta > 0 (beta = {beta})")));
            }
            let m = m as f64;
            match r {
                None => Ok(m),
                Some(r) if r > 0.0 => Ok(1.0 + (m - 1.0) * x_coth_x(beta * r)),
                Some(r) => Err(violated(format!("r > 0 (r = {r})"))),
            }
        }
        ClosedFormRegime::VolumePower { b, epsilon, m } => {
            check_power_band(0.0, b, epsilon)?;
            Ok(m as f64 * (1.0 - b / (2.0 * epsilon)))
        }
        ClosedFormRegime::VolumeQuadratic { b, m } => {
            check_quadratic_band(0.0, b)?;
            Ok(m as f64 * (1.0 + sqrt(1.0 - 4.0 * b * b)) / 2.0)
        }
    }
}

/// Which case of the bound applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BoundBranch {
    /// `r h2(r) ≥ 1`.
    Large,
    /// `r h2(r) < 1`.
    Small,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenBound {
    pub value: f64,
    pub branch: BoundBranch,
}

/// Lower bound on `Σλ_i − 2pλ_m` (real, `m` = real dimension) or
/// `Σε_i − pε_m` (complex, `m` = complex dimension) for `Hess(r²)` given
/// `h1 (g − dr²) ≤ Hess r ≤ h2 (g − dr²)`.
pub fn hessian_r2_eigen_bounds(h1: f64, h2: f64, r: f64, m: usize, p: usize, kind: GrowthKind) -> Result<EigenBound> {
    if h1 > h2 {
        return Err(Error::BadBounds);
    }
    if !(h1 > 0.0 && r > 0.0) {
        return Err(Error::InvalidInput(format!("need h1, h2, r > 0 (h1 = {h1}, r = {r})")));
    }
    let (mf, pf) = (m as f64, p as f64);
    let (rh1, rh2) = (r * h1, r * h2);
    let branch = if rh2 >= 1.0 { BoundBranch::Large } else { BoundBranch::Small };
    let value = match (kind, branch) {
        (GrowthKind::Real, BoundBranch::Large) => 2.0 + 2.0 * (mf - 1.0) * rh1 - 4.0 * pf * rh2,
        (GrowthKind::Real, BoundBranch::Small) => 2.0 + 2.0 * (mf - 1.0) * rh1 - 4.0 * pf,
        (GrowthKind::Complex, BoundBranch::Large) => 1.0 + (2.0 * mf - 1.0) * rh1 - 2.0 * pf * rh2,
        (GrowthKind::Complex, BoundBranch::Small) => 1.0 + (2.0 * mf - 1.0) * rh1 - pf * (1.0 + rh2),
    };
    Ok(EigenBound { value, branch })
}

/// Regular grid of `n` points per axis over a box (`n ≥ 2`), row-major.
pub fn grid_sample(lower: &[f64], upper: &[f64], n: usize) -> Vec<Vec<f64>> {
    let m = lower.len();
    let n = n.max(2);
    let total = n.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = alloc::vec![0.0; m];
            for k in (0..m).rev() {
                let i = idx % n;
                idx /= n;
                x[k] = lower[k] + (upper[k] - lower[k]) * i as f64 / (n - 1) as f64;
            }
            x
        })
        .collect()
}
