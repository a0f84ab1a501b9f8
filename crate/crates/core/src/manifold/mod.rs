//! Coordinate charts carrying a Riemannian metric (optionally a constant
//! complex structure), with analytic or finite-difference metric jets.

mod field;
mod ops;
mod warped;

pub use field::{FieldJet, FieldModel, FnField, ScalarField};
pub use ops::{
    christoffel_at, complex_hessian_spectrum, gradient, gradient_norm_sq, hessian_at,
    hessian_spectrum, laplace_beltrami_at, metric_compatibility_residual, orthonormal_frame,
};
pub use warped::{
    make_warped_chart, make_warped_chart_with_range, CurvatureRegime, WarpProfile, WarpedChart, DEFAULT_WARP_RANGE,
};

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fd;
use crate::linalg::Matrix;

/// How derivative jets are produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetMode {
    Analytic,
    /// Central differences. `step: None` uses `1e-4 · max(1, |x|)`.
    FiniteDifference { step: Option<f64> },
}

impl JetMode {
    pub const FD: JetMode = JetMode::FiniteDifference { step: None };

    pub fn is_analytic(&self) -> bool {
        matches!(self, JetMode::Analytic)
    }
}

/// Axis-aligned coordinate box. Periodic axes never bound a point.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let periodic = vec![false; lower.len()];
        Self { lower, upper, periodic }
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn with_periodic(mut self, axis: usize) -> Self {
        self.periodic[axis] = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|k| {
                self.periodic[k] || (x[k] >= self.lower[k] - 1e-12 && x[k] <= self.upper[k] + 1e-12)
            })
    }

    /// Largest `s ≥ 0` with `c + s·d` inside the box on all non-periodic axes.
    pub fn exit_distance(&self, c: &[f64], d: &[f64]) -> f64 {
        let mut s = f64::INFINITY;
        for k in 0..self.dim() {
            if self.periodic[k] || d[k] == 0.0 {
                continue;
            }
            let bound = if d[k] > 0.0 { self.upper[k] } else { self.lower[k] };
            s = s.min((bound - c[k]) / d[k]);
        }
        s.max(0.0)
    }
}

/// Metric value with its first coordinate derivatives: `dg[k] = ∂_k g`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet {
    pub g: Matrix,
    pub dg: Vec<Matrix>,
}

/// Source of a metric on coordinate space.
pub trait MetricModel: Send + Sync {
    fn dim(&self) -> usize;

    fn metric(&self, x: &[f64]) -> Matrix;

    /// Analytic first jet, if the model has one.
    fn metric_jet(&self, _x: &[f64]) -> Option<MetricJet> {
        None
    }

    /// Analytic second derivatives `∂_k ∂_l g` at `k * m + l`, if available.
    fn metric_second(&self, _x: &[f64]) -> Option<Vec<Matrix>> {
        None
    }
}

/// Levi-Civita connection coefficients `Γ^k_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_{ij}`.
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A single coordinate patch of a Riemannian manifold.
#[derive(Clone)]
pub struct Chart {
    model: Arc<dyn MetricModel>,
    mode: JetMode,
    domain: DomainBox,
    complex_structure: Option<Matrix>,
    label: String,
}

impl core::fmt::Debug for Chart {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Chart")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("mode", &self.mode)
            .field("complex", &self.complex_structure.is_some())
            .finish()
    }
}

impl Chart {
    pub fn new(model: Arc<dyn MetricModel>, mode: JetMode, domain: DomainBox, label: impl Into<String>) -> Self {
        Self { model, mode, domain, complex_structure: None, label: label.into() }
    }

    /// Euclidean metric on a cube of the given half width.
    pub fn flat(dim: usize, half_width: f64) -> Self {
        Self::new(Arc::new(ConstantMetric(Matrix::identity(dim))), JetMode::Analytic, DomainBox::cube(dim, half_width), alloc::format!("flat-R{dim}"))
    }

    /// Constant metric `c·I`.
    pub fn scaled_flat(dim: usize, factor: f64, half_width: f64) -> Self {
        Self::new(
            Arc::new(ConstantMetric(Matrix::identity(dim).scale(factor))),
            JetMode::Analytic,
            DomainBox::cube(dim, half_width),
            alloc::format!("scaled-R{dim}"),
        )
    }

    /// Flat `C^n` in real coordinates `(x1, y1, x2, y2, …)` with the standard
    /// complex structure pairing consecutive axes.
    pub fn flat_complex(complex_dim: usize, half_width: f64) -> Self {
        let mut c = Self::flat(2 * complex_dim, half_width);
        c.label = alloc::format!("flat-C{complex_dim}");
        c.complex_structure = Some(standard_complex_structure(complex_dim));
        c
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn with_domain(mut self, domain: DomainBox) -> Self {
        self.domain = domain;
        self
    }

    pub fn jet_mode(&self) -> JetMode {
        self.mode
    }

    pub fn with_jet_mode(mut self, mode: JetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn complex_structure(&self) -> Option<&Matrix> {
        self.complex_structure.as_ref()
    }

    /// Attach a constant complex structure; `J² = −I` is checked here, metric
    /// compatibility through [`Chart::complex_structure_defect`].
    pub fn with_complex_structure(mut self, j: Matrix) -> Result<Self> {
        let n = self.dim();
        if !n.is_multiple_of(2) || j.rows() != n || j.cols() != n {
            return Err(Error::InvalidInput("complex structure needs an even-dimensional square matrix".into()));
        }
        let sq = j.mul(&j).add(&Matrix::identity(n));
        if sq.max_abs() > 1e-12 {
            return Err(Error::InvalidInput("complex structure must satisfy J² = −I".into()));
        }
        self.complex_structure = Some(j);
        Ok(self)
    }

    /// `max |JᵀgJ − g|` at `x`.
    pub fn complex_structure_defect(&self, x: &[f64]) -> Result<f64> {
        let j = self.complex_structure.as_ref().ok_or(Error::NoComplexStructure)?;
        let g = self.metric(x)?;
        Ok(j.transpose().mul(&g).mul(j).sub(&g).max_abs())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        if !self.domain.contains(x) {
            return Err(Error::OutOfDomain);
        }
        Ok(())
    }

    /// Metric at `x` (domain-checked, not definiteness-checked).
    pub fn metric(&self, x: &[f64]) -> Result<Matrix> {
        self.check_point(x)?;
        Ok(self.model.metric(x))
    }

    pub fn inverse_metric(&self, x: &[f64]) -> Result<Matrix> {
        self.metric(x)?.inverse_spd()
    }

    /// `√det g`.
    pub fn volume_density(&self, x: &[f64]) -> Result<f64> {
        let l = self.metric(x)?.cholesky()?;
        Ok((0..self.dim()).map(|i| l[(i, i)]).product())
    }

    pub fn metric_jet(&self, x: &[f64]) -> Result<MetricJet> {
        self.check_point(x)?;
        match self.mode {
            JetMode::Analytic => self.model.metric_jet(x).ok_or(Error::JetUnavailable),
            JetMode::FiniteDifference { step } => {
                let m = self.dim();
                let h = fd::base_step(x, step);
                let f = |y: &[f64]| self.model.metric(y).as_slice().to_vec();
                let d = fd::first_derivatives(&f, x, h);
                Ok(MetricJet {
                    g: self.model.metric(x),
                    dg: d.iter().map(|v| Matrix::from_row_slice(m, m, v)).collect(),
                })
            }
        }
    }

    /// `∂_k ∂_l g` at `k * m + l`. Finite differences of the first jet are
    /// used when the model has no analytic second derivatives.
    pub fn metric_second_derivatives(&self, x: &[f64]) -> Result<Vec<Matrix>> {
        self.check_point(x)?;
        let m = self.dim();
        match self.mode {
            JetMode::Analytic => {
                if let Some(d2) = self.model.metric_second(x) {
                    return Ok(d2);
                }
                if self.model.metric_jet(x).is_none() {
                    return Err(Error::JetUnavailable);
                }
                let h = fd::base_step(x, None);
                let f = |y: &[f64]| {
                    let jet = self.model.metric_jet(y).expect("analytic jet");
                    jet.dg.iter().flat_map(|d| d.as_slice().to_vec()).collect::<Vec<f64>>()
                };
                let d = fd::first_derivatives(&f, x, h);
                // d[l] holds ∂_l (∂_k g) for all k
                let mut out = vec![Matrix::zeros(m, m); m * m];
                for l in 0..m {
                    for k in 0..m {
                        out[k * m + l] = Matrix::from_row_slice(m, m, &d[l][k * m * m..(k + 1) * m * m]);
                    }
                }
                Ok(out)
            }
            JetMode::FiniteDifference { step } => {
                let h = fd::base_step(x, step);
                let f = |y: &[f64]| self.model.metric(y).as_slice().to_vec();
                let d = fd::second_derivatives(&f, x, h);
                Ok(d.iter().map(|v| Matrix::from_row_slice(m, m, v)).collect())
            }
        }
    }
}

pub fn standard_complex_structure(complex_dim: usize) -> Matrix {
    let n = 2 * complex_dim;
    let mut j = Matrix::zeros(n, n);
    for k in 0..complex_dim {
        // J e_{2k} = e_{2k+1}, J e_{2k+1} = −e_{2k}
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// Position-independent metric.
#[derive(Clone, Debug)]
pub struct ConstantMetric(pub Matrix);

impl MetricModel for ConstantMetric {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn metric(&self, _x: &[f64]) -> Matrix {
        self.0.clone()
    }

    fn metric_jet(&self, _x: &[f64]) -> Option<MetricJet> {
        let m = self.dim();
        Some(MetricJet { g: self.0.clone(), dg: vec![Matrix::zeros(m, m); m] })
    }

    fn metric_second(&self, _x: &[f64]) -> Option<Vec<Matrix>> {
        let m = self.dim();
        Some(vec![Matrix::zeros(m, m); m * m])
    }
}

/// Conformally flat metric `e^{2φ} I` with a polynomial-free exponent
/// `φ(x) = Σ_k (a_k x_k + b_k x_k²)`.
#[derive(Clone, Debug)]
pub struct ConformalMetric {
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
}

impl ConformalMetric {
    fn phi(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let mut phi = 0.0;
        let mut dphi = vec![0.0; x.len()];
        let mut ddphi = vec![0.0; x.len()];
        for k in 0..x.len() {
            phi += self.linear[k] * x[k] + self.quadratic[k] * x[k] * x[k];
            dphi[k] = self.linear[k] + 2.0 * self.quadratic[k] * x[k];
            ddphi[k] = 2.0 * self.quadratic[k];
        }
        (phi, dphi, ddphi)
    }
}

impl MetricModel for ConformalMetric {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn metric(&self, x: &[f64]) -> Matrix {
        let (phi, _, _) = self.phi(x);
        Matrix::identity(self.dim()).scale(crate::math::exp(2.0 * phi))
    }

    fn metric_jet(&self, x: &[f64]) -> Option<MetricJet> {
        let (phi, dphi, _) = self.phi(x);
        let m = self.dim();
        let e = crate::math::exp(2.0 * phi);
        let id = Matrix::identity(m);
        Some(MetricJet { g: id.scale(e), dg: (0..m).map(|k| id.scale(2.0 * dphi[k] * e)).collect() })
    }

    fn metric_second(&self, x: &[f64]) -> Option<Vec<Matrix>> {
        let (phi, dphi, ddphi) = self.phi(x);
        let m = self.dim();
        let e = crate::math::exp(2.0 * phi);
        let id = Matrix::identity(m);
        let mut out = Vec::with_capacity(m * m);
        for k in 0..m {
            for l in 0..m {
                let dd = if k == l { ddphi[k] } else { 0.0 };
                out.push(id.scale(e * (4.0 * dphi[k] * dphi[l] + 2.0 * dd)));
            }
        }
        Some(out)
    }
}
