use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fd;
use crate::linalg::Matrix;
use crate::manifold::JetMode;

/// Value, coordinate gradient and coordinate Hessian of a scalar function.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Matrix,
}

pub trait FieldModel: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn jet(&self, _x: &[f64]) -> Option<FieldJet> {
        None
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type JetFn = dyn Fn(&[f64]) -> FieldJet + Send + Sync;

/// Closure-backed field.
pub struct FnField {
    dim: usize,
    value: Arc<ValueFn>,
    jet: Option<Arc<JetFn>>,
}

impl FieldModel for FnField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn jet(&self, x: &[f64]) -> Option<FieldJet> {
        self.jet.as_ref().map(|j| j(x))
    }
}

/// A smooth function on a chart's coordinate space.
#[derive(Clone)]
pub struct ScalarField {
    model: Arc<dyn FieldModel>,
    mode: JetMode,
}

impl core::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim()).field("mode", &self.mode).finish()
    }
}

impl ScalarField {
    pub fn new(model: Arc<dyn FieldModel>, mode: JetMode) -> Self {
        Self { model, mode }
    }

    /// Values only; jets by finite differences.
    pub fn from_fn(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(Arc::new(FnField { dim, value: Arc::new(f), jet: None }), JetMode::FD)
    }

    /// Values plus an analytic jet.
    pub fn analytic(
        dim: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        jet: impl Fn(&[f64]) -> FieldJet + Send + Sync + 'static,
    ) -> Self {
        Self::new(Arc::new(FnField { dim, value: Arc::new(f), jet: Some(Arc::new(jet)) }), JetMode::Analytic)
    }

    /// Coordinate function `x_k`.
    pub fn coordinate(dim: usize, k: usize) -> Self {
        Self::analytic(
            dim,
            move |x| x[k],
            move |x| {
                let mut gradient = alloc::vec![0.0; dim];
                gradient[k] = 1.0;
                FieldJet { value: x[k], gradient, hessian: Matrix::zeros(dim, dim) }
            },
        )
    }

    /// Diagonal quadratic `Σ w_k (x_k − c_k)²`.
    pub fn weighted_square(weights: Vec<f64>, center: Vec<f64>) -> Self {
        let dim = weights.len();
        let w = weights.clone();
        let c = center.clone();
        Self::analytic(
            dim,
            move |x| (0..w.len()).map(|k| w[k] * (x[k] - c[k]) * (x[k] - c[k])).sum(),
            move |x| {
                let value = (0..dim).map(|k| weights[k] * (x[k] - center[k]) * (x[k] - center[k])).sum();
                let gradient = (0..dim).map(|k| 2.0 * weights[k] * (x[k] - center[k])).collect();
                let hessian = Matrix::diagonal(&weights.iter().map(|w| 2.0 * w).collect::<Vec<_>>());
                FieldJet { value, gradient, hessian }
            },
        )
    }

    /// `√ψ`, with the jet derived from `ψ`'s jet (valid where `ψ > 0`).
    pub fn sqrt_of(psi: &ScalarField) -> Self {
        let inner = psi.clone();
        let inner_v = psi.clone();
        let dim = psi.dim();
        let model = FnField {
            dim,
            value: Arc::new(move |x| crate::math::sqrt(inner_v.model.value(x).max(0.0))),
            jet: if psi.mode.is_analytic() {
                Some(Arc::new(move |x: &[f64]| {
                    let j = inner.model.jet(x).expect("analytic jet");
                    let phi = crate::math::sqrt(j.value.max(0.0));
                    let gradient: Vec<f64> = j.gradient.iter().map(|g| g / (2.0 * phi)).collect();
                    let hessian = Matrix::from_fn(dim, dim, |a, b| {
                        j.hessian[(a, b)] / (2.0 * phi) - gradient[a] * gradient[b] / phi
                    });
                    FieldJet { value: phi, gradient, hessian }
                }))
            } else {
                None
            },
        };
        Self::new(Arc::new(model), psi.mode)
    }

    /// `φ²`, with the jet derived from `φ`'s jet.
    pub fn square_of(phi: &ScalarField) -> Self {
        let inner = phi.clone();
        let inner_v = phi.clone();
        let dim = phi.dim();
        let model = FnField {
            dim,
            value: Arc::new(move |x| {
                let v = inner_v.model.value(x);
                v * v
            }),
            jet: if phi.mode.is_analytic() {
                Some(Arc::new(move |x: &[f64]| {
                    let j = inner.model.jet(x).expect("analytic jet");
                    let gradient: Vec<f64> = j.gradient.iter().map(|g| 2.0 * j.value * g).collect();
                    let hessian = Matrix::from_fn(dim, dim, |a, b| {
                        2.0 * j.gradient[a] * j.gradient[b] + 2.0 * j.value * j.hessian[(a, b)]
                    });
                    FieldJet { value: j.value * j.value, gradient, hessian }
                }))
            } else {
                None
            },
        };
        Self::new(Arc::new(model), phi.mode)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn jet_mode(&self) -> JetMode {
        self.mode
    }

    pub fn with_jet_mode(mut self, mode: JetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.model.value(x)
    }

    pub fn jet(&self, x: &[f64]) -> Result<FieldJet> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        match self.mode {
            JetMode::Analytic => self.model.jet(x).ok_or(Error::JetUnavailable),
            JetMode::FiniteDifference { step } => {
                let m = self.dim();
                let h = fd::base_step(x, step);
                let f = |y: &[f64]| alloc::vec![self.model.value(y)];
                let d1 = fd::first_derivatives(&f, x, h);
                let d2 = fd::second_derivatives(&f, x, h);
                Ok(FieldJet {
                    value: self.model.value(x),
                    gradient: d1.iter().map(|v| v[0]).collect(),
                    hessian: Matrix::from_fn(m, m, |a, b| d2[a * m + b][0]),
                })
            }
        }
    }

    /// Coordinate gradient only; cheaper than the full jet under finite
    /// differences.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self.mode {
            JetMode::Analytic => Ok(self.jet(x)?.gradient),
            JetMode::FiniteDifference { step } => {
                let h = fd::base_step(x, step);
                let f = |y: &[f64]| alloc::vec![self.model.value(y)];
                Ok(fd::first_derivatives(&f, x, h).iter().map(|v| v[0]).collect())
            }
        }
    }
}
