//! Differential forms with values in a trivial Euclidean bundle `M × R^k`,
//! equipped with a metric connection `∇_i s = ∂_i s + A_i s`.

mod algebra;
mod ops;
mod poly;

pub use algebra::{index_sets, sort_with_sign, Layout};
pub use ops::{
    codifferential, conservation_residual, div_stress_energy, exterior_covariant_derivative,
    interior_product, j_invariance_defect, norm_sq, odot_tensor, stress_energy_at, DivRoute,
    SymmetricTwoTensor,
};
pub use poly::{coordinate_form_text, parse_poly_form, Monomial, PolyForm};

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fd;
use crate::linalg::Matrix;
use crate::manifold::JetMode;

/// Antisymmetry tolerance for connection coefficients.
pub const CONNECTION_METRICITY_TOL: f64 = 1e-12;

/// Components of a bundle-valued form at one point, stored on increasing
/// multi-indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue {
    pub layout: Layout,
    pub comps: Vec<f64>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize, rank: usize) -> Self {
        let layout = Layout::new(dim, degree, rank);
        let comps = alloc::vec![0.0; layout.len()];
        Self { layout, comps }
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    pub fn rank(&self) -> usize {
        self.layout.rank
    }

    /// `ω_{idx}^a` for any index order.
    pub fn get(&self, idx: &[usize], a: usize) -> f64 {
        self.layout.get(&self.comps, idx, a)
    }

    /// Set `ω_{idx}^a = v`, storing the sign-adjusted canonical component.
    pub fn set(&mut self, idx: &[usize], a: usize, v: f64) {
        if let Some((s, sign)) = sort_with_sign(idx) {
            let k = self.layout.position(&s).expect("index in range");
            self.comps[k * self.layout.rank + a] = sign * v;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| *c == 0.0)
    }
}

/// Source of form components (canonical layout) as functions of position.
pub trait FormModel: Send + Sync {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn rank(&self) -> usize;
    fn components(&self, x: &[f64]) -> Vec<f64>;
    /// Analytic `∂_k` of the components, one vector per axis.
    fn derivatives(&self, _x: &[f64]) -> Option<Vec<Vec<f64>>> {
        None
    }
}

type ConnectionFn = dyn Fn(&[f64]) -> Vec<Matrix> + Send + Sync;

/// Connection coefficients `A_i` (each `k × k`, acting on fiber vectors).
#[derive(Clone)]
pub enum Connection {
    Flat,
    Constant(Vec<Matrix>),
    Field(Arc<ConnectionFn>),
}

impl core::fmt::Debug for Connection {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Connection::Flat => write!(f, "Flat"),
            Connection::Constant(a) => f.debug_tuple("Constant").field(a).finish(),
            Connection::Field(_) => write!(f, "Field(..)"),
        }
    }
}

impl Connection {
    pub fn is_flat(&self) -> bool {
        matches!(self, Connection::Flat)
    }

    /// Coefficients at `x`, checked for antisymmetry.
    pub fn at(&self, x: &[f64], dim: usize, rank: usize) -> Result<Vec<Matrix>> {
        let a = match self {
            Connection::Flat => return Ok(alloc::vec![Matrix::zeros(rank, rank); dim]),
            Connection::Constant(a) => a.clone(),
            Connection::Field(f) => f(x),
        };
        if a.len() != dim || a.iter().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(Error::InvalidInput(alloc::format!(
                "connection needs {dim} coefficient matrices of size {rank}x{rank}"
            )));
        }
        let defect = a.iter().map(|m| m.add(&m.transpose()).max_abs()).fold(0.0, f64::max);
        if defect > CONNECTION_METRICITY_TOL {
            return Err(Error::NonMetricConnection { defect });
        }
        Ok(a)
    }
}

/// A `p`-form with values in the trivial rank-`k` bundle.
#[derive(Clone)]
pub struct BundleValuedForm {
    model: Arc<dyn FormModel>,
    mode: JetMode,
    connection: Connection,
    layout: Layout,
    label: String,
}

impl core::fmt::Debug for BundleValuedForm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BundleValuedForm")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("degree", &self.degree())
            .field("rank", &self.rank())
            .field("connection", &self.connection)
            .finish()
    }
}

impl BundleValuedForm {
    pub fn new(model: Arc<dyn FormModel>, mode: JetMode, label: impl Into<String>) -> Result<Self> {
        let (dim, degree, rank) = (model.dim(), model.degree(), model.rank());
        if degree > dim {
            return Err(Error::DegreeExceedsDimension { degree, dim });
        }
        if rank == 0 {
            return Err(Error::InvalidInput("bundle rank must be at least 1".into()));
        }
        Ok(Self { layout: Layout::new(dim, degree, rank), model, mode, connection: Connection::Flat, label: label.into() })
    }

    /// Polynomial-coefficient form from the text syntax of [`parse_poly_form`].
    pub fn parse(dim: usize, text: &str) -> Result<Self> {
        let poly = parse_poly_form(dim, &[text])?;
        Self::new(Arc::new(poly), JetMode::Analytic, text)
    }

    /// One text expression per fiber slot.
    pub fn parse_vector(dim: usize, slots: &[&str]) -> Result<Self> {
        let poly = parse_poly_form(dim, slots)?;
        Self::new(Arc::new(poly), JetMode::Analytic, slots.join(" | "))
    }

    pub fn with_connection(mut self, connection: Connection) -> Self {
        self.connection = connection;
        self
    }

    pub fn with_jet_mode(mut self, mode: JetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    pub fn rank(&self) -> usize {
        self.layout.rank
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn jet_mode(&self) -> JetMode {
        self.mode
    }

    pub fn connection(&self) -> &Connection {
        &self.connection
    }

    pub fn value(&self, x: &[f64]) -> FormValue {
        FormValue { layout: self.layout.clone(), comps: self.model.components(x) }
    }

    /// Raw components (canonical layout) without wrapping.
    pub fn components(&self, x: &[f64]) -> Vec<f64> {
        self.model.components(x)
    }

    /// `∂_k ω` for each axis `k`.
    pub fn derivatives(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self.mode {
            JetMode::Analytic => self.model.derivatives(x).ok_or(Error::JetUnavailable),
            JetMode::FiniteDifference { step } => {
                let h = fd::base_step(x, step);
                let f = |y: &[f64]| self.model.components(y);
                Ok(fd::first_derivatives(&f, x, h))
            }
        }
    }

    pub fn connection_at(&self, x: &[f64]) -> Result<Vec<Matrix>> {
        self.connection.at(x, self.dim(), self.rank())
    }
}

/// Closure-backed form model.
pub struct FnForm {
    pub dim: usize,
    pub degree: usize,
    pub rank: usize,
    pub components: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl FormModel for FnForm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn components(&self, x: &[f64]) -> Vec<f64> {
        (self.components)(x)
    }
}
