use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forms::{BundleValuedForm, FormValue, Layout};
use crate::linalg::{invert_generic, Matrix};
use crate::manifold::{christoffel_at, orthonormal_frame, Chart, Christoffel};
use crate::math::Dual;

/// A symmetric 2-tensor in coordinate components at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTwoTensor {
    pub matrix: Matrix,
    pub point: Vec<f64>,
    pub chart: String,
}

impl SymmetricTwoTensor {
    /// `g^{ij} T_ij`.
    pub fn g_trace(&self, chart: &Chart) -> Result<f64> {
        let ginv = chart.inverse_metric(&self.point)?;
        Ok(ginv.mul(&self.matrix).trace())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matrix.bilinear(x, y)
    }
}

fn check(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<()> {
    if form.degree() > chart.dim() {
        return Err(Error::DegreeExceedsDimension { degree: form.degree(), dim: chart.dim() });
    }
    if form.dim() != chart.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), found: form.dim() });
    }
    if x.len() != chart.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), found: x.len() });
    }
    Ok(())
}

/// `|ω|²` with indices raised by `g`, summed over increasing multi-indices.
pub fn norm_sq(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<f64> {
    check(form, chart, x)?;
    let ginv = chart.inverse_metric(x)?;
    let c = form.components(x);
    Ok(form.layout().inner(ginv.as_slice(), &c, &c).max(0.0))
}

/// `i_X ω`. For `p = 0` the result is the zero 0-form.
pub fn interior_product(form: &BundleValuedForm, v: &[f64], chart: &Chart, x: &[f64]) -> Result<FormValue> {
    check(form, chart, x)?;
    chart.metric(x)?;
    let layout = form.layout();
    let mut out = FormValue::zero(layout.dim, layout.degree.saturating_sub(1), layout.rank);
    if layout.degree == 0 {
        return Ok(out);
    }
    let c = form.components(x);
    for (i, vi) in v.iter().enumerate() {
        if *vi == 0.0 {
            continue;
        }
        for (o, t) in out.comps.iter_mut().zip(layout.interior_basis(i, &c)) {
            *o += vi * t;
        }
    }
    Ok(out)
}

pub fn odot_tensor(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<SymmetricTwoTensor> {
    check(form, chart, x)?;
    let ginv = chart.inverse_metric(x)?;
    let m = chart.dim();
    let od = form.layout().odot(ginv.as_slice(), &form.components(x));
    Ok(SymmetricTwoTensor { matrix: Matrix::from_row_slice(m, m, &od), point: x.to_vec(), chart: chart.label().into() })
}

/// `S_ω = ½|ω|² g − ω⊙ω`.
pub fn stress_energy_at(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<SymmetricTwoTensor> {
    check(form, chart, x)?;
    let g = chart.metric(x)?;
    let ginv = g.inverse_spd()?;
    let m = chart.dim();
    let s = form.layout().stress(g.as_slice(), ginv.as_slice(), &form.components(x));
    Ok(SymmetricTwoTensor { matrix: Matrix::from_row_slice(m, m, &s), point: x.to_vec(), chart: chart.label().into() })
}

/// `(d^∇ω)_K = Σ_s (−1)^s (∂_{k_s} ω_{K∖k_s} + A_{k_s} ω_{K∖k_s})`.
pub fn exterior_covariant_derivative(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<FormValue> {
    check(form, chart, x)?;
    chart.metric(x)?;
    let layout = form.layout();
    let (m, p, k) = (layout.dim, layout.degree, layout.rank);
    let c = form.components(x);
    let dc = form.derivatives(x)?;
    let conn = form.connection_at(x)?;
    let mut out = FormValue::zero(m, p + 1, k);
    let upper = out.layout.clone();
    for (pos, set) in upper.sets.iter().enumerate() {
        for s in 0..set.len() {
            let axis = set[s];
            let mut rest = set.clone();
            rest.remove(s);
            let q = layout.position(&rest).expect("face");
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            for a in 0..k {
                let mut v = dc[axis][q * k + a];
                for b in 0..k {
                    v += conn[axis][(a, b)] * c[q * k + b];
                }
                out.comps[pos * k + a] += sign * v;
            }
        }
    }
    Ok(out)
}

/// `(∇_i ω)_{idx}^a` for an arbitrary index tuple.
fn covariant_component(
    layout: &Layout,
    c: &[f64],
    dc: &[Vec<f64>],
    gamma: &Christoffel,
    conn: &[Matrix],
    i: usize,
    idx: &[usize],
    a: usize,
) -> f64 {
    let mut v = layout.get(&dc[i], idx, a);
    let mut moved = idx.to_vec();
    for s in 0..idx.len() {
        for l in 0..layout.dim {
            let gm = gamma.get(l, i, idx[s]);
            if gm != 0.0 {
                moved[s] = l;
                v -= gm * layout.get(c, &moved, a);
            }
        }
        moved[s] = idx[s];
    }
    for b in 0..layout.rank {
        v += conn[i][(a, b)] * layout.get(c, idx, b);
    }
    v
}

/// `(δ^∇ω)_J = −g^{ij} (∇_i ω)_{jJ}`. For `p = 0` the zero 0-form.
pub fn codifferential(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<FormValue> {
    check(form, chart, x)?;
    let layout = form.layout();
    let (m, p, k) = (layout.dim, layout.degree, layout.rank);
    let mut out = FormValue::zero(m, p.saturating_sub(1), k);
    if p == 0 {
        chart.metric(x)?;
        return Ok(out);
    }
    let ginv = chart.inverse_metric(x)?;
    let gamma = christoffel_at(chart, x)?;
    let c = form.components(x);
    let dc = form.derivatives(x)?;
    let conn = form.connection_at(x)?;
    let lower = out.layout.clone();
    let mut idx = vec![0usize; p];
    for (pos, set) in lower.sets.iter().enumerate() {
        idx[1..].copy_from_slice(set);
        for a in 0..k {
            let mut v = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let gij = ginv[(i, j)];
                    if gij == 0.0 {
                        continue;
                    }
                    idx[0] = j;
                    v += gij * covariant_component(layout, &c, &dc, &gamma, &conn, i, &idx, a);
                }
            }
            out.comps[pos * k + a] = -v;
        }
    }
    Ok(out)
}

/// Which evaluation of `div S_ω` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivRoute {
    /// `Σ g^{ij} (∇_i S)(∂_j, X)` with `∂_i S` obtained exactly by forward-mode
    /// differentiation of the pointwise stress tensor.
    Definition,
    /// `⟨δ^∇ω, i_X ω⟩ + ⟨i_X d^∇ω, ω⟩`.
    Identity,
}

fn div_definition(form: &BundleValuedForm, chart: &Chart, x: &[f64], v: &[f64]) -> Result<f64> {
    let m = chart.dim();
    let jet = chart.metric_jet(x)?;
    let gamma = christoffel_at(chart, x)?;
    let ginv = jet.g.inverse_spd()?;
    let c = form.components(x);
    let dc = form.derivatives(x)?;
    let layout = form.layout();
    let s = layout.stress(jet.g.as_slice(), ginv.as_slice(), &c);
    // dS[i] = ∂_i S (row-major m×m)
    let mut ds = Vec::with_capacity(m);
    for i in 0..m {
        let gd: Vec<Dual> = jet.g.as_slice().iter().zip(jet.dg[i].as_slice()).map(|(a, b)| Dual::new(*a, *b)).collect();
        let gid = invert_generic(m, &gd).ok_or(Error::SingularMetric)?;
        let cd: Vec<Dual> = c.iter().zip(&dc[i]).map(|(a, b)| Dual::new(*a, *b)).collect();
        let sd = layout.stress(&gd, &gid, &cd);
        ds.push(sd.iter().map(|d| d.eps).collect::<Vec<f64>>());
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let gij = ginv[(i, j)];
            if gij == 0.0 {
                continue;
            }
            for (kk, vk) in v.iter().enumerate() {
                if *vk == 0.0 {
                    continue;
                }
                let mut d = ds[i][j * m + kk];
                for l in 0..m {
                    d -= gamma.get(l, i, j) * s[l * m + kk] + gamma.get(l, i, kk) * s[j * m + l];
                }
                total += gij * vk * d;
            }
        }
    }
    Ok(total)
}

fn div_identity(form: &BundleValuedForm, chart: &Chart, x: &[f64], v: &[f64]) -> Result<f64> {
    let ginv = chart.inverse_metric(x)?;
    let gi = ginv.as_slice();
    let layout = form.layout();
    let mut total = 0.0;
    if layout.degree > 0 {
        let delta = codifferential(form, chart, x)?;
        let ixw = interior_product(form, v, chart, x)?;
        total += delta.layout.inner(gi, &delta.comps, &ixw.comps);
    }
    let dw = exterior_covariant_derivative(form, chart, x)?;
    let mut ixdw = vec![0.0; layout.len()];
    if !dw.layout.sets.is_empty() {
        for (i, vi) in v.iter().enumerate() {
            for (o, t) in ixdw.iter_mut().zip(dw.layout.interior_basis(i, &dw.comps)) {
                *o += vi * t;
            }
        }
    }
    let c = form.components(x);
    total += layout.inner(gi, &ixdw, &c);
    Ok(total)
}

/// `(div S_ω)(X)`.
pub fn div_stress_energy(form: &BundleValuedForm, chart: &Chart, x: &[f64], v: &[f64], route: DivRoute) -> Result<f64> {
    check(form, chart, x)?;
    if v.len() != chart.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), found: v.len() });
    }
    match route {
        DivRoute::Definition => div_definition(form, chart, x, v),
        DivRoute::Identity => div_identity(form, chart, x, v),
    }
}

/// Max over the sample and the g-orthonormal coordinate frame of
/// `|div S_ω(e_a)|`.
pub fn conservation_residual(form: &BundleValuedForm, chart: &Chart, sample: &[Vec<f64>]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut worst: f64 = 0.0;
    for x in sample {
        let frame = orthonormal_frame(chart, x)?;
        for a in 0..chart.dim() {
            let e = frame.column(a);
            worst = worst.max(div_stress_energy(form, chart, x, &e, DivRoute::Definition)?.abs());
        }
    }
    Ok(worst)
}

/// Max over pairs of g-orthonormal frame vectors of
/// `|(ω⊙ω)(Je_a, Je_b) − (ω⊙ω)(e_a, e_b)|`.
pub fn j_invariance_defect(form: &BundleValuedForm, chart: &Chart, x: &[f64]) -> Result<f64> {
    let j = chart.complex_structure().ok_or(Error::NoComplexStructure)?.clone();
    let t = odot_tensor(form, chart, x)?;
    let frame = orthonormal_frame(chart, x)?;
    let m = chart.dim();
    let e: Vec<Vec<f64>> = (0..m).map(|a| frame.column(a)).collect();
    let je: Vec<Vec<f64>> = e.iter().map(|v| j.mul_vec(v)).collect();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            worst = worst.max((t.eval(&je[a], &je[b]) - t.eval(&e[a], &e[b])).abs());
        }
    }
    Ok(worst)
}
