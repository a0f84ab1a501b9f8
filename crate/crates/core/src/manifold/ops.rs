use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{generalized_sym_eigenvalues, lower_inverse, Matrix};
use crate::manifold::{Chart, Christoffel, ScalarField};

/// Relative tolerance for pairing J-symmetrized eigenvalues, per jet mode.
const PAIR_TOL_ANALYTIC: f64 = 1e-8;
const PAIR_TOL_FD: f64 = 1e-5;

/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn christoffel_at(chart: &Chart, x: &[f64]) -> Result<Christoffel> {
    let jet = chart.metric_jet(x)?;
    let ginv = jet.g.inverse_spd()?;
    let m = chart.dim();
    let mut out = Christoffel::zeros(m);
    let mut lower = alloc::vec![0.0; m];
    for i in 0..m {
        for j in i..m {
            for (l, slot) in lower.iter_mut().enumerate() {
                *slot = 0.5 * (jet.dg[i][(j, l)] + jet.dg[j][(i, l)] - jet.dg[l][(i, j)]);
            }
            for k in 0..m {
                let v: f64 = (0..m).map(|l| ginv[(k, l)] * lower[l]).sum();
                out.set(k, i, j, v);
                out.set(k, j, i, v);
            }
        }
    }
    Ok(out)
}

/// `max |∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il|`; zero for the
/// Levi-Civita connection up to jet error.
pub fn metric_compatibility_residual(chart: &Chart, x: &[f64]) -> Result<f64> {
    let jet = chart.metric_jet(x)?;
    let gamma = christoffel_at(chart, x)?;
    let m = chart.dim();
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let conn: f64 = (0..m)
                    .map(|l| gamma.get(l, k, i) * jet.g[(l, j)] + gamma.get(l, k, j) * jet.g[(i, l)])
                    .sum();
                worst = worst.max((jet.dg[k][(i, j)] - conn).abs());
            }
        }
    }
    Ok(worst)
}

fn check_dims(chart: &Chart, f: &ScalarField) -> Result<()> {
    if chart.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), found: f.dim() });
    }
    Ok(())
}

/// Covariant Hessian `∂_i∂_j f − Γ^k_{ij} ∂_k f`.
pub fn hessian_at(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<Matrix> {
    check_dims(chart, f)?;
    let gamma = christoffel_at(chart, x)?;
    let jet = f.jet(x)?;
    let m = chart.dim();
    let h = Matrix::from_fn(m, m, |i, j| {
        jet.hessian[(i, j)] - (0..m).map(|k| gamma.get(k, i, j) * jet.gradient[k]).sum::<f64>()
    });
    Ok(h.symmetrize())
}

/// Eigenvalues of the Hessian relative to the metric, ascending.
pub fn hessian_spectrum(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    let h = hessian_at(chart, f, x)?;
    let g = chart.metric(x)?;
    generalized_sym_eigenvalues(&h, &g)
}

/// Eigenvalues of `½(Hess f + Jᵀ Hess f J)` relative to the metric. They come
/// in equal pairs; one value per pair is returned (the pair mean), ascending.
pub fn complex_hessian_spectrum(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    let j = chart.complex_structure().ok_or(Error::NoComplexStructure)?.clone();
    let h = hessian_at(chart, f, x)?;
    let hj = h.add(&j.transpose().mul(&h).mul(&j)).scale(0.5).symmetrize();
    let g = chart.metric(x)?;
    let ev = generalized_sym_eigenvalues(&hj, &g)?;
    let scale = ev.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = if chart.jet_mode().is_analytic() && f.jet_mode().is_analytic() {
        PAIR_TOL_ANALYTIC
    } else {
        PAIR_TOL_FD
    };
    let mut out = Vec::with_capacity(ev.len() / 2);
    for pair in ev.chunks(2) {
        let gap = (pair[1] - pair[0]).abs();
        if gap > tol * scale {
            return Err(Error::MultiplicityMismatch { gap });
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// `Δf = g^{ij} (Hess f)_{ij}`.
pub fn laplace_beltrami_at(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<f64> {
    let h = hessian_at(chart, f, x)?;
    let ginv = chart.inverse_metric(x)?;
    let m = chart.dim();
    Ok((0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| ginv[(i, j)] * h[(i, j)]).sum())
}

/// Metric gradient `g^{ij} ∂_j f`.
pub fn gradient(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    check_dims(chart, f)?;
    let d = f.gradient(x)?;
    Ok(chart.inverse_metric(x)?.mul_vec(&d))
}

/// `|∇f|² = g^{ij} ∂_i f ∂_j f`.
pub fn gradient_norm_sq(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<f64> {
    check_dims(chart, f)?;
    let d = f.gradient(x)?;
    let ginv = chart.inverse_metric(x)?;
    Ok(ginv.bilinear(&d, &d))
}

/// Columns form a g-orthonormal basis: with `g = LLᵀ` the frame is `L^{-T}`.
pub fn orthonormal_frame(chart: &Chart, x: &[f64]) -> Result<Matrix> {
    let l = chart.metric(x)?.cholesky()?;
    Ok(lower_inverse(&l).transpose())
}
