//! Central finite-difference stencils shared by charts, fields, forms and
//! immersions.

use alloc::vec::Vec;

use crate::math::{abs, norm};

/// Relative base step: `h = 1e-4 · max(1, |x|)`.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

/// Step actually used at `x`. A `fixed` step overrides the relative rule.
pub fn base_step(x: &[f64], fixed: Option<f64>) -> f64 {
    match fixed {
        Some(h) => h,
        None => DEFAULT_RELATIVE_STEP * norm(x).max(1.0),
    }
}

/// Per-axis steps adjusted so that `x_k + h_k` is exactly representable.
pub fn realized_steps(x: &[f64], h: f64) -> Vec<f64> {
    x.iter()
        .map(|&xk| {
            let shifted = xk + h;
            let r = shifted - xk;
            if r == 0.0 || !r.is_finite() {
                h
            } else {
                abs(r)
            }
        })
        .collect()
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(k, d) in moves {
        y[k] += d;
    }
    y
}

/// First derivatives `∂_k f` for a vector-valued `f`, one entry per axis.
pub fn first_derivatives(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let steps = realized_steps(x, h);
    (0..x.len())
        .map(|k| {
            let hk = steps[k];
            let xp = shifted(x, &[(k, hk)]);
            let xm = shifted(x, &[(k, -hk)]);
            // divide by the spacing of the points actually evaluated
            let width = xp[k] - xm[k];
            let (fp, fm) = (f(&xp), f(&xm));
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / width).collect()
        })
        .collect()
}

/// Second derivatives `∂_k ∂_l f` stored at `k * m + l`, from the 9-point
/// cross stencil (axis points plus diagonal corners).
pub fn second_derivatives(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let m = x.len();
    let steps = realized_steps(x, h);
    let f0 = f(x);
    let mut out: Vec<Vec<f64>> = alloc::vec![Vec::new(); m * m];
    for k in 0..m {
        let hk = steps[k];
        let fp = f(&shifted(x, &[(k, hk)]));
        let fm = f(&shifted(x, &[(k, -hk)]));
        out[k * m + k] = f0
            .iter()
            .zip(fp.iter().zip(&fm))
            .map(|(c, (p, q))| (p - 2.0 * c + q) / (hk * hk))
            .collect();
        for l in (k + 1)..m {
            let hl = steps[l];
            let fpp = f(&shifted(x, &[(k, hk), (l, hl)]));
            let fpm = f(&shifted(x, &[(k, hk), (l, -hl)]));
            let fmp = f(&shifted(x, &[(k, -hk), (l, hl)]));
            let fmm = f(&shifted(x, &[(k, -hk), (l, -hl)]));
            let mixed: Vec<f64> = (0..f0.len())
                .map(|i| (fpp[i] - fpm[i] - fmp[i] + fmm[i]) / (4.0 * hk * hl))
                .collect();
            out[l * m + k] = mixed.clone();
            out[k * m + l] = mixed;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn linear_map_is_differentiated_exactly() {
        let f = |x: &[f64]| vec![3.0 * x[0] - 2.0 * x[1] + 0.5];
        let x = [0.3, -0.7];
        let d = first_derivatives(&f, &x, base_step(&x, None));
        assert!((d[0][0] - 3.0).abs() < 1e-11, "{}", d[0][0] - 3.0);
        assert!((d[1][0] + 2.0).abs() < 1e-11);
        let coord = |x: &[f64]| vec![x[1]];
        let y = [12.345, 0.1];
        let d = first_derivatives(&coord, &y, base_step(&y, None));
        assert!(d[0][0] == 0.0 && (d[1][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_second_derivatives() {
        let f = |x: &[f64]| vec![x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1]];
        let x = [0.4, 1.1];
        let d = second_derivatives(&f, &x, base_step(&x, None));
        assert!((d[0][0] - 2.0).abs() < 1e-6);
        assert!((d[1][0] - 3.0).abs() < 1e-6);
        assert!((d[2][0] - 3.0).abs() < 1e-6);
        assert!((d[3][0] + 2.0).abs() < 1e-6);
    }
}
