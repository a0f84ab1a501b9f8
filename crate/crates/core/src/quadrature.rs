//! Quadrature rules, deterministic summation and the pluggable executor used
//! to fan out per-ray and per-line work.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{cos, pow, round, sin};

/// Maps `0..n` through `f`, returning results in index order. Implementations
/// may run in parallel; reductions downstream always happen in index order.
pub trait Executor: Sync {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Plain in-order evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Pairwise (tree) summation with a fixed topology.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n if n <= 8 => v.iter().sum(),
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pi = core::f64::consts::PI;
    for i in 0..n.div_ceil(2) {
        let mut z = cos(pi * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x[0] = 0.0;
            w[0] = 2.0;
            break;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Directions and weights of a product rule on the unit sphere `S^{m−1}`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// About `count` directions: uniform in the azimuth, Gauss-Legendre in
    /// each polar angle.
    pub fn new(m: usize, count: usize) -> Self {
        assert!(m >= 2, "sphere rule needs m >= 2");
        let pi = core::f64::consts::PI;
        if m == 2 {
            let n = count.max(4);
            let dirs = (0..n)
                .map(|j| {
                    let th = 2.0 * pi * (j as f64 + 0.5) / n as f64;
                    vec![cos(th), sin(th)]
                })
                .collect();
            return Self { dirs, weights: vec![2.0 * pi / n as f64; n] };
        }
        let base = round(pow(count.max(8) as f64 / 2.0, 1.0 / (m - 1) as f64)).max(2.0) as usize;
        let n_az = 2 * base;
        let (gx, gw) = gauss_legendre(base);
        let polar: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(x, w)| (pi * (x + 1.0) / 2.0, w * pi / 2.0)).collect();
        let n_polar = m - 2;
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        let total_polar = base.pow(n_polar as u32);
        for mut idx in 0..total_polar {
            let mut angles = vec![0.0; n_polar];
            let mut w = 1.0;
            for (j, a) in angles.iter_mut().enumerate() {
                let (ang, wt) = polar[idx % base];
                idx /= base;
                *a = ang;
                // Jacobian sin^{m-2-j}
                w *= wt * pow(sin(ang), (m - 2 - j) as f64);
            }
            for k in 0..n_az {
                let phi = 2.0 * pi * (k as f64 + 0.5) / n_az as f64;
                let mut d = vec![0.0; m];
                let mut s = 1.0;
                for (j, a) in angles.iter().enumerate() {
                    d[j] = s * cos(*a);
                    s *= sin(*a);
                }
                d[m - 2] = s * cos(phi);
                d[m - 1] = s * sin(phi);
                dirs.push(d);
                weights.push(w * 2.0 * pi / n_az as f64);
            }
        }
        Self { dirs, weights }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}
