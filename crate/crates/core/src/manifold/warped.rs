//! Rotationally symmetric model metrics `dr² + f(r)² g_{S^{m−1}}` with a
//! prescribed radial curvature `K(r) = −f''/f`.
//!
//! `f` is tabulated by classical RK4 on `f'' + K f = 0`, `f(0) = 0`,
//! `f'(0) = 1`, cross-checked against a half-step run, and evaluated between
//! nodes by quintic Hermite interpolation of `(f, f', f'')`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::manifold::{Chart, DomainBox, JetMode, MetricJet, MetricModel};
use crate::math::{cos, exp, floor, pow, round, sin, sqrt, x_coth_x};

pub const WARP_STEP: f64 = 1e-3;
pub const WARP_CHECK_STEP: f64 = 5e-4;
/// Relative agreement required between the two step sizes.
pub const WARP_RICHARDSON_TOL: f64 = 1e-9;
pub const DEFAULT_WARP_RANGE: f64 = 10.0;
/// Smallest admissible radius; the polar coordinates degenerate at the pole.
pub const WARP_R_MIN: f64 = 1e-2;
/// Polar angles stay this far from 0 and π.
pub const ANGLE_MARGIN: f64 = 1e-2;

type CurvatureFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Radial curvature profile. The parametric regimes oscillate across their
/// whole admissible band so that both comparison bounds are exercised.
#[derive(Clone)]
pub enum CurvatureRegime {
    /// `−α² ≤ K ≤ −β²`.
    Hyperbolic { alpha: f64, beta: f64 },
    /// `−A/(1+r²)^{1+ε} ≤ K ≤ B/(1+r²)^{1+ε}`.
    PowerDecay { a: f64, b: f64, epsilon: f64 },
    /// `−a²/(1+r²) ≤ K ≤ b²/(1+r²)`.
    QuadraticDecay { a: f64, b: f64 },
    Custom(Arc<CurvatureFn>),
}

impl core::fmt::Debug for CurvatureRegime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::Hyperbolic { alpha, beta } => write!(f, "Hyperbolic {{ alpha: {alpha}, beta: {beta} }}"),
            Self::PowerDecay { a, b, epsilon } => write!(f, "PowerDecay {{ a: {a}, b: {b}, epsilon: {epsilon} }}"),
            Self::QuadraticDecay { a, b } => write!(f, "QuadraticDecay {{ a: {a}, b: {b} }}"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl CurvatureRegime {
    /// Constant curvature `−β²`.
    pub fn constant_negative(beta: f64) -> Self {
        Self::Hyperbolic { alpha: beta, beta }
    }

    pub fn flat() -> Self {
        Self::Custom(Arc::new(|_| 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::BadRegimeParams(s));
        match *self {
            Self::Hyperbolic { alpha, beta } => {
                if !(beta > 0.0 && alpha >= beta && alpha.is_finite()) {
                    return bad(format!("need 0 < beta <= alpha, got alpha={alpha}, beta={beta}"));
                }
            }
            Self::PowerDecay { a, b, epsilon } => {
                if !(epsilon > 0.0 && a >= 0.0 && b >= 0.0 && b < 2.0 * epsilon) {
                    return bad(format!("need epsilon > 0, A >= 0, 0 <= B < 2 epsilon, got A={a}, B={b}, epsilon={epsilon}"));
                }
            }
            Self::QuadraticDecay { a, b } => {
                if !(a >= 0.0 && b >= 0.0 && b * b <= 0.25) {
                    return bad(format!("need a >= 0 and b^2 in [0, 1/4], got a={a}, b={b}"));
                }
            }
            Self::Custom(_) => {}
        }
        Ok(())
    }

    /// `K(r)`.
    pub fn curvature(&self, r: f64) -> f64 {
        match self {
            Self::Hyperbolic { alpha, beta } => {
                let (a2, b2) = (alpha * alpha, beta * beta);
                -(0.5 * (a2 + b2) + 0.5 * (a2 - b2) * cos(r))
            }
            Self::PowerDecay { a, b, epsilon } => {
                (0.5 * (b - a) + 0.5 * (b + a) * cos(r)) / pow(1.0 + r * r, 1.0 + epsilon)
            }
            Self::QuadraticDecay { a, b } => {
                let (a2, b2) = (a * a, b * b);
                (0.5 * (b2 - a2) + 0.5 * (b2 + a2) * cos(r)) / (1.0 + r * r)
            }
            Self::Custom(k) => k(r),
        }
    }

    /// Comparison bounds `(h1, h2)` on the nonzero eigenvalues of `Hess(r)`.
    /// `None` for custom profiles.
    pub fn hess_r_bounds(&self, r: f64) -> Option<(f64, f64)> {
        match *self {
            Self::Hyperbolic { alpha, beta } => Some((x_coth_x(beta * r) / r, x_coth_x(alpha * r) / r)),
            Self::PowerDecay { a, b, epsilon } => Some(((1.0 - b / (2.0 * epsilon)) / r, exp(a / (2.0 * epsilon)) / r)),
            Self::QuadraticDecay { a, b } => {
                Some(((1.0 + sqrt(1.0 - 4.0 * b * b)) / (2.0 * r), (1.0 + sqrt(1.0 + 4.0 * a * a)) / (2.0 * r)))
            }
            Self::Custom(_) => None,
        }
    }
}

/// Tabulated warp function.
#[derive(Clone, Debug)]
pub struct WarpProfile {
    step: f64,
    f: Vec<f64>,
    df: Vec<f64>,
    ddf: Vec<f64>,
    k: Vec<f64>,
}

fn rk4(k: &dyn Fn(f64) -> f64, r_max: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = round(r_max / h) as usize;
    let mut f = Vec::with_capacity(n + 1);
    let mut df = Vec::with_capacity(n + 1);
    let (mut y, mut v) = (0.0f64, 1.0f64);
    f.push(y);
    df.push(v);
    for i in 0..n {
        let r = i as f64 * h;
        let k1y = v;
        let k1v = -k(r) * y;
        let k2y = v + 0.5 * h * k1v;
        let k2v = -k(r + 0.5 * h) * (y + 0.5 * h * k1y);
        let k3y = v + 0.5 * h * k2v;
        let k3v = -k(r + 0.5 * h) * (y + 0.5 * h * k2y);
        let k4y = v + h * k3v;
        let k4v = -k(r + h) * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        f.push(y);
        df.push(v);
    }
    (f, df)
}

impl WarpProfile {
    pub fn build(regime: &CurvatureRegime, r_max: f64) -> Result<Self> {
        regime.validate()?;
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::BadRegimeParams(format!("range must be positive, got {r_max}")));
        }
        let kf = |r: f64| regime.curvature(r);
        let (f, df) = rk4(&kf, r_max, WARP_STEP);
        let (fc, dfc) = rk4(&kf, r_max, WARP_CHECK_STEP);
        let ratio = round(WARP_STEP / WARP_CHECK_STEP) as usize;
        let mut worst = 0.0f64;
        for i in 1..f.len() {
            let j = i * ratio;
            let scale = f[i].abs().max(df[i].abs()).max(1e-300);
            let d = (f[i] - fc[j]).abs().max((df[i] - dfc[j]).abs()) / scale;
            worst = worst.max(d);
            if !(f[i] > 0.0) {
                return Err(Error::OdeInaccurate { detail: format!("warp function vanishes near r = {}", i as f64 * WARP_STEP) });
            }
        }
        if !(worst <= WARP_RICHARDSON_TOL) {
            return Err(Error::OdeInaccurate { detail: format!("step-halving discrepancy {worst:e}") });
        }
        let k: Vec<f64> = (0..f.len()).map(|i| regime.curvature(i as f64 * WARP_STEP)).collect();
        let ddf = f.iter().zip(&k).map(|(fi, ki)| -ki * fi).collect();
        Ok(Self { step: WARP_STEP, f, df, ddf, k })
    }

    pub fn r_max(&self) -> f64 {
        (self.f.len() - 1) as f64 * self.step
    }

    /// Node rows `(r, f, f', K)`.
    pub fn table(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.f.len()).map(move |i| (i as f64 * self.step, self.f[i], self.df[i], self.k[i]))
    }

    /// `(f, f', f'')` at `r`, from the quintic Hermite interpolant.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let h = self.step;
        let last = self.f.len() - 2;
        let i = (floor(r / h).max(0.0) as usize).min(last);
        let t = r / h - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let basis = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        ];
        let d1 = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        ];
        let d2 = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
            3.0 * t - 12.0 * t2 + 10.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
        ];
        let c = [
            self.f[i],
            h * self.df[i],
            h * h * self.ddf[i],
            h * h * self.ddf[i + 1],
            h * self.df[i + 1],
            self.f[i + 1],
        ];
        let dot = |b: &[f64; 6]| b.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>();
        (dot(&basis), dot(&d1) / h, dot(&d2) / (h * h))
    }

    /// Realized radial curvature `−f''/f`.
    pub fn realized_curvature(&self, r: f64) -> f64 {
        let (f, _, ddf) = self.eval(r);
        -ddf / f
    }
}

/// Metric of the warped product in coordinates `(r, θ_1, …, θ_{m−1})`:
/// `g_rr = 1`, `g_{θ_k θ_k} = f(r)² Π_{j<k} sin² θ_j`.
struct WarpedMetric {
    dim: usize,
    profile: Arc<WarpProfile>,
}

impl WarpedMetric {
    /// Per-axis factor jets `(value, d, dd)` of diagonal entry `a ≥ 1`; the
    /// entry is the product of the factors, each depending on one coordinate.
    fn factors(&self, x: &[f64], a: usize) -> Vec<(usize, f64, f64, f64)> {
        let (f, df, ddf) = self.profile.eval(x[0]);
        let mut out = vec![(0, f * f, 2.0 * f * df, 2.0 * (df * df + f * ddf))];
        for (j, &xj) in x.iter().enumerate().take(a).skip(1) {
            let (s, c) = (sin(xj), cos(xj));
            out.push((j, s * s, 2.0 * s * c, 2.0 * (c * c - s * s)));
        }
        out
    }
}

impl MetricModel for WarpedMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn metric(&self, x: &[f64]) -> Matrix {
        let mut g = Matrix::identity(self.dim);
        for a in 1..self.dim {
            g[(a, a)] = self.factors(x, a).iter().map(|t| t.1).product();
        }
        g
    }

    fn metric_jet(&self, x: &[f64]) -> Option<MetricJet> {
        let m = self.dim;
        let mut dg = vec![Matrix::zeros(m, m); m];
        let g = self.metric(x);
        for a in 1..m {
            let fs = self.factors(x, a);
            for (idx, &(axis, _, d, _)) in fs.iter().enumerate() {
                let others: f64 = fs.iter().enumerate().filter(|(o, _)| *o != idx).map(|(_, t)| t.1).product();
                dg[axis][(a, a)] = d * others;
            }
        }
        Some(MetricJet { g, dg })
    }

    fn metric_second(&self, x: &[f64]) -> Option<Vec<Matrix>> {
        let m = self.dim;
        let mut out = vec![Matrix::zeros(m, m); m * m];
        for a in 1..m {
            let fs = self.factors(x, a);
            for (p, &(ap, _, dp, ddp)) in fs.iter().enumerate() {
                for (q, &(aq, _, dq, _)) in fs.iter().enumerate() {
                    let rest: f64 = fs.iter().enumerate().filter(|(o, _)| *o != p && *o != q).map(|(_, t)| t.1).product();
                    let v = if p == q { ddp * rest } else { dp * dq * rest };
                    out[ap * m + aq][(a, a)] = v;
                }
            }
        }
        Some(out)
    }
}

/// A warped chart together with its profile.
#[derive(Clone, Debug)]
pub struct WarpedChart {
    pub chart: Chart,
    pub profile: Arc<WarpProfile>,
    pub regime: CurvatureRegime,
}

impl WarpedChart {
    pub fn warp(&self, r: f64) -> (f64, f64, f64) {
        self.profile.eval(r)
    }

    /// A coordinate point at radius `r` with all angles at their midpoints.
    pub fn point_at_radius(&self, r: f64) -> Vec<f64> {
        let m = self.chart.dim();
        let mut x = vec![core::f64::consts::FRAC_PI_2; m];
        x[0] = r;
        if m >= 2 {
            x[m - 1] = 0.0;
        }
        x
    }
}

pub fn make_warped_chart(regime: &CurvatureRegime, m: usize) -> Result<WarpedChart> {
    make_warped_chart_with_range(regime, m, DEFAULT_WARP_RANGE)
}

pub fn make_warped_chart_with_range(regime: &CurvatureRegime, m: usize, r_max: f64) -> Result<WarpedChart> {
    if m < 2 {
        return Err(Error::BadRegimeParams(format!("dimension must be at least 2, got {m}")));
    }
    let profile = Arc::new(WarpProfile::build(regime, r_max)?);
    let pi = core::f64::consts::PI;
    let mut lower = vec![ANGLE_MARGIN; m];
    let mut upper = vec![pi - ANGLE_MARGIN; m];
    lower[0] = WARP_R_MIN;
    upper[0] = profile.r_max();
    lower[m - 1] = -pi;
    upper[m - 1] = pi;
    let domain = DomainBox::new(lower, upper).with_periodic(m - 1);
    let model = Arc::new(WarpedMetric { dim: m, profile: profile.clone() });
    let chart = Chart::new(model, JetMode::Analytic, domain, "warped");
    Ok(WarpedChart { chart, profile, regime: regime.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{christoffel_at, hessian_spectrum, laplace_beltrami_at, ScalarField};
    use crate::math::{cosh, sinh, tanh};

    #[test]
    fn constant_negative_curvature_gives_sinh() {
        let w = make_warped_chart(&CurvatureRegime::constant_negative(1.0), 3).unwrap();
        for i in 1..=100 {
            let r = i as f64 * 0.1 - 0.0003;
            let (f, df, _) = w.warp(r);
            assert!((f - sinh(r)).abs() <= 1e-8 * sinh(r).max(1.0), "r={r}");
            assert!((df - cosh(r)).abs() <= 1e-8 * cosh(r));
        }
    }

    #[test]
    fn quadratic_zero_endpoint_is_flat() {
        let w = make_warped_chart(&CurvatureRegime::QuadraticDecay { a: 0.0, b: 0.0 }, 2).unwrap();
        let (f, df, ddf) = w.warp(3.3);
        assert!((f - 3.3).abs() < 1e-12 && (df - 1.0).abs() < 1e-12 && ddf.abs() < 1e-12);
    }

    #[test]
    fn out_of_range_regime_rejected() {
        let r = make_warped_chart(&CurvatureRegime::QuadraticDecay { a: 0.0, b: 0.6 }, 2);
        assert!(matches!(r, Err(Error::BadRegimeParams(_))));
        let r = make_warped_chart(&CurvatureRegime::PowerDecay { a: 1.0, b: 1.0, epsilon: 0.5 }, 2);
        assert!(matches!(r, Err(Error::BadRegimeParams(_))));
    }

    #[test]
    fn realized_curvature_matches_profile() {
        let regimes = [
            CurvatureRegime::Hyperbolic { alpha: 1.5, beta: 1.0 },
            CurvatureRegime::PowerDecay { a: 1.0, b: 0.5, epsilon: 0.5 },
            CurvatureRegime::QuadraticDecay { a: 1.0, b: 0.4 },
        ];
        for reg in regimes {
            let w = make_warped_chart(&reg, 3).unwrap();
            for i in 1..50 {
                let r = 0.1 * i as f64 + 0.00037;
                assert!((w.profile.realized_curvature(r) - reg.curvature(r)).abs() < 1e-6, "{reg:?} r={r}");
            }
        }
    }

    #[test]
    fn sinh_christoffel() {
        let w = make_warped_chart(&CurvatureRegime::constant_negative(1.0), 2).unwrap();
        let g = christoffel_at(&w.chart, &[1.0, 0.3]).unwrap();
        assert!((g.get(0, 1, 1) + sinh(1.0) * cosh(1.0)).abs() < 1e-9);
    }

    #[test]
    fn hessian_of_r_and_r_squared() {
        let w = make_warped_chart(&CurvatureRegime::constant_negative(1.0), 3).unwrap();
        let x = w.point_at_radius(1.0);
        let r = ScalarField::coordinate(3, 0);
        let ev = hessian_spectrum(&w.chart, &r, &x).unwrap();
        let coth1 = 1.0 / tanh(1.0);
        assert!(ev[0].abs() < 1e-10);
        assert!((ev[1] - coth1).abs() < 1e-9 && (ev[2] - coth1).abs() < 1e-9);
        let r2 = ScalarField::square_of(&r);
        let ev = hessian_spectrum(&w.chart, &r2, &x).unwrap();
        assert!((ev[0] - 2.0).abs() < 1e-9);
        assert!((ev[1] - 2.0 * coth1).abs() < 1e-9 && (ev[2] - 2.0 * coth1).abs() < 1e-9);
        let w2 = make_warped_chart(&CurvatureRegime::constant_negative(1.0), 2).unwrap();
        let lap = laplace_beltrami_at(&w2.chart, &ScalarField::coordinate(2, 0), &[1.0, 0.0]).unwrap();
        assert!((lap - coth1).abs() < 1e-9);
    }

    #[test]
    fn analytic_second_jet_matches_differences() {
        let w = make_warped_chart(&CurvatureRegime::Hyperbolic { alpha: 1.5, beta: 1.0 }, 4).unwrap();
        let x = [1.3, 0.7, 2.1, 0.4];
        let analytic = w.chart.metric_second_derivatives(&x).unwrap();
        let fd = w.chart.clone().with_jet_mode(JetMode::FD).metric_second_derivatives(&x).unwrap();
        for (a, b) in analytic.iter().zip(&fd) {
            assert!(a.sub(b).max_abs() < 1e-4);
        }
    }
}
