use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::RadialGraph;

/// Differentiates periodic samples on `[0, 2π)` through the FFT.
#[derive(Clone)]
pub struct SpectralDiff {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDiff").field("m", &self.m).finish()
    }
}

impl SpectralDiff {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { m, forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) }
    }

    fn wavenumber(&self, j: usize) -> f64 {
        if 2 * j < self.m {
            j as f64
        } else {
            j as f64 - self.m as f64
        }
    }

    pub fn coefficients(&self, f: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// First and second derivatives.
    pub fn d1_d2(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let c = self.coefficients(f);
        let nyquist = self.m / 2;
        let mut b1 = vec![Complex::new(0.0, 0.0); self.m];
        let mut b2 = vec![Complex::new(0.0, 0.0); self.m];
        for (j, cj) in c.iter().enumerate() {
            let kw = self.wavenumber(j);
            if j != nyquist {
                b1[j] = cj * Complex::new(0.0, kw);
            }
            b2[j] = cj * (-kw * kw);
        }
        self.inverse.process(&mut b1);
        self.inverse.process(&mut b2);
        let s = 1.0 / self.m as f64;
        (b1.iter().map(|z| z.re * s).collect(), b2.iter().map(|z| z.re * s).collect())
    }
}

/// Band-limited interpolant of periodic samples, evaluated with its derivative.
struct TrigInterpolant {
    coeffs: Vec<Complex<f64>>,
    m: usize,
}

impl TrigInterpolant {
    fn new(diff: &SpectralDiff, f: &[f64]) -> Self {
        Self { coeffs: diff.coefficients(f), m: diff.m }
    }

    fn eval(&self, p: f64) -> (f64, f64) {
        let scale = 1.0 / self.m as f64;
        let mut v = self.coeffs[0].re;
        let mut dv = 0.0;
        for j in 1..self.m.div_ceil(2) {
            let (s, c) = (j as f64 * p).sin_cos();
            let z = self.coeffs[j];
            v += 2.0 * (z.re * c - z.im * s);
            dv += 2.0 * j as f64 * (-z.re * s - z.im * c);
        }
        if self.m.is_multiple_of(2) {
            let j = self.m / 2;
            v += self.coeffs[j].re * (j as f64 * p).cos();
            dv -= self.coeffs[j].re * j as f64 * (j as f64 * p).sin();
        }
        (v * scale, dv * scale)
    }
}

/// Closed planar curve sampled at `M` equally spaced values of a material
/// parameter `p ∈ [0, 2π)`, positively oriented.
///
/// An axisymmetric surface is represented by its full meridian section with the
/// axis of revolution along `x`; the surface is swept by rotating `y ≥ 0`.
#[derive(Debug, Clone)]
pub struct LagrangianCurve {
    x: Vec<f64>,
    y: Vec<f64>,
    diff: SpectralDiff,
}

/// Pointwise differential data of a [`LagrangianCurve`].
#[derive(Debug, Clone)]
pub struct CurveFrame {
    pub x_p: Vec<f64>,
    pub y_p: Vec<f64>,
    pub x_pp: Vec<f64>,
    pub y_pp: Vec<f64>,
    /// Speed `μ = |X_p|`; `g_11 = μ²`.
    pub mu: Vec<f64>,
    /// `h_11 = ⟨X_p × X_pp⟩/μ`.
    pub h11: Vec<f64>,
    /// Curvature `h^1_1 = h_11/g_11`.
    pub kappa: Vec<f64>,
    /// Outward normal `(y_p, −x_p)/μ`.
    pub nu_x: Vec<f64>,
    pub nu_y: Vec<f64>,
}

impl LagrangianCurve {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let m = x.len();
        if m != y.len() || m < 8 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "curve needs an even number (>= 8) of points, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if let Some(j) = (0..m).find(|&j| !x[j].is_finite() || !y[j].is_finite()) {
            return Err(Error::NonFiniteGeometry { node: j });
        }
        let twice_area: f64 = (0..m).map(|j| x[j] * y[(j + 1) % m] - x[(j + 1) % m] * y[j]).sum();
        if twice_area <= 0.0 {
            return Err(Error::InvalidShape("curve is not positively oriented".into()));
        }
        Ok(Self { x, y, diff: SpectralDiff::new(m) })
    }

    /// The polar curve `r(p)(cos p, sin p)`: for `n = 1` the graph itself, for
    /// `n = 2` the profile reflected through the axis into a full meridian.
    pub fn from_radial(g: &RadialGraph) -> Result<Self> {
        let r = g.samples();
        let full: Vec<f64> = match g.n() {
            1 => r.to_vec(),
            _ => {
                let half = g.intervals();
                (0..2 * half).map(|j| if j <= half { r[j] } else { r[2 * half - j] }).collect()
            }
        };
        let m = full.len();
        let (x, y) = (0..m)
            .map(|j| {
                let p = 2.0 * PI * j as f64 / m as f64;
                (full[j] * p.cos(), full[j] * p.sin())
            })
            .unzip();
        Self::new(x, y)
    }

    /// `(a cos p, b sin p)`; `a = b` gives a circle.
    pub fn ellipse(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidShape(format!("ellipse semi-axes must be positive, got {a}, {b}")));
        }
        let (x, y) = (0..m)
            .map(|j| {
                let p = 2.0 * PI * j as f64 / m as f64;
                (a * p.cos(), b * p.sin())
            })
            .unzip();
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    pub fn diff(&self) -> &SpectralDiff {
        &self.diff
    }

    pub fn frame(&self) -> CurveFrame {
        let (x_p, x_pp) = self.diff.d1_d2(&self.x);
        let (y_p, y_pp) = self.diff.d1_d2(&self.y);
        let m = self.len();
        let mu: Vec<f64> = (0..m).map(|j| x_p[j].hypot(y_p[j])).collect();
        let h11: Vec<f64> = (0..m).map(|j| (x_p[j] * y_pp[j] - y_p[j] * x_pp[j]) / mu[j]).collect();
        let kappa = (0..m).map(|j| h11[j] / (mu[j] * mu[j])).collect();
        let nu_x = (0..m).map(|j| y_p[j] / mu[j]).collect();
        let nu_y = (0..m).map(|j| -x_p[j] / mu[j]).collect();
        CurveFrame { x_p, y_p, x_pp, y_pp, mu, h11, kappa, nu_x, nu_y }
    }

    /// `X + s·f·ν`.
    pub fn displaced(&self, f: &[f64], s: f64) -> Result<Self> {
        let fr = self.frame();
        let x = (0..self.len()).map(|j| self.x[j] + s * f[j] * fr.nu_x[j]).collect();
        let y = (0..self.len()).map(|j| self.y[j] + s * f[j] * fr.nu_y[j]).collect();
        Self::new(x, y)
    }

    /// Whether the polar angle increases strictly along the curve, which makes
    /// it an embedded curve starshaped about the origin.
    pub fn is_starshaped(&self) -> bool {
        let fr = self.frame();
        (0..self.len()).all(|j| self.x[j] * fr.y_p[j] - self.y[j] * fr.x_p[j] > 0.0)
    }

    /// `∫ f ds` by the periodic trapezoid rule.
    pub fn integrate_planar(&self, f: &[f64], frame: &CurveFrame) -> f64 {
        self.step() * (0..self.len()).map(|j| f[j] * frame.mu[j]).sum::<f64>()
    }

    /// `∫ f dμ` over the surface swept by the half `p ∈ [0, π]`, by Simpson's rule.
    pub fn integrate_axisymmetric(&self, f: &[f64], frame: &CurveFrame) -> f64 {
        let half = self.len() / 2;
        let w = crate::geometry::stencil::simpson_weights(half, self.step());
        (0..=half).map(|j| w[j] * 2.0 * PI * self.y[j].abs() * frame.mu[j] * f[j]).sum()
    }

    /// Principal curvatures of the surface of revolution at every node: the
    /// meridian curvature and `ν_y/y`, which equals it on the axis (`j = 0, M/2`).
    pub fn axisymmetric_curvatures(&self, frame: &CurveFrame) -> Vec<[f64; 2]> {
        let half = self.len() / 2;
        (0..self.len())
            .map(|j| {
                let k1 = frame.kappa[j];
                let k2 = if j == 0 || j == half { k1 } else { frame.nu_y[j] / self.y[j] };
                [k1, k2]
            })
            .collect()
    }

    /// Samples the radial function back onto a grid of the given dimension.
    pub fn to_radial(&self, n: usize, intervals: usize) -> Result<RadialGraph> {
        RadialGraph::check_grid(n, intervals)?;
        let xi = TrigInterpolant::new(&self.diff, &self.x);
        let yi = TrigInterpolant::new(&self.diff, &self.y);
        let h = if n == 1 { 2.0 * PI / intervals as f64 } else { PI / intervals as f64 };
        let count = if n == 1 { intervals } else { intervals + 1 };
        let mut r = Vec::with_capacity(count);
        for i in 0..count {
            let theta = i as f64 * h;
            let mut p = theta;
            for _ in 0..50 {
                let ((x, dx), (y, dy)) = (xi.eval(p), yi.eval(p));
                let mut miss = y.atan2(x) - theta;
                miss -= 2.0 * PI * (miss / (2.0 * PI)).round();
                let rate = (x * dy - y * dx) / (x * x + y * y);
                if rate <= 0.0 {
                    return Err(Error::InvalidShape("curve is not starshaped about the origin".into()));
                }
                p -= miss / rate;
                if miss.abs() < 1e-15 {
                    break;
                }
            }
            let (x, y) = (xi.eval(p).0, yi.eval(p).0);
            r.push(x.hypot(y));
        }
        RadialGraph::new(n, r)
    }
}
