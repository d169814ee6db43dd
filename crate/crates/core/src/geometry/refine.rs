use std::f64::consts::PI;

use super::RadialGraph;
use crate::error::{Error, Result};

/// Resamples `g` on a grid `factor` times finer by trigonometric
/// interpolation (a cosine series for axisymmetric profiles).
pub fn refine(g: &RadialGraph, factor: usize) -> Result<RadialGraph> {
    if factor < 2 {
        return Err(Error::InvalidArgument(format!("refinement factor must be >= 2, got {factor}")));
    }
    let n = g.n();
    let big_n = g.intervals();
    let r = g.samples();
    let fine = big_n * factor;
    let out = if n == 1 { refine_periodic(r, big_n, fine) } else { refine_even(r, big_n, fine) };
    RadialGraph::new(n, out)
}

/// `cos(2πm/len)` and `sin(2πm/len)` for every residue `m`.
fn trig_table(len: usize) -> (Vec<f64>, Vec<f64>) {
    (0..len)
        .map(|m| {
            let t = 2.0 * PI * m as f64 / len as f64;
            (t.cos(), t.sin())
        })
        .unzip()
}

fn refine_periodic(r: &[f64], big_n: usize, fine: usize) -> Vec<f64> {
    let (cos_t, sin_t) = trig_table(fine);
    let factor = fine / big_n;
    let half = big_n / 2;
    let scale = 2.0 / big_n as f64;
    let mut a = vec![0.0; half + 1];
    let mut b = vec![0.0; half + 1];
    for k in 0..=half {
        for (j, &rj) in r.iter().enumerate() {
            let m = (j * k % big_n) * factor;
            a[k] += rj * cos_t[m];
            b[k] += rj * sin_t[m];
        }
        a[k] *= scale;
        b[k] *= scale;
    }
    // Nyquist term split evenly between ±N/2 so the interpolant is real.
    (0..fine)
        .map(|i| {
            let mut s = 0.5 * a[0];
            for k in 1..half {
                let m = k * i % fine;
                s += a[k] * cos_t[m] + b[k] * sin_t[m];
            }
            s + 0.5 * a[half] * cos_t[half * i % fine]
        })
        .collect()
}

fn refine_even(r: &[f64], big_n: usize, fine: usize) -> Vec<f64> {
    // Even extension has period 2π and 2N samples.
    let period = 2 * fine;
    let (cos_t, _) = trig_table(period);
    let factor = fine / big_n;
    let scale = 2.0 / big_n as f64;
    let endpoint = |j: usize| if j == 0 || j == big_n { 0.5 } else { 1.0 };
    let a: Vec<f64> = (0..=big_n)
        .map(|k| {
            let s: f64 = r
                .iter()
                .enumerate()
                .map(|(j, &rj)| endpoint(j) * rj * cos_t[(j * k % (2 * big_n)) * factor])
                .sum();
            s * scale
        })
        .collect();
    (0..=fine)
        .map(|i| (0..=big_n).map(|k| endpoint(k) * a[k] * cos_t[k * i % period]).sum())
        .collect()
}
