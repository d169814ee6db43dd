//! Fourth-order centered differences and quadrature weights on the two
//! supported grids.

/// Sample accessor with the boundary closure of each grid: periodic wrap on
/// the circle, even reflection across the poles for axisymmetric profiles.
#[inline]
fn at(r: &[f64], periodic: bool, j: isize) -> f64 {
    let len = r.len() as isize;
    if periodic {
        r[j.rem_euclid(len) as usize]
    } else {
        let last = len - 1;
        let idx = if j < 0 {
            -j
        } else if j > last {
            2 * last - j
        } else {
            j
        };
        r[idx as usize]
    }
}

/// First and second derivatives with the 5-point stencils.
///
/// Written in difference form so a constant field differentiates to exactly
/// zero.
pub(crate) fn derivatives(r: &[f64], h: f64, periodic: bool, d1: &mut [f64], d2: &mut [f64]) {
    let inv12h = 1.0 / (12.0 * h);
    let inv12h2 = 1.0 / (12.0 * h * h);
    for i in 0..r.len() {
        let j = i as isize;
        let c = r[i];
        let p1 = at(r, periodic, j + 1);
        let m1 = at(r, periodic, j - 1);
        let p2 = at(r, periodic, j + 2);
        let m2 = at(r, periodic, j - 2);
        d1[i] = (8.0 * (p1 - m1) - (p2 - m2)) * inv12h;
        d2[i] = (16.0 * ((p1 - c) + (m1 - c)) - ((p2 - c) + (m2 - c))) * inv12h2;
    }
}

/// Composite Simpson weights on `n_intervals` (even) equal intervals.
pub(crate) fn simpson_weights(n_intervals: usize, h: f64) -> Vec<f64> {
    (0..=n_intervals)
        .map(|j| {
            let c = if j == 0 || j == n_intervals {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_err(n: usize, periodic: bool) -> (f64, f64) {
        let (len, h) = if periodic { (n, 2.0 * PI / n as f64) } else { (n + 1, PI / n as f64) };
        let f = |x: f64| (x.cos() * 0.7).exp() + 0.3 * (2.0 * x).cos();
        let f1 = |x: f64| -0.7 * x.sin() * (x.cos() * 0.7).exp() - 0.6 * (2.0 * x).sin();
        let f2 = |x: f64| {
            let e = (x.cos() * 0.7).exp();
            0.49 * x.sin().powi(2) * e - 0.7 * x.cos() * e - 1.2 * (2.0 * x).cos()
        };
        let r: Vec<f64> = (0..len).map(|j| f(j as f64 * h)).collect();
        let mut d1 = vec![0.0; len];
        let mut d2 = vec![0.0; len];
        derivatives(&r, h, periodic, &mut d1, &mut d2);
        let e1 = (0..len).map(|j| (d1[j] - f1(j as f64 * h)).abs()).fold(0.0, f64::max);
        let e2 = (0..len).map(|j| (d2[j] - f2(j as f64 * h)).abs()).fold(0.0, f64::max);
        (e1, e2)
    }

    #[test]
    fn stencils_are_fourth_order() {
        for periodic in [true, false] {
            let (a1, a2) = max_err(32, periodic);
            let (b1, b2) = max_err(64, periodic);
            assert!(a1 / b1 > 14.0 && a1 / b1 < 18.0, "d1 ratio {}", a1 / b1);
            assert!(a2 / b2 > 14.0 && a2 / b2 < 18.0, "d2 ratio {}", a2 / b2);
        }
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let r = vec![1.2345678901; 40];
        let mut d1 = vec![1.0; 40];
        let mut d2 = vec![1.0; 40];
        derivatives(&r, 0.1, true, &mut d1, &mut d2);
        assert!(d1.iter().chain(&d2).all(|&x| x == 0.0));
    }

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let n = 8;
        let h = 2.0 / n as f64;
        let w = simpson_weights(n, h);
        let s: f64 = w.iter().enumerate().map(|(j, w)| w * (j as f64 * h).powi(3)).sum();
        assert!((s - 4.0).abs() < 1e-14);
    }
}
