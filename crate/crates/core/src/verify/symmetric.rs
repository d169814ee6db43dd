use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IdentityReport;
use crate::symfunc::{
    elem_sym_gradient, elem_sym_upto, in_gamma_k, maclaurin_constant, newton_maclaurin_check, ConeLevel,
};

/// Tolerance of the symmetric-function identities, relative to the magnitude of
/// the summed terms.
pub const SYMFUNC_TOLERANCE: f64 = 1e-12;

struct Worst {
    value: f64,
    lhs: f64,
    rhs: f64,
    scale: f64,
}

impl Worst {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, lhs: 0.0, rhs: 0.0, scale: 1.0 }
    }

    fn offer(&mut self, lhs: f64, rhs: f64, scale: f64) {
        let rel = (lhs - rhs).abs() / scale;
        if rel > self.value || rel.is_nan() {
            *self = Self { value: rel, lhs, rhs, scale };
        }
    }
}

/// Newton and MacLaurin inequalities, Euler's relation `Σλ_i∂_iσ_m = mσ_m` and
/// the polarization `Σ∂_iσ_m·λ_i² = σ_1σ_m − (m+1)σ_{m+1}` on `samples` random
/// vectors of dimension `2..=max_dim`.
///
/// The inequalities are sampled inside `Γ_k`, away from its boundary, where the
/// ratios are well conditioned.
pub fn check_symfunc_suite(samples: usize, max_dim: usize, seed: u64) -> Vec<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_dim = max_dim.max(2);
    let mut newton = f64::INFINITY;
    let mut maclaurin = f64::INFINITY;
    let (mut euler, mut polar) = (Worst::new(), Worst::new());
    let mut tested_ineq = 0usize;

    for _ in 0..samples {
        let n = rng.gen_range(2..=max_dim);
        let lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
        let sig = elem_sym_upto(&lambda, n);
        let scale = lambda.iter().fold(0.0_f64, |a, x| a.max(x.abs()));

        for m in 1..=n {
            let grad = elem_sym_gradient(&lambda, m).expect("1 <= m <= n");
            let terms: Vec<f64> = grad.iter().zip(&lambda).map(|(g, x)| g * x).collect();
            let mag: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
            euler.offer(terms.iter().sum(), m as f64 * sig[m], mag);

            let sq: Vec<f64> = grad.iter().zip(&lambda).map(|(g, x)| g * x * x).collect();
            let next = if m < n { sig[m + 1] } else { 0.0 };
            let rhs = sig[1] * sig[m] - (m + 1) as f64 * next;
            let mag = sq.iter().map(|t| t.abs()).sum::<f64>()
                + (sig[1] * sig[m]).abs()
                + (m + 1) as f64 * next.abs();
            polar.offer(sq.iter().sum(), rhs, mag.max(f64::MIN_POSITIVE));
        }

        let k = rng.gen_range(1..n);
        let level = ConeLevel::new(k, n).expect("1 <= k < n");
        if in_gamma_k(&lambda, level, true) && sig[k] > 1e-3 * scale.powi(k as i32) {
            tested_ineq += 1;
            if let Ok(gap) = newton_maclaurin_check(&lambda, k) {
                newton = newton.min(gap);
            }
            let bound = maclaurin_constant(n, k) * sig[k].powf(1.0 + 1.0 / k as f64);
            maclaurin = maclaurin.min((bound - sig[k + 1]) / bound);
        }
    }

    let res = format!("samples={samples} max_dim={max_dim} seed={seed} cone_samples={tested_ineq}");
    vec![
        IdentityReport::at_most("symfunc.newton", -newton, 0.0, SYMFUNC_TOLERANCE).at(res.clone()),
        IdentityReport::at_most("symfunc.maclaurin", -maclaurin, 0.0, SYMFUNC_TOLERANCE).at(res.clone()),
        IdentityReport::relative("symfunc.euler", euler.lhs, euler.rhs, euler.scale, SYMFUNC_TOLERANCE)
            .at(res.clone()),
        IdentityReport::relative("symfunc.polarization", polar.lhs, polar.rhs, polar.scale, SYMFUNC_TOLERANCE)
            .at(res),
    ]
}
