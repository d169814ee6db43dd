//! Elementary symmetric functions of principal curvatures.
//!
//! `σ_m(λ)` is the sum of all products of `m` distinct entries of `λ`, with
//! `σ_0 ≡ 1` and `σ_m ≡ 0` for `m > n`. Everything here works on plain
//! slices so the geometry kernels can call it per grid node without
//! allocating; [`CurvatureVector`] is the validated owning wrapper.
//!
//! Values are built by the incremental polynomial-coefficient recurrence
//! `∏(1 + λ_i t) = Σ σ_m t^m`, which costs `O(n·m)` and is exact on small
//! integer inputs.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Closure tolerance for `Γ̄_k` membership, relative to `max|λ|^m`.
pub const DEFAULT_CONE_TOL: f64 = 1e-10;

/// Principal curvatures at a surface point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureVector(Vec<f64>);

impl CurvatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyCurvature);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteCurvature { index, value });
        }
        Ok(Self(values))
    }

    /// The all-ones vector `I = (1, …, 1)`.
    pub fn identity(n: usize) -> Self {
        Self(vec![1.0; n.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for CurvatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Degree of a Gårding cone `Γ_k`, checked against the ambient `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeLevel(usize);

impl ConeLevel {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::DegreeOutOfRange { k, n });
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Writes `σ_0(λ), …, σ_{out.len()-1}(λ)` into `out`.
pub fn elem_sym_into(lambda: &[f64], out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out.fill(0.0);
    out[0] = 1.0;
    let top = out.len() - 1;
    for (i, &x) in lambda.iter().enumerate() {
        for j in (1..=top.min(i + 1)).rev() {
            out[j] += x * out[j - 1];
        }
    }
}

/// All of `σ_0, …, σ_{max_m}`.
pub fn elem_sym_upto(lambda: &[f64], max_m: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_m + 1];
    elem_sym_into(lambda, &mut out);
    out
}

/// `σ_m(λ)`. Returns 1 for `m = 0` and 0 for `m > n`.
pub fn elem_sym(lambda: &[f64], m: usize) -> f64 {
    if m > lambda.len() {
        return 0.0;
    }
    elem_sym_upto(lambda, m)[m]
}

/// `σ_m` of `λ` with entry `skip` removed.
fn elem_sym_without(lambda: &[f64], skip: usize, m: usize) -> f64 {
    if m + 1 > lambda.len() {
        // λ∖λ_i has n-1 entries.
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    let mut seen = 0usize;
    for (i, &x) in lambda.iter().enumerate() {
        if i == skip {
            continue;
        }
        for j in (1..=m.min(seen + 1)).rev() {
            e[j] += x * e[j - 1];
        }
        seen += 1;
    }
    e[m]
}

/// `∂σ_m/∂λ_i = σ_{m-1}(λ∖λ_i)` for every `i`.
pub fn elem_sym_gradient(lambda: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = lambda.len();
    if m == 0 || m > n {
        return Err(Error::DegreeOutOfRange { k: m, n });
    }
    Ok((0..n).map(|i| elem_sym_without(lambda, i, m - 1)).collect())
}

/// `C_{n,k} = σ_k(I)/σ_{k-1}(I) = (n-k+1)/k`.
pub fn cnk(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::DegreeOutOfRange { k, n });
    }
    Ok(binomial(n, k) / binomial(n, k - 1))
}

/// Membership in `Γ_k` (strict) or its closure `Γ̄_k`.
///
/// The closure is tested as `σ_m ≥ -DEFAULT_CONE_TOL·max|λ|^m`.
pub fn in_gamma_k(lambda: &[f64], k: ConeLevel, strict: bool) -> bool {
    in_gamma_k_tol(lambda, k, strict, DEFAULT_CONE_TOL)
}

/// [`in_gamma_k`] with an explicit closure tolerance.
pub fn in_gamma_k_tol(lambda: &[f64], k: ConeLevel, strict: bool, tol_cone: f64) -> bool {
    let k = k.get();
    if k > lambda.len() {
        return false;
    }
    let sig = elem_sym_upto(lambda, k);
    let scale = lambda.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    (1..=k).all(|m| {
        if strict {
            sig[m] > 0.0
        } else {
            sig[m] >= -tol_cone * scale.powi(m as i32)
        }
    })
}

/// The polarization `σ_{m-1,1}(λ; λ²) = Σ_i ∂σ_m/∂λ_i · λ_i²` in the
/// principal frame.
pub fn polarized_sigma_square(lambda: &[f64], m: usize) -> Result<f64> {
    let grad = elem_sym_gradient(lambda, m)?;
    Ok(grad.iter().zip(lambda).map(|(g, x)| g * x * x).sum())
}

/// Newton gap `σ_{k+1}(I)σ_{k-1}(I)/σ_k(I)² − σ_{k+1}(λ)σ_{k-1}(λ)/σ_k(λ)²`.
///
/// Nonnegative for every real `λ`, zero at `λ = I`.
pub fn newton_maclaurin_check(lambda: &[f64], k: usize) -> Result<f64> {
    let n = lambda.len();
    if k == 0 || k + 1 > n {
        return Err(Error::DegreeOutOfRange { k, n: n.saturating_sub(1) });
    }
    let sig = elem_sym_upto(lambda, k + 1);
    if sig[k] == 0.0 {
        return Err(Error::DegenerateSigma { k });
    }
    let at_identity = binomial(n, k + 1) * binomial(n, k - 1) / binomial(n, k).powi(2);
    Ok(at_identity - sig[k + 1] * sig[k - 1] / (sig[k] * sig[k]))
}

/// The MacLaurin-type constant `C̃_{k,n} = binom(n,k+1)/binom(n,k)^{(k+1)/k}`.
pub fn maclaurin_constant(n: usize, k: usize) -> f64 {
    binomial(n, k + 1) / binomial(n, k).powf((k + 1) as f64 / k as f64)
}

/// Gap `C̃_{k,n}·σ_k^{1+1/k} − σ_{k+1}`, nonnegative on `Γ_k`.
pub fn maclaurin_power_bound(lambda: &[f64], k: usize) -> Result<f64> {
    let n = lambda.len();
    let level = ConeLevel::new(k, n)?;
    if !in_gamma_k(lambda, level, true) {
        return Err(Error::OutsideCone { k });
    }
    let sig = elem_sym_upto(lambda, (k + 1).min(n));
    let next = if k < n { sig[k + 1] } else { 0.0 };
    Ok(maclaurin_constant(n, k) * sig[k].powf(1.0 + 1.0 / k as f64) - next)
}
