//! ψ-derivatives, fractional differences, moduli of smoothness and
//! K-functionals.
//!
//! Differences are applied as exact diagonal multipliers: the coefficient of
//! `Δ_h^α f` at `k` is `(1 - e^{-ikh})^α f̂(k)`, whose modulus is
//! `|2 sin(kh/2)|^α |f̂(k)|`. Every norm in this crate depends on coefficient
//! moduli only, so differences keep the phase of `f̂(k)` and carry the
//! modulus of the multiplier.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::falling_factorial;
use crate::orlicz::{luxemburg_norm_of_magnitudes, OrliczFunction};
use crate::spectrum::CoeffSeq;

/// Default number of grid points for the supremum over `h`.
pub const DEFAULT_H_GRID: usize = 64;

/// Relative change below which grid doubling stops in refine mode.
pub const REFINE_RTOL: f64 = 1e-6;

const MAX_REFINE_DOUBLINGS: u32 = 10;

/// The sequence `ψ` defining a ψ-derivative `f^ψ` with coefficients
/// `f̂(k)/ψ(k)` off the zero set.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSequence {
    /// `ψ(k) = |k|^{-s}`, giving `f^{(s)}`. Frequency zero is annihilated.
    Power { s: f64 },
    /// `ψ(k) = (|k|-r)!/|k|!` for `|k| >= r`, zero below, giving `f^{[r]}`.
    Radial { r: u64 },
    /// Tabulated `ψ(k)` with a declared zero set.
    Custom {
        values: BTreeMap<i64, f64>,
        zero_set: BTreeSet<i64>,
    },
}

impl PsiSequence {
    /// `𝒵(ψ)`.
    pub fn zero_set(&self) -> BTreeSet<i64> {
        match self {
            PsiSequence::Power { .. } => BTreeSet::from([0]),
            PsiSequence::Radial { r } => {
                let r = *r as i64;
                (1 - r..r).collect()
            }
            PsiSequence::Custom { zero_set, .. } => zero_set.clone(),
        }
    }

    /// The multiplier `1/ψ(k)` off the zero set, `0` on it.
    fn inverse(&self, k: i64) -> Result<f64> {
        match self {
            PsiSequence::Power { s } => {
                if k == 0 {
                    Ok(0.0)
                } else {
                    Ok((k.unsigned_abs() as f64).powf(*s))
                }
            }
            PsiSequence::Radial { r } => Ok(falling_factorial(k.unsigned_abs(), *r)),
            PsiSequence::Custom { values, zero_set } => {
                if zero_set.contains(&k) {
                    return Ok(0.0);
                }
                match values.get(&k) {
                    None => Err(Error::Contract(format!("ψ is not tabulated at k = {k}"))),
                    Some(&0.0) => Err(Error::Contract(format!(
                        "ψ({k}) = 0 but {k} is not in the declared zero set"
                    ))),
                    Some(&v) => Ok(1.0 / v),
                }
            }
        }
    }
}

/// `f^ψ`: `k -> c_k / ψ(k)` off `𝒵(ψ)`, entries in `𝒵(ψ)` dropped.
pub fn psi_derivative(c: &CoeffSeq, psi: &PsiSequence) -> Result<CoeffSeq> {
    if let PsiSequence::Power { s } = psi {
        if !(s.is_finite() && *s > 0.0) {
            return Err(Error::Contract(format!("power ψ needs s > 0, got {s}")));
        }
    }
    let mut out = CoeffSeq::with_bound(c.bound());
    for (k, v) in c.iter() {
        out.insert(k, v * psi.inverse(k)?)?;
    }
    Ok(out)
}

/// `f^{(s)}`: multiplier `|k|^s`.
pub fn power_derivative(c: &CoeffSeq, s: f64) -> CoeffSeq {
    if s == 0.0 {
        return c.clone();
    }
    c.map_multiplier(|k| if k == 0 { 0.0 } else { (k.unsigned_abs() as f64).powf(s) })
}

/// `f^{[r]}`: multiplier `|k|!/(|k|-r)!`.
pub fn radial_derivative(c: &CoeffSeq, r: u64) -> CoeffSeq {
    c.map_multiplier(|k| falling_factorial(k.unsigned_abs(), r))
}

/// Generalized binomial coefficient `α(α-1)...(α-j+1)/j!`.
pub fn frac_binom(alpha: f64, j: u64) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (alpha - i as f64) / (i + 1) as f64)
}

/// `2^{⌈α⌉}`, the bound on `sum_j |C(α, j)|`.
pub fn difference_bound(alpha: f64) -> f64 {
    2f64.powf(alpha.ceil())
}

/// Modulus of the difference multiplier, `|2 sin(kh/2)|^α`.
pub fn difference_multiplier(k: i64, h: f64, alpha: f64) -> f64 {
    (2.0 * (0.5 * k as f64 * h).sin()).abs().powf(alpha)
}

/// `Δ_h^α f` as a spectrum.
pub fn frac_difference(c: &CoeffSeq, h: f64, alpha: f64) -> CoeffSeq {
    c.map_multiplier(|k| difference_multiplier(k, h, alpha))
}

/// Parameters of a modulus-of-smoothness evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessQuery {
    pub alpha: f64,
    pub delta: f64,
    pub h_grid: usize,
    /// Double the grid until the supremum moves by less than [`REFINE_RTOL`].
    #[serde(default)]
    pub refine: bool,
}

impl SmoothnessQuery {
    pub fn new(alpha: f64, delta: f64) -> Self {
        SmoothnessQuery {
            alpha,
            delta,
            h_grid: DEFAULT_H_GRID,
            refine: false,
        }
    }

    pub fn with_grid(mut self, h_grid: usize) -> Self {
        self.h_grid = h_grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Contract(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.delta > 0.0 && self.delta <= 2.0 * std::f64::consts::PI) {
            return Err(Error::Contract(format!("delta must lie in (0, 2π], got {}", self.delta)));
        }
        if self.h_grid < 16 {
            return Err(Error::Contract(format!("h_grid must be >= 16, got {}", self.h_grid)));
        }
        Ok(())
    }
}

fn modulus_on_grid(m: &OrliczFunction, freqs: &[(i64, f64)], q: &SmoothnessQuery, grid: usize) -> f64 {
    (1..=grid)
        .into_par_iter()
        .map(|i| {
            let h = q.delta * i as f64 / grid as f64;
            let mags: Vec<f64> = freqs
                .iter()
                .map(|&(k, a)| a * difference_multiplier(k, h, q.alpha))
                .collect();
            luxemburg_norm_of_magnitudes(m, &mags).value
        })
        .reduce(|| 0.0, f64::max)
}

/// `ω_α(f, δ)_M`: the maximum of `||Δ_h^α f||_M` over `h = δ i / h_grid`,
/// `i = 1..=h_grid`. Only positive steps are scanned since the norm is even
/// in `h`.
pub fn modulus(m: &OrliczFunction, c: &CoeffSeq, q: &SmoothnessQuery) -> Result<f64> {
    q.validate()?;
    let freqs: Vec<(i64, f64)> = c
        .iter()
        .filter(|&(k, _)| k != 0)
        .map(|(k, v)| (k, v.norm()))
        .collect();
    if freqs.is_empty() {
        return Ok(0.0);
    }
    let mut grid = q.h_grid;
    let mut value = modulus_on_grid(m, &freqs, q, grid);
    if q.refine {
        for _ in 0..MAX_REFINE_DOUBLINGS {
            grid *= 2;
            let next = modulus_on_grid(m, &freqs, q, grid);
            let done = (next - value).abs() <= REFINE_RTOL * next.abs();
            value = next;
            if done {
                break;
            }
        }
    }
    Ok(value)
}

/// Result of [`k_functional`].
#[derive(Debug, Clone, PartialEq)]
pub struct KFunctional {
    pub value: f64,
    /// Degree `m` of the minimizing Fourier head.
    pub degree: u64,
    pub witness: CoeffSeq,
}

/// Upper estimate of `K_n(δ, f)_M` over the Fourier heads `g_m = S_m(f)`,
/// `n - 1 <= m <= m_max`:
/// `min_m ||f - g_m||_M + δ^n ||g_m^{[n]}||_M`.
///
/// Every head agrees with `f` on `|k| <= n - 1`. Heads only change at
/// frequencies in the support, so only those degrees are evaluated.
pub fn k_functional(m: &OrliczFunction, c: &CoeffSeq, delta: f64, n: u64, m_max: u64) -> Result<KFunctional> {
    if n == 0 {
        return Err(Error::Contract("K-functional order must be >= 1".into()));
    }
    if m_max < n {
        return Err(Error::Contract(format!("m_max = {m_max} must be >= n = {n}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Contract(format!("delta must be positive, got {delta}")));
    }
    let mut degrees: Vec<u64> = c
        .iter()
        .map(|(k, _)| k.unsigned_abs())
        .filter(|&a| n <= a && a <= m_max)
        .collect();
    degrees.push(n - 1);
    degrees.sort_unstable();
    degrees.dedup();

    let scale = delta.powi(n as i32);
    let values: Vec<f64> = degrees
        .par_iter()
        .map(|&deg| {
            let err = m.norm(&c.tail(deg));
            let smooth = m.norm(&radial_derivative(&c.band(n, deg), n));
            err + scale * smooth
        })
        .collect();

    let (best, value) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    let degree = degrees[best];
    Ok(KFunctional {
        value,
        degree,
        witness: c.head(degree),
    })
}

/// `δ^n ||sum_{0<|k|<=n-1} f̂(k) e^{ikx}||_M`, the low-frequency correction
/// in the two-sided K-functional estimate.
pub fn low_frequency_term(m: &OrliczFunction, c: &CoeffSeq, delta: f64, n: u64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    delta.powi(n as i32) * m.norm(&c.band(1, n - 1))
}
