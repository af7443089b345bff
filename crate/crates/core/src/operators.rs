//! Linear summation methods as diagonal spectral multipliers, the Poisson
//! kernel and radial derivatives of the Poisson integral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::CoeffSeq;

/// Largest `ν` for which binomial coefficients are computed in exact integers.
pub const EXACT_BINOMIAL_MAX: u64 = 60;

/// `C(n, j)` in exact integer arithmetic. `None` past [`EXACT_BINOMIAL_MAX`].
pub fn binomial_exact(n: u64, j: u64) -> Option<u128> {
    if n > EXACT_BINOMIAL_MAX {
        return None;
    }
    if j > n {
        return Some(0);
    }
    let j = j.min(n - j);
    let mut acc: u128 = 1;
    for i in 0..j as u128 {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * (n as u128 - i) / (i + 1);
    }
    Some(acc)
}

/// `ln C(n, j)` accumulated as a sum of logarithms of the factor ratios.
pub fn ln_binomial(n: u64, j: u64) -> f64 {
    if j > n {
        return f64::NEG_INFINITY;
    }
    let j = j.min(n - j);
    (1..=j).map(|i| ((n - j + i) as f64 / i as f64).ln()).sum()
}

/// `C(n, j)` as a float: exact up to `n = 60`, log-domain above.
pub fn binomial(n: u64, j: u64) -> f64 {
    match binomial_exact(n, j) {
        Some(b) => b as f64,
        None => ln_binomial(n, j).exp(),
    }
}

/// `k (k-1) ... (k-r+1)`; zero when `k < r`.
pub fn falling_factorial(k: u64, r: u64) -> f64 {
    if k < r {
        return 0.0;
    }
    (0..r).map(|i| (k - i) as f64).product()
}

/// `ρ^k`, shared by every multiplier that reduces to a plain power so that
/// coinciding methods agree bit for bit.
fn rho_pow(rho: f64, k: f64) -> f64 {
    rho.powf(k)
}

/// `1 - ρ^k` without cancellation near `ρ = 1`.
fn one_minus_rho_pow(rho: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else if rho == 0.0 {
        1.0
    } else {
        -(k * rho.ln()).exp_m1()
    }
}

/// `C(k, j) (1-ρ)^j ρ^{k-j}` for `0 < ρ < 1`.
fn binomial_term(k: u64, j: u64, rho: f64) -> f64 {
    if k <= EXACT_BINOMIAL_MAX {
        binomial(k, j) * (1.0 - rho).powi(j as i32) * rho.powi((k - j) as i32)
    } else {
        (ln_binomial(k, j) + j as f64 * (-rho).ln_1p() + (k - j) as f64 * rho.ln()).exp()
    }
}

/// `λ_{k,r}(ρ)`: one for `k < r`, otherwise `sum_{j<r} C(k,j)(1-ρ)^j ρ^{k-j}`.
///
/// Uses `0^0 = 1`, so `λ_{k,r}(0) = 0` for `k >= r`.
pub fn lambda_kr(k: u64, r: u64, rho: f64) -> f64 {
    if k < r {
        return 1.0;
    }
    if rho == 0.0 {
        return 0.0;
    }
    if rho == 1.0 {
        return 1.0;
    }
    if r == 1 {
        return rho_pow(rho, k as f64);
    }
    (0..r).map(|j| binomial_term(k, j, rho)).sum()
}

/// `1 - λ_{k,r}(ρ)`, summing the binomial tail `j >= r` directly whenever the
/// head is close to one.
pub fn lambda_kr_complement(k: u64, r: u64, rho: f64) -> f64 {
    if k < r {
        return 0.0;
    }
    if rho == 0.0 {
        return 1.0;
    }
    if rho == 1.0 {
        return 0.0;
    }
    if r == 1 {
        return one_minus_rho_pow(rho, k as f64);
    }
    let head = lambda_kr(k, r, rho);
    if head <= 0.5 {
        return 1.0 - head;
    }
    let odds = (1.0 - rho) / rho;
    let mut term = binomial_term(k, r, rho);
    let mut sum = 0.0;
    let mut j = r;
    loop {
        sum += term;
        if j == k {
            break;
        }
        let ratio = (k - j) as f64 / (j + 1) as f64 * odds;
        term *= ratio;
        j += 1;
        if ratio < 1.0 && term <= 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Summation methods, each a diagonal multiplier `m(k)`.
///
/// JSON: `{"op": "fourier"|"zygmund"|"fejer"|"abel_poisson"|"tap"|"poisson", ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", try_from = "OperatorRecord")]
pub enum OperatorSpec {
    /// Partial sum `S_n`.
    Fourier { n: u64 },
    /// Zygmund sum `Z_n^{(s)}`.
    Zygmund { n: u64, s: f64 },
    /// Fejér sum `σ_n = Z_n^{(1)}`.
    Fejer { n: u64 },
    /// Generalised Abel-Poisson sum `P_{ρ,s}`, `ρ ∈ [0, 1)`.
    AbelPoisson { rho: f64, s: f64 },
    /// Taylor-Abel-Poisson sum `A_{ρ,r}`, `ρ ∈ [0, 1]`.
    #[serde(rename = "tap")]
    TaylorAbelPoisson { rho: f64, r: u64 },
    /// Poisson integral `P(f)(ρ, ·)`, `ρ ∈ [0, 1)`.
    #[serde(rename = "poisson")]
    PoissonIntegral { rho: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum OperatorRecord {
    Fourier { n: u64 },
    Zygmund { n: u64, s: f64 },
    Fejer { n: u64 },
    AbelPoisson { rho: f64, s: f64 },
    Tap { rho: f64, r: u64 },
    Poisson { rho: f64 },
}

impl TryFrom<OperatorRecord> for OperatorSpec {
    type Error = Error;

    fn try_from(r: OperatorRecord) -> Result<Self> {
        let spec = match r {
            OperatorRecord::Fourier { n } => OperatorSpec::Fourier { n },
            OperatorRecord::Zygmund { n, s } => OperatorSpec::Zygmund { n, s },
            OperatorRecord::Fejer { n } => OperatorSpec::Fejer { n },
            OperatorRecord::AbelPoisson { rho, s } => OperatorSpec::AbelPoisson { rho, s },
            OperatorRecord::Tap { rho, r } => OperatorSpec::TaylorAbelPoisson { rho, r },
            OperatorRecord::Poisson { rho } => OperatorSpec::PoissonIntegral { rho },
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn open_unit(rho: f64) -> bool {
    (0.0..1.0).contains(&rho)
}

impl OperatorSpec {
    pub fn zygmund(n: u64, s: f64) -> Result<Self> {
        let spec = OperatorSpec::Zygmund { n, s };
        spec.validate().map(|_| spec)
    }

    pub fn abel_poisson(rho: f64, s: f64) -> Result<Self> {
        let spec = OperatorSpec::AbelPoisson { rho, s };
        spec.validate().map(|_| spec)
    }

    pub fn taylor_abel_poisson(rho: f64, r: u64) -> Result<Self> {
        let spec = OperatorSpec::TaylorAbelPoisson { rho, r };
        spec.validate().map(|_| spec)
    }

    pub fn poisson(rho: f64) -> Result<Self> {
        let spec = OperatorSpec::PoissonIntegral { rho };
        spec.validate().map(|_| spec)
    }

    /// Checks the parameter ranges. `ρ = 1` is accepted only for the
    /// Taylor-Abel-Poisson sum.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOperator(msg));
        match *self {
            OperatorSpec::Fourier { .. } | OperatorSpec::Fejer { .. } => Ok(()),
            OperatorSpec::Zygmund { s, .. } if !(s.is_finite() && s > 0.0) => bad(format!("zygmund needs s > 0, got {s}")),
            OperatorSpec::Zygmund { .. } => Ok(()),
            OperatorSpec::AbelPoisson { rho, s } => {
                if !open_unit(rho) {
                    bad(format!("abel_poisson needs rho in [0, 1), got {rho}"))
                } else if !(s.is_finite() && s > 0.0) {
                    bad(format!("abel_poisson needs s > 0, got {s}"))
                } else {
                    Ok(())
                }
            }
            OperatorSpec::TaylorAbelPoisson { rho, r } => {
                if !(0.0..=1.0).contains(&rho) {
                    bad(format!("tap needs rho in [0, 1], got {rho}"))
                } else if r == 0 {
                    bad("tap needs r >= 1".into())
                } else {
                    Ok(())
                }
            }
            OperatorSpec::PoissonIntegral { rho } if !open_unit(rho) => {
                bad(format!("poisson needs rho in [0, 1), got {rho}"))
            }
            OperatorSpec::PoissonIntegral { .. } => Ok(()),
        }
    }

    /// The diagonal multiplier `m(k)`.
    pub fn multiplier(&self, k: i64) -> f64 {
        let a = k.unsigned_abs();
        match *self {
            OperatorSpec::Fourier { n } => {
                if a <= n {
                    1.0
                } else {
                    0.0
                }
            }
            OperatorSpec::Zygmund { n, s } => {
                if a <= n {
                    1.0 - (a as f64 / (n + 1) as f64).powf(s)
                } else {
                    0.0
                }
            }
            OperatorSpec::Fejer { n } => OperatorSpec::Zygmund { n, s: 1.0 }.multiplier(k),
            OperatorSpec::AbelPoisson { rho, s } => rho_pow(rho, (a as f64).powf(s)),
            OperatorSpec::TaylorAbelPoisson { rho, r } => lambda_kr(a, r, rho),
            OperatorSpec::PoissonIntegral { rho } => rho_pow(rho, a as f64),
        }
    }

    /// `1 - m(k)`, computed without cancellation where it matters.
    pub fn complement(&self, k: i64) -> f64 {
        let a = k.unsigned_abs();
        match *self {
            OperatorSpec::Fourier { n } => {
                if a <= n {
                    0.0
                } else {
                    1.0
                }
            }
            OperatorSpec::Zygmund { n, s } => {
                if a <= n {
                    (a as f64 / (n + 1) as f64).powf(s)
                } else {
                    1.0
                }
            }
            OperatorSpec::Fejer { n } => OperatorSpec::Zygmund { n, s: 1.0 }.complement(k),
            OperatorSpec::AbelPoisson { rho, s } => one_minus_rho_pow(rho, (a as f64).powf(s)),
            OperatorSpec::TaylorAbelPoisson { rho, r } => lambda_kr_complement(a, r, rho),
            OperatorSpec::PoissonIntegral { rho } => one_minus_rho_pow(rho, a as f64),
        }
    }
}

/// The image of `c` under the method: `c_k m(k)`.
pub fn apply(spec: &OperatorSpec, c: &CoeffSeq) -> CoeffSeq {
    c.map_multiplier(|k| spec.multiplier(k))
}

/// The approximation error `f - U(f)`: `c_k (1 - m(k))`.
pub fn residual(spec: &OperatorSpec, c: &CoeffSeq) -> CoeffSeq {
    c.map_multiplier(|k| spec.complement(k))
}

/// `P(ρ, t) = (1 - ρ²) / |1 - ρ e^{it}|²`.
pub fn poisson_kernel(rho: f64, t: f64) -> Result<f64> {
    if !open_unit(rho) {
        return Err(Error::Domain(format!("Poisson kernel needs rho in [0, 1), got {rho}")));
    }
    Ok((1.0 - rho * rho) / (1.0 - 2.0 * rho * t.cos() + rho * rho))
}

/// Spectrum of `P(f^{[r]})(ρ, ·) = ρ^r ∂^r/∂ρ^r P(f)(ρ, ·)`.
pub fn poisson_radial_derivative(c: &CoeffSeq, rho: f64, r: u64) -> Result<CoeffSeq> {
    if !open_unit(rho) {
        return Err(Error::Domain(format!("Poisson integral needs rho in [0, 1), got {rho}")));
    }
    Ok(c.map_multiplier(|k| {
        let a = k.unsigned_abs();
        if a < r {
            0.0
        } else {
            falling_factorial(a, r) * rho_pow(rho, a as f64)
        }
    }))
}
