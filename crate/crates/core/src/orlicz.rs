//! Orlicz functions and the Luxemburg norm on coefficient sequences.
//!
//! An [`OrliczFunction`] can only be obtained through validation, so every
//! norm computed here is taken with respect to a gauge that passed the grid
//! checks of [`validate_orlicz`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::CoeffSeq;

/// Absolute bisection tolerance on the norm parameter `a`.
pub const NORM_TOL: f64 = 1e-12;

/// Grid used when an Orlicz function is validated at construction time.
pub const DEFAULT_GRID_SIZE: usize = 256;
pub const DEFAULT_T_MAX: f64 = 10.0;

/// Closed-form families plus a tabulated escape hatch.
///
/// Serialized as `{"family": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum OrliczKind {
    /// `M(t) = t^p`, `p >= 1`.
    Power { p: f64 },
    /// `M(t) = t^p (ln(1+t))^q`, `p >= 1`, `q >= 0`.
    PowerLog { p: f64, q: f64 },
    /// `M(t) = e^t - 1`.
    ExpMinusOne {},
    /// Piecewise linear through `points`, extended beyond the last node with
    /// the slope of the last segment. The first node must be `(0, 0)`.
    Table { points: Vec<[f64; 2]> },
}

impl OrliczKind {
    fn check_params(&self) -> Result<()> {
        match *self {
            OrliczKind::Power { p } => {
                if !(p.is_finite() && p >= 1.0) {
                    return Err(Error::InvalidOrlicz(format!("power family needs p >= 1, got {p}")));
                }
            }
            OrliczKind::PowerLog { p, q } => {
                if !(p.is_finite() && p >= 1.0 && q.is_finite() && q >= 0.0) {
                    return Err(Error::InvalidOrlicz(format!(
                        "power_log family needs p >= 1 and q >= 0, got p={p}, q={q}"
                    )));
                }
            }
            OrliczKind::ExpMinusOne {} => {}
            OrliczKind::Table { ref points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidOrlicz("table needs at least two nodes".into()));
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidOrlicz("table contains non-finite values".into()));
                }
                if points[0][0] != 0.0 {
                    return Err(Error::InvalidOrlicz("table must start at t = 0".into()));
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::InvalidOrlicz("table abscissae must increase strictly".into()));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the gauge for `t >= 0` without the domain check.
    pub(crate) fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match *self {
            OrliczKind::Power { p } => {
                if p == 1.0 {
                    t
                } else if p == 2.0 {
                    t * t
                } else {
                    t.powf(p)
                }
            }
            OrliczKind::PowerLog { p, q } => t.powf(p) * t.ln_1p().powf(q),
            OrliczKind::ExpMinusOne {} => t.exp_m1(),
            OrliczKind::Table { ref points } => table_value(points, t),
        }
    }
}

fn table_value(points: &[[f64; 2]], t: f64) -> f64 {
    let idx = points.partition_point(|p| p[0] <= t);
    // segment [idx-1, idx], clamped to the last segment for extrapolation
    let hi = idx.clamp(1, points.len() - 1);
    let [t0, m0] = points[hi - 1];
    let [t1, m1] = points[hi];
    m0 + (m1 - m0) * (t - t0) / (t1 - t0)
}

/// One failed grid check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonzeroAtOrigin { value: f64 },
    NotFinite { t: f64 },
    Decreasing { t0: f64, t1: f64, m0: f64, m1: f64 },
    NonConvex { t0: f64, t1: f64, mid: f64, m_mid: f64, chord: f64 },
    Bounded { t_max: f64, value: f64 },
}

/// Outcome of [`validate_orlicz`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub grid_size: usize,
    pub t_max: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `M(0) = 0`, monotonicity, midpoint convexity and `M(t_max) > 1` on
/// a uniform grid of `grid_size` points over `[0, t_max]`.
pub fn validate_orlicz(kind: &OrliczKind, grid_size: usize, t_max: f64) -> Result<ValidationReport> {
    if grid_size < 3 {
        return Err(Error::Contract(format!("grid_size must be >= 3, got {grid_size}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Contract(format!("t_max must be positive, got {t_max}")));
    }
    kind.check_params()?;

    let ts: Vec<f64> = (0..grid_size)
        .map(|i| t_max * i as f64 / (grid_size - 1) as f64)
        .collect();
    let ms: Vec<f64> = ts.iter().map(|&t| kind.value(t)).collect();
    let mut violations = Vec::new();

    if ms[0] != 0.0 {
        violations.push(Violation::NonzeroAtOrigin { value: ms[0] });
    }
    for (&t, &m) in ts.iter().zip(&ms) {
        if m.is_nan() {
            violations.push(Violation::NotFinite { t });
        }
    }
    for i in 1..grid_size {
        if ms[i] < ms[i - 1] {
            violations.push(Violation::Decreasing {
                t0: ts[i - 1],
                t1: ts[i],
                m0: ms[i - 1],
                m1: ms[i],
            });
        }
    }
    for i in 0..grid_size {
        for j in (i + 2)..grid_size {
            let mid = 0.5 * (ts[i] + ts[j]);
            let m_mid = kind.value(mid);
            let chord = 0.5 * (ms[i] + ms[j]);
            if m_mid > chord + 1e-12 * chord.abs().max(1.0) {
                violations.push(Violation::NonConvex {
                    t0: ts[i],
                    t1: ts[j],
                    mid,
                    m_mid,
                    chord,
                });
            }
        }
    }
    let last = ms[grid_size - 1];
    if !(last > 1.0) {
        violations.push(Violation::Bounded { t_max, value: last });
    }

    Ok(ValidationReport {
        grid_size,
        t_max,
        violations,
    })
}

/// A validated Orlicz function `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrliczKind", into = "OrliczKind")]
pub struct OrliczFunction {
    kind: OrliczKind,
    /// `M^{-1}(1)`, used to bracket the Luxemburg bisection.
    inv_at_one: f64,
}

impl TryFrom<OrliczKind> for OrliczFunction {
    type Error = Error;

    fn try_from(kind: OrliczKind) -> Result<Self> {
        OrliczFunction::new(kind)
    }
}

impl From<OrliczFunction> for OrliczKind {
    fn from(m: OrliczFunction) -> Self {
        m.kind
    }
}

impl OrliczFunction {
    /// Validates `kind` on the default grid.
    pub fn new(kind: OrliczKind) -> Result<Self> {
        let report = validate_orlicz(&kind, DEFAULT_GRID_SIZE, DEFAULT_T_MAX)?;
        if !report.passed() {
            return Err(Error::InvalidOrlicz(format!(
                "{} grid violation(s), first: {:?}",
                report.violations.len(),
                report.violations[0]
            )));
        }
        let inv_at_one = match kind {
            OrliczKind::Power { .. } => 1.0,
            OrliczKind::ExpMinusOne {} => std::f64::consts::LN_2,
            _ => solve_unit_level(&kind),
        };
        Ok(OrliczFunction { kind, inv_at_one })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(OrliczKind::Power { p })
    }

    pub fn power_log(p: f64, q: f64) -> Result<Self> {
        Self::new(OrliczKind::PowerLog { p, q })
    }

    pub fn exp_minus_one() -> Self {
        Self::new(OrliczKind::ExpMinusOne {}).expect("e^t - 1 is a valid Orlicz function")
    }

    pub fn table(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(OrliczKind::Table { points })
    }

    pub fn kind(&self) -> &OrliczKind {
        &self.kind
    }

    /// `M^{-1}(1)`.
    pub fn inverse_at_one(&self) -> f64 {
        self.inv_at_one
    }

    /// Evaluates `M(t)`; negative `t` is a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("Orlicz functions are defined for t >= 0, got {t}")));
        }
        Ok(self.kind.value(t))
    }

    /// `sum_k M(x_k / a)` over nonnegative magnitudes.
    fn modular(&self, magnitudes: &[f64], a: f64) -> f64 {
        magnitudes.iter().map(|&x| self.kind.value(x / a)).sum()
    }

    /// Shorthand for `luxemburg_norm(self, c).value`.
    pub fn norm(&self, c: &CoeffSeq) -> f64 {
        luxemburg_norm(self, c).value
    }
}

fn solve_unit_level(kind: &OrliczKind) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while kind.value(hi) < 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kind.value(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The Luxemburg norm together with its final bisection bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl NormValue {
    pub const ZERO: NormValue = NormValue {
        value: 0.0,
        lo: 0.0,
        hi: 0.0,
    };
}

/// `inf{a > 0 : sum_k M(|c_k| / a) <= 1}` by bisection on `a`.
pub fn luxemburg_norm(m: &OrliczFunction, c: &CoeffSeq) -> NormValue {
    let magnitudes: Vec<f64> = c.magnitudes().collect();
    luxemburg_norm_of_magnitudes(m, &magnitudes)
}

/// Same as [`luxemburg_norm`] on a raw slice of magnitudes `|c_k|`.
pub fn luxemburg_norm_of_magnitudes(m: &OrliczFunction, magnitudes: &[f64]) -> NormValue {
    let mags: Vec<f64> = magnitudes.iter().copied().filter(|&x| x > 0.0).collect();
    if mags.is_empty() {
        return NormValue::ZERO;
    }
    let max = mags.iter().copied().fold(0.0, f64::max);
    let sum: f64 = mags.iter().sum();

    // By convexity, max|c|/M^{-1}(1) <= norm <= sum|c|/M^{-1}(1).
    let mut hi = sum / m.inv_at_one;
    let mut lo = max / m.inv_at_one;
    while m.modular(&mags, hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while m.modular(&mags, lo) <= 1.0 {
        hi = lo;
        lo *= 0.5;
    }

    let tol = NORM_TOL.max(4.0 * f64::EPSILON * hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m.modular(&mags, mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    NormValue {
        value: 0.5 * (lo + hi),
        lo,
        hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn seq(entries: &[(i64, f64, f64)]) -> CoeffSeq {
        CoeffSeq::from_entries(entries.iter().map(|&(k, re, im)| (k, Complex64::new(re, im)))).unwrap()
    }

    #[test]
    fn eval_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        assert_eq!(m2.eval(3.0).unwrap(), 9.0);
        for m in [
            m2.clone(),
            OrliczFunction::power_log(1.5, 2.0).unwrap(),
            OrliczFunction::exp_minus_one(),
        ] {
            assert_eq!(m.eval(0.0).unwrap(), 0.0);
        }
        let e = OrliczFunction::exp_minus_one();
        assert!((e.eval(std::f64::consts::LN_2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_argument_is_domain_error() {
        let m = OrliczFunction::power(2.0).unwrap();
        assert!(matches!(m.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        let v = luxemburg_norm(&m2, &seq(&[(1, 3.0, 0.0), (-2, 4.0, 0.0)]));
        assert!((v.value - 5.0).abs() < 1e-11);
        assert!(v.lo <= v.value && v.value <= v.hi);
        assert!(v.hi - v.lo <= NORM_TOL.max(4.0 * f64::EPSILON * v.hi));

        assert_eq!(luxemburg_norm(&m2, &CoeffSeq::new()), NormValue::ZERO);

        let e = OrliczFunction::exp_minus_one();
        let v = luxemburg_norm(&e, &seq(&[(0, 1.0, 0.0)]));
        assert!((v.value - 1.0 / std::f64::consts::LN_2).abs() < 1e-11);
    }

    #[test]
    fn single_term_solves_unit_level() {
        // a = |c| / M^{-1}(1)
        let m = OrliczFunction::power_log(1.0, 1.0).unwrap();
        let t1 = m.inverse_at_one();
        assert!((m.eval(t1).unwrap() - 1.0).abs() < 1e-12);
        let v = m.norm(&seq(&[(4, 0.0, 2.5)]));
        assert!((v - 2.5 / t1).abs() < 1e-11);
    }

    #[test]
    fn validation_examples() {
        let r = validate_orlicz(&OrliczKind::Power { p: 1.0 }, 100, 10.0).unwrap();
        assert!(r.passed());
        let r = validate_orlicz(&OrliczKind::Power { p: 2.0 }, 100, 10.0).unwrap();
        assert!(r.passed());

        // sqrt(t) tabulated: concave, so midpoint convexity must fail
        let points: Vec<[f64; 2]> = (0..=20)
            .map(|i| {
                let t = i as f64 * 0.5;
                [t, t.sqrt()]
            })
            .collect();
        let r = validate_orlicz(&OrliczKind::Table { points: points.clone() }, 100, 10.0).unwrap();
        assert!(!r.passed());
        let triple = r.violations.iter().find_map(|v| match v {
            Violation::NonConvex { t0, t1, mid, .. } => Some((*t0, *t1, *mid)),
            _ => None,
        });
        let (t0, t1, mid) = triple.expect("a non-convex triple is reported");
        assert!(t0 < mid && mid < t1);
        assert!(OrliczFunction::table(points).is_err());
    }

    #[test]
    fn validation_preconditions() {
        assert!(validate_orlicz(&OrliczKind::Power { p: 2.0 }, 2, 10.0).is_err());
        assert!(validate_orlicz(&OrliczKind::Power { p: 2.0 }, 10, 0.0).is_err());
        assert!(OrliczFunction::power(0.5).is_err());
        assert!(OrliczFunction::power_log(1.0, -1.0).is_err());
    }

    #[test]
    fn bounded_gauge_fails() {
        let r = validate_orlicz(&OrliczKind::Power { p: 1.0 }, 16, 0.5).unwrap();
        assert!(matches!(r.violations.as_slice(), [Violation::Bounded { .. }]));
    }

    #[test]
    fn convex_table_matches_power() {
        let points: Vec<[f64; 2]> = (0..=40)
            .map(|i| {
                let t = i as f64 * 0.25;
                [t, t * t]
            })
            .collect();
        let m = OrliczFunction::table(points).unwrap();
        // interpolation is exact at nodes
        assert_eq!(m.eval(2.5).unwrap(), 6.25);
        // linear extension beyond the last node
        assert!(m.eval(20.0).unwrap() > 100.0);
    }

    #[test]
    fn serde_record() {
        let m: OrliczFunction = serde_json::from_str(r#"{"family":"power","params":{"p":2.0}}"#).unwrap();
        assert_eq!(m.kind(), &OrliczKind::Power { p: 2.0 });
        let e: OrliczFunction = serde_json::from_str(r#"{"family":"exp_minus_one","params":{}}"#).unwrap();
        assert_eq!(e.inverse_at_one(), std::f64::consts::LN_2);
        let bad: std::result::Result<OrliczFunction, _> =
            serde_json::from_str(r#"{"family":"power","params":{"p":0.5}}"#);
        assert!(bad.is_err());
        let s = serde_json::to_string(&OrliczFunction::power_log(2.0, 1.0).unwrap()).unwrap();
        assert_eq!(s, r#"{"family":"power_log","params":{"p":2.0,"q":1.0}}"#);
    }
}
