//! Majorants `ω` on `[0, 1]`, the Zygmund-Bari-Stechkin conditions and the
//! numerical evidence records used for every `O(·)` claim.
//!
//! An `O(g)` statement is checked as boundedness of the ratios `y_i / g(x_i)`
//! along a parameter sweep `x_i -> ∞`. The sweep is judged on its last
//! quartile: the ratios there may not grow by more than [`TREND_SLACK`]
//! relative to the first ratio of that quartile. Sweeps are geometric, so the
//! last quartile always covers a fixed factor of the parameter range.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed relative growth of the ratios over the last quartile.
pub const TREND_SLACK: f64 = 0.10;

/// Minimum number of points for [`rate_fit`].
pub const MIN_RATE_POINTS: usize = 8;

/// Tabulated majorants whose fitted local decay exponent falls below this
/// value are treated as having a divergent `(𝓑)` series.
pub const MIN_TABLE_DECAY: f64 = 0.01;

/// Default `n_max` for the `(𝓑_s)` gate of [`remark1_check`].
pub const DEFAULT_GATE_N_MAX: u64 = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MajorantKind {
    /// `ω(t) = t^β`.
    Power { beta: f64 },
    /// `ω(t) = t^β (ln(e/t))^γ`.
    PowerLog { beta: f64, gamma: f64 },
    /// Piecewise linear through `(t, ω)` nodes covering `[0, 1]`.
    Table { table: Vec<[f64; 2]> },
}

/// A validated majorant, satisfying conditions 1)-4) on a check grid.
///
/// JSON: `{"family": "power"|"power_log"|"table", "beta"?, "gamma"?, "table"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MajorantKind", into = "MajorantKind")]
pub struct Majorant {
    kind: MajorantKind,
}

impl TryFrom<MajorantKind> for Majorant {
    type Error = Error;

    fn try_from(kind: MajorantKind) -> Result<Self> {
        Majorant::new(kind)
    }
}

impl From<Majorant> for MajorantKind {
    fn from(m: Majorant) -> Self {
        m.kind
    }
}

fn kind_value(kind: &MajorantKind, t: f64) -> f64 {
    match *kind {
        MajorantKind::Power { beta } => {
            if t == 0.0 {
                0.0
            } else {
                t.powf(beta)
            }
        }
        MajorantKind::PowerLog { beta, gamma } => {
            if t == 0.0 {
                0.0
            } else {
                t.powf(beta) * (1.0 - t.ln()).powf(gamma)
            }
        }
        MajorantKind::Table { ref table } => {
            let idx = table.partition_point(|p| p[0] <= t).clamp(1, table.len() - 1);
            let [t0, w0] = table[idx - 1];
            let [t1, w1] = table[idx];
            w0 + (w1 - w0) * (t - t0) / (t1 - t0)
        }
    }
}

impl Majorant {
    pub fn new(kind: MajorantKind) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMajorant(msg));
        match kind {
            MajorantKind::Power { beta } if !(beta.is_finite() && beta > 0.0) => {
                return bad(format!("power majorant needs beta > 0, got {beta}"));
            }
            MajorantKind::PowerLog { beta, gamma } if !(beta.is_finite() && beta > 0.0 && gamma.is_finite()) => {
                return bad(format!("power_log majorant needs beta > 0, got beta={beta}, gamma={gamma}"));
            }
            MajorantKind::Table { ref table } => {
                if table.len() < 2 {
                    return bad("table needs at least two nodes".into());
                }
                if table.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("table contains non-finite values".into());
                }
                if table[0] != [0.0, 0.0] {
                    return bad("table must start at (0, 0) so that ω(t) -> 0".into());
                }
                if table[table.len() - 1][0] != 1.0 {
                    return bad("table must end at t = 1".into());
                }
                // strictly increasing abscissae make the interpolant continuous
                if table.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return bad("table abscissae must increase strictly".into());
                }
            }
            _ => {}
        }

        // conditions 2) and 3) on a grid that is uniform on [0, 1] and
        // logarithmic down to 1e-6
        let mut ts: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        ts.extend((0..=300).map(|i| 10f64.powf(-6.0 + 3.0 * i as f64 / 300.0)));
        ts.sort_by(f64::total_cmp);
        let ws: Vec<f64> = ts.iter().map(|&t| kind_value(&kind, t)).collect();
        if let Some(i) = ws.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return bad(format!("ω({}) = {} is not positive", ts[i], ws[i]));
        }
        if let Some(i) = (1..ws.len()).find(|&i| ws[i] < ws[i - 1] * (1.0 - 1e-12)) {
            return bad(format!("ω decreases between t = {} and t = {}", ts[i - 1], ts[i]));
        }
        if !(ws[0] < ws[ws.len() - 1]) {
            return bad("ω does not decrease towards t = 0".into());
        }
        Ok(Majorant { kind })
    }

    pub fn power(beta: f64) -> Result<Self> {
        Self::new(MajorantKind::Power { beta })
    }

    pub fn power_log(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(MajorantKind::PowerLog { beta, gamma })
    }

    /// Tabulates `f` at `t = 1/v`, `v = 1..=v_max`, plus the node `(0, 0)`.
    pub fn tabulate<F: Fn(f64) -> f64>(f: F, v_max: u64) -> Result<Self> {
        let mut table = vec![[0.0, 0.0]];
        table.extend((1..=v_max).rev().map(|v| {
            let t = 1.0 / v as f64;
            [t, f(t)]
        }));
        Self::new(MajorantKind::Table { table })
    }

    pub fn kind(&self) -> &MajorantKind {
        &self.kind
    }

    /// `ω(t)` for `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        kind_value(&self.kind, t)
    }
}

impl fmt::Display for Majorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MajorantKind::Power { beta } => write!(f, "t^{beta}"),
            MajorantKind::PowerLog { beta, gamma } => write!(f, "t^{beta}·ln(e/t)^{gamma}"),
            MajorantKind::Table { table } => write!(f, "table[{} nodes]", table.len()),
        }
    }
}

/// `g(x) = x^power · ω(1/x)`, or `x^power` without a majorant.
#[derive(Debug, Clone, PartialEq)]
pub struct RateExpr {
    pub power: f64,
    pub majorant: Option<Majorant>,
}

impl RateExpr {
    pub fn power(power: f64) -> Self {
        RateExpr { power, majorant: None }
    }

    pub fn with_majorant(power: f64, majorant: &Majorant) -> Self {
        RateExpr {
            power,
            majorant: Some(majorant.clone()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let base = x.powf(self.power);
        match &self.majorant {
            Some(w) => base * w.eval(1.0 / x),
            None => base,
        }
    }
}

impl fmt::Display for RateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.majorant {
            Some(w) if self.power == 0.0 => write!(f, "ω(1/x), ω(t) = {w}"),
            Some(w) => write!(f, "x^{}·ω(1/x), ω(t) = {w}", self.power),
            None => write!(f, "x^{}", self.power),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Bounded,
    UnboundedTrend,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::UnboundedTrend => "unbounded-trend",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Evidence for an `O(g)` claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub label: String,
    /// `(x, y)` sorted by increasing `x`.
    pub points: Vec<(f64, f64)>,
    pub majorant: String,
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    pub tail_ratio: f64,
    pub verdict: Verdict,
    /// Least-squares slope of `ln y` against `ln x`.
    pub fitted_order: Option<f64>,
    pub warnings: Vec<String>,
}

impl RateReport {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_label_prefix(mut self, prefix: &str) -> Self {
        self.label.insert_str(0, prefix);
        self
    }

    pub fn is_bounded(&self) -> bool {
        self.verdict == Verdict::Bounded
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Judges the ratios `y_i / g(x_i)` of a sweep with `x -> ∞`.
pub fn rate_fit(points: &[(f64, f64)], g: &RateExpr) -> Result<RateReport> {
    if points.len() < MIN_RATE_POINTS {
        return Err(Error::Contract(format!(
            "rate_fit needs at least {MIN_RATE_POINTS} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || y.is_nan() || y < 0.0) {
        return Err(Error::Contract("rate_fit needs finite x and y >= 0".into()));
    }
    let mut pts = points.to_vec();
    let increasing = pts.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = pts.windows(2).all(|w| w[1].0 < w[0].0);
    if !(increasing || decreasing) {
        return Err(Error::Contract("rate_fit needs strictly monotone x".into()));
    }
    if decreasing {
        pts.reverse();
    }

    let ratios: Vec<f64> = pts
        .iter()
        .map(|&(x, y)| {
            let gx = g.eval(x);
            if y == 0.0 {
                0.0
            } else {
                y / gx
            }
        })
        .collect();
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let q0 = 3 * ratios.len() / 4;
    let tail = &ratios[q0..];
    let tail_ratio = tail.iter().copied().fold(0.0, f64::max);

    let verdict = if tail.iter().any(|r| r.is_nan()) {
        Verdict::Inconclusive
    } else if tail.iter().any(|r| r.is_infinite()) {
        Verdict::UnboundedTrend
    } else if tail_ratio <= (1.0 + TREND_SLACK) * tail[0] {
        Verdict::Bounded
    } else {
        Verdict::UnboundedTrend
    };

    let (lx, ly): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0 && y.is_finite())
        .map(|&(x, y)| (x.ln(), y.ln()))
        .unzip();

    Ok(RateReport {
        label: String::new(),
        points: pts,
        majorant: g.to_string(),
        ratios,
        sup_ratio,
        tail_ratio,
        verdict,
        fitted_order: least_squares_slope(&lx, &ly),
        warnings: Vec::new(),
    })
}

/// `1, 2, 3, 4, 6, 8, 11, 16, ...` (ratio `√2`, rounded, deduplicated) up to
/// and including `n_max`.
pub fn geometric_sweep(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let n = 2f64.powf(i as f64 / 2.0).round() as u64;
        if n > n_max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        i += 1;
    }
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// `∫_X^∞ t^{-1-β} (1 + ln t)^γ dt` for `β > 0`, `X >= 1`.
///
/// With `z = ln(1 + ln t)` the integrand becomes
/// `exp(-β(e^z - 1) + (γ+1) z)`, which is smooth; composite Simpson on
/// `z` up to the point where the exponential factor is below `e^{-60}`.
fn power_log_tail_integral(beta: f64, gamma: f64, x: f64) -> f64 {
    let z0 = (1.0 + x.ln()).ln();
    let u1 = x.ln() + 60.0 / beta;
    let z1 = (1.0 + u1).ln();
    let steps = 4000;
    let h = (z1 - z0) / steps as f64;
    let f = |z: f64| (-beta * (z.exp() - 1.0) + (gamma + 1.0) * z).exp();
    let mut acc = f(z0) + f(z1);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(z0 + i as f64 * h);
    }
    acc * h / 3.0
}

/// `sum_{v > V} ω(1/v)/v`. Infinite, with a warning, when a table majorant
/// looks divergent.
fn b_tail(omega: &Majorant, v_max: u64, warnings: &mut Vec<String>) -> f64 {
    let x = v_max as f64 + 0.5;
    match omega.kind() {
        // midpoint rule: sum_{v > V} f(v) ≈ ∫_{V+1/2}^∞ f
        MajorantKind::Power { beta } => x.powf(-beta) / beta,
        MajorantKind::PowerLog { beta, gamma } => power_log_tail_integral(*beta, *gamma, x),
        MajorantKind::Table { .. } => {
            // fit ω(1/v) = C v^{-β} (1 + ln v)^γ through v = V/16, V/4, V
            let vs = [v_max as f64 / 16.0, v_max as f64 / 4.0, v_max as f64];
            let rows: Vec<[f64; 4]> = vs
                .iter()
                .map(|&v| [1.0, -v.ln(), (1.0 + v.ln()).ln(), omega.eval(1.0 / v).ln()])
                .collect();
            let Some([ln_c, beta, gamma]) = solve3(&rows) else {
                warnings.push("table tail fit is singular; tail set to zero".into());
                return 0.0;
            };
            if !(beta > MIN_TABLE_DECAY) {
                warnings.push(format!(
                    "table decays like v^-{beta:.3e}(1+ln v)^{gamma:.3} near t = 1/{v_max}; series treated as divergent"
                ));
                return f64::INFINITY;
            }
            warnings.push(format!(
                "table tail extrapolated with fitted exponents beta = {beta:.4}, gamma = {gamma:.4}"
            ));
            ln_c.exp() * power_log_tail_integral(beta, gamma, x)
        }
    }
}

/// Solves a 3x3 system given as augmented rows by Gaussian elimination.
fn solve3(rows: &[[f64; 4]]) -> Option<[f64; 3]> {
    let mut a = [rows[0], rows[1], rows[2]];
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col];
                for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Condition `(𝓑)`: boundedness of
/// `R(n) = [sum_{v=n+1}^{V} ω(1/v)/v + tail] / ω(1/n)` over a geometric sweep
/// of `n <= n_max`. The tail beyond `V` is integrated analytically for the
/// closed-form families and extrapolated from a fitted power-log model for
/// tables.
pub fn check_b(omega: &Majorant, n_max: u64, v_max: u64) -> Result<RateReport> {
    if n_max < 1 {
        return Err(Error::Contract("n_max must be >= 1".into()));
    }
    if v_max < 10 * n_max {
        return Err(Error::Contract(format!(
            "V = {v_max} must be at least 10 * n_max = {}",
            10 * n_max
        )));
    }
    let mut warnings = Vec::new();
    let tail = b_tail(omega, v_max, &mut warnings);

    // suffix[n] = sum_{v=n+1}^{V} ω(1/v)/v, accumulated from the small end
    let mut suffix = vec![0.0; v_max as usize + 1];
    for v in (1..=v_max as usize).rev() {
        suffix[v - 1] = suffix[v] + omega.eval(1.0 / v as f64) / v as f64;
    }
    let points: Vec<(f64, f64)> = geometric_sweep(n_max)
        .into_iter()
        .map(|n| (n as f64, suffix[n as usize] + tail))
        .collect();
    let mut report = rate_fit(&points, &RateExpr::with_majorant(0.0, omega))?.with_label("(B)");
    report.warnings = warnings;
    Ok(report)
}

/// Condition `(𝓑_s)`: boundedness of
/// `R(n) = sum_{v=1}^{n} v^{s-1} ω(1/v) / (n^s ω(1/n))`.
pub fn check_bs(omega: &Majorant, s: u64, n_max: u64) -> Result<RateReport> {
    if s < 1 {
        return Err(Error::Contract("s must be >= 1".into()));
    }
    let mut prefix = vec![0.0; n_max as usize + 1];
    for v in 1..=n_max as usize {
        let vf = v as f64;
        prefix[v] = prefix[v - 1] + vf.powi(s as i32 - 1) * omega.eval(1.0 / vf);
    }
    let points: Vec<(f64, f64)> = geometric_sweep(n_max)
        .into_iter()
        .map(|n| (n as f64, prefix[n as usize]))
        .collect();
    Ok(rate_fit(&points, &RateExpr::with_majorant(s as f64, omega))?.with_label(format!("(B_{s})")))
}

/// Checks that `(1-ρ)^{r-s} ω(1-ρ) ≫ (1-ρ)^r` as `ρ -> 1-`, i.e. that
/// `(1-ρ)^r = O((1-ρ)^{r-s} ω(1-ρ))`. Requires `ω` to pass `(𝓑_s)`.
pub fn remark1_check(omega: &Majorant, s: u64, r: u64, rho_list: &[f64]) -> Result<RateReport> {
    if r < s {
        return Err(Error::Contract(format!("need r >= s, got r = {r}, s = {s}")));
    }
    let gate = check_bs(omega, s, DEFAULT_GATE_N_MAX)?;
    if !gate.is_bounded() {
        return Err(Error::Premise(format!("ω = {omega} does not satisfy (B_{s}): {}", gate.verdict)));
    }
    if let Some(rho) = rho_list.iter().find(|&&rho| !(0.0..1.0).contains(&rho)) {
        return Err(Error::Contract(format!("rho must lie in [0, 1), got {rho}")));
    }
    let points: Vec<(f64, f64)> = rho_list
        .iter()
        .map(|&rho| (1.0 / (1.0 - rho), (1.0 - rho).powi(r as i32)))
        .collect();
    let g = RateExpr::with_majorant(-((r - s) as f64), omega);
    Ok(rate_fit(&points, &g)?.with_label(format!("remark1(s={s}, r={r})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_spaced(n: usize) -> Vec<f64> {
        (1..=n).map(|i| 2f64.powi(i as i32)).collect()
    }

    #[test]
    fn validation() {
        assert!(Majorant::power(0.0).is_err());
        assert!(Majorant::power(0.25).is_ok());
        // γ > β makes t^β ln(e/t)^γ decrease near t = 1
        assert!(Majorant::power_log(0.5, 2.0).is_err());
        assert!(Majorant::power_log(1.0, 0.5).is_ok());
        assert!(Majorant::new(MajorantKind::Table {
            table: vec![[0.0, 0.1], [1.0, 1.0]]
        })
        .is_err());
        assert!(Majorant::new(MajorantKind::Table {
            table: vec![[0.0, 0.0], [0.5, 0.7], [1.0, 0.6]]
        })
        .is_err());
        let m: Majorant = serde_json::from_str(r#"{"family":"power_log","beta":1.0,"gamma":-1.0}"#).unwrap();
        assert_eq!(m.kind(), &MajorantKind::PowerLog { beta: 1.0, gamma: -1.0 });
        let t: Majorant = serde_json::from_str(r#"{"family":"table","table":[[0,0],[0.5,0.4],[1,1]]}"#).unwrap();
        assert!((t.eval(0.25) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rate_fit_examples() {
        let xs = log_spaced(16);
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 3.0 * x.powi(-2))).collect();
        let r = rate_fit(&pts, &RateExpr::power(-2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        assert!((r.sup_ratio - 3.0).abs() < 1e-12);
        assert!((r.fitted_order.unwrap() + 2.0).abs() < 1e-12);

        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 5.0)).collect();
        assert_eq!(rate_fit(&pts, &RateExpr::power(-1.0)).unwrap().verdict, Verdict::UnboundedTrend);
        // a constant against x^{-1} grows; against x^{1} it decays to zero
        assert_eq!(rate_fit(&pts, &RateExpr::power(1.0)).unwrap().verdict, Verdict::Bounded);

        let xs = log_spaced(8);
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, x.ln() / x)).collect();
        assert_eq!(rate_fit(&pts, &RateExpr::power(-1.0)).unwrap().verdict, Verdict::UnboundedTrend);
    }

    #[test]
    fn rate_fit_contract() {
        let pts: Vec<(f64, f64)> = (1..8).map(|i| (i as f64, 1.0)).collect();
        assert!(rate_fit(&pts, &RateExpr::power(0.0)).is_err());
        let mut pts: Vec<(f64, f64)> = (1..=8).map(|i| (i as f64, 1.0)).collect();
        pts[3].0 = 10.0;
        assert!(rate_fit(&pts, &RateExpr::power(0.0)).is_err());
        let pts: Vec<(f64, f64)> = (1..=8).map(|i| (i as f64, -1.0)).collect();
        assert!(rate_fit(&pts, &RateExpr::power(0.0)).is_err());
    }

    #[test]
    fn report_invariants() {
        let xs = log_spaced(12);
        for e in [-1.0, 0.0, 0.5] {
            let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, x.powf(e) * (1.0 + (x * 0.3).sin().abs()))).collect();
            let r = rate_fit(&pts, &RateExpr::power(0.0)).unwrap();
            assert!(r.sup_ratio >= r.tail_ratio && r.tail_ratio >= 0.0);
        }
    }

    #[test]
    fn recovers_power_law_order() {
        for e in [-2.5, -1.0, 0.3, 1.7] {
            let xs: Vec<f64> = (0..16).map(|i| 10f64.powf(i as f64 / 5.0)).collect();
            let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.7 * x.powf(e))).collect();
            let r = rate_fit(&pts, &RateExpr::power(e)).unwrap();
            assert!((r.fitted_order.unwrap() - e).abs() < 0.05);
        }
    }

    #[test]
    fn decreasing_x_is_reordered() {
        let rhos: Vec<f64> = (1..=10).map(|i| 1.0 - 2f64.powi(-i)).collect();
        let pts: Vec<(f64, f64)> = rhos.iter().rev().map(|&r| (1.0 / (1.0 - r), 1.0 - r)).collect();
        let r = rate_fit(&pts, &RateExpr::power(-1.0)).unwrap();
        assert!(r.points.windows(2).all(|w| w[1].0 > w[0].0));
        assert_eq!(r.verdict, Verdict::Bounded);
    }

    #[test]
    fn geometric_sweep_shape() {
        assert_eq!(geometric_sweep(16), vec![1, 2, 3, 4, 6, 8, 11, 16]);
        assert_eq!(*geometric_sweep(100).last().unwrap(), 100);
    }

    #[test]
    fn check_b_power_tends_to_inverse_beta() {
        // sum_{v>n} v^{-1-β} ≈ n^{-β}/β
        for beta in [0.5, 1.0] {
            let w = Majorant::power(beta).unwrap();
            let r = check_b(&w, 128, 1280).unwrap();
            assert_eq!(r.verdict, Verdict::Bounded, "beta={beta}");
            let last = *r.ratios.last().unwrap();
            assert!((last - 1.0 / beta).abs() < 0.01, "beta={beta} last={last}");
        }
    }

    #[test]
    fn check_b_tail_matches_long_partial_sum() {
        // the analytic tail past V should reproduce a much longer explicit sum
        for kind in [
            MajorantKind::Power { beta: 0.5 },
            MajorantKind::PowerLog { beta: 0.7, gamma: 0.5 },
            MajorantKind::PowerLog { beta: 1.0, gamma: -1.0 },
        ] {
            let w = Majorant::new(kind.clone()).unwrap();
            let mut warnings = Vec::new();
            let short = b_tail(&w, 1000, &mut warnings);
            let explicit: f64 = (1001..=4_000_000u64).map(|v| w.eval(1.0 / v as f64) / v as f64).sum();
            let far = b_tail(&w, 4_000_000, &mut warnings);
            let rel = (short - (explicit + far)).abs() / short;
            assert!(rel < 1e-6, "{kind:?}: rel={rel}");
        }
    }

    #[test]
    fn check_b_detects_logarithmic_majorant() {
        let w = Majorant::tabulate(|t| 1.0 / (1.0 - t.ln()), 1280).unwrap();
        let r = check_b(&w, 128, 1280).unwrap();
        assert_eq!(r.verdict, Verdict::UnboundedTrend);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn check_b_table_of_power_is_bounded() {
        let w = Majorant::tabulate(|t| t.powf(0.5), 1280).unwrap();
        let r = check_b(&w, 128, 1280).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        assert!((r.ratios.last().unwrap() - 2.0).abs() < 0.01);
    }

    #[test]
    fn check_b_contract() {
        let w = Majorant::power(1.0).unwrap();
        assert!(check_b(&w, 128, 1000).is_err());
    }

    #[test]
    fn check_bs_examples() {
        for s in 1..=3u64 {
            let below = Majorant::power(s as f64 - 0.5).unwrap();
            let r = check_bs(&below, s, 256).unwrap();
            assert_eq!(r.verdict, Verdict::Bounded);
            assert!((r.ratios.last().unwrap() - 2.0).abs() < 0.1);

            let equal = Majorant::power(s as f64).unwrap();
            assert_eq!(check_bs(&equal, s, 256).unwrap().verdict, Verdict::UnboundedTrend);
        }
        let w = Majorant::power(0.5).unwrap();
        assert_eq!(check_bs(&w, 1, 256).unwrap().verdict, Verdict::Bounded);
    }

    #[test]
    fn remark1_examples() {
        let rhos: Vec<f64> = (1..=10).map(|i| 1.0 - 2f64.powi(-i)).collect();
        let w = Majorant::power(0.5).unwrap();
        assert!(remark1_check(&w, 1, 2, &rhos).unwrap().is_bounded());
        // ratio (1-ρ)^s / ω(1-ρ) = (1-ρ)^{1/2}
        let w = Majorant::power(1.5).unwrap();
        let r = remark1_check(&w, 2, 3, &rhos).unwrap();
        assert!(r.is_bounded());
        assert!(r.points.iter().zip(&r.ratios).all(|(&(x, _), &q)| (q - x.powf(-0.5)).abs() < 1e-12));
        // β = s violates (B_s)
        let w = Majorant::power(2.0).unwrap();
        assert!(matches!(remark1_check(&w, 2, 3, &rhos), Err(Error::Premise(_))));
        let w = Majorant::power(1.5).unwrap();
        assert!(matches!(remark1_check(&w, 1, 1, &rhos), Err(Error::Premise(_))));
        assert!(remark1_check(&Majorant::power(0.5).unwrap(), 2, 1, &rhos).is_err());
    }
}
