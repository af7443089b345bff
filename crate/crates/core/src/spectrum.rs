//! Coefficient sequences, periodic functions and their Fourier analysis.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::OrliczFunction;

/// Default support bound `K_max` on `|k|`.
pub const DEFAULT_SUPPORT_BOUND: i64 = 1 << 16;

/// Amplitudes below this modulus are dropped on canonicalization.
pub const CANON_EPS: f64 = 1e-300;

/// A finitely supported map `k -> c_k` from frequencies to complex amplitudes.
///
/// Canonical form never stores an entry whose amplitude is below
/// [`CANON_EPS`], so `len()` is the size of the support.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    entries: BTreeMap<i64, Complex64>,
    bound: i64,
}

impl Default for CoeffSeq {
    fn default() -> Self {
        Self::new()
    }
}

impl CoeffSeq {
    pub fn new() -> Self {
        Self::with_bound(DEFAULT_SUPPORT_BOUND)
    }

    pub fn with_bound(bound: i64) -> Self {
        CoeffSeq {
            entries: BTreeMap::new(),
            bound,
        }
    }

    /// Builds a sequence from `(k, c_k)` pairs; repeated frequencies are summed.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut c = Self::new();
        for (k, v) in entries {
            let cur = c.get(k);
            c.insert(k, cur + v)?;
        }
        Ok(c)
    }

    /// A single harmonic `amplitude * e^{ikx}`.
    pub fn single(k: i64, amplitude: Complex64) -> Result<Self> {
        Self::from_entries([(k, amplitude)])
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Sets `c_k`, removing the entry if the amplitude is negligible.
    pub fn insert(&mut self, k: i64, value: Complex64) -> Result<()> {
        if k.unsigned_abs() > self.bound as u64 {
            return Err(Error::SupportBound { k, bound: self.bound });
        }
        if value.norm() < CANON_EPS {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, value);
        }
        Ok(())
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.entries.get(&k).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// `|c_k|` over the support, in frequency order.
    pub fn magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.values().map(|v| v.norm())
    }

    /// Largest `|k|` in the support.
    pub fn max_abs_freq(&self) -> Option<u64> {
        self.entries.keys().map(|k| k.unsigned_abs()).max()
    }

    /// Applies `k -> c_k * m(k)` and canonicalizes.
    pub fn map_multiplier<F>(&self, mut m: F) -> CoeffSeq
    where
        F: FnMut(i64) -> f64,
    {
        self.map_entries(|k, v| v * m(k))
    }

    /// Applies an arbitrary entrywise map and canonicalizes.
    pub fn map_entries<F>(&self, mut f: F) -> CoeffSeq
    where
        F: FnMut(i64, Complex64) -> Complex64,
    {
        let entries = self
            .entries
            .iter()
            .filter_map(|(&k, &v)| {
                let w = f(k, v);
                (w.norm() >= CANON_EPS).then_some((k, w))
            })
            .collect();
        CoeffSeq {
            entries,
            bound: self.bound,
        }
    }

    /// Keeps the entries with `|k|` satisfying `keep`.
    pub fn filter_freq<F>(&self, mut keep: F) -> CoeffSeq
    where
        F: FnMut(u64) -> bool,
    {
        CoeffSeq {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(k.unsigned_abs()))
                .map(|(&k, &v)| (k, v))
                .collect(),
            bound: self.bound,
        }
    }

    /// `f_r`: drops every entry with `|k| <= r`.
    pub fn tail(&self, r: u64) -> CoeffSeq {
        self.filter_freq(|k| k > r)
    }

    /// The partial Fourier sum `S_m`: keeps `|k| <= m`.
    pub fn head(&self, m: u64) -> CoeffSeq {
        self.filter_freq(|k| k <= m)
    }

    /// Entries with `lo <= |k| <= hi`.
    pub fn band(&self, lo: u64, hi: u64) -> CoeffSeq {
        self.filter_freq(|k| lo <= k && k <= hi)
    }

    /// Spectrum of the translate `f(. - h)`: `c_k e^{-ikh}`.
    pub fn translate(&self, h: f64) -> CoeffSeq {
        self.map_entries(|k, v| v * Complex64::from_polar(1.0, -(k as f64) * h))
    }

    pub fn scale(&self, gamma: Complex64) -> CoeffSeq {
        self.map_entries(|_, v| v * gamma)
    }

    fn combine(&self, other: &CoeffSeq, sign: f64) -> CoeffSeq {
        let mut entries = self.entries.clone();
        for (&k, &v) in &other.entries {
            let e = entries.entry(k).or_default();
            *e += v * sign;
        }
        entries.retain(|_, v| v.norm() >= CANON_EPS);
        CoeffSeq {
            entries,
            bound: self.bound.max(other.bound),
        }
    }
}

impl Add for &CoeffSeq {
    type Output = CoeffSeq;

    fn add(self, rhs: &CoeffSeq) -> CoeffSeq {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &CoeffSeq {
    type Output = CoeffSeq;

    fn sub(self, rhs: &CoeffSeq) -> CoeffSeq {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &CoeffSeq {
    type Output = CoeffSeq;

    fn neg(self) -> CoeffSeq {
        self.map_entries(|_, v| -v)
    }
}

impl Mul<f64> for &CoeffSeq {
    type Output = CoeffSeq;

    fn mul(self, rhs: f64) -> CoeffSeq {
        self.map_entries(|_, v| v * rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    k: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CoeffSeqRecord {
    coeffs: Vec<CoeffEntry>,
}

impl Serialize for CoeffSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffSeqRecord {
            coeffs: self
                .iter()
                .map(|(k, v)| CoeffEntry { k, re: v.re, im: v.im })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoeffSeq {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let record = CoeffSeqRecord::deserialize(deserializer)?;
        CoeffSeq::from_entries(record.coeffs.into_iter().map(|e| (e.k, Complex64::new(e.re, e.im))))
            .map_err(serde::de::Error::custom)
    }
}

/// `N` complex samples of a `2π`-periodic function on `x_j = 2πj/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<Complex64>,
}

impl SampledFunction {
    /// `N` must be a power of two, at least 2.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Contract(format!(
                "sample count must be a power of two >= 2, got {n}"
            )));
        }
        Ok(SampledFunction { values })
    }

    /// Samples `f` on the uniform grid of `n` points.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        Self::new((0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

#[derive(Serialize, Deserialize)]
struct SampledRecord {
    samples_re: Vec<f64>,
    samples_im: Vec<f64>,
}

impl Serialize for SampledFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SampledRecord {
            samples_re: self.values.iter().map(|v| v.re).collect(),
            samples_im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SampledFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = SampledRecord::deserialize(deserializer)?;
        if r.samples_re.len() != r.samples_im.len() {
            return Err(serde::de::Error::custom("samples_re and samples_im differ in length"));
        }
        let values = r
            .samples_re
            .into_iter()
            .zip(r.samples_im)
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        SampledFunction::new(values).map_err(serde::de::Error::custom)
    }
}

/// A `2π`-periodic function, given by its spectrum or by samples.
#[derive(Debug, Clone, PartialEq)]
pub enum PeriodicFunction {
    Spectral(CoeffSeq),
    Sampled(SampledFunction),
}

impl PeriodicFunction {
    /// Coefficients with `|k| <= k_max`.
    pub fn coefficients(&self, k_max: usize) -> Result<CoeffSeq> {
        match self {
            PeriodicFunction::Spectral(c) => Ok(c.head(k_max as u64)),
            PeriodicFunction::Sampled(s) => fourier_coeffs(s, k_max),
        }
    }
}

/// `f̂(k)` for `|k| <= k_max` from the discrete transform of the samples.
///
/// Exact (up to rounding) for trigonometric polynomials of degree `< N/2`.
pub fn fourier_coeffs(f: &SampledFunction, k_max: usize) -> Result<CoeffSeq> {
    let n = f.len();
    if k_max >= n / 2 {
        return Err(Error::Aliasing { k: k_max, n });
    }
    let mut buf = f.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let k_max = k_max as i64;
    let mut c = CoeffSeq::new();
    for k in -k_max..=k_max {
        let bin = k.rem_euclid(n as i64) as usize;
        c.insert(k, buf[bin] * scale)?;
    }
    Ok(c)
}

/// `sum_k c_k e^{ikx}` by direct summation.
pub fn synth(c: &CoeffSeq, x: f64) -> Complex64 {
    c.iter()
        .map(|(k, v)| v * Complex64::from_polar(1.0, k as f64 * x))
        .sum()
}

/// Samples the synthesis of `c` on `n` grid points via the inverse transform.
pub fn sample(c: &CoeffSeq, n: usize) -> Result<SampledFunction> {
    if let Some(k) = c.max_abs_freq() {
        if k as usize >= n / 2 {
            return Err(Error::Aliasing { k: k as usize, n });
        }
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Contract(format!("sample count must be a power of two >= 2, got {n}")));
    }
    let mut buf = vec![Complex64::default(); n];
    for (k, v) in c.iter() {
        buf[k.rem_euclid(n as i64) as usize] = v;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    SampledFunction::new(buf)
}

/// `f_r`: the spectrum with all `|k| <= r` removed.
pub fn tail(c: &CoeffSeq, r: u64) -> CoeffSeq {
    c.tail(r)
}

/// `E_{m+1}(f)_M = ||f - S_m(f)||_M`.
pub fn best_approx(m: &OrliczFunction, c: &CoeffSeq, degree: u64) -> f64 {
    m.norm(&c.tail(degree))
}

/// Amplitude law for [`TestFamily::RandomSparse`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum AmplitudeLaw {
    /// Real and imaginary parts uniform in `[-scale, scale]`.
    Uniform { scale: f64 },
    /// Modulus one, uniform phase.
    UnitModulus,
    /// Modulus `max(1, |k|)^{-beta}`, uniform phase.
    Decay { beta: f64 },
}

/// Generators for the test functions used across the pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFamily {
    /// `f̂(k) = |k|^{-beta}` for `1 <= |k| <= k_max`, `f̂(0) = 0`.
    PowerDecay { beta: f64, k_max: i64 },
    /// `amplitude * e^{ikx}`.
    SingleHarmonic {
        k: i64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `support` distinct frequencies drawn from `[-max_freq, max_freq]`.
    RandomSparse {
        seed: u64,
        support: usize,
        max_freq: i64,
        #[serde(flatten)]
        law: AmplitudeLaw,
    },
}

fn one() -> f64 {
    1.0
}

impl TestFamily {
    pub fn generate(&self) -> Result<CoeffSeq> {
        match *self {
            TestFamily::PowerDecay { beta, k_max } => {
                if !(beta > 0.0) || k_max < 1 {
                    return Err(Error::Contract(format!(
                        "power_decay needs beta > 0 and k_max >= 1, got beta={beta}, k_max={k_max}"
                    )));
                }
                let mut c = CoeffSeq::new();
                for k in 1..=k_max {
                    let a = Complex64::new((k as f64).powf(-beta), 0.0);
                    c.insert(k, a)?;
                    c.insert(-k, a)?;
                }
                Ok(c)
            }
            TestFamily::SingleHarmonic { k, amplitude } => CoeffSeq::single(k, Complex64::new(amplitude, 0.0)),
            TestFamily::RandomSparse {
                seed,
                support,
                max_freq,
                law,
            } => {
                if max_freq < 0 || support as u64 > 2 * max_freq as u64 + 1 {
                    return Err(Error::Contract(format!(
                        "cannot draw {support} distinct frequencies from [-{max_freq}, {max_freq}]"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let width = 2 * max_freq as usize + 1;
                let mut freqs: Vec<i64> = index::sample(&mut rng, width, support)
                    .into_iter()
                    .map(|i| i as i64 - max_freq)
                    .collect();
                freqs.sort_unstable();
                let mut c = CoeffSeq::new();
                for k in freqs {
                    let v = match law {
                        AmplitudeLaw::Uniform { scale } => {
                            Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
                        }
                        AmplitudeLaw::UnitModulus => Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)),
                        AmplitudeLaw::Decay { beta } => Complex64::from_polar(
                            (k.unsigned_abs().max(1) as f64).powf(-beta),
                            rng.gen_range(0.0..2.0 * PI),
                        ),
                    };
                    c.insert(k, v)?;
                }
                Ok(c)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn exponential_has_one_coefficient() {
        let f = SampledFunction::from_fn(16, |x| Complex64::from_polar(1.0, 3.0 * x)).unwrap();
        let c = fourier_coeffs(&f, 5).unwrap();
        for k in -5..=5 {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!(close(c.get(k), Complex64::new(want, 0.0), 1e-12), "k={k}");
        }
    }

    #[test]
    fn cosine_splits_evenly() {
        let f = SampledFunction::from_fn(16, |x| Complex64::new(x.cos(), 0.0)).unwrap();
        let c = fourier_coeffs(&f, 2).unwrap();
        assert!(close(c.get(1), Complex64::new(0.5, 0.0), 1e-12));
        assert!(close(c.get(-1), Complex64::new(0.5, 0.0), 1e-12));
        assert!(c.get(0).norm() < 1e-12 && c.get(2).norm() < 1e-12);
    }

    #[test]
    fn square_wave_matches_closed_form() {
        // sign(sin x); closed form 2/(iπk) for odd k. Grid points at 0 and π
        // carry the midpoint value 0.
        let f = SampledFunction::from_fn(4096, |x| {
            let s = x.sin();
            let v = if (x - PI).abs() < 1e-12 || x == 0.0 { 0.0 } else { s.signum() };
            Complex64::new(v, 0.0)
        })
        .unwrap();
        let c = fourier_coeffs(&f, 9).unwrap();
        let n = 4096.0;
        for k in -9i64..=9 {
            let (exact, discrete) = if k % 2 != 0 {
                let kf = k as f64;
                (
                    Complex64::new(0.0, -2.0 / (PI * kf)),
                    Complex64::new(0.0, -2.0 / n / (PI * kf / n).tan()),
                )
            } else {
                (Complex64::default(), Complex64::default())
            };
            // the trapezoidal sum of a jump has the closed form (2/(iN)) cot(πk/N)
            assert!(close(c.get(k), discrete, 1e-12), "k={k}");
            // its distance to 2/(iπk) is about 2π|k|/(3N²), below 1e-6 up to |k| = 7
            let bound = 2.0 * PI * k.abs() as f64 / (3.0 * n * n) * 1.001;
            assert!(close(c.get(k), exact, bound.max(1e-15)), "k={k}: {} vs {exact}", c.get(k));
            if k.abs() <= 7 {
                assert!(close(c.get(k), exact, 1e-6), "k={k}");
            }
        }
    }

    #[test]
    fn aliasing_is_rejected() {
        let f = SampledFunction::from_fn(16, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(fourier_coeffs(&f, 8), Err(Error::Aliasing { .. })));
        assert!(SampledFunction::new(vec![Complex64::default(); 12]).is_err());
    }

    #[test]
    fn synth_examples() {
        let c = CoeffSeq::single(0, Complex64::new(7.0, 0.0)).unwrap();
        assert_eq!(synth(&c, 1.234), Complex64::new(7.0, 0.0));
        let c = CoeffSeq::from_entries([(1, Complex64::new(1.0, 0.0)), (-1, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(close(synth(&c, 0.0), Complex64::new(2.0, 0.0), 1e-15));
    }

    #[test]
    fn sampling_matches_direct_synthesis() {
        let c = TestFamily::RandomSparse {
            seed: 3,
            support: 20,
            max_freq: 30,
            law: AmplitudeLaw::Uniform { scale: 1.0 },
        }
        .generate()
        .unwrap();
        let s = sample(&c, 64).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            let x = 2.0 * PI * j as f64 / 64.0;
            assert!(close(*v, synth(&c, x), 1e-12));
        }
    }

    #[test]
    fn tail_examples() {
        let c = TestFamily::PowerDecay { beta: 1.0, k_max: 4 }.generate().unwrap();
        let with_zero = &c + &CoeffSeq::single(0, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(with_zero.tail(0), c);

        let c = CoeffSeq::from_entries([(1, Complex64::new(1.0, 0.0)), (5, Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(c.tail(3), CoeffSeq::single(5, Complex64::new(1.0, 0.0)).unwrap());
        assert_eq!(c.tail(3).tail(3), c.tail(3));
    }

    #[test]
    fn best_approx_examples() {
        let m = OrliczFunction::power(2.0).unwrap();
        let c = TestFamily::PowerDecay { beta: 2.0, k_max: 64 }.generate().unwrap();
        assert_eq!(best_approx(&m, &c, 64), 0.0);
        assert_eq!(best_approx(&m, &c, 100), 0.0);

        let oracle: f64 = (9..=64).map(|k| 2.0 * (k as f64).powi(-4)).sum::<f64>().sqrt();
        assert!((best_approx(&m, &c, 8) - oracle).abs() < 1e-12);

        let mut prev = f64::INFINITY;
        for deg in 0..=70 {
            let e = best_approx(&m, &c, deg);
            assert!(e <= prev);
            prev = e;
        }
    }

    #[test]
    fn support_bound_enforced() {
        let mut c = CoeffSeq::with_bound(10);
        assert!(c.insert(10, Complex64::new(1.0, 0.0)).is_ok());
        assert!(matches!(
            c.insert(-11, Complex64::new(1.0, 0.0)),
            Err(Error::SupportBound { k: -11, bound: 10 })
        ));
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let c = CoeffSeq::from_entries([(2, Complex64::new(1.0, 0.0)), (2, Complex64::new(-1.0, 0.0))]).unwrap();
        assert!(c.is_empty());
        let d = CoeffSeq::single(3, Complex64::new(1e-301, 0.0)).unwrap();
        assert!(d.is_empty());
        let e = &CoeffSeq::single(3, Complex64::new(1.0, 2.0)).unwrap() - &CoeffSeq::single(3, Complex64::new(1.0, 2.0)).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn json_shapes() {
        let c: CoeffSeq =
            serde_json::from_str(r#"{"coeffs":[{"k":1,"re":3.0,"im":0.0},{"k":-2,"re":0.0,"im":4.0}]}"#).unwrap();
        assert_eq!(c.get(-2), Complex64::new(0.0, 4.0));
        let back = serde_json::to_string(&c).unwrap();
        assert_eq!(back, r#"{"coeffs":[{"k":-2,"re":0.0,"im":4.0},{"k":1,"re":3.0,"im":0.0}]}"#);

        let s: SampledFunction = serde_json::from_str(r#"{"samples_re":[1,2,3,4],"samples_im":[0,0,0,0]}"#).unwrap();
        assert_eq!(s.len(), 4);
        assert!(serde_json::from_str::<SampledFunction>(r#"{"samples_re":[1,2,3],"samples_im":[0,0,0]}"#).is_err());
    }

    #[test]
    fn random_family_is_deterministic() {
        let fam = TestFamily::RandomSparse {
            seed: 42,
            support: 16,
            max_freq: 40,
            law: AmplitudeLaw::UnitModulus,
        };
        let a = fam.generate().unwrap();
        assert_eq!(a, fam.generate().unwrap());
        assert_eq!(a.len(), 16);
        assert!(a.magnitudes().all(|m| (m - 1.0).abs() < 1e-15));
    }

    #[test]
    fn family_json() {
        let f: TestFamily = serde_json::from_str(
            r#"{"family":"random_sparse","seed":1,"support":4,"max_freq":8,"law":"decay","beta":1.5}"#,
        )
        .unwrap();
        assert!(matches!(
            f,
            TestFamily::RandomSparse {
                law: AmplitudeLaw::Decay { beta },
                ..
            } if beta == 1.5
        ));
        let g: TestFamily = serde_json::from_str(r#"{"family":"single_harmonic","k":3}"#).unwrap();
        assert_eq!(g, TestFamily::SingleHarmonic { k: 3, amplitude: 1.0 });
    }
}
