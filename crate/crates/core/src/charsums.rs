//! Incomplete character sums and the smooth-modulus (`q`-van der Corput)
//! bound with an empirical constant fit.

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factorize;
use crate::characters::{CyclotomicSum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fixed block length for parallel summation.
const BLOCK: u64 = 1 << 16;

/// `Σ_{n=start+1}^{start+len} χ(n)` for `len < q`, exact.
fn short_sum(chi: &DirichletCharacter, start: u64, len: u64) -> CyclotomicSum {
    let q = chi.modulus();
    let mut acc = CyclotomicSum::new(chi.order());
    let mut r = (start + 1) % q;
    for _ in 0..len {
        if let Some(e) = chi.exponent(r) {
            acc.add_exponent(e, 1);
        }
        r += 1;
        if r == q {
            r = 0;
        }
    }
    acc
}

fn blocked_sum(chi: &DirichletCharacter, start: u64, len: u64) -> CyclotomicSum {
    if len <= BLOCK {
        return short_sum(chi, start, len);
    }
    let blocks = len.div_ceil(BLOCK);
    let parts: Vec<CyclotomicSum> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = start + b * BLOCK;
            let n = BLOCK.min(len - b * BLOCK);
            short_sum(chi, lo, n)
        })
        .collect();
    let mut acc = CyclotomicSum::new(chi.order());
    for p in &parts {
        acc.add_scaled(p, 1);
    }
    acc
}

/// Exact `Σ_{M<n≤M+N} χ(n)` in `Z[ζ_m]`.
pub fn partial_sum_exact(chi: &DirichletCharacter, start: u64, len: u64) -> CyclotomicSum {
    let q = chi.modulus();
    let periods = len / q;
    let mut acc = blocked_sum(chi, start, len % q);
    if periods > 0 {
        let period = blocked_sum(chi, 0, q);
        acc.add_scaled(&period, periods as i64);
    }
    acc
}

/// `Σ_{M<n≤M+N} χ(n)`, accumulated exactly and converted at the end.
pub fn partial_sum<T: Real>(chi: &DirichletCharacter, start: u64, len: u64) -> Complex<T> {
    partial_sum_exact(chi, start, len).to_complex()
}

/// Factorization-derived quantities entering the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArithProfile {
    pub modulus: u64,
    pub largest_prime: u64,
    pub square_full: u64,
    pub divisor_count: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub sigma_minus_one: Ratio<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

pub fn arith_profile(q: u64) -> Result<ArithProfile> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("modulus {q} < 2")));
    }
    let f = factorize(q)?;
    Ok(ArithProfile {
        modulus: q,
        largest_prime: f.largest_prime().unwrap(),
        square_full: f.squarefull_part(),
        divisor_count: f.divisor_count(),
        sigma_minus_one: f.sigma_minus_one(),
    })
}

/// Exponents of the bound for differencing depth `k`, with `L = 2^{k+3} - 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrExponents {
    pub l: u64,
    pub start: Ratio<u64>,
    pub modulus: Ratio<u64>,
    pub divisor_count: Ratio<u64>,
    pub log_modulus: Ratio<u64>,
    pub largest_prime: Ratio<u64>,
}

impl GrExponents {
    pub fn new(k: u32) -> Self {
        assert!((1..=40).contains(&k), "differencing depth out of range");
        let k = k as u64;
        let l = (1u64 << (k + 3)) - 2;
        GrExponents {
            l,
            start: Ratio::from_integer(1) - Ratio::new(k + 3, l),
            modulus: Ratio::new(1, l),
            divisor_count: Ratio::new(3 * k * k + 11 * k + 8, 2 * l),
            log_modulus: Ratio::new(k + 3, l),
            largest_prime: Ratio::new(k * k + 3 * k + 4, 4 * l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrBoundParams {
    pub start: u64,
    pub len: u64,
    pub k: u32,
    pub l: u64,
    pub profile: ArithProfile,
}

impl GrBoundParams {
    pub fn new(q: u64, start: u64, len: u64, k: u32) -> Result<Self> {
        if len > start {
            return Err(Error::RangeOrder { start, len });
        }
        if len == 0 {
            return Err(Error::InvalidParameter("range length must be positive".into()));
        }
        if !(1..=40).contains(&k) {
            return Err(Error::InvalidParameter(format!("k = {k} outside [1, 40]")));
        }
        Ok(GrBoundParams {
            start,
            len,
            k,
            l: GrExponents::new(k).l,
            profile: arith_profile(q)?,
        })
    }
}

fn ratio_to<T: Real>(r: Ratio<u64>) -> T {
    T::lit(r.to_f64().unwrap())
}

/// The bound with implied constant 1:
/// `M^{1-(k+3)/L} q^{1/L} d(q)^{(3k²+11k+8)/(2L)} (log q)^{(k+3)/L} σ_{-1}(q) p^{(k²+3k+4)/(4L)}`.
pub fn gr_bound<T: Real>(params: &GrBoundParams) -> T {
    let ex = GrExponents::new(params.k);
    let pr = &params.profile;
    let ln = |x: u64| T::from_u64_lossy(x).ln();
    let log_q = ln(pr.modulus);
    let log_value = ratio_to::<T>(ex.start) * ln(params.start)
        + ratio_to::<T>(ex.modulus) * log_q
        + ratio_to::<T>(ex.divisor_count) * ln(pr.divisor_count)
        + ratio_to::<T>(ex.log_modulus) * log_q.ln()
        + ratio_to::<T>(ex.largest_prime) * ln(pr.largest_prime);
    log_value.exp() * ratio_to::<T>(pr.sigma_minus_one)
}

/// The `k` in `k_range` minimizing the bound, with its value.
pub fn optimal_k(q: u64, start: u64, len: u64, k_range: std::ops::RangeInclusive<u32>) -> Result<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for k in k_range {
        let b = gr_bound::<f64>(&GrBoundParams::new(q, start, len, k)?);
        if best.is_none_or(|(_, v)| b < v) {
            best = Some((k, b));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty k range".into()))
}

/// Baseline `√q · log q` for primitive non-principal characters.
pub fn polya_vinogradov(chi: &DirichletCharacter) -> Result<f64> {
    if !chi.is_primitive() || chi.is_principal() {
        return Err(Error::NotPrimitive);
    }
    let q = chi.modulus() as f64;
    Ok(q.sqrt() * q.ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumComparison {
    pub modulus: u64,
    pub start: u64,
    pub len: u64,
    pub k: u32,
    pub exact_re: f64,
    pub exact_im: f64,
    pub abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

pub fn compare(chi: &DirichletCharacter, start: u64, len: u64, k: u32) -> Result<SumComparison> {
    let params = GrBoundParams::new(chi.modulus(), start, len, k)?;
    let bound = gr_bound::<f64>(&params);
    let exact: Complex<f64> = partial_sum(chi, start, len);
    let abs = exact.norm();
    Ok(SumComparison {
        modulus: chi.modulus(),
        start,
        len,
        k,
        exact_re: exact.re,
        exact_im: exact.im,
        abs,
        bound,
        ratio: abs / bound,
    })
}

/// One entry of a constant-fitting sample.
#[derive(Clone, Debug)]
pub struct SampleEntry<'a> {
    pub chi: &'a DirichletCharacter,
    pub start: u64,
    pub len: u64,
    pub k: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitSummary {
    pub square_full: u64,
    pub max_ratio: f64,
    pub argmax: usize,
    pub comparisons: Vec<SumComparison>,
}

/// Largest observed `|Σχ| / bound` over a sample sharing one square-full class.
pub fn fit_constant(sample: &[SampleEntry<'_>]) -> Result<FitSummary> {
    let first = sample.first().ok_or(Error::EmptySample)?;
    let r = arith_profile(first.chi.modulus())?.square_full;
    for e in &sample[1..] {
        let r2 = arith_profile(e.chi.modulus())?.square_full;
        if r2 != r {
            return Err(Error::MixedSquarefullClass(r, r2));
        }
    }
    let comparisons = sample
        .par_iter()
        .map(|e| compare(e.chi, e.start, e.len, e.k))
        .collect::<Result<Vec<_>>>()?;
    let (argmax, max_ratio) = comparisons
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.ratio))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(FitSummary { square_full: r, max_ratio, argmax, comparisons })
}
