//! The Gaussian-weighted coefficient sum
//! `(2√(πy))^{-1} Σ a(n) exp(-(ln n)²/(4y))` and the matching contour
//! integral `(2πi)^{-1} ∫_{(2)} F(s) e^{s² y} ds`.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::series::{CoefficientSeries, SeriesProduct};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative size of the last included term that triggers `CapTooSmall`.
const LAST_TERM_RATIO: f64 = 1e-15;
/// Default cap keeps every weight past it below `e^{-CAP_LOG_WEIGHT}`.
const CAP_LOG_WEIGHT: f64 = 37.0;
/// Largest sieve the default cap may request.
const MAX_CAP: u64 = 1 << 26;
const BLOCK: usize = 1 << 16;

#[derive(Clone, Debug, Serialize)]
pub struct GaussianSum<T> {
    pub disc: i64,
    pub y: T,
    pub n_cap: u64,
    pub value: T,
    /// Estimate of the omitted tail `n > n_cap`, from the average order of
    /// the divisor function.
    pub tail_bound: T,
    pub last_term: T,
}

/// Default `n_cap`: at least `e^{8y}`, and far enough out that the Gaussian
/// weight has decayed below `e^{-37}`.
pub fn default_cap(y: f64) -> u64 {
    let log_cap = (8.0 * y).max((4.0 * y * CAP_LOG_WEIGHT).sqrt());
    log_cap.exp().ceil().min(MAX_CAP as f64) as u64
}

fn weight<T: Real>(n: usize, four_y: T) -> T {
    let l = T::from_usize(n).unwrap().ln();
    (-(l * l) / four_y).exp()
}

/// Sums `a(n) w(n)` over `n` in `range`, in fixed blocks combined left to
/// right, returning the block sums.
fn block_sums<T: Real>(table: &[u16], lo: usize, hi: usize, four_y: T) -> Vec<T> {
    let starts: Vec<usize> = (lo..=hi).step_by(BLOCK).collect();
    starts
        .par_iter()
        .map(|&s| {
            let e = (s + BLOCK - 1).min(hi);
            let mut acc = T::zero();
            for n in s..=e {
                let a = table[n];
                if a != 0 {
                    acc += T::from_u16(a).unwrap() * weight(n, four_y);
                }
            }
            acc
        })
        .collect()
}

fn check_y<T: Real>(y: T) -> Result<()> {
    if !(y > T::zero()) || !y.is_finite() {
        return Err(Error::InvalidParameter(format!("y must be positive, got {y}")));
    }
    Ok(())
}

/// Upper estimate for `(2√(πy))^{-1} Σ_{n > N} d(n) e^{-(ln n)²/4y}` via
/// `∫_{ln N}^∞ (v + 2) e^{v - v²/4y} dv`.
fn tail_estimate<T: Real>(y: T, n_cap: u64) -> T {
    let two = T::lit(2.0);
    let v = T::from_u64_lossy(n_cap).ln();
    let z = (v - two * y) / (two * y.sqrt());
    let sqrt_pi_y = (T::PI() * y).sqrt();
    let erfc = T::lit(libm::erfc(z.to_f64().unwrap()));
    let integral = y.exp() * (two * y * (-(z * z)).exp() + (two * y + two) * sqrt_pi_y * erfc);
    integral / (two * sqrt_pi_y)
}

pub fn gaussian_weighted_sum<T: Real>(series: &CoefficientSeries, y: T, n_cap: Option<u64>) -> Result<GaussianSum<T>> {
    check_y(y)?;
    let n_cap = n_cap.unwrap_or_else(|| default_cap(y.to_f64().unwrap()));
    let table = series.table(n_cap);
    gaussian_from_table(series.disc(), &table, y, n_cap)
}

fn gaussian_from_table<T: Real>(disc: i64, table: &[u16], y: T, n_cap: u64) -> Result<GaussianSum<T>> {
    let four_y = T::lit(4.0) * y;
    let sum: T = block_sums(table, 1, n_cap as usize, four_y).into_iter().fold(T::zero(), |a, b| a + b);
    let last = (1..=n_cap as usize).rev().find(|&n| table[n] != 0).unwrap_or(1);
    let last_term = T::from_u16(table[last]).unwrap() * weight(last, four_y);
    if last > 1 && last_term > T::lit(LAST_TERM_RATIO) * sum {
        return Err(Error::CapTooSmall {
            last: last_term.to_f64().unwrap_or(f64::NAN),
            total: sum.to_f64().unwrap_or(f64::NAN),
        });
    }
    let norm = T::one() / (T::lit(2.0) * (T::PI() * y).sqrt());
    Ok(GaussianSum {
        disc,
        y,
        n_cap,
        value: sum * norm,
        tail_bound: tail_estimate(y, n_cap),
        last_term: last_term * norm,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowMass<T> {
    pub eta: T,
    /// `n <= e^{(2-η)y}`.
    pub low: T,
    /// `e^{(2-η)y} < n <= e^{(2+η)y}`.
    pub core: T,
    /// `n > e^{(2+η)y}`, up to the cap.
    pub high: T,
    pub total: T,
    pub n_cap: u64,
}

/// Splits the Gaussian sum at `e^{(2 ± η)y}` with `η = δ^{1/3}`.
pub fn window_mass<T: Real>(series: &CoefficientSeries, y: T, delta: T, n_cap: Option<u64>) -> Result<WindowMass<T>> {
    check_y(y)?;
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidParameter(format!("δ must lie in (0, 1), got {delta}")));
    }
    let eta = delta.cbrt();
    let two = T::lit(2.0);
    let n_cap = n_cap.unwrap_or_else(|| default_cap(y.to_f64().unwrap()));
    let table = series.table(n_cap);
    let total = gaussian_from_table(series.disc(), &table, y, n_cap)?.value;
    let edge = |x: T| x.exp().floor().to_u64().unwrap_or(u64::MAX).min(n_cap) as usize;
    let lo_edge = edge((two - eta) * y);
    let hi_edge = edge((two + eta) * y);
    let four_y = T::lit(4.0) * y;
    let norm = T::one() / (two * (T::PI() * y).sqrt());
    let part = |a: usize, b: usize| -> T {
        if b < a {
            return T::zero();
        }
        block_sums(&table, a, b, four_y).into_iter().fold(T::zero(), |x, y| x + y) * norm
    };
    Ok(WindowMass {
        eta,
        low: part(1, lo_edge),
        core: part(lo_edge + 1, hi_edge),
        high: part(hi_edge + 1, n_cap as usize),
        total,
        n_cap,
    })
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and its difference from the embedded Gauss rule.
fn gk15<T: Real, F: Fn(T) -> Result<T>>(f: &F, a: T, b: T) -> Result<(T, T)> {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid)?;
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let s = f(mid - dx)? + f(mid + dx)?;
        kron += s * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss += s * T::lit(WG[i / 2]);
        }
    }
    Ok((kron * half, (kron - gauss).abs() * half))
}

/// Adaptive bisection of one panel; panels are consumed in order so the
/// result is deterministic.
fn adaptive<T: Real, F: Fn(T) -> Result<T>>(
    f: &F,
    a: T,
    b: T,
    tol: T,
    budget: &AtomicUsize,
) -> Result<(T, T)> {
    let mut stack = vec![(a, b, tol)];
    let mut total = T::zero();
    let mut err = T::zero();
    while let Some((lo, hi, t)) = stack.pop() {
        if budget.fetch_sub(1, Ordering::Relaxed) == 0 {
            return Err(Error::QuadratureBudget(0));
        }
        let (v, e) = gk15(f, lo, hi)?;
        if e <= t || (hi - lo) < T::epsilon() * T::lit(64.0) * hi.abs().max(T::one()) {
            total += v;
            err += e;
        } else {
            let mid = (lo + hi) * T::lit(0.5);
            let half = t * T::lit(0.5);
            stack.push((mid, hi, half));
            stack.push((lo, mid, half));
        }
    }
    Ok((total, err))
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourIntegral<T> {
    pub disc: i64,
    pub y: T,
    pub height: T,
    pub value_re: T,
    pub value_im: T,
    pub error_estimate: T,
    pub panels: usize,
}

/// Largest number of Gauss-Kronrod panels for one contour integral.
pub const QUADRATURE_BUDGET: usize = 200_000;
/// Primes up to this bound enter the correction factors `E_p`.
pub const EULER_LIMIT: u64 = 10_000;

/// `(2πi)^{-1} ∫_{2-iT}^{2+iT} F(s) e^{s² y} ds` with `F(s) = Σ a(n) n^{-s}`.
///
/// The coefficients are real, so the integral equals
/// `π^{-1} ∫_0^T Re[F(2+it) e^{(2+it)² y}] dt`. The default height makes the
/// discarded tail `e^{(4-T²)y}` smaller than `e^{-30}`. `tol` is relative to
/// the integrand at `t = 0`.
pub fn contour_integral_gaussian<T: Real>(
    series: &CoefficientSeries,
    y: T,
    height: Option<T>,
    tol: T,
) -> Result<ContourIntegral<T>> {
    check_y(y)?;
    let height = height.unwrap_or_else(|| (T::lit(4.0) + T::lit(30.0) / y).sqrt());
    let product: SeriesProduct<T> = series.product(EULER_LIMIT, tol * T::lit(1e-2))?;
    let two = T::lit(2.0);
    let integrand = |t: T| -> Result<T> {
        let s = Complex::new(two, t);
        let f = series.dirichlet_series(s, &product)?;
        Ok((f * (s * s * y).exp()).re)
    };
    let panels = 32usize;
    let width = height / T::from_usize(panels).unwrap();
    let budget = AtomicUsize::new(QUADRATURE_BUDGET);
    // `tol` is relative to the integrand's size at t = 0.
    let scale = integrand(T::zero())?.abs().max(T::min_positive_value());
    let panel_tol = tol * scale * height / T::from_usize(panels).unwrap();
    let parts: Vec<(T, T)> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = width * T::from_usize(i).unwrap();
            let b = if i + 1 == panels { height } else { a + width };
            adaptive(&integrand, a, b, panel_tol, &budget)
        })
        .collect::<Result<_>>()
        .map_err(|e| match e {
            Error::QuadratureBudget(_) => Error::QuadratureBudget(QUADRATURE_BUDGET),
            e => e,
        })?;
    let (sum, err) = parts.into_iter().fold((T::zero(), T::zero()), |(s, e), (v, d)| (s + v, e + d));
    Ok(ContourIntegral {
        disc: series.disc(),
        y,
        height,
        value_re: sum / T::PI(),
        value_im: T::zero(),
        error_estimate: err / T::PI(),
        panels: QUADRATURE_BUDGET - budget.load(Ordering::Relaxed),
    })
}
