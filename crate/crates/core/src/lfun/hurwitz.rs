//! Hurwitz zeta combinations by Euler-Maclaurin summation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `B_{2j} / (2j)!` for `j = 1..=30`.
const BERNOULLI_OVER_FACTORIAL: [f64; 30] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_768e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_7e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_2e-19,
    3.534_707_039_629_467e-21,
    -8.953_517_427_037_546e-23,
    2.267_952_452_337_683e-24,
    -5.744_790_668_872_202e-26,
    1.455_172_475_614_865e-27,
    -3.685_994_940_665_310_3e-29,
    9.336_734_257_095_045e-31,
    -2.365_022_415_700_63e-32,
    5.990_671_762_482_134e-34,
    -1.517_454_884_468_290_3e-35,
    3.843_758_125_454_189e-37,
    -9.736_353_072_646_691e-39,
    2.466_247_044_200_681e-40,
    -6.247_076_741_820_743e-42,
    1.582_403_024_464_491_4e-43,
    -4.008_273_685_948_936e-45,
    1.015_307_585_556_955_7e-46,
    -2.571_804_158_241_871_7e-48,
];

/// Largest Euler-Maclaurin correction order tried.
pub const MAX_ORDER: usize = 30;

/// Truncation parameters actually used by one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct EvalInfo {
    /// Number of directly summed terms per Hurwitz shift.
    pub direct_terms: usize,
    /// Largest Euler-Maclaurin order needed over all shifts.
    pub em_order: usize,
}

/// Direct-sum length for a given `|s|`; keeps successive correction terms
/// shrinking by at least a factor of four up to `MAX_ORDER`.
pub fn direct_terms<T: Real>(s: Complex<T>) -> usize {
    let bound = (s.norm() + T::lit(2.0 * MAX_ORDER as f64)) / T::PI();
    bound.ceil().to_usize().unwrap_or(usize::MAX).max(10)
}

/// `(e^z - 1)/z`.
fn exprel<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(0.5) {
        let mut term = Complex::new(T::one(), T::zero());
        let mut acc = term;
        for k in 1..30 {
            term = term * z / T::lit((k + 1) as f64);
            acc += term;
        }
        acc
    } else {
        (z.exp() - T::one()) / z
    }
}

/// Derivative of `exprel`: `(z e^z - e^z + 1)/z²`.
fn exprel_prime<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(0.5) {
        // Σ (k+1) z^k / (k+2)!
        let mut power = Complex::new(T::one(), T::zero());
        let mut fact = T::lit(2.0);
        let mut acc = power / fact;
        for k in 1..30 {
            power *= z;
            fact *= T::lit((k + 2) as f64);
            acc += power * T::lit((k + 1) as f64) / fact;
        }
        acc
    } else {
        let e = z.exp();
        (z * e - e + T::one()) / (z * z)
    }
}

/// How the `s = 1` pole of `Σ_a c_a ζ(s, a)` is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pole {
    /// `Σ_a c_a = 0`: the pole terms cancel and are combined through
    /// `exprel`, so `s = 1` is regular.
    Cancelled,
    /// Plain sum; `s = 1` is an error.
    Present,
    /// Returns `(s - 1) Σ_a c_a ζ(s, a)`, which is entire.
    Removed,
}

/// `Σ_a c_a ζ(s, a)` (or `(s-1)` times it, see [`Pole`]) and its
/// `s`-derivative.
pub fn hurwitz_combination<T: Real>(
    terms: &[(T, Complex<T>)],
    pole: Pole,
    s: Complex<T>,
    tol: T,
    want_derivative: bool,
) -> Result<(Complex<T>, Complex<T>, EvalInfo)> {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    if pole == Pole::Present && (s - one).norm() == T::zero() {
        return Err(Error::PoleAtOne);
    }
    let n = direct_terms(s);
    let weight: T = terms.iter().map(|(_, c)| c.norm()).sum();
    let threshold = tol / (T::lit(10.0) * weight.max(T::one()));
    let half = T::lit(0.5);
    let mut value = zero;
    let mut deriv = zero;
    let mut em_order = 0;

    for &(a, c) in terms {
        // Everything except the X^{1-s}/(s-1) term.
        let mut part = zero;
        let mut dpart = zero;
        for k in 0..n {
            let x = T::lit(k as f64) + a;
            let lx = x.ln();
            let p = (-s * lx).exp();
            part += p;
            if want_derivative {
                dpart -= p * lx;
            }
        }
        let x = T::lit(n as f64) + a;
        let lx = x.ln();
        let x_ms = (-s * lx).exp();
        part += x_ms * half;
        if want_derivative {
            dpart -= x_ms * (lx * half);
        }
        // Correction terms B_{2j}/(2j)! · s(s+1)…(s+2j-2) · X^{-s-2j+1}.
        let inv_x2 = T::one() / (x * x);
        let mut rising = s;
        let mut d_rising = one;
        let mut w = x_ms / x;
        let mut converged = false;
        for j in 1..=MAX_ORDER {
            let b = T::lit(BERNOULLI_OVER_FACTORIAL[j - 1]);
            let term = rising * w * b;
            part += term;
            let mut small = term.norm() < threshold;
            if want_derivative {
                let dterm = (d_rising - rising * lx) * w * b;
                dpart += dterm;
                small = small && dterm.norm() < threshold;
            }
            if small {
                em_order = em_order.max(j);
                converged = true;
                break;
            }
            let f1 = s + T::lit((2 * j - 1) as f64);
            let f2 = s + T::lit((2 * j) as f64);
            d_rising = d_rising * f1 * f2 + rising * (f1 + f2);
            rising = rising * f1 * f2;
            w *= inv_x2;
        }
        if !converged {
            return Err(Error::PrecisionBudgetExceeded(format!(
                "Euler-Maclaurin did not reach tol {tol} at s = {s}"
            )));
        }
        let x_1ms = x_ms * x;
        match pole {
            Pole::Cancelled => {
                // X^{1-s}/(s-1) = -ln X · exprel((1-s) ln X) - 1/(s-1);
                // the second piece sums to zero over the coefficients.
                let z = (one - s) * lx;
                part -= exprel(z) * lx;
                if want_derivative {
                    dpart += exprel_prime(z) * (lx * lx);
                }
            }
            Pole::Present => {
                let g = x_1ms / (s - one);
                part += g;
                if want_derivative {
                    dpart -= g * lx + g / (s - one);
                }
            }
            Pole::Removed => {
                let sm1 = s - one;
                let new_d = part + dpart * sm1 - x_1ms * lx;
                part = part * sm1 + x_1ms;
                dpart = new_d;
            }
        }
        value += part * c;
        deriv += dpart * c;
    }
    Ok((value, deriv, EvalInfo { direct_terms: n, em_order }))
}
