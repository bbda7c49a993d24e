//! Exact values of Dirichlet characters: zero or a root of unity, plus an
//! exact accumulator for sums of roots of unity.

use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// `0` or `exp(2πi·num/den)` with `0 <= num < den` and `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnityValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl UnityValue {
    pub const ONE: UnityValue = UnityValue::Root { num: 0, den: 1 };
    pub const MINUS_ONE: UnityValue = UnityValue::Root { num: 1, den: 2 };

    /// `exp(2πi·num/den)`, reduced.
    pub fn root(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        if num == 0 {
            return Self::ONE;
        }
        let g = num.gcd(&den);
        UnityValue::Root { num: num / g, den: den / g }
    }

    pub fn from_sign(sign: i32) -> Self {
        match sign.signum() {
            0 => UnityValue::Zero,
            1 => Self::ONE,
            _ => Self::MINUS_ONE,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, UnityValue::Zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// Multiplicative order of the root (`None` for zero).
    pub fn order(&self) -> Option<u64> {
        match *self {
            UnityValue::Zero => None,
            UnityValue::Root { den, .. } => Some(den),
        }
    }

    pub fn conj(self) -> Self {
        match self {
            UnityValue::Zero => UnityValue::Zero,
            UnityValue::Root { num, den } => Self::root(den - num, den),
        }
    }

    pub fn pow(self, k: u64) -> Self {
        match self {
            UnityValue::Zero if k == 0 => Self::ONE,
            UnityValue::Zero => UnityValue::Zero,
            UnityValue::Root { num, den } => {
                Self::root(((num as u128 * k as u128) % den as u128) as u64, den)
            }
        }
    }

    /// `Some(-1 | 0 | 1)` when the value is real.
    pub fn as_sign(&self) -> Option<i32> {
        match *self {
            UnityValue::Zero => Some(0),
            UnityValue::Root { den: 1, .. } => Some(1),
            UnityValue::Root { den: 2, .. } => Some(-1),
            _ => None,
        }
    }

    /// Exponent of the value as a multiple of `1/m`, when `den | m`.
    pub fn exponent_over(&self, m: u64) -> Option<u64> {
        match *self {
            UnityValue::Zero => None,
            UnityValue::Root { num, den } => {
                assert!(m.is_multiple_of(den), "root of order {den} is not an {m}-th root");
                Some(num * (m / den))
            }
        }
    }

    pub fn to_complex<T: Real>(&self) -> Complex<T> {
        match *self {
            UnityValue::Zero => Complex::new(T::zero(), T::zero()),
            UnityValue::Root { num, den } => root_of_unity(num, den),
        }
    }
}

impl Mul for UnityValue {
    type Output = UnityValue;

    fn mul(self, rhs: UnityValue) -> UnityValue {
        match (self, rhs) {
            (UnityValue::Root { num: a, den: b }, UnityValue::Root { num: c, den: d }) => {
                let l = b.lcm(&d);
                let n = (a as u128 * (l / b) as u128 + c as u128 * (l / d) as u128) % l as u128;
                UnityValue::root(n as u64, l)
            }
            _ => UnityValue::Zero,
        }
    }
}

impl fmt::Display for UnityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnityValue::Zero => write!(f, "0"),
            UnityValue::Root { num: 0, .. } => write!(f, "1"),
            UnityValue::Root { num, den } => write!(f, "e({num}/{den})"),
        }
    }
}

/// `exp(2πi·num/den)` with the angle reduced to the first octant-ish range
/// before calling trig, so that ±1, ±i come out exact.
pub fn root_of_unity<T: Real>(num: u64, den: u64) -> Complex<T> {
    let num = num % den;
    // Exact quarter turns.
    if (4 * num as u128).is_multiple_of(den as u128) {
        return match (4 * num as u128 / den as u128) % 4 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    // Symmetric angle in (-π, π].
    let signed = if 2 * num > den { num as f64 - den as f64 } else { num as f64 };
    let angle = T::lit(2.0 * std::f64::consts::PI * signed / den as f64);
    Complex::new(angle.cos(), angle.sin())
}

/// Exact element `Σ counts[c]·ζ_m^c` of `Z[ζ_m]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicSum {
    order: u64,
    counts: Vec<i64>,
}

impl CyclotomicSum {
    pub fn new(order: u64) -> Self {
        assert!(order >= 1);
        CyclotomicSum { order, counts: vec![0; order as usize] }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    #[inline]
    pub fn add_exponent(&mut self, exponent: u64, times: i64) {
        self.counts[exponent as usize] += times;
    }

    pub fn add(&mut self, value: UnityValue) {
        if let Some(e) = value.exponent_over(self.order) {
            self.add_exponent(e, 1);
        }
    }

    pub fn add_scaled(&mut self, other: &CyclotomicSum, times: i64) {
        assert_eq!(self.order, other.order);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b * times;
        }
    }

    /// Exact zero test: reduce the exponent polynomial modulo `Φ_m`.
    pub fn is_zero(&self) -> bool {
        if self.counts.iter().all(|&c| c == 0) {
            return true;
        }
        let phi = cyclotomic_polynomial(self.order);
        let mut rem: Vec<i128> = self.counts.iter().map(|&c| c as i128).collect();
        let deg = phi.len() - 1;
        // Φ_m is monic, so long division stays integral.
        for i in (deg..rem.len()).rev() {
            let lead = rem[i];
            if lead == 0 {
                continue;
            }
            for (j, &c) in phi.iter().enumerate() {
                rem[i - deg + j] -= lead * c as i128;
            }
        }
        rem.iter().all(|&c| c == 0)
    }

    pub fn to_complex<T: Real>(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                acc += root_of_unity::<T>(e as u64, self.order) * T::lit(c as f64);
            }
        }
        acc
    }
}

/// Coefficients (constant term first) of the `m`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut poly = vec![0i64; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            poly = exact_divide(&poly, &cyclotomic_polynomial(d));
        }
    }
    cache.lock().unwrap().insert(m, poly.clone());
    poly
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}
