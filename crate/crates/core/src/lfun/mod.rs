//! Dirichlet L-functions: evaluation, sup norms on rectangles, zero scanning
//! and zero-free disc certification near `s = 1`.

mod certify;
pub mod hurwitz;
mod scan;
mod supnorm;

use num_complex::Complex;
use serde::Serialize;

use crate::arith::{factorize, von_mangoldt_table};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use certify::{
    certify_zero_free, pair_exclusion, CertifyParams, HypothesisFlags, PairExclusionReport,
    SquareHypothesis, Verdict, Violation, ZeroFreeCertificate,
};
use hurwitz::{hurwitz_combination, Pole};
pub use hurwitz::EvalInfo;
pub use scan::{scan_zeros, Rect, ScanOptions, Zero, ZeroScanReport};
pub use supnorm::{sup_norm, SupNormReport};

/// Default absolute tolerance for evaluations.
pub const DEFAULT_TOL: f64 = 1e-12;

/// `L(s, χ)` prepared for repeated evaluation.
///
/// Internally the primitive character `χ*` of conductor `f` is evaluated as
/// `f^{-s} Σ_a χ*(a) ζ(s, a/f)` and multiplied by the missing Euler factors
/// `1 - χ*(p) p^{-s}` for primes `p | q` not dividing `f`.
#[derive(Clone, Debug)]
pub struct LFunction<T: Real> {
    modulus: u64,
    index: u64,
    principal: bool,
    real: bool,
    terms: Vec<(T, Complex<T>)>,
    log_conductor: T,
    euler: Vec<(T, Complex<T>)>,
    tol: T,
}

impl<T: Real> LFunction<T> {
    pub fn new(chi: &DirichletCharacter, tol: T) -> Result<Self> {
        let (prim, f) = chi.primitivize();
        let mut lf = Self::from_modulus_terms(&prim, tol)?;
        lf.modulus = chi.modulus();
        lf.index = chi.index();
        if f != chi.modulus() {
            for p in factorize(chi.modulus())?.primes() {
                if f % p != 0 {
                    lf.euler.push((T::from_u64_lossy(p).ln(), prim.eval_complex(p as i64)));
                }
            }
        }
        Ok(lf)
    }

    /// Uses `χ` as given, summing Hurwitz terms over its full modulus with no
    /// Euler correction. Valid for imprimitive characters too; slower.
    pub fn unreduced(chi: &DirichletCharacter, tol: T) -> Result<Self> {
        Self::from_modulus_terms(chi, tol)
    }

    fn from_modulus_terms(chi: &DirichletCharacter, tol: T) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        let q = chi.modulus();
        let qt = T::from_u64_lossy(q);
        let table = chi.complex_table::<T>();
        let terms = (1..=q)
            .filter_map(|a| {
                let c = table[(a % q) as usize];
                (c.norm() > T::zero()).then(|| (T::from_u64_lossy(a) / qt, c))
            })
            .collect();
        Ok(LFunction {
            modulus: q,
            index: chi.index(),
            principal: chi.is_principal(),
            real: chi.is_real(),
            terms,
            log_conductor: qt.ln(),
            euler: Vec::new(),
            tol,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// True when `L(s, χ)` is real on the real axis.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    fn check_domain(s: Complex<T>) -> Result<()> {
        if !(s.re > -T::one()) || !s.im.is_finite() {
            return Err(Error::InvalidParameter(format!("Re(s) must exceed -1, got s = {s}")));
        }
        Ok(())
    }

    fn eval_mode(
        &self,
        s: Complex<T>,
        remove_pole: bool,
        want_derivative: bool,
    ) -> Result<(Complex<T>, Complex<T>, EvalInfo)> {
        Self::check_domain(s)?;
        let pole = match (self.principal, remove_pole) {
            (false, _) => Pole::Cancelled,
            (true, false) => Pole::Present,
            (true, true) => Pole::Removed,
        };
        let one = Complex::new(T::one(), T::zero());
        // The Euler factors have modulus at most 2 each; leave room for them
        // and for the f^{-s} scaling.
        let budget = self.tol * (self.log_conductor * s.re).exp()
            / T::lit(2f64.powi(self.euler.len() as i32));
        let (h, dh, info) = hurwitz_combination(&self.terms, pole, s, budget, want_derivative)?;
        let scale = (-s * self.log_conductor).exp();
        let mut value = h * scale;
        let mut deriv = (dh - h * self.log_conductor) * scale;
        if !self.euler.is_empty() {
            let (mut e, mut de) = (one, Complex::new(T::zero(), T::zero()));
            for &(lp, c) in &self.euler {
                let x = (-s * lp).exp() * c;
                let factor = one - x;
                de = de * factor + e * x * lp;
                e *= factor;
            }
            deriv = deriv * e + value * de;
            value *= e;
        }
        Ok((value, deriv, info))
    }

    pub fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval_mode(s, false, false)?.0)
    }

    /// `L(s)`, `L'(s)` and the truncation parameters used.
    pub fn eval_with_derivative(&self, s: Complex<T>) -> Result<(Complex<T>, Complex<T>, EvalInfo)> {
        self.eval_mode(s, false, true)
    }

    pub fn log_derivative(&self, s: Complex<T>) -> Result<Complex<T>> {
        let (v, d, _) = self.eval_mode(s, false, true)?;
        if v.norm() < T::lit(10.0) * self.tol {
            return Err(Error::NearZeroOrPole(v.norm().to_f64().unwrap_or(0.0)));
        }
        Ok(d / v)
    }

    /// An entire function with the same zeros as `L(s)`: `(s-1) L(s)` for
    /// principal characters and `L(s)` otherwise. Returns the value and
    /// derivative.
    pub fn entire_part(&self, s: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        let (v, d, _) = self.eval_mode(s, true, true)?;
        Ok((v, d))
    }

    pub(crate) fn entire_value(&self, s: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval_mode(s, true, false)?.0)
    }
}

/// `L(s, χ)` to absolute accuracy `tol`.
pub fn evaluate_l<T: Real>(chi: &DirichletCharacter, s: Complex<T>, tol: T) -> Result<Complex<T>> {
    LFunction::new(chi, tol)?.eval(s)
}

/// `L'(s, χ) / L(s, χ)`.
pub fn log_derivative<T: Real>(chi: &DirichletCharacter, s: Complex<T>, tol: T) -> Result<Complex<T>> {
    LFunction::new(chi, tol)?.log_derivative(s)
}

/// Truncation of `Σ Λ(n) n^{-σ₀} (3 χ₀(n) + 4 Re χ(n) n^{-it} + Re χ²(n) n^{-2it})`
/// over `n <= n_max`, with `χ₀` the principal character of the same modulus.
pub fn three_four_one_partial<T: Real>(chi: &DirichletCharacter, sigma0: T, t: T, n_max: u64) -> Result<T> {
    if !(sigma0 > T::one()) {
        return Err(Error::InvalidParameter(format!("σ₀ must exceed 1, got {sigma0}")));
    }
    let lambda = von_mangoldt_table(n_max as usize);
    let m = chi.order();
    let two_pi = T::PI() + T::PI();
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let mut acc = T::zero();
    for n in 2..=n_max {
        let l = lambda[n as usize];
        if l == 0.0 {
            continue;
        }
        let Some(e) = chi.exponent(n) else { continue };
        let ln = T::from_u64_lossy(n).ln();
        let phase = two_pi * T::from_u64_lossy(e) / T::from_u64_lossy(m) - t * ln;
        let weight = T::lit(l) * (-sigma0 * ln).exp();
        acc += weight * (three + four * phase.cos() + (phase + phase).cos());
    }
    Ok(acc)
}

/// Identifies a character in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterId {
    pub modulus: u64,
    pub index: u64,
}

impl CharacterId {
    pub fn of(chi: &DirichletCharacter) -> Self {
        CharacterId { modulus: chi.modulus(), index: chi.index() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn l_one_minus_four_is_quarter_pi() {
        let chi = DirichletCharacter::attach_quadratic(-4).unwrap();
        // Leibniz partial sums, averaged over two consecutive truncations.
        let mut s = 0.0;
        let mut prev = 0.0;
        for k in 0..2_000_000u64 {
            prev = s;
            let term = 1.0 / (2 * k + 1) as f64;
            s += if k % 2 == 0 { term } else { -term };
        }
        let leibniz = 0.5 * (s + prev);
        let v = evaluate_l(&chi, c(1.0, 0.0), 1e-13).unwrap();
        assert!((v.re - leibniz).abs() < 1e-10, "{v} vs {leibniz}");
        assert!((v.re - PI / 4.0).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn zeta_values() {
        let zeta = DirichletCharacter::principal(1).unwrap();
        // Direct sum to 10^6 plus the Euler-Maclaurin tail 1/N - 1/(2N²).
        let n = 1_000_000u64;
        let direct: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let oracle = direct + 1.0 / n as f64 - 0.5 / (n as f64 * n as f64);
        let z2 = evaluate_l(&zeta, c(2.0, 0.0), 1e-14).unwrap();
        assert!((z2.re - oracle).abs() < 1e-12);
        assert!((z2.re - 1.644_934_066_8).abs() < 1e-10);
        let z0 = evaluate_l(&zeta, c(0.0, 0.0), 1e-14).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-13);
        assert!(matches!(evaluate_l(&zeta, c(1.0, 0.0), 1e-12), Err(Error::PoleAtOne)));
    }

    #[test]
    fn zeta_log_derivative_matches_von_mangoldt_sum() {
        let zeta = DirichletCharacter::principal(1).unwrap();
        let n = 1_000_000;
        let lambda = von_mangoldt_table(n);
        let direct: f64 = (2..=n).map(|k| lambda[k] / (k as f64 * k as f64)).sum();
        let v = -log_derivative(&zeta, c(2.0, 0.0), 1e-13).unwrap();
        // Tail Σ_{n>N} Λ(n)/n² ≈ 1/N.
        assert!((v.re - direct - 1.0 / n as f64).abs() < 1e-7, "{v} vs {direct}");
        assert!((v.re - 0.5699).abs() < 1e-4);

        let near = -log_derivative(&zeta, c(1.001, 0.0), 1e-13).unwrap();
        assert!((near.re - 1000.0).abs() < 10.0, "{near}");
    }

    #[test]
    fn conjugation_symmetry() {
        for chi in DirichletCharacter::enumerate(13, None).unwrap().iter().skip(1) {
            let s = c(0.63, 2.7);
            let a = evaluate_l(chi, s, 1e-12).unwrap();
            let b = evaluate_l(&chi.conj(), s.conj(), 1e-12).unwrap();
            assert!((a - b.conj()).norm() < 1e-11);
            let la = log_derivative(chi, s, 1e-12).unwrap();
            let lb = log_derivative(&chi.conj(), s.conj(), 1e-12).unwrap();
            assert!((la - lb.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn euler_correction_matches_unreduced_sum() {
        for q in [12u64, 30, 45] {
            for chi in DirichletCharacter::enumerate(q, None).unwrap() {
                if chi.is_primitive() || chi.is_principal() {
                    continue;
                }
                let fast = LFunction::<f64>::new(&chi, 1e-12).unwrap();
                let slow = LFunction::<f64>::unreduced(&chi, 1e-12).unwrap();
                for s in [c(0.5, 1.0), c(1.0, 0.0), c(2.0, -3.0)] {
                    let a = fast.eval(s).unwrap();
                    let b = slow.eval(s).unwrap();
                    assert!((a - b).norm() < 1e-10, "q={q} idx={} s={s}: {a} vs {b}", chi.index());
                }
            }
        }
    }

    #[test]
    fn derivative_of_reduced_matches_finite_difference() {
        let chi = DirichletCharacter::from_index(15, 3).unwrap();
        let lf = LFunction::<f64>::new(&chi, 1e-13).unwrap();
        let s = c(0.8, 0.4);
        let (_, d, _) = lf.eval_with_derivative(s).unwrap();
        let h = 1e-5;
        let fd = (lf.eval(s + h).unwrap() - lf.eval(s - h).unwrap()) / (2.0 * h);
        assert!((d - fd).norm() < 1e-7);
    }

    #[test]
    fn single_precision_evaluation() {
        let chi = DirichletCharacter::attach_quadratic(-4).unwrap();
        let v = evaluate_l::<f32>(&chi, Complex::new(1.0, 0.0), 1e-5).unwrap();
        assert!((v.re - std::f32::consts::FRAC_PI_4).abs() < 1e-5);
    }

    #[test]
    fn three_four_one_cases() {
        let chi0 = DirichletCharacter::principal(10).unwrap();
        let v: f64 = three_four_one_partial(&chi0, 1.2, 0.0, 1000).unwrap();
        let lambda = von_mangoldt_table(1000);
        let direct: f64 = (2..=1000u64)
            .filter(|n| n % 2 != 0 && n % 5 != 0)
            .map(|n| lambda[n as usize] * (n as f64).powf(-1.2))
            .sum();
        assert!((v - 8.0 * direct).abs() < 1e-10);
        let chi = DirichletCharacter::from_index(7, 2).unwrap();
        assert_eq!(three_four_one_partial(&chi, 1.1, 0.3, 1).unwrap(), 0.0);
        assert!(three_four_one_partial(&chi, 1.1, 0.3, 500).unwrap() >= 0.0);
        assert!(three_four_one_partial(&chi, 1.0, 0.3, 500).is_err());
    }
}
