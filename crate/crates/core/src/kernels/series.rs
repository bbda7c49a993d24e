//! Coefficients `a(n) = μ²(n) Π_{p | n} (χ₀(p) + χ(p))` of a quadratic field.

use num_complex::Complex;

use crate::arith::{factorize, kronecker, primes_up_to};
use crate::characters::DirichletCharacter;
use crate::error::Result;
use crate::lfun::LFunction;
use crate::scalar::Real;

/// Squarefree ideal counts of the quadratic field of discriminant `disc`.
///
/// `a(n)` is the number of ideals of norm `n` when `n` is squarefree and
/// prime to the discriminant, and zero otherwise.
#[derive(Clone, Debug)]
pub struct CoefficientSeries {
    disc: i64,
    chi: DirichletCharacter,
}

impl CoefficientSeries {
    pub fn new(disc: i64) -> Result<Self> {
        let chi = DirichletCharacter::attach_quadratic(disc)?;
        Ok(CoefficientSeries { disc, chi })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    /// Local factor `χ₀(p) + χ(p)`.
    fn local(&self, p: u64) -> u32 {
        (kronecker(self.disc, p as i64) + 1) as u32 * u32::from(self.disc % p as i64 != 0)
    }

    pub fn a(&self, n: u64) -> u32 {
        if n == 0 {
            return 0;
        }
        let f = factorize(n).expect("u64 factorization");
        f.factors()
            .iter()
            .map(|&(p, e)| if e > 1 { 0 } else { self.local(p) })
            .product()
    }

    /// `a(0), a(1), …, a(limit)` by sieving.
    pub fn table(&self, limit: u64) -> Vec<u16> {
        let n = limit as usize;
        let mut a = vec![1u16; n + 1];
        a[0] = 0;
        for p in primes_up_to(limit) {
            let p = p as usize;
            let f = self.local(p as u64) as u16;
            if f != 1 {
                for m in (p..=n).step_by(p) {
                    a[m] *= f;
                }
            }
            if let Some(p2) = p.checked_mul(p).filter(|&p2| p2 <= n) {
                for m in (p2..=n).step_by(p2) {
                    a[m] = 0;
                }
            }
        }
        a
    }

    /// `Σ a(n) n^{-s}` for `Re(s) > 1`, as `L(s, χ₀) L(s, χ) Π_p E_p(s)` with
    /// the correction factors `E_p` taken over `p <= euler_limit`.
    pub fn dirichlet_series<T: Real>(&self, s: Complex<T>, euler: &SeriesProduct<T>) -> Result<Complex<T>> {
        let mut v = euler.principal.eval(s)? * euler.quadratic.eval(s)?;
        let one = Complex::new(T::one(), T::zero());
        for &(lp, split) in &euler.primes {
            let x = (-s * lp).exp();
            let x2 = x * x;
            v *= if split { one - x2 * T::lit(3.0) + x2 * x * T::lit(2.0) } else { one - x2 };
        }
        Ok(v)
    }

    pub fn product<T: Real>(&self, euler_limit: u64, tol: T) -> Result<SeriesProduct<T>> {
        let principal = LFunction::new(&DirichletCharacter::principal(self.chi.modulus())?, tol)?;
        let quadratic = LFunction::new(&self.chi, tol)?;
        let primes = primes_up_to(euler_limit)
            .into_iter()
            .filter(|&p| self.disc % p as i64 != 0)
            .map(|p| (T::from_u64_lossy(p).ln(), kronecker(self.disc, p as i64) == 1))
            .collect();
        Ok(SeriesProduct { principal, quadratic, primes })
    }
}

/// Prepared pieces of the L-product for [`CoefficientSeries::dirichlet_series`].
#[derive(Clone, Debug)]
pub struct SeriesProduct<T: Real> {
    principal: LFunction<T>,
    quadratic: LFunction<T>,
    /// `(ln p, split)` for unramified `p` up to the Euler limit.
    primes: Vec<(T, bool)>,
}
