//! The kernel
//! `f(s) = [(1-δ) y^{s-1} - (2-δ) y^{(1-δ)(s-1)} + y^{(1-δ)²(s-1)}] / (s-1)²`,
//! the prime sum it transforms into, and the zero-side sum.

use num_complex::Complex;
use serde::Serialize;

use crate::arith::{for_each_prime_in, is_prime};
use crate::characters::{root_of_unity, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lfun::Zero;
use crate::scalar::Real;

fn check_kernel_params<T: Real>(y: T, delta: T) -> Result<()> {
    if !(y > T::one()) || !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidParameter(format!("need y > 1 and 0 < δ < 1, got y = {y}, δ = {delta}")));
    }
    Ok(())
}

/// `½ δ² (1-δ)(2-δ)`, the value of `f(1) / (ln y)²`.
pub fn kernel_constant<T: Real>(delta: T) -> T {
    let one = T::one();
    T::lit(0.5) * delta * delta * (one - delta) * (one + one - delta)
}

/// `f(s)`; near `s = 1` the removable singularity is evaluated by its Taylor
/// series in `u = (s-1) ln y`, so `f(1) = ½δ²(1-δ)(2-δ)(ln y)²`.
pub fn cubic_kernel_f<T: Real>(s: Complex<T>, y: T, delta: T) -> Result<Complex<T>> {
    check_kernel_params(y, delta)?;
    let one = T::one();
    let a = one - delta;
    let ly = y.ln();
    let u = (s - one) * ly;
    if u.norm() < T::lit(0.5) {
        // f = (ln y)² Σ_{k≥2} c_k u^{k-2} / k!, c_k = a - (1+a)a^k + a^{2k}.
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut upow = Complex::new(one, T::zero());
        let mut fact = T::lit(2.0);
        let mut ak = a * a;
        for k in 2..40 {
            let c = a - (one + a) * ak + ak * ak;
            acc += upow * (c / fact);
            upow *= u;
            fact *= T::lit((k + 1) as f64);
            ak *= a;
        }
        return Ok(acc * (ly * ly));
    }
    let num = (u.exp() * a) - (u * a).exp() * (one + a) + (u * (a * a)).exp();
    let sm1 = s - one;
    Ok(num / (sm1 * sm1))
}

/// `Σ χ(p) (ln p / p) min(ln(p / y^{(1-δ)²}), (1-δ) ln(y / p))` over primes
/// `y^{(1-δ)²} < p <= y`.
pub fn weighted_prime_sum<T: Real>(chi: &DirichletCharacter, y: T, delta: T) -> Result<Complex<T>> {
    check_kernel_params(y, delta)?;
    let one = T::one();
    let a = one - delta;
    let ly = y.ln();
    let lo_log = a * a * ly;
    let hi = y.floor().to_u64().ok_or_else(|| Error::InvalidParameter(format!("y = {y} too large")))?;
    let lo = lo_log.exp().floor().to_u64().unwrap_or(0);
    let m = chi.order();
    let roots: Vec<Complex<T>> = (0..m).map(|e| root_of_unity(e, m)).collect();
    let mut acc = Complex::new(T::zero(), T::zero());
    for_each_prime_in(lo, hi, |p| {
        let Some(e) = chi.exponent(p) else { return };
        let lp = T::from_u64_lossy(p).ln();
        if lp <= lo_log {
            return;
        }
        let w = (lp - lo_log).min(a * (ly - lp));
        acc += roots[e as usize] * (lp / T::from_u64_lossy(p) * w);
    });
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusRow {
    /// Dyadic parameter; `0` labels the central disc `|ρ-1| <= 1/log q`.
    pub r: u64,
    pub inner: f64,
    pub outer: f64,
    pub count: usize,
    /// The `R + 1` scale each annulus count is compared against.
    pub scale: u64,
    /// The annulus lies inside `|s-1| <= ϑ / log q`.
    pub inside_theta_disc: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSideSum {
    pub sum_re: f64,
    pub sum_im: f64,
    pub census: Vec<AnnulusRow>,
}

/// `-Σ f(ρ)` over the given zeros, with their census in the annuli
/// `R/log q < |ρ-1| <= 2R/log q`, `R = 1, 2, 4, …`.
pub fn zero_side_sum(zeros: &[Zero<f64>], y: f64, delta: f64, log_q: f64, vartheta: f64) -> Result<ZeroSideSum> {
    check_kernel_params(y, delta)?;
    if !(log_q > 0.0) {
        return Err(Error::InvalidParameter(format!("log q must be positive, got {log_q}")));
    }
    let mut sum = Complex::new(0.0, 0.0);
    let mut dists = Vec::with_capacity(zeros.len());
    for z in zeros {
        let rho = Complex::new(z.beta, z.gamma);
        sum -= cubic_kernel_f(rho, y, delta)?;
        dists.push((rho - 1.0).norm() * log_q);
    }
    let max_scaled = dists.iter().cloned().fold(1.0, f64::max);
    let mut census = vec![AnnulusRow {
        r: 0,
        inner: 0.0,
        outer: 1.0 / log_q,
        count: dists.iter().filter(|&&d| d <= 1.0).count(),
        scale: 1,
        inside_theta_disc: 1.0 <= vartheta,
    }];
    let mut r = 1u64;
    while (r as f64) < max_scaled {
        let (lo, hi) = (r as f64, 2.0 * r as f64);
        census.push(AnnulusRow {
            r,
            inner: lo / log_q,
            outer: hi / log_q,
            count: dists.iter().filter(|&&d| d > lo && d <= hi).count(),
            scale: r + 1,
            inside_theta_disc: hi <= vartheta,
        });
        r *= 2;
    }
    Ok(ZeroSideSum { sum_re: sum.re, sum_im: sum.im, census })
}

/// Parameters `(ℓ, δ, ϑ)` with `y = |Δ|^{1/(4ℓ) - δ}`.
#[derive(Clone, Debug, Serialize)]
pub struct CtConfig {
    pub ell: u64,
    pub delta: f64,
    pub vartheta: f64,
    pub disc: i64,
    pub y: f64,
    /// `y^{(1-δ)²}`, the lower end of the prime window.
    pub window_lo: f64,
    /// `y^{1-δ}`, where the kernel weight peaks.
    pub window_peak: f64,
}

impl CtConfig {
    pub fn new(ell: u64, delta: f64, vartheta: f64, disc: i64) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::InvalidParameter(format!("ℓ = {ell} is not prime")));
        }
        let cap = 1.0 / (4.0 * ell as f64);
        if !(delta > 0.0 && delta < cap) {
            return Err(Error::InvalidParameter(format!("δ must lie in (0, {cap}), got {delta}")));
        }
        let log_disc = (disc.unsigned_abs() as f64).ln();
        if !(vartheta >= 1.0 && vartheta <= log_disc) {
            return Err(Error::InvalidParameter(format!("ϑ must lie in [1, {log_disc}], got {vartheta}")));
        }
        let y = ((cap - delta) * log_disc).exp();
        if y <= 1.0 {
            return Err(Error::InvalidParameter(format!("y = {y} must exceed 1")));
        }
        let a = 1.0 - delta;
        Ok(CtConfig {
            ell,
            delta,
            vartheta,
            disc,
            y,
            window_lo: y.powf(a * a),
            window_peak: y.powf(a),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_at_one() {
        let f = cubic_kernel_f(Complex::new(1.0, 0.0), std::f64::consts::E, 0.5).unwrap();
        assert!((f.re - 0.093_75).abs() < 1e-15 && f.im == 0.0);
        let y = 50.0f64;
        let f1 = cubic_kernel_f(Complex::new(1.0, 0.0), y, 0.2).unwrap().re;
        assert!((f1 - 0.0288 * y.ln().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn series_and_closed_form_agree() {
        let (y, d) = (30.0f64, 0.3);
        // ln y ≈ 3.4 so u crosses 0.5 near |s - 1| ≈ 0.147.
        for s in [Complex::new(1.14, 0.0), Complex::new(1.0, 0.146), Complex::new(0.86, 0.02)] {
            let series = cubic_kernel_f(s, y, d).unwrap();
            let a = 1.0 - d;
            let sm1 = s - 1.0;
            let closed = (a * (sm1 * y.ln()).exp() - (1.0 + a) * (sm1 * a * y.ln()).exp()
                + (sm1 * a * a * y.ln()).exp())
                / (sm1 * sm1);
            assert!((series - closed).norm() < 1e-12 * closed.norm(), "{series} vs {closed}");
        }
    }

    #[test]
    fn removable_singularity_is_smooth() {
        // Oracle: f(1) + f'(1) h with f'(1) = (ln y)³ (a - (1+a)a³ + a⁶)/6.
        for &(y, d) in &[(1e4f64, 0.2), (std::f64::consts::E, 0.5)] {
            let a = 1.0 - d;
            let ly = f64::ln(y);
            let f1 = cubic_kernel_f(Complex::new(1.0, 0.0), y, d).unwrap().re;
            let slope = ly.powi(3) * (a - (1.0 + a) * a.powi(3) + a.powi(6)) / 6.0;
            for h in [1e-6, -1e-6] {
                let v = cubic_kernel_f(Complex::new(1.0 + h, 0.0), y, d).unwrap().re;
                assert!((v - f1 - slope * h).abs() < 1e-8 * f1, "y={y} h={h}");
                assert!((v - f1).abs() < 2e-6 * ly * f1);
            }
        }
    }

    #[test]
    fn nonnegative_on_real_axis() {
        for &y in &[1.5, 10.0, 1e6] {
            for &d in &[0.05, 0.2, 0.5, 0.9] {
                for i in 0..=400 {
                    let s = -2.0 + 0.01 * i as f64;
                    let f = cubic_kernel_f(Complex::new(s, 0.0), y, d).unwrap();
                    assert!(f.re >= 0.0, "y={y} δ={d} s={s}: {f}");
                }
            }
        }
    }

    #[test]
    fn empty_prime_window() {
        let zeta = DirichletCharacter::principal(1).unwrap();
        let v = weighted_prime_sum(&zeta, 1.9f64, 0.2).unwrap();
        assert_eq!(v, Complex::new(0.0, 0.0));
    }

    #[test]
    fn prime_sum_matches_naive_loop() {
        let chi = DirichletCharacter::attach_quadratic(-4).unwrap();
        let (y, d) = (5000.0f64, 0.3);
        let v = weighted_prime_sum(&chi, y, d).unwrap();
        let a = 1.0 - d;
        let lo = a * a * y.ln();
        let mut naive = 0.0;
        for p in 2..=5000u64 {
            if !is_prime(p) || p % 2 == 0 {
                continue;
            }
            let lp = (p as f64).ln();
            if lp <= lo {
                continue;
            }
            let w = (lp - lo).min(a * (y.ln() - lp));
            naive += if p % 4 == 1 { 1.0 } else { -1.0 } * lp / p as f64 * w;
        }
        assert!((v.re - naive).abs() < 1e-12 && v.im.abs() < 1e-15);
    }

    #[test]
    fn zero_side_cases() {
        let r = zero_side_sum(&[], 100.0, 0.2, 3.0, 2.0).unwrap();
        assert_eq!(r.sum_re, 0.0);
        let z = Zero { beta: 0.9, gamma: 0.0, residual: 0.0 };
        let r = zero_side_sum(&[z], 100.0, 0.2, 3.0, 2.0).unwrap();
        assert!(r.sum_re <= 0.0);
        let zs = [
            z,
            Zero { beta: 0.5, gamma: 0.8, residual: 0.0 },
            Zero { beta: 0.5, gamma: -0.8, residual: 0.0 },
        ];
        let r = zero_side_sum(&zs, 100.0, 0.2, 3.0, 2.0).unwrap();
        assert_eq!(r.census.iter().map(|row| row.count).sum::<usize>(), 3);
        assert!(r.sum_im.abs() < 1e-14);
    }

    #[test]
    fn ct_config_window() {
        let c = CtConfig::new(3, 0.01, 2.0, -10_000_003).unwrap();
        assert!(c.y > 1.0 && c.window_lo < c.window_peak && c.window_peak < c.y);
        assert!(CtConfig::new(3, 0.1, 2.0, -1000).is_err());
        assert!(CtConfig::new(4, 0.01, 2.0, -1000).is_err());
    }
}
