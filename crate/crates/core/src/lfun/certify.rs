//! Zero-free disc certification near `s = 1` and the two-real-characters
//! exclusion check.

use num_complex::Complex;
use serde::Serialize;

use super::scan::{scan_lfunction, Rect, ScanOptions, Scanner, Zero};
use super::supnorm::sup_norm;
use super::{CharacterId, LFunction};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Right edge of the scanned region; `L` has no zeros with `σ > 1`.
const SIGMA_RIGHT: f64 = 1.25;

#[derive(Clone, Copy, Debug)]
pub struct CertifyParams<T> {
    pub theta: T,
    pub phi: T,
    pub c2: T,
    pub t_cap: T,
    /// Measured `ln sup |L(·, χ²)|` on the same rectangle, if known.
    pub phi_square: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SquareHypothesis<T> {
    /// `χ` has order at most 2, so `χ²` is principal.
    NotApplicable,
    Unchecked,
    Measured { phi_square: T, holds: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HypothesisFlags<T> {
    pub phi_exp_neg_phi_le_theta: bool,
    pub theta_le_one: bool,
    pub one_le_phi: bool,
    pub phi_ge_theta_loglog: bool,
    pub square: SquareHypothesis<T>,
}

impl<T> HypothesisFlags<T> {
    pub fn all_hold(&self) -> bool {
        self.phi_exp_neg_phi_le_theta
            && self.theta_le_one
            && self.one_le_phi
            && self.phi_ge_theta_loglog
            && !matches!(self.square, SquareHypothesis::Measured { holds: false, .. } | SquareHypothesis::Unchecked)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation<T> {
    /// A zero of a non-real character in the region.
    ComplexCharacterZero { beta: T, gamma: T },
    /// A real character with a non-real zero in the region.
    NonRealZero { beta: T, gamma: T },
    /// More than one zero of a real character in the region.
    MultipleZeros { count: usize },
    /// A real zero that fails the simplicity checks.
    NotSimple { beta: T, local_winding: i64, sign_change: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict<T> {
    ZeroFree,
    OneRealZero { beta: T },
    Violations { list: Vec<Violation<T>> },
}

impl<T> Verdict<T> {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violations { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroFreeCertificate<T> {
    pub character: CharacterId,
    pub order: u64,
    pub theta: T,
    pub phi: T,
    pub c2: T,
    pub radius: T,
    pub t_cap: T,
    pub flags: HypothesisFlags<T>,
    pub region: Rect<T>,
    pub zeros: Vec<Zero<T>>,
    pub verdict: Verdict<T>,
    pub exceptional_zero: Option<T>,
    pub resolution: T,
    pub caveat: String,
}

fn flags<T: Real>(chi: &DirichletCharacter, p: &CertifyParams<T>) -> HypothesisFlags<T> {
    let (theta, phi) = (p.theta, p.phi);
    let three_q = T::from_u64_lossy(3 * chi.modulus());
    let square = if chi.order() <= 2 {
        SquareHypothesis::NotApplicable
    } else {
        match p.phi_square {
            Some(ps) => SquareHypothesis::Measured { phi_square: ps, holds: ps <= phi },
            None => SquareHypothesis::Unchecked,
        }
    };
    HypothesisFlags {
        phi_exp_neg_phi_le_theta: phi * (-phi).exp() <= theta,
        theta_le_one: theta <= T::one(),
        one_le_phi: T::one() <= phi,
        phi_ge_theta_loglog: phi >= theta * (T::one() + three_q.ln().ln()),
        square,
    }
}

/// Scans `σ ≥ 1 - c2·θ/φ`, `|t| ≤ t_cap` and classifies what it finds:
/// non-real characters must have no zeros there; a real character may have a
/// single real simple zero.
pub fn certify_zero_free<T: Real>(
    chi: &DirichletCharacter,
    params: &CertifyParams<T>,
    opts: ScanOptions<T>,
) -> Result<ZeroFreeCertificate<T>> {
    if chi.is_principal() {
        return Err(Error::PoleInRegion);
    }
    let CertifyParams { theta, phi, c2, t_cap, .. } = *params;
    if !(theta > T::zero()) || !(phi > T::zero()) || !(c2 > T::zero()) || !(t_cap > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "θ, φ, C₂ and t_cap must be positive (got {theta}, {phi}, {c2}, {t_cap})"
        )));
    }
    let radius = c2 * theta / phi;
    let region = Rect::new(T::one() - radius, T::lit(SIGMA_RIGHT), -t_cap, t_cap);
    let lf = LFunction::new(chi, opts.tol)?;
    let report = scan_lfunction(&lf, region, opts)?;
    let zeros = report.zeros.clone();

    let mut exceptional = None;
    let verdict = if zeros.is_empty() {
        Verdict::ZeroFree
    } else if !chi.is_real() {
        Verdict::Violations {
            list: zeros
                .iter()
                .map(|z| Violation::ComplexCharacterZero { beta: z.beta, gamma: z.gamma })
                .collect(),
        }
    } else if zeros.len() > 1 {
        Verdict::Violations { list: vec![Violation::MultipleZeros { count: zeros.len() }] }
    } else {
        let z = zeros[0];
        if z.gamma != T::zero() {
            Verdict::Violations { list: vec![Violation::NonRealZero { beta: z.beta, gamma: z.gamma }] }
        } else {
            let (local_winding, sign_change) = simplicity(&lf, z.beta, opts)?;
            if local_winding == 1 && sign_change {
                exceptional = Some(z.beta);
                Verdict::OneRealZero { beta: z.beta }
            } else {
                Verdict::Violations {
                    list: vec![Violation::NotSimple { beta: z.beta, local_winding, sign_change }],
                }
            }
        }
    };
    Ok(ZeroFreeCertificate {
        character: CharacterId::of(chi),
        order: chi.order(),
        theta,
        phi,
        c2,
        radius,
        t_cap,
        flags: flags(chi, params),
        region: report.scanned,
        zeros,
        verdict,
        exceptional_zero: exceptional,
        resolution: opts.resolution,
        caveat: report.caveat,
    })
}

/// Winding number on a small square around the real point `beta`, and
/// whether `L` changes sign across it on the real axis.
fn simplicity<T: Real>(lf: &LFunction<T>, beta: T, opts: ScanOptions<T>) -> Result<(i64, bool)> {
    let h = opts.resolution * T::lit(0.25);
    let scanner = Scanner::new(lf, opts);
    let w = scanner.winding(&Rect::new(beta - h, beta + h, -h, h))?;
    let left = lf.eval(Complex::new(beta - h, T::zero()))?.re;
    let right = lf.eval(Complex::new(beta + h, T::zero()))?.re;
    Ok((w, left * right < T::zero()))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairExclusionReport<T> {
    pub first: CharacterId,
    pub second: CharacterId,
    pub region: Rect<T>,
    pub zeros_first: Vec<Zero<T>>,
    pub zeros_second: Vec<Zero<T>>,
    /// `ln sup |L|` for the first, second and product character over
    /// `[σ_lo, 2] × [-t, t]`, when `σ_lo < 1`.
    pub phis: Option<[T; 3]>,
    /// Which characters (1, 2) have zeros in the region.
    pub with_zeros: Vec<u8>,
    pub pass: bool,
    pub vacuous: bool,
}

/// Checks that at most one of two distinct real characters mod `q` has a
/// zero in `region`.
pub fn pair_exclusion<T: Real>(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    region: Rect<T>,
    opts: ScanOptions<T>,
) -> Result<PairExclusionReport<T>> {
    if chi1.modulus() != chi2.modulus() {
        return Err(Error::CharacterMismatch(format!(
            "moduli {} and {}",
            chi1.modulus(),
            chi2.modulus()
        )));
    }
    if chi1.index() == chi2.index() {
        return Err(Error::CharacterMismatch("the two characters coincide".into()));
    }
    if chi1.order() != 2 || chi2.order() != 2 {
        return Err(Error::CharacterMismatch(format!(
            "orders {} and {}, both must be 2",
            chi1.order(),
            chi2.order()
        )));
    }
    let mut report = PairExclusionReport {
        first: CharacterId::of(chi1),
        second: CharacterId::of(chi2),
        region,
        zeros_first: Vec::new(),
        zeros_second: Vec::new(),
        phis: None,
        with_zeros: Vec::new(),
        pass: true,
        vacuous: !region.has_area(),
    };
    if report.vacuous {
        return Ok(report);
    }
    let product = chi1.mul(chi2)?;
    let theta = T::one() - region.sigma_lo;
    if theta > T::zero() && theta < T::one() {
        let t_max = region.t_lo.abs().max(region.t_hi.abs());
        let res = T::lit(0.1);
        let mut phis = [T::zero(); 3];
        for (slot, psi) in phis.iter_mut().zip([chi1, chi2, &product]) {
            *slot = sup_norm(psi, theta, t_max, res, opts.tol)?.phi;
        }
        report.phis = Some(phis);
    }
    report.zeros_first = scan_lfunction(&LFunction::new(chi1, opts.tol)?, region, opts)?.zeros;
    report.zeros_second = scan_lfunction(&LFunction::new(chi2, opts.tol)?, region, opts)?.zeros;
    if !report.zeros_first.is_empty() {
        report.with_zeros.push(1);
    }
    if !report.zeros_second.is_empty() {
        report.with_zeros.push(2);
    }
    report.pass = report.with_zeros.len() <= 1;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfun::sup_norm;

    #[test]
    fn radius_arithmetic() {
        let chi = DirichletCharacter::attach_quadratic(-4).unwrap();
        let p = CertifyParams { theta: 0.5, phi: 2.0, c2: 0.1, t_cap: 1.0, phi_square: None };
        let cert = certify_zero_free(&chi, &p, ScanOptions::default()).unwrap();
        assert!((cert.radius - 0.025).abs() < 1e-15);
        assert_eq!(cert.verdict, Verdict::ZeroFree);
        assert_eq!(cert.flags.square, SquareHypothesis::NotApplicable);
        assert!(cert.flags.one_le_phi && cert.flags.theta_le_one);
    }

    #[test]
    fn minus_four_measured_phi_is_zero_free() {
        let chi = DirichletCharacter::attach_quadratic(-4).unwrap();
        let sup = sup_norm(&chi, 0.1, 3.0, 0.05, 1e-12).unwrap();
        let p = CertifyParams { theta: 0.1, phi: sup.phi, c2: 0.05, t_cap: 1.0, phi_square: None };
        let cert = certify_zero_free(&chi, &p, ScanOptions::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::ZeroFree);
        assert!(cert.exceptional_zero.is_none());
    }

    #[test]
    fn complex_character_with_zero_is_a_violation() {
        // A huge radius reaches down to the low zeros of a cubic character
        // mod 7, which must be reported as a taxonomy violation.
        let chi = DirichletCharacter::enumerate(7, Some(3)).unwrap().remove(0);
        let p = CertifyParams { theta: 1.0, phi: 1.0, c2: 0.9, t_cap: 10.0, phi_square: Some(0.5) };
        let cert = certify_zero_free(&chi, &p, ScanOptions::default()).unwrap();
        assert!(cert.verdict.is_violation(), "{:?}", cert.verdict);
        assert!(matches!(cert.flags.square, SquareHypothesis::Measured { holds: true, .. }));
    }

    #[test]
    fn real_character_with_two_zeros_is_a_violation() {
        // The lowest zeros of L(s, χ_{-3}) sit near 1/2 ± 8.04i.
        let chi = DirichletCharacter::attach_quadratic(-3).unwrap();
        let p = CertifyParams { theta: 1.0, phi: 1.0, c2: 0.9, t_cap: 9.0, phi_square: None };
        let cert = certify_zero_free(&chi, &p, ScanOptions::default()).unwrap();
        assert_eq!(cert.zeros.len(), 2);
        assert_eq!(
            cert.verdict,
            Verdict::Violations { list: vec![Violation::MultipleZeros { count: 2 }] }
        );
    }

    #[test]
    fn simple_real_zero_is_exceptional() {
        // χ_{-4} induced mod 20 picks up the factor 1 - 5^{-s}, which has a
        // simple zero at s = 0 and no others with |t| ≤ 1.
        let chi = DirichletCharacter::attach_quadratic(-4).unwrap().induce(20).unwrap();
        let p = CertifyParams { theta: 1.0, phi: 1.0, c2: 1.2, t_cap: 1.0, phi_square: None };
        let cert = certify_zero_free(&chi, &p, ScanOptions::default()).unwrap();
        match cert.verdict {
            Verdict::OneRealZero { beta } => assert!(beta.abs() < 1e-10),
            v => panic!("{v:?}"),
        }
        assert_eq!(cert.exceptional_zero, Some(cert.zeros[0].beta));
    }

    #[test]
    fn conductor_twelve_pair() {
        let c3 = DirichletCharacter::attach_quadratic(-3).unwrap().induce(12).unwrap();
        let c4 = DirichletCharacter::attach_quadratic(-4).unwrap().induce(12).unwrap();
        let region = Rect::new(0.99, 1.25, -1.0, 1.0);
        let r = pair_exclusion(&c3, &c4, region, ScanOptions::default()).unwrap();
        assert!(r.pass && r.with_zeros.is_empty());
        assert!(r.phis.is_some());
        assert!(pair_exclusion(&c3, &c3, region, ScanOptions::default()).is_err());
        let flat = Rect::new(0.99, 0.99, -1.0, 1.0);
        let v = pair_exclusion(&c3, &c4, flat, ScanOptions::default()).unwrap();
        assert!(v.pass && v.vacuous);
    }
}
