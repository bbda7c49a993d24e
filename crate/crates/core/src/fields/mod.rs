//! Quadratic and pure cubic fields, form class groups, and the prime and
//! ideal censuses used by the torsion experiments.

mod classgroup;
mod forms;

pub use classgroup::{
    class_group, ell_torsion, genus_two_rank, ClassGroupMethod, ClassGroupStructure, FormClassGroup,
    DEFAULT_CLASS_GROUP_CAP,
};
pub use forms::BinaryQuadraticForm;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_fundamental_discriminant, kronecker, largest_prime_factor_table, primes_up_to};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::kernels::CoefficientSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signature {
    Real,
    Imaginary,
}

/// `d` if `d ≡ 1 mod 4`, else `4d`, for squarefree `d ∉ {0, 1}`.
pub fn fundamental_discriminant(d: i64) -> Result<i64> {
    if d == 0 || d == 1 || !factorize(d.unsigned_abs())?.is_squarefree() {
        return Err(Error::InvalidParameter(format!("{d} is not a squarefree integer other than 0, 1")));
    }
    Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

#[derive(Clone, Debug)]
pub struct QuadraticField {
    d: i64,
    disc: i64,
    character: DirichletCharacter,
}

impl QuadraticField {
    /// `Q(√d)` for squarefree `d`.
    pub fn new(d: i64) -> Result<Self> {
        let disc = fundamental_discriminant(d)?;
        let character = DirichletCharacter::attach_quadratic(disc)?;
        Ok(QuadraticField { d, disc, character })
    }

    /// The field with fundamental discriminant `disc`.
    pub fn from_discriminant(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        let d = if disc % 4 == 0 { disc / 4 } else { disc };
        Self::new(d)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn signature(&self) -> Signature {
        if self.d > 0 {
            Signature::Real
        } else {
            Signature::Imaginary
        }
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }
}

/// `Q(∛d)` with `d = a·b²`, `a`, `b` coprime and squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PureCubicField {
    pub d: u64,
    pub a: u64,
    pub b: u64,
    pub disc: i64,
    pub ramified: Vec<u64>,
}

pub fn pure_cubic_discriminant(d: u64) -> Result<PureCubicField> {
    if d <= 1 {
        return Err(Error::InvalidParameter(format!("need d > 1, got {d}")));
    }
    let f = factorize(d)?;
    if !f.is_cubefree() {
        return Err(Error::NotCubefree(d));
    }
    let (mut a, mut b) = (1u64, 1u64);
    for &(p, e) in f.factors() {
        if e == 1 {
            a *= p;
        } else {
            b *= p;
        }
    }
    let ab = (a * b) as i64;
    let sq = (d % 9) * (d % 9) % 9;
    let disc = if sq == 1 || sq == 8 { -3 * ab * ab } else { -27 * ab * ab };
    let mut ramified: Vec<u64> = f.primes().collect();
    if !ramified.contains(&3) {
        ramified.push(3);
        ramified.sort_unstable();
    }
    Ok(PureCubicField { d, a, b, disc, ramified })
}

/// `9^{ω(d)}`.
pub fn gerth_bound(d: u64) -> Result<u64> {
    if d <= 1 {
        return Err(Error::InvalidParameter(format!("need d > 1, got {d}")));
    }
    Ok(9u64.pow(factorize(d)?.omega() as u32))
}

/// Which primes count as split for [`split_prime_count`].
#[derive(Clone, Debug)]
pub enum SplitKind {
    /// `χ_Δ(p) = +1`.
    Quadratic(i64),
    /// `p ≡ 2 mod 3` and `p ∤ Δ_K`.
    PureCubic(u64),
    /// `(Δ | p) = -1`, for odd `p`.
    NonCyclicCubic(i64),
    /// `χ(p) = 1` for a cubic character `χ`.
    CyclicCubic(DirichletCharacter),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitCount {
    pub x: u64,
    pub count: u64,
    pub primes: Vec<u64>,
}

pub fn split_prime_count(kind: &SplitKind, x: u64) -> Result<SplitCount> {
    let keep: Box<dyn Fn(u64) -> bool> = match kind {
        SplitKind::Quadratic(disc) => {
            if !is_fundamental_discriminant(*disc) {
                return Err(Error::NotFundamental(*disc));
            }
            let disc = *disc;
            Box::new(move |p| kronecker(disc, p as i64) == 1)
        }
        SplitKind::PureCubic(d) => {
            let field = pure_cubic_discriminant(*d)?;
            Box::new(move |p| p % 3 == 2 && !field.ramified.contains(&p))
        }
        SplitKind::NonCyclicCubic(disc) => {
            let disc = *disc;
            Box::new(move |p| p >= 3 && kronecker(disc, p as i64) == -1)
        }
        SplitKind::CyclicCubic(chi) => {
            if chi.order() != 3 {
                return Err(Error::CharacterMismatch(format!("expected a cubic character, got order {}", chi.order())));
            }
            let chi = chi.clone();
            Box::new(move |p| chi.exponent(p) == Some(0))
        }
    };
    let primes: Vec<u64> = primes_up_to(x).into_iter().filter(|&p| keep(p)).collect();
    Ok(SplitCount { x, count: primes.len() as u64, primes })
}

/// `Σ_{n <= X} a(n)`: ideals of squarefree norm coprime to `Δ`, the unit
/// ideal included.
pub fn squarefree_norm_ideal_count(disc: i64, x: u64) -> Result<u64> {
    let series = CoefficientSeries::new(disc)?;
    Ok(series.table(x).iter().skip(1).map(|&a| a as u64).sum())
}

/// Fundamental discriminants with `|Δ| <= Δ_max` and largest prime factor
/// at most `|Δ|^{δ_s}`, ascending in `|Δ|` (negative first on ties).
/// `signature = None` takes both signs. At most `count_cap` are returned.
pub fn smooth_family(
    disc_max: u64,
    smooth_exponent: f64,
    signature: Option<Signature>,
    count_cap: Option<usize>,
) -> Result<Vec<i64>> {
    if !(smooth_exponent > 0.0) {
        return Err(Error::InvalidParameter(format!("smooth exponent must be positive, got {smooth_exponent}")));
    }
    let table = largest_prime_factor_table(disc_max as usize + 1);
    let cap = count_cap.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for n in 3..=disc_max {
        let p = table[n as usize] as f64;
        if smooth_exponent < 1.0 && p > (n as f64).powf(smooth_exponent) * (1.0 + 1e-12) {
            continue;
        }
        for (sig, disc) in [(Signature::Imaginary, -(n as i64)), (Signature::Real, n as i64)] {
            if signature.is_some_and(|s| s != sig) || !is_fundamental_discriminant(disc) {
                continue;
            }
            if out.len() == cap {
                return Ok(out);
            }
            out.push(disc);
        }
    }
    Ok(out)
}
