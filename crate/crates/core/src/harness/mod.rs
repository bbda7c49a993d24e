//! Torsion-bound experiments over families of fields, parameter checks,
//! external class-number tables and the class group cache.

mod cache;
mod ingest;

pub use cache::{ClassGroupCache, CACHE_VERSION};
pub use ingest::{ingest_class_numbers, parse_class_numbers, IngestedClassRecord};

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::fields::{
    class_group, ell_torsion, gerth_bound, pure_cubic_discriminant, split_prime_count, squarefree_norm_ideal_count,
    ClassGroupStructure, SplitKind, DEFAULT_CLASS_GROUP_CAP,
};
use crate::scalar::Real;

/// `|Δ|^{1/2+ε}/M`.
pub fn ev_bound(disc: i64, epsilon: f64, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroCensus);
    }
    Ok((disc.unsigned_abs() as f64).powf(0.5 + epsilon) / m as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    ImaginaryQuadratic,
    /// Class data is for the narrow class group.
    RealQuadratic,
    PureCubic,
}

impl FieldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::ImaginaryQuadratic => "imaginary-quadratic",
            FieldKind::RealQuadratic => "real-quadratic-narrow",
            FieldKind::PureCubic => "pure-cubic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub disc: i64,
    pub kind: FieldKind,
    /// Radicand, for pure cubic fields.
    pub d: Option<u64>,
    pub h: Option<u64>,
    pub h_ell: Option<u64>,
    pub ell: u64,
    pub varpi: f64,
    /// `|Δ|^ϖ`; the census counts up to its floor.
    pub x: f64,
    pub m: u64,
    /// `None` when `M = 0`.
    pub ev_bound: Option<f64>,
    /// `log h_ℓ / log |Δ|`.
    pub empirical_exponent: Option<f64>,
    /// `1/2 + ε - ϖ`, the exponent the census delivers at this `ϖ`.
    pub predicted_exponent: f64,
    pub gerth: Option<u64>,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "disc",
    "kind",
    "d",
    "h",
    "h_ell",
    "ell",
    "varpi",
    "x",
    "m",
    "ev_bound",
    "empirical_exponent",
    "predicted_exponent",
    "gerth",
];

/// 12 significant digits, lowercase exponent.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

impl ExperimentRow {
    pub fn csv_fields(&self) -> Vec<String> {
        let opt_u = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        vec![
            self.disc.to_string(),
            self.kind.as_str().to_string(),
            opt_u(self.d),
            opt_u(self.h),
            opt_u(self.h_ell),
            self.ell.to_string(),
            format_float(self.varpi),
            format_float(self.x),
            self.m.to_string(),
            opt_f(self.ev_bound),
            opt_f(self.empirical_exponent),
            format_float(self.predicted_exponent),
            opt_u(self.gerth),
        ]
    }
}

pub fn write_rows_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(e.into());
    w.write_record(CSV_COLUMNS).map_err(to_io)?;
    for r in rows {
        w.write_record(r.csv_fields()).map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExperimentParams {
    pub ell: u64,
    pub varpi: f64,
    pub epsilon: f64,
}

impl ExperimentParams {
    /// Requires `ℓ` prime and `0 < ϖ < 1/(2ℓ(n-1))` for fields of degree `n`.
    fn check(&self, degree: u64) -> Result<()> {
        if !is_prime(self.ell) {
            return Err(Error::InvalidParameter(format!("ℓ = {} is not prime", self.ell)));
        }
        let limit = 1.0 / (2.0 * self.ell as f64 * (degree - 1) as f64);
        if !(self.varpi > 0.0 && self.varpi < limit) {
            return Err(Error::ConstraintViolated(format!("need 0 < ϖ < {limit}, got ϖ = {}", self.varpi)));
        }
        Ok(())
    }
}

fn census_limit(disc: i64, varpi: f64) -> (f64, u64) {
    let x = (disc.unsigned_abs() as f64).powf(varpi);
    (x, (x * (1.0 + 1e-12)).floor() as u64)
}

fn empirical_exponent(disc: i64, h_ell: Option<u64>) -> Option<f64> {
    h_ell.map(|h| (h as f64).ln() / (disc.unsigned_abs() as f64).ln())
}

/// Class groups for `discs`, served from `cache` where present and
/// computed in parallel otherwise; new results are appended in input order.
pub fn class_groups(discs: &[i64], mut cache: Option<&mut ClassGroupCache>) -> Result<Vec<ClassGroupStructure>> {
    let missing: Vec<i64> = discs
        .iter()
        .copied()
        .filter(|d| cache.as_ref().is_none_or(|c| c.get(*d).is_none()))
        .collect();
    let computed: Vec<ClassGroupStructure> =
        missing.par_iter().map(|&d| class_group(d, DEFAULT_CLASS_GROUP_CAP)).collect::<Result<_>>()?;
    let mut fresh: HashMap<i64, ClassGroupStructure> = HashMap::new();
    for (d, s) in missing.iter().zip(computed) {
        if let Some(c) = cache.as_deref_mut() {
            c.insert(*d, &s)?;
        }
        fresh.insert(*d, s);
    }
    Ok(discs
        .iter()
        .map(|d| match fresh.get(d) {
            Some(s) => s.clone(),
            None => cache.as_ref().and_then(|c| c.get(*d)).expect("cached or computed").clone(),
        })
        .collect())
}

/// One row per fundamental discriminant in `family`, in input order. `M`
/// counts split primes, or ideals of squarefree norm when `use_ideals`.
pub fn run_quadratic_experiment(
    family: &[i64],
    params: ExperimentParams,
    use_ideals: bool,
    cache: Option<&mut ClassGroupCache>,
) -> Result<Vec<ExperimentRow>> {
    params.check(2)?;
    let groups = class_groups(family, cache)?;
    family
        .par_iter()
        .zip(groups.par_iter())
        .map(|(&disc, g)| {
            let (x, cutoff) = census_limit(disc, params.varpi);
            let m = if use_ideals {
                squarefree_norm_ideal_count(disc, cutoff)?
            } else {
                split_prime_count(&SplitKind::Quadratic(disc), cutoff)?.count
            };
            let h_ell = ell_torsion(g, params.ell)?;
            Ok(ExperimentRow {
                disc,
                kind: if disc < 0 { FieldKind::ImaginaryQuadratic } else { FieldKind::RealQuadratic },
                d: None,
                h: Some(g.h),
                h_ell: Some(h_ell),
                ell: params.ell,
                varpi: params.varpi,
                x,
                m,
                ev_bound: ev_bound(disc, params.epsilon, m).ok(),
                empirical_exponent: empirical_exponent(disc, Some(h_ell)),
                predicted_exponent: 0.5 + params.epsilon - params.varpi,
                gerth: None,
            })
        })
        .collect()
}

/// `h_ℓ` from an ingested record: from its structure, or from `h` alone
/// when `ℓ² ∤ h`.
fn ingested_torsion(rec: &IngestedClassRecord, ell: u64) -> Result<Option<u64>> {
    if let Some(divisors) = &rec.structure {
        let s = ClassGroupStructure::new(divisors.clone(), crate::fields::ClassGroupMethod::Ingested, false)?;
        return ell_torsion(&s, ell).map(Some);
    }
    Ok(if !rec.h.is_multiple_of(ell * ell) { Some(if rec.h.is_multiple_of(ell) { ell } else { 1 }) } else { None })
}

/// One row per cubefree `d` in `ds` (others are skipped). Class data comes
/// only from `ingested`, joined on the discriminant.
pub fn run_pure_cubic_experiment(
    ds: impl IntoIterator<Item = u64>,
    params: ExperimentParams,
    ingested: &[IngestedClassRecord],
) -> Result<Vec<ExperimentRow>> {
    params.check(3)?;
    let by_disc: HashMap<i64, &IngestedClassRecord> = ingested.iter().map(|r| (r.disc, r)).collect();
    let fields: Vec<_> = ds
        .into_iter()
        .filter(|&d| d > 1)
        .filter_map(|d| match pure_cubic_discriminant(d) {
            Err(Error::NotCubefree(_)) => None,
            other => Some(other),
        })
        .collect::<Result<_>>()?;
    fields
        .par_iter()
        .map(|k| {
            let (x, cutoff) = census_limit(k.disc, params.varpi);
            let m = split_prime_count(&SplitKind::PureCubic(k.d), cutoff)?.count;
            let rec = by_disc.get(&k.disc);
            let h_ell = match rec {
                Some(r) => ingested_torsion(r, params.ell)?,
                None => None,
            };
            Ok(ExperimentRow {
                disc: k.disc,
                kind: FieldKind::PureCubic,
                d: Some(k.d),
                h: rec.map(|r| r.h),
                h_ell,
                ell: params.ell,
                varpi: params.varpi,
                x,
                m,
                ev_bound: ev_bound(k.disc, params.epsilon, m).ok(),
                empirical_exponent: empirical_exponent(k.disc, h_ell),
                predicted_exponent: 0.5 + params.epsilon - params.varpi,
                gerth: Some(gerth_bound(k.d)?),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HlgrCheck<T> {
    pub k: u32,
    pub delta: T,
    pub ell: u64,
    /// `2^{k+3} - 2`.
    pub l: u64,
    pub theta: T,
    pub xi: T,
    /// `(2θ - θ²)/(4ℓ)`.
    pub threshold: T,
    pub pass: bool,
}

fn hlgr_l(k: u32) -> Result<u64> {
    if !(1..=60).contains(&k) {
        return Err(Error::InvalidParameter(format!("k must be in 1..=60, got {k}")));
    }
    Ok((1u64 << (k + 3)) - 2)
}

/// `θ = (k+3)/L`, `ξ = (1 + δ(k²+3k+4)/4)/L` with `L = 2^{k+3} - 2`;
/// passes when `ξ` is below `(2θ - θ²)/(4ℓ)`.
pub fn hlgr_parameter_check<T: Real>(k: u32, delta: T, ell: u64) -> Result<HlgrCheck<T>> {
    let l = hlgr_l(k)?;
    let lt = T::from_u64_lossy(l);
    let kk = T::from_u64_lossy(k as u64);
    let theta = (kk + T::lit(3.0)) / lt;
    let xi = (T::one() + delta * (kk * kk + T::lit(3.0) * kk + T::lit(4.0)) / T::lit(4.0)) / lt;
    let threshold = (T::lit(2.0) * theta - theta * theta) / (T::lit(4.0) * T::from_u64_lossy(ell));
    Ok(HlgrCheck { k, delta, ell, l, theta, xi, threshold, pass: xi < threshold })
}

/// [`hlgr_parameter_check`] in exact rational arithmetic.
pub fn hlgr_parameter_check_exact(k: u32, delta: &BigRational, ell: u64) -> Result<HlgrCheck<BigRational>> {
    let l = hlgr_l(k)?;
    let int = |n: u64| BigRational::from_integer(BigInt::from(n));
    let kk = int(k as u64);
    let theta = (&kk + int(3)) / int(l);
    let xi = (BigRational::one() + delta * (&kk * &kk + int(3) * &kk + int(4)) / int(4)) / int(l);
    let threshold = (int(2) * &theta - &theta * &theta) / int(4 * ell);
    let pass = xi < threshold;
    Ok(HlgrCheck { k, delta: delta.clone(), ell, l, theta, xi, threshold, pass })
}

/// Largest `h_ℓ·M/|Δ|^{1/2+ε}` over rows with `M > 0`: the empirical
/// constant in the census bound.
pub fn fitted_constant(rows: &[ExperimentRow]) -> Option<f64> {
    rows.iter()
        .filter_map(|r| Some(r.h_ell? as f64 / r.ev_bound?))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ell: u64, varpi: f64) -> ExperimentParams {
        ExperimentParams { ell, varpi, epsilon: 0.0 }
    }

    #[test]
    fn ev_bound_values() {
        assert_eq!(ev_bound(-4, 0.0, 1).unwrap(), 2.0);
        let m = split_prime_count(&SplitKind::Quadratic(-4), 20).unwrap().count;
        assert!((ev_bound(-4, 0.0, m).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(ev_bound(-4, 0.0, 0), Err(Error::ZeroCensus)));
    }

    #[test]
    fn quadratic_rows() {
        let rows = run_quadratic_experiment(&[-23], params(3, 0.15), false, None).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].h_ell, Some(3));
        assert!(run_quadratic_experiment(&[], params(3, 0.15), false, None).unwrap().is_empty());
        assert!(matches!(
            run_quadratic_experiment(&[-23], params(3, 0.2), false, None),
            Err(Error::ConstraintViolated(_))
        ));
        let ideals = run_quadratic_experiment(&[-23], params(3, 0.15), true, None).unwrap();
        assert_eq!(ideals[0].m, 1);
        assert_eq!(ideals[0].ev_bound, Some(23f64.powf(0.5)));
    }

    #[test]
    fn pure_cubic_rows() {
        let ingested = vec![IngestedClassRecord { label: "x3-2".into(), disc: -108, h: 1, structure: Some(vec![]) }];
        let rows = run_pure_cubic_experiment([2, 8, 30], params(5, 0.04), &ingested).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].disc, -108);
        assert_eq!(rows[0].h_ell, Some(1));
        assert_eq!(rows[1].gerth, Some(729));
        assert_eq!(rows[1].h, None);
        assert!(run_pure_cubic_experiment(2..2, params(5, 0.04), &[]).unwrap().is_empty());
        assert!(matches!(run_pure_cubic_experiment([2], params(5, 0.05), &[]), Err(Error::ConstraintViolated(_))));
    }

    #[test]
    fn hlgr_values() {
        let c = hlgr_parameter_check(15, 1.0f64 / 343.0, 5).unwrap();
        assert!(c.pass);
        assert!((c.theta - 6.8665e-5).abs() < 1e-9);
        assert!((c.xi - 4.5766e-6).abs() < 1e-10);
        assert!((c.threshold - 6.8663e-6).abs() < 1e-10);
        assert!(!hlgr_parameter_check(1, 0.5f64, 5).unwrap().pass);
        let z = hlgr_parameter_check(15, 0.0f64, 5).unwrap();
        assert_eq!(z.xi, 1.0 / z.l as f64);
        let tighter = hlgr_parameter_check(15, 1.0f64 / 300.0, 5).unwrap();
        assert!(tighter.xi > c.xi);
        let exact = hlgr_parameter_check_exact(15, &BigRational::new(1.into(), 343.into()), 5).unwrap();
        assert!(exact.pass);
        assert_eq!(exact.l, 262_142);
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.15), "1.50000000000e-1");
        assert_eq!(format_float(1234.5), "1.23450000000e3");
    }
}
