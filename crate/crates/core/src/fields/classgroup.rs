//! Form class groups of fundamental discriminants and their structure.

use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::forms::{isqrt, BinaryQuadraticForm};
use crate::arith::{factorize, is_fundamental_discriminant, is_prime, primes_up_to};
use crate::error::{Error, Result};

/// Largest `|Δ|` accepted by [`class_group`] by default.
pub const DEFAULT_CLASS_GROUP_CAP: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassGroupMethod {
    DefiniteReduction,
    IndefiniteCycles,
    Ingested,
}

/// Invariant factors `d₁ | d₂ | … | d_r` (all `> 1`) of a finite abelian
/// group. For positive discriminants this is the narrow class group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupStructure {
    pub divisors: Vec<u64>,
    pub h: u64,
    pub method: ClassGroupMethod,
    pub narrow: bool,
}

impl ClassGroupStructure {
    pub fn new(divisors: Vec<u64>, method: ClassGroupMethod, narrow: bool) -> Result<Self> {
        if divisors.iter().any(|&d| d < 2) || divisors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidParameter(format!("{divisors:?} is not a divisibility chain")));
        }
        let h = divisors.iter().product();
        Ok(ClassGroupStructure { divisors, h, method, narrow })
    }

    pub fn rank(&self, p: u64) -> usize {
        self.divisors.iter().filter(|&&d| d % p == 0).count()
    }
}

/// The form class group of a fundamental discriminant with its elements
/// (reduced representatives) and group law.
#[derive(Clone, Debug)]
pub struct FormClassGroup {
    disc: i64,
    elements: Vec<BinaryQuadraticForm>,
    index: HashMap<BinaryQuadraticForm, usize>,
    /// For positive discriminants: every reduced form mapped to its cycle's
    /// representative.
    cycle_of: HashMap<BinaryQuadraticForm, BinaryQuadraticForm>,
}

impl FormClassGroup {
    pub fn new(disc: i64, cap: u64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        if disc.unsigned_abs() > cap {
            return Err(Error::CapExceeded { disc: disc.unsigned_abs(), cap });
        }
        if disc < 0 {
            Ok(Self::definite(disc))
        } else {
            Ok(Self::indefinite(disc))
        }
    }

    /// Closure of the prime forms of norm `<= sqrt(|Δ|/3)` under
    /// composition. Every reduced form has `a` in that range, so these
    /// generate the group.
    fn definite(disc: i64) -> Self {
        let identity = BinaryQuadraticForm::principal(disc).reduce();
        let bound = isqrt(-disc / 3);
        let generators: Vec<BinaryQuadraticForm> = primes_up_to(bound as u64)
            .into_iter()
            .filter_map(|p| BinaryQuadraticForm::prime_form(p as i64, disc))
            .map(|f| f.reduce())
            .filter(|f| *f != identity)
            .collect();
        let mut elements = vec![identity];
        let mut index = HashMap::from([(identity, 0)]);
        let mut frontier = 0;
        while frontier < elements.len() {
            let x = elements[frontier];
            frontier += 1;
            for g in &generators {
                let y = x.compose(g);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y) {
                    e.insert(elements.len());
                    elements.push(y);
                }
            }
        }
        FormClassGroup { disc, elements, index, cycle_of: HashMap::new() }
    }

    /// Reduced indefinite forms grouped into reduction cycles; one element
    /// per cycle.
    fn indefinite(disc: i64) -> Self {
        let s = isqrt(disc);
        let mut reduced = Vec::new();
        let mut b = if (disc - s) % 2 == 0 { s } else { s - 1 };
        while b > 0 {
            let n = (disc - b * b) / 4;
            for a in 1..=n {
                if a * a > n {
                    break;
                }
                if n % a != 0 {
                    continue;
                }
                for abs_a in [a, n / a] {
                    for sign in [1, -1] {
                        let f = BinaryQuadraticForm::new(sign * abs_a, b, -sign * (n / abs_a));
                        if f.is_reduced_indefinite() && f.is_primitive() {
                            reduced.push(f);
                        }
                    }
                }
            }
            b -= 2;
        }
        reduced.sort();
        reduced.dedup();
        let mut cycle_of = HashMap::new();
        let mut elements = Vec::new();
        let mut index = HashMap::new();
        for f in &reduced {
            if cycle_of.contains_key(f) {
                continue;
            }
            let cycle = f.cycle();
            let rep = *cycle.iter().min().expect("nonempty cycle");
            for g in cycle {
                cycle_of.insert(g, rep);
            }
            index.insert(rep, elements.len());
            elements.push(rep);
        }
        // Identity first.
        let id = cycle_of[&BinaryQuadraticForm::principal(disc).reduce_indefinite()];
        let pos = index[&id];
        elements.swap(0, pos);
        for (i, f) in elements.iter().enumerate() {
            index.insert(*f, i);
        }
        FormClassGroup { disc, elements, index, cycle_of }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[BinaryQuadraticForm] {
        &self.elements
    }

    pub fn identity(&self) -> usize {
        0
    }

    fn canonical(&self, f: BinaryQuadraticForm) -> BinaryQuadraticForm {
        let r = f.reduce();
        if self.disc < 0 {
            r
        } else {
            self.cycle_of[&r]
        }
    }

    /// Index of the class of `f`.
    pub fn class_of(&self, f: BinaryQuadraticForm) -> usize {
        self.index[&self.canonical(f)]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.class_of(self.elements[x].compose_raw(&self.elements[y]))
    }

    pub fn pow(&self, x: usize, mut k: u64) -> usize {
        let mut acc = self.identity();
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let h = self.order();
        let mut ord = h;
        for (p, _) in factorize(h).expect("small").factors().iter().copied() {
            while ord.is_multiple_of(p) && self.pow(x, ord / p) == self.identity() {
                ord /= p;
            }
        }
        ord
    }

    /// Invariant factors from the counts `#{x : x^{p^k} = 1}`.
    pub fn structure(&self) -> ClassGroupStructure {
        let orders: Vec<u64> = (0..self.elements.len()).map(|x| self.element_order(x)).collect();
        let h = self.order();
        // Per prime, the exponents e_i of the cyclic p-factors, descending.
        let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
        for &(p, e_total) in factorize(h).expect("small").factors() {
            let val = |mut n: u64| {
                let mut v = 0;
                while n.is_multiple_of(p) {
                    n /= p;
                    v += 1;
                }
                v
            };
            let vals: Vec<u32> = orders.iter().map(|&o| val(o)).collect();
            // s_k = log_p #{x : v_p(ord x) <= k} = Σ_i min(k, e_i).
            let mut s_prev = 0u32;
            let mut at_least = Vec::new();
            for k in 1..=e_total {
                let count = vals.iter().filter(|&&v| v <= k).count() as u64;
                let mut s = 0;
                let mut c = count;
                while c.is_multiple_of(p) && c > 1 {
                    c /= p;
                    s += 1;
                }
                at_least.push(s - s_prev);
                s_prev = s;
            }
            // at_least[k-1] = #{i : e_i >= k}.
            let r = at_least.first().copied().unwrap_or(0) as usize;
            let mut exps = vec![0u32; r];
            for (k, &n) in at_least.iter().enumerate() {
                for e in exps.iter_mut().take(n as usize) {
                    *e = k as u32 + 1;
                }
            }
            per_prime.push((p, exps));
        }
        let r = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let mut divisors = vec![1u64; r];
        for (p, exps) in &per_prime {
            // Largest exponents go to the largest invariant factors.
            for (i, &e) in exps.iter().enumerate() {
                divisors[r - 1 - i] *= p.pow(e);
            }
        }
        let method = if self.disc < 0 {
            ClassGroupMethod::DefiniteReduction
        } else {
            ClassGroupMethod::IndefiniteCycles
        };
        ClassGroupStructure::new(divisors, method, self.disc > 0).expect("invariant factors form a chain")
    }
}

pub fn class_group(disc: i64, cap: u64) -> Result<ClassGroupStructure> {
    Ok(FormClassGroup::new(disc, cap)?.structure())
}

/// `h_ℓ = Π gcd(ℓ, dᵢ)`.
pub fn ell_torsion(g: &ClassGroupStructure, ell: u64) -> Result<u64> {
    if !is_prime(ell) {
        return Err(Error::InvalidParameter(format!("ℓ = {ell} is not prime")));
    }
    Ok(g.divisors.iter().map(|d| d.gcd(&ell)).product())
}

/// 2-rank of the form class group, computed from its structure.
pub fn genus_two_rank(disc: i64) -> Result<usize> {
    Ok(class_group(disc, DEFAULT_CLASS_GROUP_CAP)?.rank(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(d: i64) -> Vec<u64> {
        class_group(d, DEFAULT_CLASS_GROUP_CAP).unwrap().divisors
    }

    #[test]
    fn small_discriminants() {
        assert_eq!(class_group(-23, 1000).unwrap().h, 3);
        assert_eq!(structure(-23), vec![3]);
        assert_eq!(class_group(-4, 1000).unwrap().h, 1);
        assert_eq!(structure(-4), Vec::<u64>::new());
        assert_eq!(structure(-84), vec![2, 2]);
        assert_eq!(structure(-3299), vec![3, 9]);
        assert_eq!(structure(-4027), vec![3, 3]);
    }

    #[test]
    fn narrow_groups() {
        assert_eq!(class_group(40, 1000).unwrap().h, 2);
        assert_eq!(structure(5), Vec::<u64>::new());
        assert_eq!(structure(12), vec![2]);
        assert_eq!(structure(24), vec![2]);
        assert!(class_group(40, 1000).unwrap().narrow);
    }

    #[test]
    fn torsion_and_genus() {
        let g = ClassGroupStructure::new(vec![3], ClassGroupMethod::Ingested, false).unwrap();
        assert_eq!(ell_torsion(&g, 3).unwrap(), 3);
        assert_eq!(ell_torsion(&g, 5).unwrap(), 1);
        let g = ClassGroupStructure::new(vec![2, 6], ClassGroupMethod::Ingested, false).unwrap();
        assert_eq!(ell_torsion(&g, 2).unwrap(), 4);
        assert_eq!(genus_two_rank(-4).unwrap(), 0);
        assert_eq!(genus_two_rank(-84).unwrap(), 2);
        assert_eq!(genus_two_rank(5).unwrap(), 0);
    }

    #[test]
    fn cap_and_validation() {
        assert!(matches!(class_group(-1_000_003, 1000), Err(Error::CapExceeded { .. })));
        assert!(matches!(class_group(-12, 1000), Err(Error::NotFundamental(-12))));
    }
}
