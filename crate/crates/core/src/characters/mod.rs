//! Dirichlet characters modulo `q` with exact root-of-unity values.
//!
//! A character is stored through the CRT decomposition of `(Z/q)^*` into
//! local groups `(Z/p^e)^*`. Each local group is written as a product of
//! cyclic factors with fixed generators:
//!
//! * odd `p^e`: the smallest primitive root modulo `p^e`;
//! * `4`: the class of `-1`;
//! * `2^e`, `e >= 3`: the classes of `-1` and `5`.
//!
//! The character is determined by one exponent index per cyclic factor:
//! `χ(g_j) = exp(2πi·a_j/n_j)`. Global indices enumerate the index tuples in
//! lexicographic order (smallest prime first), so index 0 is principal.

mod unity;

pub use unity::{cyclotomic_polynomial, root_of_unity, CyclotomicSum, UnityValue};

use std::fmt;

use num_complex::Complex;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factorize, is_fundamental_discriminant, kronecker, smallest_primitive_root};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper limit on the total number of table entries `Σ p^e` per character.
pub const TABLE_LIMIT: u64 = 1 << 24;

const NON_UNIT: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicFactor {
    /// Generator residue modulo the local prime power.
    pub generator: u64,
    /// Order of the cyclic factor.
    pub order: u64,
    /// Exponent index `a` with `χ(generator) = exp(2πi·a/order)`.
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalComponent {
    pub prime: u64,
    pub exponent: u32,
    pub modulus: u64,
    pub factors: Vec<CyclicFactor>,
    #[serde(skip)]
    table: Vec<u32>,
}

impl LocalComponent {
    fn order(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| f.order / f.index.gcd(&f.order))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    fn conductor(&self) -> u64 {
        let (p, e) = (self.prime, self.exponent);
        if p != 2 {
            let f = &self.factors[0];
            let o = f.order / f.index.gcd(&f.order);
            if o == 1 {
                return 1;
            }
            let mut c = 1;
            let mut rest = o;
            while rest.is_multiple_of(p) {
                rest /= p;
                c += 1;
            }
            return p.pow(c);
        }
        match e {
            1 => 1,
            2 => {
                if self.factors[0].index == 1 {
                    4
                } else {
                    1
                }
            }
            _ => {
                let five = &self.factors[1];
                let o5 = five.order / five.index.gcd(&five.order);
                if o5 == 1 {
                    if self.factors[0].index == 1 {
                        4
                    } else {
                        1
                    }
                } else {
                    4 * o5
                }
            }
        }
    }

    /// Local value at a residue coprime to or divisible by `p`.
    fn value(&self, residue: u64, order: u64) -> UnityValue {
        match self.table[(residue % self.modulus) as usize] {
            NON_UNIT => UnityValue::Zero,
            e => UnityValue::root(e as u64, order),
        }
    }

    fn fill_table(&mut self, order: u64) {
        let pe = self.modulus;
        let mut table = vec![NON_UNIT; pe as usize];
        // Per-factor exponent step, as a multiple of 1/order.
        let steps: Vec<u64> = self
            .factors
            .iter()
            .map(|f| {
                let g = f.index.gcd(&f.order);
                let local = f.order / g;
                (f.index / g) * (order / local) % order
            })
            .collect();
        let mut residue = 1u64 % pe;
        let mut exponent = 0u64;
        match self.factors.len() {
            0 => {
                if pe == 2 {
                    table[1] = 0;
                }
            }
            1 => {
                let f = &self.factors[0];
                for _ in 0..f.order {
                    table[residue as usize] = exponent as u32;
                    residue = residue * f.generator % pe;
                    exponent = (exponent + steps[0]) % order;
                }
            }
            _ => {
                let (f0, f1) = (&self.factors[0], &self.factors[1]);
                let mut outer = 1u64;
                let mut outer_exp = 0u64;
                for _ in 0..f0.order {
                    residue = outer;
                    exponent = outer_exp;
                    for _ in 0..f1.order {
                        table[residue as usize] = exponent as u32;
                        residue = residue * f1.generator % pe;
                        exponent = (exponent + steps[1]) % order;
                    }
                    outer = outer * f0.generator % pe;
                    outer_exp = (outer_exp + steps[0]) % order;
                }
            }
        }
        self.table = table;
    }
}

/// Local group structure of `(Z/p^e)^*` with all indices zero.
fn local_structure(p: u64, e: u32) -> LocalComponent {
    let pe = p.pow(e);
    let factors = if p != 2 {
        vec![CyclicFactor {
            generator: smallest_primitive_root(p, e),
            order: (p - 1) * p.pow(e - 1),
            index: 0,
        }]
    } else {
        match e {
            1 => vec![],
            2 => vec![CyclicFactor { generator: 3, order: 2, index: 0 }],
            _ => vec![
                CyclicFactor { generator: pe - 1, order: 2, index: 0 },
                CyclicFactor { generator: 5, order: pe / 4, index: 0 },
            ],
        }
    };
    LocalComponent { prime: p, exponent: e, modulus: pe, factors, table: Vec::new() }
}

fn group_structure(q: u64) -> Result<Vec<LocalComponent>> {
    assert!(q >= 1, "modulus must be positive");
    let fac = factorize(q)?;
    let total: u64 = fac.factors().iter().map(|&(p, e)| p.pow(e)).sum();
    if total > TABLE_LIMIT {
        return Err(Error::ModulusTooLarge(q));
    }
    Ok(fac.factors().iter().map(|&(p, e)| local_structure(p, e)).collect())
}

/// A Dirichlet character modulo `q`. Immutable; all caches are filled at
/// construction.
#[derive(Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    components: Vec<LocalComponent>,
    order: u64,
    conductor: u64,
    odd: bool,
    index: u64,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus)
            .field("index", &self.index)
            .field("order", &self.order)
            .field("conductor", &self.conductor)
            .finish()
    }
}

/// Serializable description of a character.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterSummary {
    pub modulus: u64,
    pub index: u64,
    pub order: u64,
    pub conductor: u64,
    pub primitive: bool,
    pub parity: &'static str,
    pub components: Vec<ComponentSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSummary {
    pub prime: u64,
    pub exponent: u32,
    pub generators: Vec<u64>,
    pub indices: Vec<u64>,
}

impl DirichletCharacter {
    fn build(modulus: u64, mut components: Vec<LocalComponent>) -> Self {
        let order = components.iter().map(LocalComponent::order).fold(1, |a, o| a.lcm(&o));
        let conductor = components.iter().map(LocalComponent::conductor).product();
        for c in &mut components {
            c.fill_table(order);
        }
        let index = components
            .iter()
            .flat_map(|c| c.factors.iter())
            .fold(0u64, |acc, f| acc * f.order + f.index);
        let mut chi = DirichletCharacter { modulus, components, order, conductor, odd: false, index };
        chi.odd = modulus > 2 && chi.eval(-1) == UnityValue::MINUS_ONE;
        chi
    }

    /// The principal character modulo `q`.
    pub fn principal(q: u64) -> Result<Self> {
        Ok(Self::build(q, group_structure(q)?))
    }

    /// Character number `index` in the enumeration order modulo `q`.
    pub fn from_index(q: u64, index: u64) -> Result<Self> {
        let mut comps = group_structure(q)?;
        let mut rest = index;
        for f in comps.iter_mut().rev().flat_map(|c| c.factors.iter_mut().rev()) {
            f.index = rest % f.order;
            rest /= f.order;
        }
        if rest != 0 {
            return Err(Error::IndexOutOfRange { modulus: q, index });
        }
        Ok(Self::build(q, comps))
    }

    /// Builds the character whose local values on the fixed generators are
    /// given by `local(prime, generator_residue)`.
    fn from_local_values<F>(q: u64, mut local: F) -> Result<Self>
    where
        F: FnMut(u64, u64) -> UnityValue,
    {
        let mut comps = group_structure(q)?;
        for c in &mut comps {
            for f in &mut c.factors {
                let v = local(c.prime, f.generator);
                let e = v.exponent_over(f.order).ok_or_else(|| {
                    Error::CharacterMismatch(format!(
                        "value {v} at generator {} mod {} is not an {}-th root of unity",
                        f.generator, c.modulus, f.order
                    ))
                })?;
                f.index = e;
            }
        }
        Ok(Self::build(q, comps))
    }

    /// Recovers a character from a completely multiplicative, `q`-periodic
    /// function by sampling it at CRT lifts of the local generators.
    pub fn from_fn<F>(q: u64, f: F) -> Result<Self>
    where
        F: Fn(u64) -> UnityValue,
    {
        let fac = factorize(q)?;
        let chi = Self::from_local_values(q, |p, g| {
            let pe = fac.factors().iter().find(|&&(r, _)| r == p).map(|&(r, e)| r.pow(e)).unwrap();
            f(crt_lift(g, pe, q))
        })?;
        Ok(chi)
    }

    /// All characters modulo `q`, optionally of exact order `order_filter`.
    pub fn enumerate(q: u64, order_filter: Option<u64>) -> Result<Vec<Self>> {
        let base = group_structure(q)?;
        let orders: Vec<u64> = base.iter().flat_map(|c| c.factors.iter().map(|f| f.order)).collect();
        let total: u64 = orders.iter().product();
        let mut out = Vec::new();
        let mut indices = vec![0u64; orders.len()];
        for _ in 0..total {
            let order = indices
                .iter()
                .zip(&orders)
                .map(|(&a, &n)| n / a.gcd(&n))
                .fold(1u64, |acc, o| acc.lcm(&o));
            if order_filter.is_none_or(|m| m == order) {
                let mut comps = base.clone();
                let mut it = indices.iter();
                for f in comps.iter_mut().flat_map(|c| c.factors.iter_mut()) {
                    f.index = *it.next().unwrap();
                }
                out.push(Self::build(q, comps));
            }
            // Lexicographic increment, last factor fastest.
            for k in (0..indices.len()).rev() {
                indices[k] += 1;
                if indices[k] < orders[k] {
                    break;
                }
                indices[k] = 0;
            }
        }
        Ok(out)
    }

    /// The primitive real character `n ↦ (Δ | n)` of conductor `|Δ|`.
    pub fn attach_quadratic(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        Self::from_fn(disc.unsigned_abs(), |n| UnityValue::from_sign(kronecker(disc, n as i64)))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// Order at most two.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn components(&self) -> &[LocalComponent] {
        &self.components
    }

    /// Exponent of `χ(n)` as a multiple of `1/order`, or `None` when
    /// `gcd(n, q) > 1`.
    #[inline]
    pub fn exponent(&self, n: u64) -> Option<u64> {
        let mut e = 0u64;
        for c in &self.components {
            match c.table[(n % c.modulus) as usize] {
                NON_UNIT => return None,
                x => e += x as u64,
            }
        }
        Some(e % self.order)
    }

    pub fn eval(&self, n: i64) -> UnityValue {
        let r = n.rem_euclid(self.modulus as i64) as u64;
        match self.exponent(r) {
            None => UnityValue::Zero,
            Some(e) => UnityValue::root(e, self.order),
        }
    }

    pub fn eval_complex<T: Real>(&self, n: i64) -> Complex<T> {
        self.eval(n).to_complex()
    }

    /// Complex values at `0, 1, …, q-1`.
    pub fn complex_table<T: Real>(&self) -> Vec<Complex<T>> {
        let roots: Vec<Complex<T>> = (0..self.order).map(|e| root_of_unity(e, self.order)).collect();
        (0..self.modulus)
            .map(|n| match self.exponent(n) {
                None => Complex::new(T::zero(), T::zero()),
                Some(e) => roots[e as usize],
            })
            .collect()
    }

    fn map_indices<F: Fn(&CyclicFactor) -> u64>(&self, f: F) -> Self {
        let mut comps = self.components.clone();
        for c in &mut comps {
            for fac in &mut c.factors {
                fac.index = f(fac);
            }
        }
        Self::build(self.modulus, comps)
    }

    pub fn conj(&self) -> Self {
        self.map_indices(|f| (f.order - f.index) % f.order)
    }

    pub fn pow(&self, k: u64) -> Self {
        self.map_indices(|f| ((f.index as u128 * k as u128) % f.order as u128) as u64)
    }

    /// Pointwise product of two characters with the same modulus.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::CharacterMismatch(format!(
                "moduli {} and {}",
                self.modulus, other.modulus
            )));
        }
        let mut comps = self.components.clone();
        for (c, d) in comps.iter_mut().zip(&other.components) {
            for (f, g) in c.factors.iter_mut().zip(&d.factors) {
                f.index = (f.index + g.index) % f.order;
            }
        }
        Ok(Self::build(self.modulus, comps))
    }

    /// The primitive character inducing `self`, together with its conductor.
    pub fn primitivize(&self) -> (Self, u64) {
        let f = self.conductor;
        if f == self.modulus {
            return (self.clone(), f);
        }
        let order = self.order;
        let prim = Self::from_local_values(f, |p, g| {
            let comp = self.components.iter().find(|c| c.prime == p).expect("conductor divides q");
            comp.value(g, order)
        })
        .expect("restriction of a character to its conductor");
        (prim, f)
    }

    /// The character modulo `q` (a multiple of the modulus) induced by `self`.
    pub fn induce(&self, q: u64) -> Result<Self> {
        if !q.is_multiple_of(self.modulus) {
            return Err(Error::CharacterMismatch(format!(
                "{q} is not a multiple of {}",
                self.modulus
            )));
        }
        let order = self.order;
        Self::from_local_values(q, |p, g| {
            match self.components.iter().find(|c| c.prime == p) {
                Some(c) => c.value(g, order),
                None => UnityValue::ONE,
            }
        })
    }

    pub fn summary(&self) -> CharacterSummary {
        CharacterSummary {
            modulus: self.modulus,
            index: self.index,
            order: self.order,
            conductor: self.conductor,
            primitive: self.is_primitive(),
            parity: if self.odd { "odd" } else { "even" },
            components: self
                .components
                .iter()
                .map(|c| ComponentSummary {
                    prime: c.prime,
                    exponent: c.exponent,
                    generators: c.factors.iter().map(|f| f.generator).collect(),
                    indices: c.factors.iter().map(|f| f.index).collect(),
                })
                .collect(),
        }
    }
}

/// `n` with `n ≡ r (mod pe)` and `n ≡ 1 (mod q/pe)`, `0 <= n < q`.
fn crt_lift(r: u64, pe: u64, q: u64) -> u64 {
    let other = q / pe;
    if other == 1 {
        return r % pe;
    }
    // n = 1 + other·k with other·k ≡ r - 1 (mod pe).
    let inv = mod_inverse(other % pe, pe);
    let k = ((r + pe - 1) % pe) as u128 * inv as u128 % pe as u128;
    ((1 + other as u128 * k) % q as u128) as u64
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = num_integer::Integer::extended_gcd(&(a as i128), &(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// Euler's totient of `q`.
pub fn euler_phi(q: u64) -> u64 {
    factorize(q).map(|f| f.euler_phi()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_three_mod_seven() {
        let chars = DirichletCharacter::enumerate(7, Some(3)).unwrap();
        assert_eq!(chars.len(), 2);
        assert_eq!(chars[0].conj(), chars[1]);
        assert!(DirichletCharacter::enumerate(8, Some(3)).unwrap().is_empty());
        let one = DirichletCharacter::enumerate(1, None).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].is_principal());
        assert_eq!(one[0].eval(17), UnityValue::ONE);
    }

    #[test]
    fn quartic_mod_five() {
        // Index 1 sends the generator 2 to i.
        let chi = DirichletCharacter::from_index(5, 1).unwrap();
        assert_eq!(chi.eval(2), UnityValue::root(1, 4));
        assert_eq!(chi.eval(4), UnityValue::MINUS_ONE);
        assert_eq!(chi.eval(3), UnityValue::root(3, 4));
        assert_eq!(chi.eval(5), UnityValue::Zero);
        assert_eq!(chi.eval(7), chi.eval(2));
        assert_eq!(chi.order(), 4);
    }

    #[test]
    fn principal_mod_six() {
        let chi = DirichletCharacter::principal(6).unwrap();
        assert_eq!(chi.eval(5), UnityValue::ONE);
        assert_eq!(chi.eval(4), UnityValue::Zero);
        assert_eq!(chi.index(), 0);
    }

    #[test]
    fn quadratic_characters() {
        let m4 = DirichletCharacter::attach_quadratic(-4).unwrap();
        assert_eq!(m4.eval(1), UnityValue::ONE);
        assert_eq!(m4.eval(3), UnityValue::MINUS_ONE);
        assert!(m4.is_odd());
        let five = DirichletCharacter::attach_quadratic(5).unwrap();
        assert_eq!(five.eval(2), UnityValue::MINUS_ONE);
        assert!(!five.is_odd());
        let twelve = DirichletCharacter::attach_quadratic(12).unwrap();
        assert_eq!(twelve.eval(5), UnityValue::MINUS_ONE);
        assert_eq!(twelve.conductor(), 12);
        assert!(matches!(
            DirichletCharacter::attach_quadratic(-12),
            Err(Error::NotFundamental(-12))
        ));
    }

    #[test]
    fn attach_quadratic_matches_kronecker() {
        for d in [-3i64, -4, -7, -8, -15, -20, -23, -24, 5, 8, 12, 13, 24, 40, 105, -84] {
            let chi = DirichletCharacter::attach_quadratic(d).unwrap();
            assert_eq!(chi.order(), 2);
            assert_eq!(chi.conductor(), d.unsigned_abs());
            assert_eq!(chi.is_odd(), d < 0);
            for n in 0..3 * d.abs() {
                assert_eq!(chi.eval(n), UnityValue::from_sign(kronecker(d, n)), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn primitivize_and_induce() {
        let chi0 = DirichletCharacter::principal(12).unwrap();
        let (p, f) = chi0.primitivize();
        assert_eq!(f, 1);
        assert_eq!(p.modulus(), 1);

        let m4 = DirichletCharacter::attach_quadratic(-4).unwrap();
        let lifted = m4.induce(12).unwrap();
        assert_eq!(lifted.conductor(), 4);
        let (prim, f) = lifted.primitivize();
        assert_eq!(f, 4);
        assert_eq!(prim, m4);

        let five = DirichletCharacter::from_index(5, 1).unwrap();
        assert_eq!(five.primitivize(), (five.clone(), 5));
    }

    #[test]
    fn primitivize_roundtrip_all_small() {
        for q in 1..=120u64 {
            for chi in DirichletCharacter::enumerate(q, None).unwrap() {
                let (prim, f) = chi.primitivize();
                assert!(prim.is_primitive(), "q={q} idx={}", chi.index());
                assert_eq!(q % f, 0);
                assert_eq!(prim.induce(q).unwrap(), chi, "q={q} idx={}", chi.index());
            }
        }
    }

    #[test]
    fn crt_lift_is_correct() {
        for (r, pe, q) in [(2u64, 5u64, 60u64), (3, 4, 12), (5, 9, 90), (1, 7, 7)] {
            let n = crt_lift(r, pe, q);
            assert_eq!(n % pe, r % pe);
            assert_eq!(n % (q / pe), 1 % (q / pe));
        }
    }
}
