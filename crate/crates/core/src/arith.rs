//! Elementary integer arithmetic: modular powers, primality, factorization,
//! sieves and the Kronecker symbol.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization `n = Π p^e`, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_cubefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e <= 2)
    }

    /// Largest divisor all of whose prime factors occur to exponent at least two.
    pub fn squarefull_part(&self) -> u64 {
        self.factors
            .iter()
            .filter(|&&(_, e)| e >= 2)
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// `σ_{-1}(n) = Σ_{d | n} 1/d`, exact.
    pub fn sigma_minus_one(&self) -> Ratio<u64> {
        // σ(n)/n, computed per prime power to stay small.
        self.factors
            .iter()
            .fold(Ratio::from_integer(1), |acc, &(p, e)| {
                let pe = p.pow(e);
                let sigma = (p.pow(e + 1) - 1) / (p - 1);
                acc * Ratio::new(sigma, pe)
            })
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn mobius(&self) -> i32 {
        if !self.is_squarefree() {
            0
        } else if self.omega().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Pollard-Brent iteration budget per composite cofactor.
pub const DEFAULT_FACTOR_BUDGET: u64 = 1 << 22;

pub fn factorize(n: u64) -> Result<Factorization> {
    factorize_with_budget(n, DEFAULT_FACTOR_BUDGET)
}

pub fn factorize_with_budget(n: u64, budget: u64) -> Result<Factorization> {
    assert!(n >= 1, "factorize(0)");
    let mut rest = n;
    let mut primes: Vec<u64> = Vec::new();
    for p in [2u64, 3, 5] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    let mut p = 7u64;
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while p <= 1000 && p * p <= rest {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
        p += steps[i];
        i = (i + 1) % 8;
    }
    let mut stack = vec![];
    if rest > 1 {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        if let Some(r) = exact_sqrt(m) {
            stack.push(r);
            stack.push(r);
            continue;
        }
        let d = pollard_brent(m, budget).ok_or(Error::FactorizationTooLarge(n))?;
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

fn exact_sqrt(m: u64) -> Option<u64> {
    let r = (m as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&x| x.checked_mul(x) == Some(m))
}

fn pollard_brent(n: u64, budget: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let mut spent = 0u64;
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let mut g = 1;
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
            spent += r;
            if spent > budget {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

/// Smallest primitive root modulo `p^e` for an odd prime `p`.
pub fn smallest_primitive_root(p: u64, e: u32) -> u64 {
    debug_assert!(p > 2 && is_prime(p));
    let pe = p.pow(e);
    let phi = (p - 1) * p.pow(e - 1);
    let mut prime_divisors: Vec<u64> = factorize(p - 1).unwrap().primes().collect();
    if e > 1 {
        prime_divisors.push(p);
    }
    (2..pe)
        .find(|&g| {
            g % p != 0 && prime_divisors.iter().all(|&r| pow_mod(g, phi / r, pe) != 1)
        })
        .expect("odd prime powers are cyclic")
}

/// Sieve of Eratosthenes, primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const SEGMENT: u64 = 1 << 18;

/// Calls `f(p)` for every prime `lo < p <= hi`, in ascending order, using a
/// segmented sieve.
pub fn for_each_prime_in<F: FnMut(u64)>(lo: u64, hi: u64, mut f: F) {
    if hi < 2 || hi <= lo {
        return;
    }
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    let mut start = lo + 1;
    let mut marks = vec![false; SEGMENT as usize];
    while start <= hi {
        let end = (start + SEGMENT - 1).min(hi);
        let len = (end - start + 1) as usize;
        marks[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut j = (start.div_ceil(p) * p).max(p * p);
            while j <= end {
                marks[(j - start) as usize] = true;
                j += p;
            }
        }
        for (i, &composite) in marks[..len].iter().enumerate() {
            let n = start + i as u64;
            if !composite && n >= 2 {
                f(n);
            }
        }
        start = end + 1;
    }
}

/// `lpf[n]` = largest prime factor of `n` for `n <= limit` (`lpf[1] = 1`).
pub fn largest_prime_factor_table(limit: usize) -> Vec<u32> {
    let mut lpf = vec![0u32; limit + 1];
    if limit >= 1 {
        lpf[1] = 1;
    }
    for p in 2..=limit {
        if lpf[p] == 0 {
            let mut j = p;
            while j <= limit {
                lpf[j] = p as u32;
                j += p;
            }
        }
    }
    lpf
}

/// Von Mangoldt function `Λ(n)` for `0 <= n <= limit` (`Λ(0) = 0`).
pub fn von_mangoldt_table(limit: usize) -> Vec<f64> {
    let mut table = vec![0.0; limit + 1];
    for p in primes_up_to(limit as u64) {
        let lp = (p as f64).ln();
        let mut pk = p;
        while pk <= limit as u64 {
            table[pk as usize] = lp;
            match pk.checked_mul(p) {
                Some(next) => pk = next,
                None => break,
            }
        }
    }
    table
}

/// Kronecker symbol `(d | n)`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n_abs = n.unsigned_abs();
    if n < 0 && d < 0 {
        result = -result;
    }
    let twos = n_abs.trailing_zeros();
    n_abs >>= twos;
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    // Jacobi (d | n_abs) for odd n_abs.
    let m = n_abs as i128;
    let mut a = (d as i128).rem_euclid(m);
    let mut b = m;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = b % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            result = -result;
        }
        a %= b;
    }
    if b == 1 {
        result
    } else {
        0
    }
}

/// True when `d` is the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |m: i64| -> bool {
        m != 0 && factorize(m.unsigned_abs()).map(|f| f.is_squarefree()).unwrap_or(false)
    };
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}
