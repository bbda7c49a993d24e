//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

/// Number of reduced positive definite forms of discriminant `d < 0`, by
/// the `(a, b, c)` triple loop.
pub fn reduced_form_count(d: i64) -> u64 {
    let mut count = 0;
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    count
}

/// Distinct prime divisors of `n`, by trial division.
pub fn omega(mut n: u64) -> usize {
    let mut w = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            w += 1;
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    w + usize::from(n > 1)
}

pub fn is_squarefree(n: u64) -> bool {
    (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p * p))
}

/// Fundamental discriminant test from the definition.
pub fn is_fundamental(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => d != 1 && is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}
