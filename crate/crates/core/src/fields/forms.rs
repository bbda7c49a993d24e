//! Binary quadratic forms `ax² + bxy + cy²`: reduction, composition and
//! reduction cycles of indefinite forms.

use num_integer::Integer;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// `floor(sqrt(n))` for `n >= 0`.
pub(crate) fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl BinaryQuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQuadraticForm { a, b, c }
    }

    /// The form `(a, b, (b² - D)/(4a))`; `None` if that is not integral.
    pub fn from_ab(a: i64, b: i64, disc: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - disc as i128;
        let den = 4 * a as i128;
        (a != 0 && num % den == 0).then(|| Self::new(a, b, (num / den) as i64))
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// The identity of the form class group of discriminant `disc`.
    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Self::from_ab(1, b, disc).expect("disc ≡ 0, 1 mod 4")
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
    }

    /// Reduced positive definite form: `|b| <= a <= c`, and `b >= 0` when
    /// `|b| = a` or `a = c`.
    pub fn is_reduced_definite(&self) -> bool {
        self.a > 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Equivalent reduced form, for positive definite forms.
    pub fn reduce_definite(mut self) -> Self {
        let disc = self.discriminant();
        debug_assert!(disc < 0 && self.a > 0);
        loop {
            // Bring b into (-a, a].
            let two_a = 2 * self.a;
            let mut b = self.b.rem_euclid(two_a);
            if b > self.a {
                b -= two_a;
            }
            self = Self::from_ab(self.a, b, disc).expect("translation keeps discriminant");
            if self.a > self.c {
                self = Self::new(self.c, -self.b, self.a);
                continue;
            }
            if self.b < 0 && (self.a == self.c || -self.b == self.a) {
                self.b = -self.b;
            }
            return self;
        }
    }

    /// Reduced indefinite form: `|√D - 2|a|| < b < √D`.
    pub fn is_reduced_indefinite(&self) -> bool {
        let disc = self.discriminant();
        let s = isqrt(disc);
        let two_a = 2 * self.a.abs();
        self.b > 0 && self.b <= s && self.b + two_a > s && two_a - self.b <= s
    }

    /// One step of the reduction operator
    /// `(a, b, c) ↦ (c, r, (r² - D)/(4c))` with `r ≡ -b (mod 2c)` normalized
    /// to `(√D - 2|c|, √D)` when `|c| < √D` and to `(-|c|, |c|]` otherwise.
    pub fn rho(&self) -> Self {
        let disc = self.discriminant();
        let s = isqrt(disc);
        let c = self.c;
        let m = 2 * c.abs();
        let r = if c.abs() <= s {
            // Unique r ≡ -b mod 2|c| in [s + 1 - 2|c|, s].
            let lo = s + 1 - m;
            lo + (-self.b - lo).rem_euclid(m)
        } else {
            let lo = -c.abs() + 1;
            lo + (-self.b - lo).rem_euclid(m)
        };
        Self::from_ab(c, r, disc).expect("rho keeps discriminant")
    }

    /// Equivalent reduced form, for indefinite forms of non-square
    /// discriminant.
    pub fn reduce_indefinite(mut self) -> Self {
        let mut guard = 0;
        while !self.is_reduced_indefinite() {
            self = self.rho();
            guard += 1;
            assert!(guard < 10_000, "indefinite reduction did not terminate for {self:?}");
        }
        self
    }

    /// The reduction cycle containing a reduced indefinite form.
    pub fn cycle(&self) -> Vec<Self> {
        let mut out = vec![*self];
        let mut f = self.rho();
        while f != *self {
            out.push(f);
            f = f.rho();
        }
        out
    }

    pub fn reduce(self) -> Self {
        if self.discriminant() < 0 {
            self.reduce_definite()
        } else {
            self.reduce_indefinite()
        }
    }

    /// Gauss composition (unreduced).
    pub fn compose_raw(&self, other: &Self) -> Self {
        let disc = self.discriminant();
        debug_assert_eq!(disc, other.discriminant());
        let (f1, f2) = if self.a.abs() > other.a.abs() { (other, self) } else { (self, other) };
        let (a1, b1, _) = (f1.a as i128, f1.b as i128, f1.c as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, d) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let e = a2.extended_gcd(&a1);
            (e.x, e.gcd)
        };
        let (x2, y2, d1) = if s % d == 0 {
            (0, -1, d)
        } else {
            let e = s.extended_gcd(&d);
            (e.x, -e.y, e.gcd)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1.abs());
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc as i128) / (4 * a3);
        Self::new(a3 as i64, b3 as i64, c3 as i64)
    }

    /// Composition followed by reduction.
    pub fn compose(&self, other: &Self) -> Self {
        self.compose_raw(other).reduce()
    }

    /// A form `(p, b, c)` of discriminant `disc` with `p` prime, if `p`
    /// does not stay inert.
    pub fn prime_form(p: i64, disc: i64) -> Option<Self> {
        let m = 4 * p;
        (0..2 * p)
            .find(|&b| (b * b - disc).rem_euclid(m) == 0)
            .and_then(|b| Self::from_ab(p, b, disc))
    }
}
