mod common;

use common::{is_fundamental, omega, reduced_form_count};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;
use torsion_probe::fields::{
    class_group, ell_torsion, genus_two_rank, pure_cubic_discriminant, squarefree_norm_ideal_count, FormClassGroup,
    DEFAULT_CLASS_GROUP_CAP,
};
use torsion_probe::kernels::CoefficientSeries;

#[test]
fn class_numbers_match_reduced_form_count() {
    for d in (-9999..0).filter(|&d| is_fundamental(d)) {
        let g = class_group(d, DEFAULT_CLASS_GROUP_CAP).unwrap();
        assert_eq!(g.h, reduced_form_count(d), "Δ = {d}");
    }
}

#[test]
fn two_rank_is_omega_minus_one() {
    for n in 3..=10_000i64 {
        for d in [-n, n] {
            if is_fundamental(d) {
                assert_eq!(genus_two_rank(d).unwrap(), omega(n as u64) - 1, "Δ = {d}");
            }
        }
    }
}

#[test]
fn torsion_counts_match_exponentiation() {
    for n in 3..=10_000i64 {
        for d in [-n, n] {
            if !is_fundamental(d) {
                continue;
            }
            let g = FormClassGroup::new(d, DEFAULT_CLASS_GROUP_CAP).unwrap();
            let s = g.structure();
            assert_eq!(s.h, g.order());
            for ell in [2, 3, 5] {
                let direct = (0..g.elements().len()).filter(|&x| g.pow(x, ell) == g.identity()).count() as u64;
                let h_ell = ell_torsion(&s, ell).unwrap();
                assert_eq!(h_ell, direct, "Δ = {d}, ℓ = {ell}");
                assert_eq!(s.h % h_ell, 0);
            }
        }
    }
}

/// Ideals of norm `n` (squarefree, coprime to `Δ`) correspond to
/// `b mod 2n` with `b² ≡ Δ mod 4n`.
fn ideals_of_norm(d: i64, n: i64) -> u64 {
    (0..2 * n).filter(|b| (b * b - d).rem_euclid(4 * n) == 0).count() as u64
}

#[test]
fn ideal_census_matches_enumeration() {
    for d in (-50..=50).filter(|&d| is_fundamental(d)) {
        let series = CoefficientSeries::new(d).unwrap();
        let mut total = 0;
        for n in 1..=100i64 {
            let a = if common::is_squarefree(n as u64) && n.gcd(&d) == 1 { ideals_of_norm(d, n) } else { 0 };
            assert_eq!(series.a(n as u64) as u64, a, "Δ = {d}, n = {n}");
            total += a;
            assert_eq!(squarefree_norm_ideal_count(d, n as u64).unwrap(), total, "Δ = {d}, X = {n}");
        }
    }
}

type Q = Ratio<i128>;

/// Coefficients of `x³ - e₁x² + e₂x - e₃` for multiplication by
/// `u₀ + u₁θ + u₂θ²` where `θ³ = d`.
fn char_poly(u: [Q; 3], d: i128) -> [Q; 3] {
    let d = Q::from_integer(d);
    let m = [[u[0], d * u[2], d * u[1]], [u[1], u[0], d * u[2]], [u[2], u[1], u[0]]];
    let e1 = m[0][0] + m[1][1] + m[2][2];
    let minor = |i: usize, j: usize| m[i][i] * m[j][j] - m[i][j] * m[j][i];
    let e2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let e3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    [e1, e2, e3]
}

/// Row-style Hermite reduction of rational vectors to a basis of the
/// lattice they span.
fn lattice_basis(rows: &[[Q; 3]]) -> [[Q; 3]; 3] {
    let l = rows.iter().flatten().fold(1i128, |acc, x| acc.lcm(x.denom()));
    let mut v: Vec<[i128; 3]> = rows
        .iter()
        .map(|r| [0, 1, 2].map(|i| (r[i] * Q::from_integer(l)).to_integer()))
        .collect();
    for col in 0..3 {
        loop {
            let pivot = (col..v.len()).filter(|&i| v[i][col] != 0).min_by_key(|&i| v[i][col].abs());
            let Some(p) = pivot else { panic!("lattice not of full rank") };
            v.swap(col, p);
            let mut done = true;
            for i in col + 1..v.len() {
                let q = Integer::div_floor(&v[i][col], &v[col][col]);
                for j in 0..3 {
                    v[i][j] -= q * v[col][j];
                }
                done &= v[i][col] == 0;
            }
            if done {
                break;
            }
        }
    }
    [0, 1, 2].map(|i| v[i].map(|x| Q::new(x, l)))
}

fn det(b: &[[Q; 3]; 3]) -> Q {
    b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])
}

/// `[O_K : Z[∛d]]`, by adjoining integral elements `(Σ cᵢωᵢ)/p` while any
/// exist.
fn equation_order_index(d: u64) -> i128 {
    let one = Q::from_integer(1);
    let zero = Q::from_integer(0);
    let mut basis = [[one, zero, zero], [zero, one, zero], [zero, zero, one]];
    let mut primes = vec![3u64];
    let mut m = d;
    let mut p = 2;
    while m > 1 {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        // Eisenstein at p when p ∥ d.
        if e >= 2 && p != 3 {
            primes.push(p);
        }
        p += 1;
    }
    for p in primes {
        'grow: loop {
            let pq = Q::from_integer(p as i128);
            for c in 1..(p * p * p) {
                let cs = [c % p, (c / p) % p, c / (p * p)].map(|x| Q::from_integer(x as i128));
                let alpha: [Q; 3] =
                    [0, 1, 2].map(|j| (cs[0] * basis[0][j] + cs[1] * basis[1][j] + cs[2] * basis[2][j]) / pq);
                if !char_poly(alpha, d as i128).iter().all(|x| x.is_integer()) {
                    continue;
                }
                let grown = lattice_basis(&[basis[0], basis[1], basis[2], alpha]);
                if det(&grown).abs() < det(&basis).abs() {
                    basis = grown;
                    continue 'grow;
                }
            }
            break;
        }
    }
    (one / det(&basis).abs()).to_integer()
}

#[test]
fn pure_cubic_discriminants_match_index_computation() {
    for d in 2..=500u64 {
        let cubefree = (2..).take_while(|p| p * p * p <= d).all(|p| d % (p * p * p) != 0);
        if !cubefree {
            assert!(pure_cubic_discriminant(d).is_err());
            continue;
        }
        let index = equation_order_index(d);
        let disc = -27 * (d as i128) * (d as i128) / (index * index);
        assert_eq!(pure_cubic_discriminant(d).unwrap().disc as i128, disc, "d = {d}");
    }
}
