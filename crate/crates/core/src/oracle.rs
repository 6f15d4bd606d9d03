//! Definitional brute-force routes.
//!
//! These evaluate straight from definitions, one exact character evaluation per
//! term, and share no table or reduction logic with [`crate::sums`]. The
//! verification engine uses them as the independent side of each cross-check.

use crate::arith;
use crate::character::DirichletCharacter;
use crate::{ComplexValue, Scalar};

/// Smallest `f | q` such that `χ(a) = 1` for every unit `a ≡ 1 (mod f)`.
pub fn conductor_by_definition(chi: &DirichletCharacter) -> u64 {
    let q = chi.modulus();
    let divisors = arith::factorize(q).expect("valid modulus").divisors();
    divisors
        .into_iter()
        .find(|&f| {
            (1..=q)
                .filter(|&a| a % f == 1 % f && arith::gcd(a, q) == 1)
                .all(|a| chi.evaluate(a as i64).root().is_some_and(|r| r.is_one()))
        })
        .expect("f = q always qualifies")
}

/// Count `(x, y) mod q` with `ax + āy ≡ c` and `bx + b̄y ≡ d` by enumeration.
pub fn congruence_pair_count_enumerated(a: i64, b: i64, c: i64, d: i64, q: u64) -> Option<u64> {
    let ai = arith::mod_inverse(a, q).ok()? as i128;
    let bi = arith::mod_inverse(b, q).ok()? as i128;
    let (a, b, c, d, q) = (a as i128, b as i128, c as i128, d as i128, q as i128);
    let mut count = 0;
    for x in 0..q {
        for y in 0..q {
            if (a * x + ai * y - c).rem_euclid(q) == 0 && (b * x + bi * y - d).rem_euclid(q) == 0 {
                count += 1;
            }
        }
    }
    Some(count)
}

pub fn square_roots_of_unity_enumerated(q: u64) -> Vec<u64> {
    (0..q).filter(|&y| (y * y) % q == 1 % q).collect()
}

/// `Λ_χ(m, n; q)` with `a` ranging over `1..=q`.
pub fn lambda_by_definition<T: Scalar>(chi: &DirichletCharacter, m: i64, n: i64) -> ComplexValue<T> {
    let q = chi.modulus();
    let mut acc = ComplexValue::new(T::zero(), T::zero());
    for a in 1..=q {
        if let Ok(inv) = arith::mod_inverse(a as i64, q) {
            let arg = m as i128 * a as i128 + n as i128 * inv as i128;
            acc = acc + chi.evaluate(arg.rem_euclid(q as i128) as i64).to_complex();
        }
    }
    acc
}

/// `𝒦(χ, q)` from [`lambda_by_definition`] at every `(m, n)`.
pub fn second_moment_by_definition<T: Scalar>(chi: &DirichletCharacter) -> T {
    let q = chi.modulus() as i64;
    let mut acc = T::zero();
    for m in 0..q {
        for n in 0..q {
            acc = acc + lambda_by_definition::<T>(chi, m, n).norm_sqr();
        }
    }
    acc
}

/// `Σ_{y² ≡ 1} χ(y)` through the component factorization `∏_i S(χ_i, p_i^{a_i})`.
pub fn unit_root_char_sum_by_components(chi: &DirichletCharacter) -> i64 {
    (0..chi.group().components().len())
        .map(|i| {
            let comp = chi.component(i);
            square_roots_of_unity_enumerated(comp.modulus())
                .into_iter()
                .map(|y| comp.evaluate(y as i64).root().and_then(|r| r.as_sign()).expect("±1"))
                .sum::<i64>()
        })
        .product()
}

/// Direct `C(y; ℓ, q)` double sum over unit pairs `(c, d)`.
pub fn character_pair_sum_by_definition<T: Scalar>(
    chi: &DirichletCharacter,
    y: i64,
    ell: u64,
) -> ComplexValue<T> {
    let q = chi.modulus();
    let mut acc = ComplexValue::new(T::zero(), T::zero());
    for c in 0..q {
        let cv = chi.evaluate(c as i64);
        if cv.is_zero() {
            continue;
        }
        for d in 0..q {
            let dv = chi.evaluate(d as i64);
            if dv.is_zero() {
                continue;
            }
            if (c as i128 - d as i128 * y as i128).rem_euclid(ell as i128) == 0 {
                acc = acc + (cv * dv.conj()).to_complex();
            }
        }
    }
    acc
}
