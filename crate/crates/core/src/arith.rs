//! Exact integer arithmetic on moduli up to 10^12.
//!
//! Everything here works on `u64` residues normalized to `[0, q)`; products go
//! through `u128` so no intermediate overflows for moduli below 2^63.

use std::collections::HashMap;
use std::fmt;

use arrayvec::ArrayVec;

use crate::{Error, Result};

/// Largest integer accepted by [`factorize`].
pub const FACTORIZE_LIMIT: u64 = 1_000_000_000_000;

/// Below this group order discrete logs are found by a linear scan.
const BSGS_THRESHOLD: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn new(prime: u64, exponent: u32) -> Self {
        PrimePower { prime, exponent }
    }

    pub fn value(&self) -> u64 {
        self.prime.pow(self.exponent)
    }

    /// `φ(p^a) = p^(a-1)(p-1)`.
    pub fn totient(&self) -> u64 {
        if self.exponent == 0 {
            1
        } else {
            self.prime.pow(self.exponent - 1) * (self.prime - 1)
        }
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.prime, self.exponent)
    }
}

/// Canonical prime-power decomposition `n = ∏ p_i^{a_i}`, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// Number of distinct prime divisors `ω(n)`.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Greatest prime divisor `P(n)`; `None` for `n = 1`.
    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|f| f.prime)
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|f| f.prime)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|f| f.exponent == 1)
    }

    pub fn profile(&self) -> MultiplicativeProfile {
        multiplicative_profile(self)
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for f in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..f.exponent {
                pk *= f.prime;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Product of the prime powers; equals `n` by construction.
    pub fn reconstruct(&self) -> u64 {
        self.factors.iter().map(PrimePower::value).product()
    }
}

/// Trial-division factorization of `1 ≤ n ≤ 10^12`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factorize 0"));
    }
    if n > FACTORIZE_LIMIT {
        return Err(Error::Capacity {
            what: "factorization input",
            size: n,
            limit: FACTORIZE_LIMIT,
        });
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push(PrimePower::new(p, e));
        }
    };
    push(2, &mut rest);
    let mut d = 3u64;
    while d * d <= rest {
        push(d, &mut rest);
        d += 2;
    }
    if rest > 1 {
        factors.push(PrimePower::new(rest, 1));
    }
    Ok(Factorization { n, factors })
}

/// Euler φ, ω, τ and Möbius μ of a factorized integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplicativeProfile {
    pub phi: u64,
    pub omega: u32,
    pub tau: u64,
    pub mu: i8,
}

pub fn multiplicative_profile(f: &Factorization) -> MultiplicativeProfile {
    let phi = f.factors.iter().map(PrimePower::totient).product();
    let tau = f.factors.iter().map(|pp| pp.exponent as u64 + 1).product();
    let omega = f.omega();
    let mu = if f.is_squarefree() {
        if omega.is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else {
        0
    };
    MultiplicativeProfile {
        phi,
        omega,
        tau,
        mu,
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// `a mod q` in `[0, q)` for signed `a`.
pub fn reduce(a: i64, q: u64) -> u64 {
    debug_assert!(q > 0);
    (a as i128).rem_euclid(q as i128) as u64
}

pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    if q == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// The residue `ā ∈ [0, q)` with `a·ā ≡ 1 (mod q)`.
pub fn mod_inverse(a: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if q == 1 {
        return Ok(0);
    }
    let r = reduce(a, q);
    let (mut old_r, mut cur_r) = (r as i128, q as i128);
    let (mut old_s, mut cur_s) = (1i128, 0i128);
    while cur_r != 0 {
        let quo = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - quo * cur_r);
        (old_s, cur_s) = (cur_s, old_s - quo * cur_s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, q });
    }
    Ok(old_s.rem_euclid(q as i128) as u64)
}

/// Combine `x ≡ r_i (mod m_i)` for pairwise coprime moduli.
pub fn crt(congruences: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, mi) in congruences {
        if gcd(m, mi) != 1 {
            return Err(Error::domain(format!("moduli {m} and {mi} are not coprime")));
        }
        // x + m·t ≡ r (mod mi)
        let inv = mod_inverse(m as i64, mi)?;
        let diff = (r % mi + mi - x % mi) % mi;
        let t = mul_mod(diff, inv, mi);
        x += m * t;
        m *= mi;
        x %= m;
    }
    Ok((x, m))
}

/// Solutions of `y² ≡ 1 (mod p^a)`.
fn local_square_roots_of_unity(pp: PrimePower) -> Vec<u64> {
    let q = pp.value();
    match (pp.prime, pp.exponent) {
        (_, 0) => vec![0],
        (2, 1) => vec![1],
        (2, 2) => vec![1, 3],
        (2, s) => {
            let half = 1u64 << (s - 1);
            vec![1, half - 1, half + 1, q - 1]
        }
        _ => vec![1, q - 1],
    }
}

/// Sorted residues `y ∈ [0, q)` with `y² ≡ 1 (mod q)`, assembled by CRT from the prime-power cases.
pub fn square_roots_of_unity(q: u64) -> Result<Vec<u64>> {
    let f = factorize(q)?;
    if q == 1 {
        return Ok(vec![0]);
    }
    let mut acc: Vec<(u64, u64)> = vec![(0, 1)];
    for pp in f.factors() {
        let m = pp.value();
        let mut next = Vec::new();
        for &(x, modulus) in &acc {
            for r in local_square_roots_of_unity(*pp) {
                next.push(crt(&[(x, modulus), (r, m)])?);
            }
        }
        acc = next;
    }
    let mut roots: Vec<u64> = acc.into_iter().map(|(x, _)| x).collect();
    roots.sort_unstable();
    Ok(roots)
}

/// Exponent vector of a unit relative to the generators of its unit group.
pub type LogVector = ArrayVec<u64, 2>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitGroupKind {
    /// `(Z/p^a)*` cyclic of `order`, generated by the smallest primitive root.
    Cyclic { generator: u64, order: u64 },
    /// `(Z/2^a)* = <-1> × <5>` for `a ≥ 3`; `cyclic_order = 2^(a-2)`.
    TwoAdic { cyclic_order: u64 },
}

/// Structure of `(Z/p^a Z)*` with canonical generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroupStructure {
    prime_power: PrimePower,
    modulus: u64,
    kind: UnitGroupKind,
}

impl UnitGroupStructure {
    pub fn new(pp: PrimePower) -> Result<Self> {
        if pp.exponent == 0 {
            return Err(Error::domain("unit group of p^0 is not a component"));
        }
        let modulus = pp.value();
        let kind = if pp.prime == 2 && pp.exponent >= 3 {
            UnitGroupKind::TwoAdic {
                cyclic_order: 1u64 << (pp.exponent - 2),
            }
        } else {
            let order = pp.totient();
            UnitGroupKind::Cyclic {
                generator: smallest_primitive_root(modulus, order),
                order,
            }
        };
        Ok(UnitGroupStructure {
            prime_power: pp,
            modulus,
            kind,
        })
    }

    pub fn prime_power(&self) -> PrimePower {
        self.prime_power
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn kind(&self) -> UnitGroupKind {
        self.kind
    }

    /// `φ(p^a)`.
    pub fn order(&self) -> u64 {
        self.prime_power.totient()
    }

    /// `(generator, order)` pairs; the group is their direct product.
    pub fn generators(&self) -> ArrayVec<(u64, u64), 2> {
        let mut gens = ArrayVec::new();
        match self.kind {
            UnitGroupKind::Cyclic { generator, order } => gens.push((generator, order)),
            UnitGroupKind::TwoAdic { cyclic_order } => {
                gens.push((self.modulus - 1, 2));
                gens.push((5, cyclic_order));
            }
        }
        gens
    }

    pub fn orders(&self) -> LogVector {
        self.generators().iter().map(|&(_, o)| o).collect()
    }

    /// Unit with the given exponent vector.
    pub fn power(&self, exponents: &[u64]) -> u64 {
        self.generators()
            .iter()
            .zip(exponents)
            .fold(1 % self.modulus, |acc, (&(g, _), &e)| {
                mul_mod(acc, pow_mod(g, e, self.modulus), self.modulus)
            })
    }

    pub fn discrete_log(&self, a: i64) -> Result<LogVector> {
        let m = self.modulus;
        let r = reduce(a, m);
        if gcd(r, m) != 1 {
            return Err(Error::domain(format!("{a} is not a unit modulo {m}")));
        }
        let mut out = LogVector::new();
        match self.kind {
            UnitGroupKind::Cyclic { generator, order } => {
                out.push(discrete_log_cyclic(generator, r, order, m).expect("generator spans group"));
            }
            UnitGroupKind::TwoAdic { cyclic_order } => {
                let sign = if r % 4 == 1 { 0 } else { 1 };
                let positive = if sign == 1 { m - r } else { r };
                out.push(sign);
                out.push(
                    discrete_log_cyclic(5, positive, cyclic_order, m)
                        .expect("units ≡ 1 mod 4 lie in <5>"),
                );
            }
        }
        Ok(out)
    }

    /// Visit every unit once together with its exponent vector, in lexicographic exponent order.
    pub fn for_each_unit(&self, mut f: impl FnMut(&[u64], u64)) {
        let gens = self.generators();
        let m = self.modulus;
        match gens.as_slice() {
            [(g, order)] => {
                let mut x = 1 % m;
                for t in 0..*order {
                    f(&[t], x);
                    x = mul_mod(x, *g, m);
                }
            }
            [(g0, o0), (g1, o1)] => {
                let mut head = 1 % m;
                for s in 0..*o0 {
                    let mut x = head;
                    for t in 0..*o1 {
                        f(&[s, t], x);
                        x = mul_mod(x, *g1, m);
                    }
                    head = mul_mod(head, *g0, m);
                }
            }
            _ => unreachable!("unit groups of prime powers have one or two generators"),
        }
    }
}

/// Multiplicative order of `a` modulo `m` (a must be a unit).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let phi = factorize(m).expect("positive modulus").profile().phi;
    let mut order = phi;
    for pp in factorize(phi).expect("positive totient").factors() {
        for _ in 0..pp.exponent {
            if pow_mod(a, order / pp.prime, m) == 1 % m {
                order /= pp.prime;
            } else {
                break;
            }
        }
    }
    order
}

fn smallest_primitive_root(modulus: u64, order: u64) -> u64 {
    if modulus <= 2 {
        return 1 % modulus.max(2);
    }
    let order_primes: Vec<u64> = factorize(order)
        .expect("positive order")
        .factors()
        .iter()
        .map(|pp| pp.prime)
        .collect();
    (2..modulus)
        .find(|&g| {
            gcd(g, modulus) == 1
                && order_primes
                    .iter()
                    .all(|&r| pow_mod(g, order / r, modulus) != 1)
        })
        .expect("prime powers of odd primes, 2 and 4 have primitive roots")
}

/// `t ∈ [0, order)` with `g^t ≡ h (mod m)`; baby-step giant-step above [`BSGS_THRESHOLD`].
fn discrete_log_cyclic(g: u64, h: u64, order: u64, m: u64) -> Option<u64> {
    let one = 1 % m;
    let h = h % m;
    if order < BSGS_THRESHOLD {
        let mut x = one;
        for t in 0..order {
            if x == h {
                return Some(t);
            }
            x = mul_mod(x, g, m);
        }
        return None;
    }
    let step = (order as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut x = one;
    for j in 0..step {
        baby.entry(x).or_insert(j);
        x = mul_mod(x, g, m);
    }
    // x = g^step; giant stride is its inverse
    let stride = mod_inverse(x as i64, m).ok()?;
    let mut gamma = h;
    for i in 0..=step {
        if let Some(&j) = baby.get(&gamma) {
            let t = i * step + j;
            if t < order {
                return Some(t);
            }
        }
        gamma = mul_mod(gamma, stride, m);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors().iter().map(|pp| (pp.prime, pp.exponent)).collect()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(pairs(&factorize(12).unwrap()), vec![(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(pairs(&factorize(360).unwrap()), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
        assert!(matches!(factorize(FACTORIZE_LIMIT + 1), Err(Error::Capacity { .. })));
        let big = factorize(999_999_000_001).unwrap();
        assert_eq!(big.reconstruct(), 999_999_000_001);
    }

    #[test]
    fn profile_examples() {
        let p = factorize(12).unwrap().profile();
        assert_eq!((p.phi, p.omega, p.tau, p.mu), (4, 2, 6, 0));
        let p = factorize(1).unwrap().profile();
        assert_eq!((p.phi, p.omega, p.tau, p.mu), (1, 0, 1, 1));
        let p = factorize(30).unwrap().profile();
        assert_eq!((p.phi, p.omega, p.tau, p.mu), (8, 3, 8, -1));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(1, 17).unwrap(), 1);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
        assert_eq!(mod_inverse(4, 6), Err(Error::NotInvertible { a: 4, q: 6 }));
    }

    #[test]
    fn square_root_examples() {
        assert_eq!(square_roots_of_unity(5).unwrap(), vec![1, 4]);
        assert_eq!(square_roots_of_unity(8).unwrap(), vec![1, 3, 5, 7]);
        assert_eq!(square_roots_of_unity(12).unwrap(), vec![1, 5, 7, 11]);
        assert_eq!(square_roots_of_unity(2).unwrap(), vec![1]);
        assert_eq!(square_roots_of_unity(1).unwrap(), vec![0]);
    }

    #[test]
    fn unit_group_examples() {
        let g5 = UnitGroupStructure::new(PrimePower::new(5, 1)).unwrap();
        assert_eq!(g5.kind(), UnitGroupKind::Cyclic { generator: 2, order: 4 });
        assert_eq!(g5.discrete_log(3).unwrap().as_slice(), &[3]);

        let g9 = UnitGroupStructure::new(PrimePower::new(3, 2)).unwrap();
        assert_eq!(g9.kind(), UnitGroupKind::Cyclic { generator: 2, order: 6 });
        assert_eq!(g9.discrete_log(4).unwrap().as_slice(), &[2]);

        let g8 = UnitGroupStructure::new(PrimePower::new(2, 3)).unwrap();
        assert_eq!(g8.kind(), UnitGroupKind::TwoAdic { cyclic_order: 2 });
        // 7 ≡ -1 (mod 8), 3 ≡ -5, 5 = 5
        assert_eq!(g8.discrete_log(7).unwrap().as_slice(), &[1, 0]);
        assert_eq!(g8.discrete_log(3).unwrap().as_slice(), &[1, 1]);
        assert_eq!(g8.discrete_log(5).unwrap().as_slice(), &[0, 1]);
        // every exponent pair gives a distinct unit
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..2 {
            for t in 0..2 {
                assert!(seen.insert(g8.power(&[s, t])));
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 3, 5, 7]);

        let g4 = UnitGroupStructure::new(PrimePower::new(2, 2)).unwrap();
        assert_eq!(g4.kind(), UnitGroupKind::Cyclic { generator: 3, order: 2 });
        let g2 = UnitGroupStructure::new(PrimePower::new(2, 1)).unwrap();
        assert_eq!(g2.kind(), UnitGroupKind::Cyclic { generator: 1, order: 1 });
        assert_eq!(g2.discrete_log(1).unwrap().as_slice(), &[0]);

        assert!(g9.discrete_log(6).is_err());
    }

    #[test]
    fn bsgs_large_order() {
        // 7^5 has order 14406 > threshold
        let pp = PrimePower::new(7, 5);
        let g = UnitGroupStructure::new(pp).unwrap();
        for t in [0u64, 1, 255, 256, 9999, 14405] {
            let u = g.power(&[t]);
            assert_eq!(g.discrete_log(u as i64).unwrap().as_slice(), &[t]);
        }
        let g2 = UnitGroupStructure::new(PrimePower::new(2, 12)).unwrap();
        for (s, t) in [(0, 0), (1, 1000), (0, 1023), (1, 512)] {
            let u = g2.power(&[s, t]);
            assert_eq!(g2.discrete_log(u as i64).unwrap().as_slice(), &[s, t]);
        }
    }

    #[test]
    fn crt_combines() {
        assert_eq!(crt(&[(2, 3), (3, 5), (2, 7)]).unwrap(), (23, 105));
        assert!(crt(&[(1, 4), (1, 6)]).is_err());
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(factorize(12).unwrap().divisors(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factorize(1).unwrap().divisors(), vec![1]);
    }
}
