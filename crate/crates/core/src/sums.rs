//! Character sums built on `Λ_χ(m,n,I;q) = Σ_{a∈I, (a,q)=1} χ(ma + n·ā)`.
//!
//! Character values enter as exact roots of unity and are turned into floats
//! once, through a [`ValueTable`]; every sum here is a lookup-and-add loop over
//! that table. Parallel loops collect per-row partial sums in index order and
//! reduce them sequentially, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::arith::{self, Factorization};
use crate::character::{DirichletCharacter, ExponentTable};
use crate::{ComplexValue, Error, Result, Scalar};

/// Largest modulus for the naive `O(q³)` second-moment path.
pub const NAIVE_MOMENT_LIMIT: u64 = 400;
/// Largest modulus for the reduced second-moment path.
pub const REDUCED_MOMENT_LIMIT: u64 = 1000;
/// Largest number of terms in a bilinear form.
pub const BILINEAR_TERM_LIMIT: u64 = 100_000_000;

fn czero<T: Scalar>() -> ComplexValue<T> {
    ComplexValue::new(T::zero(), T::zero())
}

/// `e(t/den)` for `t ∈ [0, den)`.
#[derive(Clone, Debug)]
pub struct RootTable<T> {
    roots: Vec<ComplexValue<T>>,
}

impl<T: Scalar> RootTable<T> {
    pub fn new(den: u64) -> Self {
        let roots = (0..den)
            .map(|t| crate::RootOfUnity::new(t, den).to_complex())
            .collect();
        RootTable { roots }
    }

    pub fn den(&self) -> u64 {
        self.roots.len() as u64
    }

    #[inline]
    pub fn get(&self, t: u64) -> ComplexValue<T> {
        self.roots[(t % self.den()) as usize]
    }
}

/// Floating values `χ(a)` for `a ∈ [0, q)`.
#[derive(Clone, Debug)]
pub struct ValueTable<T> {
    modulus: u64,
    values: Vec<ComplexValue<T>>,
}

impl<T: Scalar> ValueTable<T> {
    pub fn new(chi: &DirichletCharacter) -> Self {
        Self::from_exponents(&chi.exponent_table())
    }

    pub fn from_exponents(table: &ExponentTable) -> Self {
        let roots = RootTable::new(table.exponent());
        let values = table
            .numerators()
            .iter()
            .map(|&n| {
                if n == ExponentTable::ZERO {
                    czero()
                } else {
                    roots.get(n as u64)
                }
            })
            .collect();
        ValueTable {
            modulus: table.modulus(),
            values,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[ComplexValue<T>] {
        &self.values
    }

    #[inline]
    pub fn at(&self, a: u64) -> ComplexValue<T> {
        self.values[a as usize]
    }

    pub fn get(&self, a: i64) -> ComplexValue<T> {
        self.values[arith::reduce(a, self.modulus) as usize]
    }
}

/// Summation range `[start, start + len)`; `len = q` gives the complete sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalSpec {
    pub start: i64,
    pub len: u64,
}

impl IntervalSpec {
    pub fn new(start: i64, len: u64, q: u64) -> Result<Self> {
        if len > q {
            return Err(Error::domain(format!("interval length {len} exceeds modulus {q}")));
        }
        Ok(IntervalSpec { start, len })
    }

    /// `[x+1, x+q]`.
    pub fn complete(x: i64, q: u64) -> Self {
        IntervalSpec {
            start: x + 1,
            len: q,
        }
    }

    pub fn shifted(&self, by: i64) -> Self {
        IntervalSpec {
            start: self.start + by,
            len: self.len,
        }
    }
}

/// Second-moment evaluation strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentStrategy {
    /// All `q²` sums evaluated directly.
    Naive,
    /// `Λ(m,n) = Λ(1, mn)` on unit rows, direct evaluation elsewhere.
    Reduced,
}

impl MomentStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            MomentStrategy::Naive => "naive",
            MomentStrategy::Reduced => "reduced",
        }
    }

    pub fn limit(&self) -> u64 {
        match self {
            MomentStrategy::Naive => NAIVE_MOMENT_LIMIT,
            MomentStrategy::Reduced => REDUCED_MOMENT_LIMIT,
        }
    }
}

/// Weights `λ_a` on the reduced residues mod `q`.
#[derive(Clone, Debug)]
pub struct WeightVector<T> {
    modulus: u64,
    values: Vec<ComplexValue<T>>,
}

impl<T: Scalar> WeightVector<T> {
    /// Build from `(a, λ_a)` pairs; unlisted units get weight 0.
    pub fn new(q: u64, entries: impl IntoIterator<Item = (u64, ComplexValue<T>)>) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        let mut values = vec![czero(); q as usize];
        for (a, w) in entries {
            let r = a % q;
            if arith::gcd(r, q) != 1 && q > 1 {
                return Err(Error::domain(format!("weight index {a} is not coprime to {q}")));
            }
            values[r as usize] = w;
        }
        Ok(WeightVector { modulus: q, values })
    }

    pub fn constant(q: u64, c: ComplexValue<T>) -> Self {
        let values = (0..q)
            .map(|a| if arith::gcd(a, q) == 1 { c } else { czero() })
            .collect();
        WeightVector { modulus: q, values }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, a: u64) -> ComplexValue<T> {
        self.values[(a % self.modulus) as usize]
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    pub fn scaled(&self, c: ComplexValue<T>) -> Self {
        WeightVector {
            modulus: self.modulus,
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }
}

/// Precomputed tables for repeated `Λ_χ` evaluation mod `q`.
#[derive(Clone, Debug)]
pub struct LambdaEvaluator<T> {
    q: u64,
    table: ValueTable<T>,
    /// Reduced residues in `[0, q)`, ascending.
    units: Vec<u64>,
    /// `inverses[i]` is the inverse of `units[i]`.
    inverses: Vec<u64>,
    is_unit: Vec<bool>,
}

impl<T: Scalar> LambdaEvaluator<T> {
    pub fn new(chi: &DirichletCharacter) -> Self {
        let q = chi.modulus();
        let table = ValueTable::new(chi);
        let is_unit: Vec<bool> = (0..q).map(|a| arith::gcd(a, q) == 1).collect();
        let units: Vec<u64> = (0..q).filter(|&a| is_unit[a as usize]).collect();
        let inverses = units
            .iter()
            .map(|&a| arith::mod_inverse(a as i64, q).expect("unit"))
            .collect();
        LambdaEvaluator {
            q,
            table,
            units,
            inverses,
            is_unit,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.units.len() as u64
    }

    pub fn table(&self) -> &ValueTable<T> {
        &self.table
    }

    /// `Λ_χ(m, n; q)`, `m, n` already reduced.
    fn complete_reduced(&self, m: u64, n: u64) -> ComplexValue<T> {
        let q = self.q;
        let mut acc = czero();
        // ma + nā (mod q)
        for (&a, &inv) in self.units.iter().zip(&self.inverses) {
            let idx = (m * a % q + n * inv % q) % q;
            acc = acc + self.table.at(idx);
        }
        acc
    }

    pub fn complete(&self, m: i64, n: i64) -> ComplexValue<T> {
        self.complete_reduced(arith::reduce(m, self.q), arith::reduce(n, self.q))
    }

    pub fn incomplete(&self, m: i64, n: i64, interval: &IntervalSpec) -> ComplexValue<T> {
        let q = self.q;
        let (m, n) = (arith::reduce(m, q), arith::reduce(n, q));
        let mut acc = czero();
        let mut a = arith::reduce(interval.start, q);
        for _ in 0..interval.len {
            if self.is_unit[a as usize] {
                let inv = arith::mod_inverse(a as i64, q).expect("unit");
                acc = acc + self.table.at((m * a % q + n * inv % q) % q);
            }
            a = if a + 1 == q { 0 } else { a + 1 };
        }
        acc
    }

    /// Values `Λ(m, n)` at unit `a` along one period, i.e. the terms of every incomplete sum.
    pub fn terms(&self, m: i64, n: i64) -> Vec<ComplexValue<T>> {
        let q = self.q;
        let (m, n) = (arith::reduce(m, q), arith::reduce(n, q));
        let mut out = vec![czero(); q as usize];
        for (&a, &inv) in self.units.iter().zip(&self.inverses) {
            out[a as usize] = self.table.at((m * a % q + n * inv % q) % q);
        }
        out
    }

    /// Row-major `q × q` table of `Λ(m, n)`, computed with `strategy`.
    pub fn lambda_table(&self, strategy: MomentStrategy) -> Vec<ComplexValue<T>> {
        let q = self.q;
        let base: Option<Vec<ComplexValue<T>>> = match strategy {
            MomentStrategy::Naive => None,
            MomentStrategy::Reduced => Some(
                (0..q)
                    .into_par_iter()
                    .map(|k| self.complete_reduced(1, k))
                    .collect(),
            ),
        };
        let rows: Vec<Vec<ComplexValue<T>>> = (0..q)
            .into_par_iter()
            .map(|m| match &base {
                Some(base) if self.is_unit[m as usize] => {
                    (0..q).map(|n| base[(m * n % q) as usize]).collect()
                }
                _ => (0..q).map(|n| self.complete_reduced(m, n)).collect(),
            })
            .collect();
        rows.concat()
    }

    /// `𝒦(χ,q) = Σ_{m,n mod q} |Λ(m,n)|²`.
    pub fn second_moment(&self, strategy: MomentStrategy) -> Result<T> {
        check_capacity("second-moment modulus", self.q, strategy.limit())?;
        let q = self.q;
        let row_sums: Vec<T> = match strategy {
            MomentStrategy::Naive => (0..q)
                .into_par_iter()
                .map(|m| row_norm(q, |n| self.complete_reduced(m, n)))
                .collect(),
            MomentStrategy::Reduced => {
                // n ↦ mn permutes residues for unit m, so each unit row has the same sum.
                let unit_row = row_norm(q, |k| self.complete_reduced(1, k));
                (0..q)
                    .into_par_iter()
                    .map(|m| {
                        if self.is_unit[m as usize] {
                            unit_row
                        } else {
                            row_norm(q, |n| self.complete_reduced(m, n))
                        }
                    })
                    .collect()
            }
        };
        Ok(row_sums.into_iter().fold(T::zero(), |a, b| a + b))
    }

    /// `Σ_{m,n} |Σ*_a λ_a χ(ma + nā)|²`.
    pub fn weighted_second_moment(&self, weights: &WeightVector<T>) -> Result<T> {
        if weights.modulus() != self.q {
            return Err(Error::domain("weight vector modulus does not match character"));
        }
        check_capacity("weighted second-moment modulus", self.q, NAIVE_MOMENT_LIMIT)?;
        let q = self.q;
        let w: Vec<ComplexValue<T>> = self.units.iter().map(|&a| weights.get(a)).collect();
        let row_sums: Vec<T> = (0..q)
            .into_par_iter()
            .map(|m| {
                row_norm(q, |n| {
                    let mut acc = czero();
                    for ((&a, &inv), &wa) in self.units.iter().zip(&self.inverses).zip(&w) {
                        acc = acc + wa * self.table.at((m * a % q + n * inv % q) % q);
                    }
                    acc
                })
            })
            .collect();
        Ok(row_sums.into_iter().fold(T::zero(), |a, b| a + b))
    }
}

fn row_norm<T: Scalar>(q: u64, f: impl Fn(u64) -> ComplexValue<T>) -> T {
    (0..q).map(|n| f(n).norm_sqr()).fold(T::zero(), |a, b| a + b)
}

fn check_capacity(what: &'static str, size: u64, limit: u64) -> Result<()> {
    if size > limit {
        Err(Error::Capacity { what, size, limit })
    } else {
        Ok(())
    }
}

pub fn complete_lambda<T: Scalar>(chi: &DirichletCharacter, m: i64, n: i64) -> ComplexValue<T> {
    LambdaEvaluator::new(chi).complete(m, n)
}

pub fn incomplete_lambda<T: Scalar>(
    chi: &DirichletCharacter,
    m: i64,
    n: i64,
    interval: &IntervalSpec,
) -> ComplexValue<T> {
    LambdaEvaluator::new(chi).incomplete(m, n, interval)
}

/// `G(n, χ) = Σ_{a mod q} χ(a) e(na/q)`.
pub fn gauss_sum<T: Scalar>(chi: &DirichletCharacter, n: i64) -> ComplexValue<T> {
    gauss_sum_with(&ValueTable::new(chi), &RootTable::new(chi.modulus()), n)
}

pub fn gauss_sum_with<T: Scalar>(
    values: &ValueTable<T>,
    roots: &RootTable<T>,
    n: i64,
) -> ComplexValue<T> {
    let q = values.modulus();
    let n = arith::reduce(n, q);
    (0..q).fold(czero(), |acc, a| acc + values.at(a) * roots.get(n * a % q))
}

/// `S(χ, q) = Σ_{y² ≡ 1 (q)} χ(y)`, an exact integer since every term is `±1`.
pub fn unit_root_char_sum(chi: &DirichletCharacter) -> i64 {
    arith::square_roots_of_unity(chi.modulus())
        .expect("modulus is valid")
        .into_iter()
        .map(|y| {
            chi.evaluate(y as i64)
                .root()
                .and_then(|r| r.as_sign())
                .expect("χ(y)² = χ(y²) = 1 forces χ(y) = ±1")
        })
        .sum()
}

pub fn second_moment<T: Scalar>(chi: &DirichletCharacter, strategy: MomentStrategy) -> Result<T> {
    check_capacity("second-moment modulus", chi.modulus(), strategy.limit())?;
    LambdaEvaluator::new(chi).second_moment(strategy)
}

pub fn weighted_second_moment<T: Scalar>(
    chi: &DirichletCharacter,
    weights: &WeightVector<T>,
) -> Result<T> {
    check_capacity("weighted second-moment modulus", chi.modulus(), NAIVE_MOMENT_LIMIT)?;
    LambdaEvaluator::new(chi).weighted_second_moment(weights)
}

/// `Σ_{x mod q} e((ax² + bx)/q)`, over units only when `restricted`.
pub fn quadratic_expsum<T: Scalar>(a: i64, b: i64, q: u64, restricted: bool) -> Result<ComplexValue<T>> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    Ok(quadratic_expsum_with(&RootTable::new(q), a, b, restricted))
}

pub fn quadratic_expsum_with<T: Scalar>(
    roots: &RootTable<T>,
    a: i64,
    b: i64,
    restricted: bool,
) -> ComplexValue<T> {
    let q = roots.den();
    let (a, b) = (arith::reduce(a, q), arith::reduce(b, q));
    (0..q)
        .filter(|&x| !restricted || arith::gcd(x, q) == 1)
        .fold(czero(), |acc, x| {
            let e = (arith::mul_mod(a, x * x % q, q) + b * x % q) % q;
            acc + roots.get(e)
        })
}

/// `(1/φ(q)) Σ*_a χ(ca + b)` together with whether `χ` is primitive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalityAverage<T> {
    pub value: ComplexValue<T>,
    /// False when `χ` is not primitive; the value is still the raw average.
    pub precondition_met: bool,
}

pub fn orthogonality_average<T: Scalar>(
    chi: &DirichletCharacter,
    c: i64,
    b: i64,
) -> OrthogonalityAverage<T> {
    orthogonality_average_with(&ValueTable::new(chi), chi.is_primitive(), c, b)
}

pub fn orthogonality_average_with<T: Scalar>(
    values: &ValueTable<T>,
    primitive: bool,
    c: i64,
    b: i64,
) -> OrthogonalityAverage<T> {
    let q = values.modulus();
    let (c, b) = (arith::reduce(c, q), arith::reduce(b, q));
    let mut acc = czero();
    let mut count = 0u64;
    for a in (0..q).filter(|&a| arith::gcd(a, q) == 1) {
        acc = acc + values.at((c * a % q + b) % q);
        count += 1;
    }
    OrthogonalityAverage {
        value: acc / T::from_u64(count).expect("count fits"),
        precondition_met: primitive,
    }
}

/// `C(y; ℓ, q) = Σ*Σ*_{c ≡ dy (ℓ)} χ(c) χ̄(d)` for `ℓ | q`.
///
/// Grouped by class: with `P[r] = Σ*_{c ≡ r (ℓ)} χ(c)`, `C = Σ*_d χ̄(d) P[dy mod ℓ]`.
pub fn character_pair_sum<T: Scalar>(
    chi: &DirichletCharacter,
    y: i64,
    ell: u64,
) -> Result<ComplexValue<T>> {
    character_pair_sum_with(&ValueTable::new(chi), y, ell)
}

pub fn character_pair_sum_with<T: Scalar>(
    values: &ValueTable<T>,
    y: i64,
    ell: u64,
) -> Result<ComplexValue<T>> {
    let q = values.modulus();
    if ell == 0 || !q.is_multiple_of(ell) {
        return Err(Error::domain(format!("{ell} does not divide {q}")));
    }
    let mut classes = vec![czero(); ell as usize];
    for c in 0..q {
        classes[(c % ell) as usize] = classes[(c % ell) as usize] + values.at(c);
    }
    let y = arith::reduce(y, ell);
    Ok((0..q).fold(czero(), |acc, d| {
        acc + values.at(d).conj() * classes[(d % ell * y % ell) as usize]
    }))
}

/// Solutions `(x, y) mod q` of `ax + āy ≡ c`, `bx + b̄y ≡ d`:
/// `gcd(a² − b², q)` when that divides `ad − bc`, otherwise 0.
pub fn congruence_pair_count(a: i64, b: i64, c: i64, d: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    let (ar, br) = (arith::reduce(a, q), arith::reduce(b, q));
    if arith::gcd(arith::mul_mod(ar, br, q), q) != 1 && q > 1 {
        return Err(Error::domain(format!("gcd(ab, q) must be 1 (a={a}, b={b}, q={q})")));
    }
    let (cr, dr) = (arith::reduce(c, q), arith::reduce(d, q));
    let disc = (arith::mul_mod(ar, ar, q) + q - arith::mul_mod(br, br, q)) % q;
    let g = arith::gcd(disc, q);
    let rhs = (arith::mul_mod(ar, dr, q) + q - arith::mul_mod(br, cr, q)) % q;
    Ok(if rhs.is_multiple_of(g) { g } else { 0 })
}

/// `Σ_{m∼M} Σ_{n∼N} Σ*_{a∼A} α_m β_n χ(ma + nā)` with `x ∼ X ⇔ X < x ≤ 2X`.
#[derive(Clone, Debug)]
pub struct BilinearInstance<T> {
    pub a_scale: u64,
    pub m_scale: u64,
    pub n_scale: u64,
    /// `alpha[i]` multiplies `m = M + 1 + i`.
    pub alpha: Vec<ComplexValue<T>>,
    /// `beta[j]` multiplies `n = N + 1 + j`.
    pub beta: Vec<ComplexValue<T>>,
}

impl<T: Scalar> BilinearInstance<T> {
    pub fn new(
        a_scale: u64,
        m_scale: u64,
        n_scale: u64,
        alpha: Vec<ComplexValue<T>>,
        beta: Vec<ComplexValue<T>>,
    ) -> Result<Self> {
        if alpha.len() as u64 != m_scale || beta.len() as u64 != n_scale {
            return Err(Error::domain(format!(
                "coefficient lengths ({}, {}) must equal dyadic ranges ({m_scale}, {n_scale})",
                alpha.len(),
                beta.len()
            )));
        }
        Ok(BilinearInstance {
            a_scale,
            m_scale,
            n_scale,
            alpha,
            beta,
        })
    }

    pub fn term_count(&self) -> u64 {
        self.a_scale
            .saturating_mul(self.m_scale)
            .saturating_mul(self.n_scale)
    }

    pub fn alpha_norm(&self) -> T {
        l2(&self.alpha)
    }

    pub fn beta_norm(&self) -> T {
        l2(&self.beta)
    }

    pub fn m_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.m_scale + 1..=2 * self.m_scale
    }

    pub fn n_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.n_scale + 1..=2 * self.n_scale
    }

    pub fn a_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.a_scale + 1..=2 * self.a_scale
    }
}

fn l2<T: Scalar>(v: &[ComplexValue<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilinearStrategy {
    /// Triple loop with exact character evaluation per term.
    Reference,
    /// Table lookups, parallel over `a`.
    Tabulated,
}

pub fn bilinear_form<T: Scalar>(
    chi: &DirichletCharacter,
    inst: &BilinearInstance<T>,
    strategy: BilinearStrategy,
) -> Result<ComplexValue<T>> {
    check_capacity("bilinear term count", inst.term_count(), BILINEAR_TERM_LIMIT)?;
    let q = chi.modulus();
    let units: Vec<(u64, u64)> = inst
        .a_values()
        .filter(|&a| arith::gcd(a, q) == 1)
        .map(|a| (a, arith::mod_inverse(a as i64, q).expect("unit")))
        .collect();
    match strategy {
        BilinearStrategy::Reference => {
            let mut acc = czero();
            for (&alpha, m) in inst.alpha.iter().zip(inst.m_values()) {
                for (&beta, n) in inst.beta.iter().zip(inst.n_values()) {
                    for &(a, inv) in &units {
                        let arg = m as i128 * a as i128 + n as i128 * inv as i128;
                        let v: ComplexValue<T> = chi.evaluate((arg % q as i128) as i64).to_complex();
                        acc = acc + alpha * beta * v;
                    }
                }
            }
            Ok(acc)
        }
        BilinearStrategy::Tabulated => {
            let table = ValueTable::new(chi);
            let partials: Vec<ComplexValue<T>> = units
                .par_iter()
                .map(|&(a, inv)| {
                    let n_shift: Vec<u64> = inst.n_values().map(|n| n % q * inv % q).collect();
                    let mut outer = czero();
                    for (&alpha, m) in inst.alpha.iter().zip(inst.m_values()) {
                        let ma = m % q * (a % q) % q;
                        let inner = inst
                            .beta
                            .iter()
                            .zip(&n_shift)
                            .fold(czero(), |acc, (&beta, &s)| acc + beta * table.at((ma + s) % q));
                        outer = outer + alpha * inner;
                    }
                    outer
                })
                .collect();
            Ok(partials.into_iter().fold(czero(), |a, b| a + b))
        }
    }
}

/// Whether some primitive character mod `q` is completely even: no component
/// modulus is 2, 4 or 3 (those admit no even primitive character).
pub fn admits_primitive_completely_even(f: &Factorization) -> bool {
    f.factors()
        .iter()
        .all(|pp| !matches!((pp.prime, pp.exponent), (2, 1) | (2, 2) | (3, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::CharacterGroup;
    use crate::sum_tolerance;
    use num_complex::Complex64;

    fn chi(q: u64, i: u64) -> DirichletCharacter {
        CharacterGroup::new(q).unwrap().character(i).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn lambda_examples() {
        // odd character mod 5 vanishes
        let odd = chi(5, 1);
        for m in 0..5 {
            for n in 0..5 {
                assert!(complete_lambda::<f64>(&odd, m, n).norm() <= sum_tolerance(4, 1.0));
            }
        }
        let quad = chi(5, 2);
        let v: Complex64 = complete_lambda(&quad, 1, 1);
        assert!(close(v, Complex64::new(-2.0, 0.0), sum_tolerance(4, 1.0)));

        let g15 = CharacterGroup::new(15).unwrap();
        for c in g15.characters() {
            let (c3, c5) = (c.project(3).unwrap(), c.project(5).unwrap());
            for (m, n) in [(1, 1), (2, 7), (0, 4), (5, 3)] {
                let whole: Complex64 = complete_lambda(&c, m, n);
                let prod: Complex64 = complete_lambda::<f64>(&c3, m, n) * complete_lambda::<f64>(&c5, m, n);
                assert!(close(whole, prod, 1e-9), "{c} {m} {n}");
            }
        }
    }

    #[test]
    fn incomplete_examples() {
        let c = chi(7, 2);
        let ev = LambdaEvaluator::<f64>::new(&c);
        let full = ev.incomplete(3, 2, &IntervalSpec::complete(10, 7));
        assert!(close(full, ev.complete(3, 2), 1e-12));
        assert_eq!(ev.incomplete(3, 2, &IntervalSpec::new(4, 0, 7).unwrap()), Complex64::new(0.0, 0.0));
        let single = ev.incomplete(3, 2, &IntervalSpec::new(4, 1, 7).unwrap());
        let inv4 = arith::mod_inverse(4, 7).unwrap() as i64;
        assert!(close(single, c.evaluate(12 + 2 * inv4).to_complex(), 1e-15));
        let iv = IntervalSpec::new(-3, 5, 7).unwrap();
        assert!(close(ev.incomplete(1, 1, &iv), ev.incomplete(1, 1, &iv.shifted(7)), 1e-13));
        assert!(IntervalSpec::new(0, 8, 7).is_err());
    }

    #[test]
    fn modulus_one_conventions() {
        let c = chi(1, 0);
        let v: Complex64 = complete_lambda(&c, 3, 5);
        assert_eq!(v, Complex64::new(1.0, 0.0));
        assert_eq!(second_moment::<f64>(&c, MomentStrategy::Naive).unwrap(), 1.0);
        assert_eq!(unit_root_char_sum(&c), 1);
    }

    #[test]
    fn gauss_examples() {
        let q = 13u64;
        let g = CharacterGroup::new(q).unwrap();
        for c in g.characters().skip(1) {
            let g1: Complex64 = gauss_sum(&c, 1);
            assert!((g1.norm() - (q as f64).sqrt()).abs() < 1e-12);
            for n in 0..q as i64 {
                let gn: Complex64 = gauss_sum(&c, n);
                let expect = c.conj().evaluate(n).to_complex::<f64>() * g1;
                assert!(close(gn, expect, 1e-11));
            }
            let lhs = g1.conj();
            let rhs = c.evaluate(-1).to_complex::<f64>() * gauss_sum::<f64>(&c.conj(), 1);
            assert!(close(lhs, rhs, 1e-11));
        }
    }

    #[test]
    fn unit_root_sum_examples() {
        // odd prime power, primitive even
        let g = CharacterGroup::new(25).unwrap();
        for c in g.characters().filter(|c| c.is_primitive() && c.parity_flags().is_even) {
            assert_eq!(unit_root_char_sum(&c), 2);
        }
        for s in 3..6 {
            let g = CharacterGroup::new(1 << s).unwrap();
            for c in g.characters().filter(|c| c.is_primitive()) {
                assert_eq!(unit_root_char_sum(&c), 0);
            }
        }
        // the even character mod 4 is the trivial one
        assert_eq!(unit_root_char_sum(&chi(4, 0)), 2);
        assert_eq!(unit_root_char_sum(&chi(2, 0)), 1);
    }

    #[test]
    fn second_moment_examples() {
        let quad = chi(5, 2);
        for s in [MomentStrategy::Naive, MomentStrategy::Reduced] {
            let k: f64 = second_moment(&quad, s).unwrap();
            assert!((k - 160.0).abs() < 1e-9, "{k}");
        }
        let c8 = CharacterGroup::new(8).unwrap().parse_label("8:8=0,1").unwrap();
        assert!(second_moment::<f64>(&c8, MomentStrategy::Reduced).unwrap().abs() < 1e-9);
        let w = WeightVector::constant(5, Complex64::new(1.0, 0.0));
        assert!((weighted_second_moment(&quad, &w).unwrap() - 160.0).abs() < 1e-9);
        let zero = WeightVector::constant(5, Complex64::new(0.0, 0.0));
        assert_eq!(weighted_second_moment(&quad, &zero).unwrap(), 0.0);
        assert!(matches!(
            second_moment::<f64>(&chi(401, 2), MomentStrategy::Naive),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn weights_reject_non_units() {
        let r = WeightVector::new(6, [(1, Complex64::new(1.0, 0.0)), (2, Complex64::new(1.0, 0.0))]);
        assert!(matches!(r, Err(Error::Domain(_))));
        let w = WeightVector::new(6, [(5, Complex64::new(0.0, 2.0))]).unwrap();
        assert_eq!(w.sup_norm(), 2.0);
    }

    #[test]
    fn quadratic_examples() {
        assert!(close(quadratic_expsum(0, 0, 9, false).unwrap(), Complex64::new(9.0, 0.0), 1e-12));
        assert!(quadratic_expsum::<f64>(0, 4, 9, false).unwrap().norm() < 1e-12);
        let v: Complex64 = quadratic_expsum(1, 0, 25, false).unwrap();
        assert!((v.norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonality_examples() {
        let c = chi(9, 1);
        assert!(c.is_primitive());
        let avg = orthogonality_average::<f64>(&c, 9, 2);
        assert!(avg.precondition_met);
        assert!(close(avg.value, c.evaluate(2).to_complex(), 1e-14));
        // 3a + 2 hits 5 and 8 three times each, and χ(2) + χ(5) + χ(8) = 0
        let partial = orthogonality_average::<f64>(&c, 3, 2).value;
        assert!(close(partial, c.evaluate(2).to_complex() * -0.5, 1e-14));
        assert!(orthogonality_average::<f64>(&c, 3, 3).value.norm() < 1e-14);
        assert!(orthogonality_average::<f64>(&c, 0, 3).value.norm() < 1e-14);
        assert!(!orthogonality_average::<f64>(&chi(9, 3), 1, 1).precondition_met);
    }

    #[test]
    fn pair_sum_examples() {
        let c = chi(9, 1);
        let v: Complex64 = character_pair_sum(&c, 2, 9).unwrap();
        assert!(close(v, c.evaluate(2).to_complex::<f64>() * 6.0, 1e-12));
        assert!(character_pair_sum::<f64>(&c, 2, 3).unwrap().norm() < 1e-12);
        assert!(character_pair_sum::<f64>(&c, 3, 9).unwrap().norm() < 1e-12);
        assert!(matches!(character_pair_sum::<f64>(&c, 1, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn congruence_examples() {
        assert_eq!(congruence_pair_count(3, 3, 2, 2, 10).unwrap(), 10);
        for c in 0..5 {
            for d in 0..5 {
                assert_eq!(congruence_pair_count(1, 2, c, d, 5).unwrap(), 1);
            }
        }
        assert_eq!(congruence_pair_count(1, 4, 0, 0, 15).unwrap(), 15);
        assert!(congruence_pair_count(2, 1, 0, 0, 4).is_err());
    }

    #[test]
    fn bilinear_examples() {
        let c = chi(101, 7);
        let z = vec![Complex64::new(0.0, 0.0); 4];
        let ones = vec![Complex64::new(1.0, 0.0); 4];
        let inst = BilinearInstance::new(4, 4, 4, z, ones.clone()).unwrap();
        assert_eq!(bilinear_form(&c, &inst, BilinearStrategy::Tabulated).unwrap(), Complex64::new(0.0, 0.0));
        let single = BilinearInstance::new(
            1,
            1,
            1,
            vec![Complex64::new(2.0, 0.0)],
            vec![Complex64::new(0.0, 1.0)],
        )
        .unwrap();
        // m = n = a = 2
        let inv2 = arith::mod_inverse(2, 101).unwrap() as i64;
        let expect = Complex64::new(0.0, 2.0) * c.evaluate(4 + 2 * inv2).to_complex::<f64>();
        for s in [BilinearStrategy::Reference, BilinearStrategy::Tabulated] {
            assert!(close(bilinear_form(&c, &single, s).unwrap(), expect, 1e-14));
        }
        let big = BilinearInstance::new(1000, 1000, 1000, vec![Complex64::new(1.0, 0.0); 1000], vec![Complex64::new(1.0, 0.0); 1000]).unwrap();
        assert!(matches!(bilinear_form(&c, &big, BilinearStrategy::Tabulated), Err(Error::Capacity { .. })));
        assert!(BilinearInstance::new(4, 4, 3, ones.clone(), ones).is_err());
    }

    #[test]
    fn single_precision_evaluation() {
        let quad = chi(5, 2);
        let v: num_complex::Complex32 = complete_lambda(&quad, 1, 1);
        assert!((v.re + 2.0).abs() < 1e-5);
    }
}
