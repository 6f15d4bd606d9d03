//! Dirichlet characters mod `q`, labeled by exponent vectors on canonical generators.
//!
//! A character is the product of its prime-power components. Component `i`
//! sends the generator `g_ij` of `(Z/p_i^{a_i})*` to `e(k_ij / ord_ij)`; the
//! vector `(k_ij)` is the character's label. Enumeration is lexicographic in
//! the flattened label, so index 0 is always the trivial character.

use std::fmt;
use std::sync::Arc;

use crate::arith::{self, Factorization, LogVector, UnitGroupKind, UnitGroupStructure};
use crate::{ComplexValue, Error, Result, Scalar};

/// Largest modulus accepted by [`CharacterGroup::new`].
pub const MAX_MODULUS: u64 = 1_000_000;

/// Exact root of unity `e(num/den)` with `0 ≤ num < den`, `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "root of unity needs a positive denominator");
        let num = num % den;
        let g = arith::gcd(num, den);
        if num == 0 {
            return Self::ONE;
        }
        RootOfUnity {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Multiplicative order of the root.
    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn conj(&self) -> Self {
        RootOfUnity::new(self.den - self.num, self.den)
    }

    pub fn pow(&self, k: u64) -> Self {
        RootOfUnity::new(arith::mul_mod(self.num, k, self.den), self.den)
    }

    /// `±1` when the root is real.
    pub fn as_sign(&self) -> Option<i64> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex<T: Scalar>(&self) -> ComplexValue<T> {
        if let Some(s) = self.as_sign() {
            return ComplexValue::new(T::from_f64_lossy(s as f64), T::zero());
        }
        let angle = std::f64::consts::TAU * self.num as f64 / self.den as f64;
        let (s, c) = angle.sin_cos();
        ComplexValue::new(T::from_f64_lossy(c), T::from_f64_lossy(s))
    }
}

impl std::ops::Mul for RootOfUnity {
    type Output = RootOfUnity;

    fn mul(self, rhs: RootOfUnity) -> RootOfUnity {
        let den = arith::lcm(self.den, rhs.den);
        let num = self.num * (den / self.den) + rhs.num * (den / rhs.den);
        RootOfUnity::new(num, den)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.num, self.den)
    }
}

/// `χ(a)`: zero off the units, otherwise an exact root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CharacterValue {
    Zero,
    Root(RootOfUnity),
}

impl CharacterValue {
    pub fn is_zero(&self) -> bool {
        matches!(self, CharacterValue::Zero)
    }

    pub fn root(&self) -> Option<RootOfUnity> {
        match self {
            CharacterValue::Zero => None,
            CharacterValue::Root(r) => Some(*r),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            CharacterValue::Zero => CharacterValue::Zero,
            CharacterValue::Root(r) => CharacterValue::Root(r.conj()),
        }
    }

    pub fn to_complex<T: Scalar>(&self) -> ComplexValue<T> {
        match self {
            CharacterValue::Zero => ComplexValue::new(T::zero(), T::zero()),
            CharacterValue::Root(r) => r.to_complex(),
        }
    }
}

impl std::ops::Mul for CharacterValue {
    type Output = CharacterValue;

    fn mul(self, rhs: CharacterValue) -> CharacterValue {
        match (self, rhs) {
            (CharacterValue::Root(a), CharacterValue::Root(b)) => CharacterValue::Root(a * b),
            _ => CharacterValue::Zero,
        }
    }
}

#[derive(Debug)]
struct GroupInner {
    modulus: u64,
    factorization: Factorization,
    components: Vec<UnitGroupStructure>,
    phi: u64,
    exponent: u64,
}

/// The group of Dirichlet characters mod `q`. Cheap to clone.
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    inner: Arc<GroupInner>,
}

impl PartialEq for CharacterGroup {
    fn eq(&self, other: &Self) -> bool {
        self.inner.modulus == other.inner.modulus
    }
}

impl Eq for CharacterGroup {}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("character modulus must be positive"));
        }
        if q > MAX_MODULUS {
            return Err(Error::Capacity {
                what: "character modulus",
                size: q,
                limit: MAX_MODULUS,
            });
        }
        let factorization = arith::factorize(q)?;
        let components = factorization
            .factors()
            .iter()
            .map(|&pp| UnitGroupStructure::new(pp))
            .collect::<Result<Vec<_>>>()?;
        let exponent = components
            .iter()
            .flat_map(|c| c.orders())
            .fold(1, arith::lcm);
        let phi = factorization.profile().phi;
        Ok(CharacterGroup {
            inner: Arc::new(GroupInner {
                modulus: q,
                factorization,
                components,
                phi,
                exponent,
            }),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.inner.modulus
    }

    pub fn factorization(&self) -> &Factorization {
        &self.inner.factorization
    }

    pub fn components(&self) -> &[UnitGroupStructure] {
        &self.inner.components
    }

    /// Number of characters, `φ(q)`.
    pub fn phi(&self) -> u64 {
        self.inner.phi
    }

    /// Exponent of the group: every character value is a power of `e(1/exponent)`.
    pub fn exponent(&self) -> u64 {
        self.inner.exponent
    }

    fn radices(&self) -> Vec<u64> {
        self.components().iter().flat_map(|c| c.orders()).collect()
    }

    pub fn trivial(&self) -> DirichletCharacter {
        self.character(0).expect("index 0 always exists")
    }

    /// Character at position `index` of the canonical enumeration.
    pub fn character(&self, index: u64) -> Result<DirichletCharacter> {
        if index >= self.phi() {
            return Err(Error::domain(format!(
                "character index {index} out of range for modulus {} (phi = {})",
                self.modulus(),
                self.phi()
            )));
        }
        let radices = self.radices();
        let mut digits = vec![0u64; radices.len()];
        let mut rest = index;
        for (d, &r) in digits.iter_mut().zip(&radices).rev() {
            *d = rest % r;
            rest /= r;
        }
        Ok(self.character_at_digits(&digits))
    }

    fn character_at_digits(&self, digits: &[u64]) -> DirichletCharacter {
        let mut it = digits.iter().copied();
        let exponents = self
            .components()
            .iter()
            .map(|c| c.orders().iter().map(|_| it.next().unwrap()).collect())
            .collect();
        DirichletCharacter {
            group: self.clone(),
            exponents,
        }
    }

    /// All `φ(q)` characters in canonical order; the first is trivial.
    pub fn characters(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.phi()).map(move |i| self.character(i).expect("index in range"))
    }

    pub fn from_exponents(&self, exponents: Vec<LogVector>) -> Result<DirichletCharacter> {
        if exponents.len() != self.components().len() {
            return Err(Error::domain("one exponent vector per prime-power component required"));
        }
        for (c, e) in self.components().iter().zip(&exponents) {
            let orders = c.orders();
            if e.len() != orders.len() || e.iter().zip(&orders).any(|(k, o)| k >= o) {
                return Err(Error::domain(format!(
                    "exponents {:?} invalid for component mod {}",
                    e.as_slice(),
                    c.modulus()
                )));
            }
        }
        Ok(DirichletCharacter {
            group: self.clone(),
            exponents,
        })
    }

    /// Inverse of [`DirichletCharacter::label`].
    pub fn parse_label(&self, label: &str) -> Result<DirichletCharacter> {
        let (q, body) = label
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("label {label:?} lacks ':'")))?;
        let q: u64 = q
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in label {label:?}")))?;
        if q != self.modulus() {
            return Err(Error::Parse(format!(
                "label modulus {q} does not match group modulus {}",
                self.modulus()
            )));
        }
        let parts: Vec<&str> = if body.is_empty() {
            Vec::new()
        } else {
            body.split(';').collect()
        };
        if parts.len() != self.components().len() {
            return Err(Error::Parse(format!("label {label:?} has wrong component count")));
        }
        let mut exponents = Vec::with_capacity(parts.len());
        for (part, comp) in parts.iter().zip(self.components()) {
            let (pp, exps) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("component {part:?} lacks '='")))?;
            if pp.parse::<u64>().ok() != Some(comp.modulus()) {
                return Err(Error::Parse(format!(
                    "component {part:?} should be for modulus {}",
                    comp.modulus()
                )));
            }
            let mut v = LogVector::new();
            for e in exps.split(',') {
                let k = e
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {part:?}")))?;
                v.try_push(k)
                    .map_err(|_| Error::Parse(format!("too many exponents in {part:?}")))?;
            }
            exponents.push(v);
        }
        self.from_exponents(exponents)
            .map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityFlags {
    pub is_even: bool,
    pub is_completely_even: bool,
}

/// A Dirichlet character mod `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    group: CharacterGroup,
    exponents: Vec<LogVector>,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn group(&self) -> &CharacterGroup {
        &self.group
    }

    pub fn exponents(&self) -> &[LogVector] {
        &self.exponents
    }

    /// Position in the canonical enumeration.
    pub fn index(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.components())
            .flat_map(|(e, c)| e.iter().copied().zip(c.orders()))
            .fold(0, |acc, (k, r)| acc * r + k)
    }

    /// Textual form `q:pp1=k;pp2=k0,k1`, components in ascending prime order.
    pub fn label(&self) -> String {
        let comps: Vec<String> = self
            .exponents
            .iter()
            .zip(self.group.components())
            .map(|(e, c)| {
                let ks: Vec<String> = e.iter().map(u64::to_string).collect();
                format!("{}={}", c.modulus(), ks.join(","))
            })
            .collect();
        format!("{}:{}", self.modulus(), comps.join(";"))
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Numerator of `χ(a)` over the group exponent, or `None` off the units.
    fn exponent_numerator(&self, a: i64) -> Option<u64> {
        let big = self.group.exponent();
        let mut num = 0u64;
        for (comp, ks) in self.group.components().iter().zip(&self.exponents) {
            let logs = comp.discrete_log(a).ok()?;
            for ((&k, &t), &ord) in ks.iter().zip(&logs).zip(&comp.orders()) {
                num = (num + arith::mul_mod(k, t, ord) * (big / ord)) % big;
            }
        }
        Some(num)
    }

    pub fn evaluate(&self, a: i64) -> CharacterValue {
        match self.exponent_numerator(a) {
            Some(num) => CharacterValue::Root(RootOfUnity::new(num, self.group.exponent())),
            None => CharacterValue::Zero,
        }
    }

    /// Complex conjugate character `χ̄`.
    pub fn conj(&self) -> DirichletCharacter {
        let exponents = self
            .exponents
            .iter()
            .zip(self.group.components())
            .map(|(e, c)| e.iter().zip(&c.orders()).map(|(&k, &o)| (o - k) % o).collect())
            .collect();
        DirichletCharacter {
            group: self.group.clone(),
            exponents,
        }
    }

    /// Pointwise product of two characters with the same modulus.
    pub fn mul(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if self.group != other.group {
            return Err(Error::domain("characters have different moduli"));
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(self.group.components())
            .map(|((a, b), c)| {
                a.iter()
                    .zip(b)
                    .zip(&c.orders())
                    .map(|((&x, &y), &o)| (x + y) % o)
                    .collect()
            })
            .collect();
        Ok(DirichletCharacter {
            group: self.group.clone(),
            exponents,
        })
    }

    /// Order of `χ` in the character group.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.components())
            .flat_map(|(e, c)| e.iter().copied().zip(c.orders()))
            .map(|(k, o)| o / arith::gcd(k, o))
            .fold(1, arith::lcm)
    }

    /// The component `χ_i` as a character mod `p_i^{a_i}`.
    pub fn component(&self, i: usize) -> DirichletCharacter {
        let pp = self.group.components()[i].modulus();
        let group = CharacterGroup::new(pp).expect("component modulus is valid");
        DirichletCharacter {
            group,
            exponents: vec![self.exponents[i].clone()],
        }
    }

    /// `χ` restricted to the primes of a unitary divisor `d` (`gcd(d, q/d) = 1`),
    /// i.e. the factor `χ_d` in `χ = χ_d · χ_{q/d}`.
    pub fn project(&self, d: u64) -> Result<DirichletCharacter> {
        let q = self.modulus();
        if d == 0 || !q.is_multiple_of(d) || arith::gcd(d, q / d) != 1 {
            return Err(Error::domain(format!("{d} is not a unitary divisor of {q}")));
        }
        let group = CharacterGroup::new(d)?;
        let exponents = self
            .exponents
            .iter()
            .zip(self.group.components())
            .filter(|(_, c)| d.is_multiple_of(c.prime_power().prime))
            .map(|(e, _)| e.clone())
            .collect();
        Ok(DirichletCharacter { group, exponents })
    }

    /// The character `χ₁χ₂` mod `q₁q₂` for coprime moduli.
    pub fn lift_product(
        first: &DirichletCharacter,
        second: &DirichletCharacter,
    ) -> Result<DirichletCharacter> {
        let (q1, q2) = (first.modulus(), second.modulus());
        if arith::gcd(q1, q2) != 1 {
            return Err(Error::domain(format!("moduli {q1} and {q2} are not coprime")));
        }
        let group = CharacterGroup::new(q1 * q2)?;
        let mut parts: Vec<(u64, LogVector)> = first
            .group
            .components()
            .iter()
            .zip(&first.exponents)
            .chain(second.group.components().iter().zip(&second.exponents))
            .map(|(c, e)| (c.prime_power().prime, e.clone()))
            .collect();
        parts.sort_by_key(|(p, _)| *p);
        group.from_exponents(parts.into_iter().map(|(_, e)| e).collect())
    }

    pub fn parity_flags(&self) -> ParityFlags {
        let component_even = self
            .exponents
            .iter()
            .zip(self.group.components())
            .map(|(e, c)| match c.kind() {
                // -1 = g^(order/2) for p^a > 2
                UnitGroupKind::Cyclic { order, .. } => order == 1 || e[0] % 2 == 0,
                UnitGroupKind::TwoAdic { .. } => e[0] == 0,
            });
        let mut is_completely_even = true;
        let mut odd_components = 0;
        for even in component_even {
            if !even {
                is_completely_even = false;
                odd_components += 1;
            }
        }
        ParityFlags {
            is_even: odd_components % 2 == 0,
            is_completely_even,
        }
    }

    /// Conductor from the per-component exponent conditions.
    pub fn conductor(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.components())
            .map(|(e, c)| {
                let pp = c.prime_power();
                let p = pp.prime;
                match c.kind() {
                    UnitGroupKind::Cyclic { .. } if p == 2 => {
                        // mod 2 is trivial; mod 4 primitive iff odd
                        if e[0] == 0 {
                            1
                        } else {
                            4
                        }
                    }
                    UnitGroupKind::Cyclic { .. } => {
                        let k = e[0];
                        if k == 0 {
                            1
                        } else {
                            let v = valuation(k, p).min(pp.exponent - 1);
                            p.pow(pp.exponent - v)
                        }
                    }
                    UnitGroupKind::TwoAdic { .. } => {
                        let (sign, k) = (e[0], e[1]);
                        if k == 0 {
                            if sign == 0 {
                                1
                            } else {
                                4
                            }
                        } else {
                            1u64 << (pp.exponent - valuation(k, 2))
                        }
                    }
                }
            })
            .product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// Exact value table: entry `a` is `χ(a)`'s numerator over [`CharacterGroup::exponent`].
    pub fn exponent_table(&self) -> ExponentTable {
        let q = self.modulus();
        let big = self.group.exponent();
        let mut nums = vec![0u32; q as usize];
        let mut unit = vec![true; q as usize];
        for (comp, ks) in self.group.components().iter().zip(&self.exponents) {
            let m = comp.modulus();
            let orders = comp.orders();
            let mut local = vec![u32::MAX; m as usize];
            comp.for_each_unit(|logs, u| {
                let mut num = 0u64;
                for ((&k, &t), &ord) in ks.iter().zip(logs).zip(&orders) {
                    num = (num + arith::mul_mod(k, t, ord) * (big / ord)) % big;
                }
                local[u as usize] = num as u32;
            });
            for a in 0..q as usize {
                let v = local[a % m as usize];
                if v == u32::MAX {
                    unit[a] = false;
                } else {
                    nums[a] = ((nums[a] as u64 + v as u64) % big) as u32;
                }
            }
        }
        if q == 1 {
            // 0 is a unit mod 1
            unit[0] = true;
        }
        for (n, u) in nums.iter_mut().zip(&unit) {
            if !u {
                *n = ExponentTable::ZERO;
            }
        }
        ExponentTable {
            modulus: q,
            exponent: big,
            nums,
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn valuation(mut k: u64, p: u64) -> u32 {
    let mut v = 0;
    while k > 0 && k.is_multiple_of(p) {
        k /= p;
        v += 1;
    }
    v
}

/// `χ(a)` for every residue `a ∈ [0, q)` as a numerator over the group exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentTable {
    modulus: u64,
    exponent: u64,
    nums: Vec<u32>,
}

impl ExponentTable {
    /// Marker for residues not coprime to the modulus.
    pub const ZERO: u32 = u32::MAX;

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn numerators(&self) -> &[u32] {
        &self.nums
    }

    pub fn value(&self, a: u64) -> CharacterValue {
        match self.nums[(a % self.modulus) as usize] {
            Self::ZERO => CharacterValue::Zero,
            n => CharacterValue::Root(RootOfUnity::new(n as u64, self.exponent)),
        }
    }
}
