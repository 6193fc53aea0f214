//! Exact rationals and the sparse coefficient ring.
//!
//! Coefficients of every operator are polynomials in the pair generators
//! `P_ij = ℘(x_i - x_j)`, `P1_ij = ℘'(x_i - x_j)` and `Z_ij = ζ(x_i - x_j)`
//! with `i < j`. The ring is closed under `∂/∂x_k` through
//! `℘'' = 6℘² - g₂/2` and `ζ' = -℘`. Neither the curve relation nor the
//! addition theorem is imposed; functional zero is decided by evaluation.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Whitespace around the literal is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r = Rational::from_str(t).map_err(|_| Error::BadRational(s.to_string()))?;
    Ok(r)
}

/// Canonical text form used in every JSON document: `p/q`, or `p` when `q = 1`.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    P,
    P1,
    Z,
}

impl GenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::P => "P",
            GenKind::P1 => "P1",
            GenKind::Z => "Z",
        }
    }
}

impl FromStr for GenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" => Ok(GenKind::P),
            "P1" => Ok(GenKind::P1),
            "Z" => Ok(GenKind::Z),
            other => Err(Error::InvalidGenerator(other.to_string())),
        }
    }
}

/// A pair generator with canonical orientation `i < j`. Ordered by `(i, j, kind)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairGen {
    pub i: u8,
    pub j: u8,
    pub kind: GenKind,
}

impl PairGen {
    pub fn new(i: usize, j: usize, kind: GenKind) -> Result<Self> {
        if i == 0 || i >= j || j > u8::MAX as usize {
            return Err(Error::InvalidGenerator(format!("{}{i},{j}", kind.as_str())));
        }
        Ok(PairGen { i: i as u8, j: j as u8, kind })
    }

    pub fn p(i: usize, j: usize) -> Self {
        Self::new(i, j, GenKind::P).expect("pair must satisfy i < j")
    }

    pub fn p1(i: usize, j: usize) -> Self {
        Self::new(i, j, GenKind::P1).expect("pair must satisfy i < j")
    }

    pub fn z(i: usize, j: usize) -> Self {
        Self::new(i, j, GenKind::Z).expect("pair must satisfy i < j")
    }

    /// Chain-rule sign of `∂/∂x_k` applied to a function of `x_i - x_j`.
    pub fn sign_for(&self, k: usize) -> i64 {
        if k == self.i as usize {
            1
        } else if k == self.j as usize {
            -1
        } else {
            0
        }
    }
}

impl fmt::Display for PairGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}{}", self.kind.as_str(), self.i, self.j)
    }
}

/// Product of generator powers, sorted by generator with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[(PairGen, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn gen(g: PairGen) -> Self {
        let mut v = SmallVec::new();
        v.push((g, 1));
        Monomial(v)
    }

    pub fn from_factors<I: IntoIterator<Item = (PairGen, u32)>>(factors: I) -> Self {
        let mut m = Monomial::one();
        for (g, e) in factors {
            if e > 0 {
                m = m.mul(&Monomial(SmallVec::from_elem((g, e), 1)));
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(PairGen, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.0.is_empty() {
            return other.clone();
        }
        if other.0.is_empty() {
            return self.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            let (ga, ea) = self.0[a];
            let (gb, eb) = other.0[b];
            match ga.cmp(&gb) {
                std::cmp::Ordering::Less => {
                    out.push((ga, ea));
                    a += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((gb, eb));
                    b += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((ga, ea + eb));
                    a += 1;
                    b += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[a..]);
        out.extend_from_slice(&other.0[b..]);
        Monomial(out)
    }

    /// The monomial with the factor at `idx` lowered by one power.
    fn lowered(&self, idx: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[idx].1 == 1 {
            v.remove(idx);
        } else {
            v[idx].1 -= 1;
        }
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, (g, e)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Ring context: number of variables and the curve invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    pub n: usize,
    pub g2: Rational,
    pub g3: Rational,
}

impl Ring {
    pub fn new(n: usize, g2: Rational, g3: Rational) -> Arc<Ring> {
        Arc::new(Ring { n, g2, g3 })
    }

    /// `g₂ = g₃ = 0`, the rational degeneration `℘(z) = z⁻²`.
    pub fn rational(n: usize) -> Arc<Ring> {
        Self::new(n, Rational::zero(), Rational::zero())
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sparse polynomial in the pair generators with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct CoeffPoly {
    ring: Arc<Ring>,
    terms: HashMap<Monomial, Rational>,
}

impl PartialEq for CoeffPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl CoeffPoly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        CoeffPoly { ring: ring.clone(), terms: HashMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: Rational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn gen(ring: &Arc<Ring>, g: PairGen) -> Self {
        Self::term(ring, Monomial::gen(g), Rational::one())
    }

    pub fn term(ring: &Arc<Ring>, mono: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// `℘(x_a - x_b)` for any `a ≠ b`; `℘` is even so orientation is irrelevant.
    pub fn wp(ring: &Arc<Ring>, a: usize, b: usize) -> Self {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Self::gen(ring, PairGen::p(i, j))
    }

    /// `℘'(x_a - x_b)` for any `a ≠ b`, carrying the odd-function sign.
    pub fn wp_prime(ring: &Arc<Ring>, a: usize, b: usize) -> Self {
        if a < b {
            Self::gen(ring, PairGen::p1(a, b))
        } else {
            -&Self::gen(ring, PairGen::p1(b, a))
        }
    }

    /// `ζ(x_a - x_b)` for any `a ≠ b`, carrying the odd-function sign.
    pub fn zeta(ring: &Arc<Ring>, a: usize, b: usize) -> Self {
        if a < b {
            Self::gen(ring, PairGen::z(a, b))
        } else {
            -&Self::gen(ring, PairGen::z(b, a))
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// The constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn generators(&self) -> BTreeSet<PairGen> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(g, _)| *g)).collect()
    }

    pub fn contains_kind(&self, kind: GenKind) -> bool {
        self.terms.keys().any(|m| m.factors().iter().any(|(g, _)| g.kind == kind))
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &CoeffPoly, c: &Rational) {
        assert!(same_ring(&self.ring, &other.ring), "ring context mismatch");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    /// `self += c * a * b`.
    pub fn add_product_scaled(&mut self, a: &CoeffPoly, b: &CoeffPoly, c: &Rational) {
        assert!(same_ring(&self.ring, &a.ring) && same_ring(&a.ring, &b.ring), "ring context mismatch");
        if c.is_zero() {
            return;
        }
        for (ma, va) in &a.terms {
            let ca = va * c;
            for (mb, vb) in &b.terms {
                self.add_term(ma.mul(mb), &ca * vb);
            }
        }
    }

    pub fn checked_add(&self, other: &CoeffPoly) -> Result<CoeffPoly> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::ContextMismatch);
        }
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        Ok(out)
    }

    pub fn checked_mul(&self, other: &CoeffPoly) -> Result<CoeffPoly> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::ContextMismatch);
        }
        let mut out = CoeffPoly::zero(&self.ring);
        out.add_product_scaled(self, other, &Rational::one());
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> CoeffPoly {
        if c.is_zero() {
            return CoeffPoly::zero(&self.ring);
        }
        CoeffPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> CoeffPoly {
        let mut out = CoeffPoly::one(&self.ring);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Derivative of a single generator with respect to `x_k`.
    fn diff_gen(&self, g: PairGen, k: usize) -> CoeffPoly {
        let s = g.sign_for(k);
        let ring = &self.ring;
        if s == 0 {
            return CoeffPoly::zero(ring);
        }
        let s = int(s);
        match g.kind {
            GenKind::P => CoeffPoly::term(ring, Monomial::gen(PairGen { kind: GenKind::P1, ..g }), s),
            GenKind::P1 => {
                let p = PairGen { kind: GenKind::P, ..g };
                let mut out = CoeffPoly::term(ring, Monomial::from_factors([(p, 2)]), &s * int(6));
                out.add_term(Monomial::one(), -(&s * &ring.g2) / int(2));
                out
            }
            GenKind::Z => CoeffPoly::term(ring, Monomial::gen(PairGen { kind: GenKind::P, ..g }), -s),
        }
    }

    /// Formal `∂/∂x_k`, extended over monomials by the Leibniz rule.
    pub fn diff(&self, k: usize) -> CoeffPoly {
        let mut out = CoeffPoly::zero(&self.ring);
        let mut gen_cache: HashMap<PairGen, CoeffPoly> = HashMap::new();
        for (mono, c) in &self.terms {
            for (idx, &(g, e)) in mono.factors().iter().enumerate() {
                if g.sign_for(k) == 0 {
                    continue;
                }
                let dg = gen_cache.entry(g).or_insert_with(|| self.diff_gen(g, k));
                let rest = mono.lowered(idx);
                let ce = c * int(e as i64);
                for (dm, dc) in &dg.terms {
                    out.add_term(rest.mul(dm), &ce * dc);
                }
            }
        }
        out
    }

    /// Exact value under a generator assignment. Generator values are looked up once each.
    pub fn eval_with<F>(&self, mut value: F) -> Result<Rational>
    where
        F: FnMut(PairGen) -> Result<Rational>,
    {
        let mut cache: HashMap<PairGen, Vec<Rational>> = HashMap::new();
        let mut total = Rational::zero();
        for (mono, c) in &self.terms {
            let mut t = c.clone();
            for &(g, e) in mono.factors() {
                let powers = match cache.entry(g) {
                    Entry::Occupied(o) => o.into_mut(),
                    Entry::Vacant(v) => v.insert(vec![Rational::one(), value(g)?]),
                };
                while powers.len() <= e as usize {
                    let next = powers.last().expect("nonempty") * &powers[1];
                    powers.push(next);
                }
                t *= &powers[e as usize];
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval(&self, values: &HashMap<PairGen, Rational>) -> Result<Rational> {
        self.eval_with(|g| values.get(&g).cloned().ok_or(Error::UnassignedGenerator(g)))
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else if c.is_negative() || !c.is_integer() {
                write!(f, "({c})*{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &CoeffPoly {
    type Output = CoeffPoly;
    fn add(self, rhs: &CoeffPoly) -> CoeffPoly {
        self.checked_add(rhs).expect("ring context mismatch")
    }
}

impl Sub for &CoeffPoly {
    type Output = CoeffPoly;
    fn sub(self, rhs: &CoeffPoly) -> CoeffPoly {
        assert!(same_ring(&self.ring, &rhs.ring), "ring context mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul for &CoeffPoly {
    type Output = CoeffPoly;
    fn mul(self, rhs: &CoeffPoly) -> CoeffPoly {
        self.checked_mul(rhs).expect("ring context mismatch")
    }
}

impl Neg for &CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3() -> Arc<Ring> {
        Ring::new(3, int(4), rat(1, 2))
    }

    #[test]
    fn add_identities() {
        let r = ring3();
        let p12 = CoeffPoly::gen(&r, PairGen::p(1, 2));
        assert_eq!(&p12 + &CoeffPoly::zero(&r), p12);
        assert!((&p12 + &p12.scale(&int(-1))).is_zero());

        let two_p = p12.scale(&int(2));
        let mixed = CoeffPoly::term(
            &r,
            Monomial::from_factors([(PairGen::p(1, 2), 1), (PairGen::p1(1, 3), 1)]),
            int(3),
        );
        let sum = &two_p + &mixed;
        assert_eq!(sum.len(), 2);
        assert_eq!(sum.coeff(&Monomial::gen(PairGen::p(1, 2))), int(2));
    }

    #[test]
    fn mul_identities() {
        let r = ring3();
        let p12 = CoeffPoly::gen(&r, PairGen::p(1, 2));
        let p13 = CoeffPoly::gen(&r, PairGen::p(1, 3));
        let sq = &p12 * &p12;
        assert_eq!(sq, CoeffPoly::term(&r, Monomial::from_factors([(PairGen::p(1, 2), 2)]), int(1)));
        assert_eq!(&CoeffPoly::one(&r) * &p13, p13);
        let lhs = &(&p12 + &p13) * &(&p12 - &p13);
        let rhs = &(&p12 * &p12) - &(&p13 * &p13);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = CoeffPoly::one(&Ring::rational(2));
        let b = CoeffPoly::one(&Ring::rational(3));
        assert_eq!(a.checked_add(&b), Err(Error::ContextMismatch));
        assert_eq!(a.checked_mul(&b), Err(Error::ContextMismatch));
    }

    #[test]
    fn diff_rules() {
        let r = ring3();
        let p12 = CoeffPoly::gen(&r, PairGen::p(1, 2));
        assert_eq!(p12.diff(1), CoeffPoly::gen(&r, PairGen::p1(1, 2)));

        // d/dx_2 of ℘'(x_1 - x_2) = -(6℘² - g₂/2)
        let d = CoeffPoly::gen(&r, PairGen::p1(1, 2)).diff(2);
        let expect = &(&p12 * &p12).scale(&int(-6)) + &CoeffPoly::constant(&r, int(2));
        assert_eq!(d, expect);

        let z13 = CoeffPoly::gen(&r, PairGen::z(1, 3));
        assert_eq!(z13.diff(1), -&CoeffPoly::gen(&r, PairGen::p(1, 3)));
        assert!(z13.diff(2).is_zero());
    }

    #[test]
    fn eval_examples() {
        let r = ring3();
        let p12 = CoeffPoly::gen(&r, PairGen::p(1, 2));
        let vals: HashMap<_, _> = [(PairGen::p(1, 2), rat(3, 2))].into_iter().collect();
        assert_eq!((&p12 * &p12).eval(&vals).unwrap(), rat(9, 4));
        assert_eq!(CoeffPoly::zero(&r).eval(&HashMap::new()).unwrap(), int(0));

        let r4 = Ring::new(2, int(4), int(0));
        let p = CoeffPoly::gen(&r4, PairGen::p(1, 2));
        let e = &(&p * &p).scale(&int(6)) - &CoeffPoly::constant(&r4, int(2));
        let vals: HashMap<_, _> = [(PairGen::p(1, 2), int(1))].into_iter().collect();
        assert_eq!(e.eval(&vals).unwrap(), int(4));

        let missing = CoeffPoly::gen(&r, PairGen::p(2, 3)).eval(&vals);
        assert_eq!(missing, Err(Error::UnassignedGenerator(PairGen::p(2, 3))));
    }

    #[test]
    fn orientation_helpers() {
        let r = ring3();
        assert_eq!(CoeffPoly::wp(&r, 3, 1), CoeffPoly::gen(&r, PairGen::p(1, 3)));
        assert_eq!(CoeffPoly::wp_prime(&r, 3, 1), -&CoeffPoly::gen(&r, PairGen::p1(1, 3)));
        assert_eq!(CoeffPoly::zeta(&r, 2, 1), -&CoeffPoly::gen(&r, PairGen::z(1, 2)));
        assert!(PairGen::new(2, 2, GenKind::P).is_err());
        assert!(PairGen::new(3, 1, GenKind::P).is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4/8").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(fmt_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(fmt_rational(&int(5)), "5");
    }
}
