//! Normal-ordered differential operators `Σ c_α ∂^α` over the coefficient ring.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Zero};
use smallvec::SmallVec;

use crate::combinat::binomial_q;
use crate::error::{Error, Result};
use crate::ring::{same_ring, CoeffPoly, Rational, Ring};

/// Exponent vector of `∂^α = ∂₁^{α₁}…∂ₙ^{αₙ}`; coordinates are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(SmallVec<[u8; 8]>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut a = Self::zero(n);
        a.0[k - 1] = 1;
        a
    }

    pub fn from_slice(v: &[u8]) -> Self {
        MultiIndex(SmallVec::from_slice(v))
    }

    /// `∂_k^e` alone.
    pub fn power(n: usize, k: usize, e: u8) -> Self {
        let mut a = Self::zero(n);
        a.0[k - 1] = e;
        a
    }

    /// `∂_S = Π_{k∈S} ∂_k`.
    pub fn of_set(n: usize, set: impl IntoIterator<Item = usize>) -> Self {
        let mut a = Self::zero(n);
        for k in set {
            a.0[k - 1] += 1;
        }
        a
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, k: usize) -> u8 {
        self.0[k - 1]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if componentwise nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    pub fn lowered(&self, k: usize) -> Option<Self> {
        let mut a = self.clone();
        a.0[k - 1] = a.0[k - 1].checked_sub(1)?;
        Some(a)
    }

    /// `Π C(α_k, μ_k)`.
    pub fn binomial(&self, mu: &Self) -> Rational {
        self.0
            .iter()
            .zip(&mu.0)
            .map(|(&a, &m)| binomial_q(a as usize, m as usize))
            .fold(Rational::one(), |acc, b| acc * b)
    }

    /// All `μ ≤ self` whose support lies in `coords` (1-based).
    fn below_on(&self, coords: &[usize]) -> Vec<MultiIndex> {
        let mut out = vec![Self::zero(self.n())];
        for &k in coords {
            let top = self.get(k);
            let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
            for mu in &out {
                for e in 0..=top {
                    let mut m = mu.clone();
                    m.0[k - 1] = e;
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }

    fn support(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&k| self.get(k) > 0).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "∂{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Lazily computed partial derivatives `∂^μ b` of one coefficient.
struct DerivCache<'a> {
    base: &'a CoeffPoly,
    memo: HashMap<MultiIndex, CoeffPoly>,
}

impl<'a> DerivCache<'a> {
    fn new(base: &'a CoeffPoly) -> Self {
        DerivCache { base, memo: HashMap::new() }
    }

    fn get(&mut self, mu: &MultiIndex) -> CoeffPoly {
        if mu.is_zero() {
            return self.base.clone();
        }
        if let Some(p) = self.memo.get(mu) {
            return p.clone();
        }
        let k = (1..=mu.n()).find(|&k| mu.get(k) > 0).unwrap();
        let prev = self.get(&mu.lowered(k).unwrap());
        let d = prev.diff(k);
        self.memo.insert(mu.clone(), d.clone());
        d
    }
}

/// Coordinates a coefficient actually depends on.
fn dependence(p: &CoeffPoly) -> Vec<usize> {
    let mut ks: Vec<usize> = p
        .generators()
        .into_iter()
        .flat_map(|g| [g.i as usize, g.j as usize])
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// `Σ_α c_α ∂^α` with coefficients on the left.
#[derive(Clone, Debug)]
pub struct DiffOp {
    ring: Arc<Ring>,
    terms: BTreeMap<MultiIndex, CoeffPoly>,
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl DiffOp {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        DiffOp { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn identity(ring: &Arc<Ring>) -> Self {
        Self::multiplication(CoeffPoly::one(ring))
    }

    pub fn scalar(ring: &Arc<Ring>, c: Rational) -> Self {
        Self::multiplication(CoeffPoly::constant(ring, c))
    }

    /// Multiplication by a function.
    pub fn multiplication(f: CoeffPoly) -> Self {
        let ring = f.ring().clone();
        let n = ring.n;
        Self::term(f, MultiIndex::zero(n))
    }

    pub fn term(c: CoeffPoly, alpha: MultiIndex) -> Self {
        let mut op = Self::zero(c.ring());
        assert_eq!(alpha.n(), op.ring.n, "multi-index length must match ring");
        op.add_term(alpha, &c);
        op
    }

    /// `c ∂^α` with rational `c`.
    pub fn monomial(ring: &Arc<Ring>, c: Rational, alpha: MultiIndex) -> Self {
        Self::term(CoeffPoly::constant(ring, c), alpha)
    }

    pub fn partial(ring: &Arc<Ring>, k: usize) -> Self {
        Self::monomial(ring, Rational::one(), MultiIndex::unit(ring.n, k))
    }

    pub fn partial_set(ring: &Arc<Ring>, set: impl IntoIterator<Item = usize>) -> Self {
        Self::monomial(ring, Rational::one(), MultiIndex::of_set(ring.n, set))
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.ring.n
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

    /// Terms sorted by multi-index.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CoeffPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> CoeffPoly {
        self.terms.get(alpha).cloned().unwrap_or_else(|| CoeffPoly::zero(&self.ring))
    }

    /// Highest total derivative order.
    pub fn order(&self) -> usize {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Total number of coefficient monomials.
    pub fn size(&self) -> usize {
        self.terms.values().map(CoeffPoly::len).sum()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: &CoeffPoly) {
        assert!(same_ring(&self.ring, c.ring()), "ring context mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(e) => {
                e.add_scaled(c, &Rational::one());
                if e.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c.clone());
            }
        }
    }

    fn add_term_scaled(&mut self, alpha: MultiIndex, c: &CoeffPoly, s: &Rational) {
        if s.is_zero() || c.is_zero() {
            return;
        }
        if s.is_one() {
            return self.add_term(alpha, c);
        }
        match self.terms.get_mut(&alpha) {
            Some(e) => {
                e.add_scaled(c, s);
                if e.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c.scale(s));
            }
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &DiffOp, s: &Rational) {
        assert!(same_ring(&self.ring, &other.ring), "ring context mismatch");
        for (a, c) in &other.terms {
            self.add_term_scaled(a.clone(), c, s);
        }
    }

    pub fn scale(&self, s: &Rational) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring);
        out.add_scaled(self, s);
        out
    }

    pub fn checked_add(&self, other: &DiffOp) -> Result<DiffOp> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::ContextMismatch);
        }
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &DiffOp) -> Result<DiffOp> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.compose(other))
    }

    /// Operator product, normal ordered by the Leibniz rule
    /// `(a∂^α)(b∂^β) = Σ_{μ≤α} C(α,μ) a (∂^μ b) ∂^{α-μ+β}`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        assert!(same_ring(&self.ring, &other.ring), "ring context mismatch");
        let mut out = DiffOp::zero(&self.ring);
        for (beta, b) in &other.terms {
            let deps = dependence(b);
            let mut cache = DerivCache::new(b);
            for (alpha, a) in &self.terms {
                for mu in alpha.below_on(&deps) {
                    let db = cache.get(&mu);
                    if db.is_zero() {
                        continue;
                    }
                    let idx = alpha.checked_sub(&mu).unwrap().add(beta);
                    let mut prod = CoeffPoly::zero(&self.ring);
                    prod.add_product_scaled(a, &db, &alpha.binomial(&mu));
                    out.add_term(idx, &prod);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        &self.compose(other) - &other.compose(self)
    }

    /// `f · self`.
    pub fn left_mul(&self, f: &CoeffPoly) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &(f * c));
        }
        out
    }

    /// `self · f`.
    pub fn right_mul(&self, f: &CoeffPoly) -> DiffOp {
        self.compose(&DiffOp::multiplication(f.clone()))
    }

    /// `[f, self]` for a multiplication operator `f`:
    /// `[f, c∂^α] = -Σ_{0≠μ≤α} C(α,μ) c (∂^μ f) ∂^{α-μ}`.
    pub fn ad_function(&self, f: &CoeffPoly) -> DiffOp {
        let deps = dependence(f);
        let mut cache = DerivCache::new(f);
        let mut out = DiffOp::zero(&self.ring);
        for (alpha, c) in &self.terms {
            for mu in alpha.below_on(&deps) {
                if mu.is_zero() {
                    continue;
                }
                let df = cache.get(&mu);
                if df.is_zero() {
                    continue;
                }
                let mut prod = CoeffPoly::zero(&self.ring);
                prod.add_product_scaled(c, &df, &-alpha.binomial(&mu));
                out.add_term(alpha.checked_sub(&mu).unwrap(), &prod);
            }
        }
        out
    }

    /// `[(m+1) ζ(x₁ - x_j), self]`.
    pub fn ad_zeta(&self, m: &Rational, j: usize) -> DiffOp {
        let f = CoeffPoly::zeta(&self.ring, 1, j).scale(&(m + Rational::one()));
        self.ad_function(&f)
    }

    /// Nested `ad_zeta` over every `j ∈ σ`; the order is immaterial.
    pub fn ad_zeta_set(&self, m: &Rational, sigma: impl IntoIterator<Item = usize>) -> DiffOp {
        let mut t = self.clone();
        for j in sigma {
            t = t.ad_zeta(m, j);
        }
        t
    }

    /// `[θ, self]` with `θ = x₁/m + Σ_{j≥2} x_j`.
    pub fn ad_theta(&self, m: &Rational) -> Result<DiffOp> {
        if m.is_zero() {
            return Err(Error::ZeroMass);
        }
        let w1 = m.recip();
        let mut out = DiffOp::zero(&self.ring);
        for (alpha, c) in &self.terms {
            for k in alpha.support() {
                let w = if k == 1 { w1.clone() } else { Rational::one() };
                let s = -(w * Rational::from_integer(alpha.get(k).into()));
                out.add_term_scaled(alpha.lowered(k).unwrap(), c, &s);
            }
        }
        Ok(out)
    }

    /// `[∂_k, self]`, i.e. `∂_k` applied to every coefficient.
    pub fn diff_coeffs(&self, k: usize) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &c.diff(k));
        }
        out
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coeffs<F: FnMut(&CoeffPoly) -> CoeffPoly>(&self, mut f: F) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &f(c));
        }
        out
    }

    /// Moves the operator to a ring with different invariants or size `n' ≥ n`.
    pub fn with_ring(&self, ring: &Arc<Ring>) -> DiffOp {
        assert!(ring.n >= self.ring.n, "cannot shrink the variable count");
        let mut out = DiffOp::zero(ring);
        for (a, c) in &self.terms {
            let mut v: SmallVec<[u8; 8]> = a.0.clone();
            v.resize(ring.n, 0);
            let mut nc = CoeffPoly::zero(ring);
            for (mono, val) in c.terms() {
                nc.add_scaled(&CoeffPoly::term(ring, mono.clone(), val.clone()), &Rational::one());
            }
            out.add_term(MultiIndex(v), &nc);
        }
        out
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.is_zero() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})·{a}")?;
            }
        }
        Ok(())
    }
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        self.compose(rhs)
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat, PairGen};

    fn ring3() -> Arc<Ring> {
        Ring::new(3, rat(3, 2), rat(-1, 5))
    }

    #[test]
    fn partials_commute() {
        let r = ring3();
        let d1 = DiffOp::partial(&r, 1);
        let d2 = DiffOp::partial(&r, 2);
        assert!(d1.commutator(&d2).is_zero());
        assert_eq!(&d1 * &d2, DiffOp::partial_set(&r, [1, 2]));
    }

    #[test]
    fn derivative_past_function() {
        let r = ring3();
        let p = CoeffPoly::wp(&r, 1, 2);
        let d1 = DiffOp::partial(&r, 1);
        let f = DiffOp::multiplication(p.clone());
        // ∂₁ ∘ ℘₁₂ = ℘₁₂ ∂₁ + ℘'₁₂
        let expect = &DiffOp::term(p.clone(), MultiIndex::unit(3, 1)) + &DiffOp::multiplication(p.diff(1));
        assert_eq!(&d1 * &f, expect);
        assert_eq!(f.commutator(&d1), -&DiffOp::multiplication(p.diff(1)));
        assert_eq!(d1.ad_function(&p), f.commutator(&d1));
    }

    #[test]
    fn second_order_leibniz() {
        let r = ring3();
        let p = CoeffPoly::wp(&r, 1, 3);
        let d = DiffOp::monomial(&r, int(1), MultiIndex::power(3, 1, 2));
        let got = d.right_mul(&p);
        let mut expect = DiffOp::term(p.clone(), MultiIndex::power(3, 1, 2));
        expect.add_term(MultiIndex::unit(3, 1), &p.diff(1).scale(&int(2)));
        expect.add_term(MultiIndex::zero(3), &p.diff(1).diff(1));
        assert_eq!(got, expect);
    }

    #[test]
    fn ad_theta_examples() {
        let r = ring3();
        let m = rat(2, 3);
        let d1 = DiffOp::partial(&r, 1);
        let d2 = DiffOp::partial(&r, 2);
        assert_eq!(d1.ad_theta(&m).unwrap(), DiffOp::scalar(&r, rat(-3, 2)));
        assert_eq!(d2.ad_theta(&m).unwrap(), DiffOp::scalar(&r, int(-1)));
        let d11 = DiffOp::monomial(&r, int(1), MultiIndex::power(3, 1, 2));
        assert_eq!(d11.ad_theta(&m).unwrap(), d1.scale(&int(-3)));
        assert_eq!(d1.ad_theta(&int(0)), Err(Error::ZeroMass));
        let f = DiffOp::multiplication(CoeffPoly::wp(&r, 1, 2));
        assert!(f.ad_theta(&m).unwrap().is_zero());
    }

    #[test]
    fn ad_zeta_first_order() {
        let r = ring3();
        let m = int(2);
        let d1 = DiffOp::partial(&r, 1);
        // [3ζ₁₂, ∂₁] = -3 ∂₁ζ₁₂ = 3℘₁₂
        let got = d1.ad_zeta(&m, 2);
        assert_eq!(got, DiffOp::multiplication(CoeffPoly::wp(&r, 1, 2).scale(&int(3))));
        let d3 = DiffOp::partial(&r, 3);
        assert!(d3.ad_zeta(&m, 2).is_zero());
    }

    #[test]
    fn context_mismatch() {
        let a = DiffOp::partial(&ring3(), 1);
        let b = DiffOp::partial(&Ring::rational(3), 1);
        assert_eq!(a.checked_mul(&b), Err(Error::ContextMismatch));
        assert_eq!(a.checked_add(&b), Err(Error::ContextMismatch));
    }

    #[test]
    fn display_is_readable() {
        let r = ring3();
        let op = &DiffOp::partial_set(&r, [1, 2]) + &DiffOp::multiplication(CoeffPoly::gen(&r, PairGen::p(1, 2)));
        let s = op.to_string();
        assert!(s.contains("∂1·∂2"), "{s}");
        assert!(s.contains("P_12"), "{s}");
    }
}
