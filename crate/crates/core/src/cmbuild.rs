//! Builders for the constants, `𝔇ᵏ`, `Θ_S`, `X_S`, `H_S`, `I_S` and the ad-θ tower.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Zero};

use crate::combinat::{binomial_q, factorial_q};
use crate::error::{Error, Result};
use crate::opalg::{DiffOp, MultiIndex};
use crate::ring::{int, CoeffPoly, Rational, Ring};
use crate::series::{bernoulli_table, gamma_table, GammaTable};

/// Subset of `{1..31}` stored as a bitmask; bit `k` marks index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(0)
    }

    /// `{1, …, n}`.
    pub fn full(n: usize) -> Self {
        IndexSet(((1u32 << n) - 1) << 1)
    }

    pub fn from_indices(it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = 0u32;
        for k in it {
            assert!((1..32).contains(&k), "index {k} out of range");
            s |= 1 << k;
        }
        IndexSet(s)
    }

    pub fn single(k: usize) -> Self {
        Self::from_indices([k])
    }

    pub fn contains(self, k: usize) -> bool {
        k < 32 && self.0 & (1 << k) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn max(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..32).filter(move |&k| self.contains(k))
    }

    pub fn minus(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn without(self, k: usize) -> IndexSet {
        self.minus(Self::single(k))
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// `σ̂ = {1..n} ∖ σ`.
    pub fn complement(self, n: usize) -> IndexSet {
        Self::full(n).minus(self)
    }

    /// `𝔖(S; t)`: all `t`-element subsets, in increasing bitmask order.
    pub fn subsets(self, t: usize) -> Vec<IndexSet> {
        let mut out = Vec::new();
        let mut sub = self.0;
        // walk all submasks of self, keeping those of size t
        loop {
            if sub.count_ones() as usize == t {
                out.push(IndexSet(sub));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & self.0;
        }
        out.reverse();
        out
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// `p₀,ₖ = (1/k!) Π_{l=1}^{k-1} (1 - l m)`, with `p₀,₀ = p₀,₁ = 1`.
pub fn p0(k: usize, m: &Rational) -> Rational {
    let mut acc = Rational::one();
    for l in 1..k {
        acc *= Rational::one() - int(l as i64) * m;
    }
    acc / factorial_q(k)
}

/// The constants `p₀,ₖ` and `p₂ᵢ,ₖ` (`i ≥ 2`) up to `k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantTable {
    m: Rational,
    k_max: usize,
    p0: Vec<Rational>,
    p2i: BTreeMap<(usize, usize), Rational>,
}

impl ConstantTable {
    /// Elliptic constants from a γ table.
    pub fn new(m: &Rational, gamma: &GammaTable, k_max: usize) -> Result<Self> {
        Self::from_weights(m, k_max, |d| Ok(-factorial_q(d) * gamma.gamma(d / 2)?))
    }

    /// Trigonometric constants, written directly in Bernoulli numbers.
    pub fn trig(m: &Rational, k_max: usize) -> Result<Self> {
        let bern = bernoulli_table(k_max / 2 + 1);
        Self::from_weights(m, k_max, |d| {
            let two = Rational::from_integer(BigInt::from(2).pow(d as u32 + 2));
            Ok(two / int(d as i64 + 2) * bern.get(d / 2 + 1)?)
        })
    }

    /// Runs the recursion with `w(2i-2j)` standing for `-(2i-2j)!·γ_{2i-2j}`.
    fn from_weights<W>(m: &Rational, k_max: usize, w: W) -> Result<Self>
    where
        W: Fn(usize) -> Result<Rational>,
    {
        let p0v: Vec<Rational> = (0..=k_max).map(|k| p0(k, m)).collect();
        let mut p2i: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        let one_m = Rational::one() + m;
        for k in 4..=k_max {
            for i in 2..=k / 2 {
                if k == 2 * i {
                    p2i.insert((i, k), Rational::zero());
                    continue;
                }
                let prev = &p2i[&(i, k - 1)];
                let mut v = (Rational::one() - m * int((k - 2 * i - 1) as i64)) / int((k - 2 * i) as i64) * prev;
                for j in (1..i).filter(|&j| j != 2) {
                    let lower = if j == 1 { &p0v[k - 1] } else { &p2i[&(j - 1, k - 1)] };
                    if lower.is_zero() {
                        continue;
                    }
                    let c = binomial_q(k - 2 * j + 1, k - 2 * i);
                    v += &one_m * c * w(2 * i - 2 * j)? * lower;
                }
                p2i.insert((i, k), v);
            }
        }
        Ok(ConstantTable { m: m.clone(), k_max, p0: p0v, p2i })
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn p0(&self, k: usize) -> Result<&Rational> {
        self.p0.get(k).ok_or_else(|| Error::Unsupported(format!("p0,{k} beyond table")))
    }

    /// `p₂ᵢ,ₖ` for `i ≥ 2`, `k ≥ 2i`.
    pub fn p2i(&self, i: usize, k: usize) -> Result<&Rational> {
        if i < 2 {
            return Err(Error::Unsupported(format!("p_{},k is not a table constant", 2 * i)));
        }
        if k < 2 * i {
            return Err(Error::ConstantOutOfRange { i, k });
        }
        self.p2i
            .get(&(i, k))
            .ok_or_else(|| Error::Unsupported(format!("p{},{k} beyond table", 2 * i)))
    }

    /// Every `(i, k) → p₂ᵢ,ₖ` entry.
    pub fn p2i_entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.p2i.iter()
    }
}

fn u_coeff(m: &Rational, a: usize, b: usize) -> Rational {
    let mp1 = m + Rational::one();
    if a == 1 || b == 1 {
        mp1
    } else {
        m * mp1
    }
}

/// Memoizing constructor for every operator of the system on a fixed ring and `m`.
pub struct Builder {
    ring: Arc<Ring>,
    table: ConstantTable,
    d_cache: HashMap<usize, DiffOp>,
    theta_cache: HashMap<IndexSet, DiffOp>,
    xm_cache: HashMap<IndexSet, CoeffPoly>,
    x_cache: HashMap<IndexSet, DiffOp>,
    i_cache: HashMap<IndexSet, DiffOp>,
}

impl Builder {
    /// Builder whose constants use the γ's of the ring's invariants.
    pub fn new(ring: &Arc<Ring>, m: &Rational) -> Result<Self> {
        let k_max = ring.n.max(2);
        let gamma = gamma_table(k_max.max(2), &ring.g2, &ring.g3)?;
        let table = ConstantTable::new(m, &gamma, k_max)?;
        Ok(Self::with_table(ring, table))
    }

    pub fn with_table(ring: &Arc<Ring>, table: ConstantTable) -> Self {
        Builder {
            ring: ring.clone(),
            table,
            d_cache: HashMap::new(),
            theta_cache: HashMap::new(),
            xm_cache: HashMap::new(),
            x_cache: HashMap::new(),
            i_cache: HashMap::new(),
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn m(&self) -> &Rational {
        self.table.m()
    }

    pub fn table(&self) -> &ConstantTable {
        &self.table
    }

    pub fn n(&self) -> usize {
        self.ring.n
    }

    /// `u_{ab}` as a function.
    pub fn u(&self, a: usize, b: usize) -> CoeffPoly {
        CoeffPoly::wp(&self.ring, a, b).scale(&u_coeff(self.m(), a, b))
    }

    /// `∂u_{1j}/∂x₁ = (m+1)℘'(x₁ - x_j)`.
    pub fn u_prime(&self, j: usize) -> CoeffPoly {
        CoeffPoly::wp_prime(&self.ring, 1, j).scale(&(self.m() + Rational::one()))
    }

    /// `𝔇ᵏ`; `𝔇⁰` is the identity.
    pub fn d(&mut self, k: usize) -> Result<DiffOp> {
        if let Some(op) = self.d_cache.get(&k) {
            return Ok(op.clone());
        }
        let n = self.n();
        let mut op = DiffOp::monomial(&self.ring, self.table.p0(k)?.clone(), MultiIndex::power(n, 1, k as u8));
        for i in 2..=k / 2 {
            let c = self.table.p2i(i, k)?.clone();
            op.add_scaled(&DiffOp::monomial(&self.ring, c, MultiIndex::power(n, 1, (k - 2 * i) as u8)), &Rational::one());
        }
        self.d_cache.insert(k, op.clone());
        Ok(op)
    }

    fn check_set(&self, s: IndexSet) -> Result<()> {
        if !s.is_subset(IndexSet::full(self.n())) {
            return Err(Error::Unsupported(format!("{s} is not a subset of 1..{}", self.n())));
        }
        Ok(())
    }

    /// `Θ_S = Σ_t Σ_{σ ⊆ S∖1, |σ|=t} ad_ς_σ(𝔇^{|S|-t})`.
    pub fn theta(&mut self, s: IndexSet) -> Result<DiffOp> {
        self.check_set(s)?;
        if !s.contains(1) {
            return Err(Error::MissingDistinguished(s.to_string()));
        }
        if let Some(op) = self.theta_cache.get(&s) {
            return Ok(op.clone());
        }
        let k = s.len();
        let m = self.m().clone();
        let rest = s.without(1);
        let mut out = DiffOp::zero(&self.ring);
        for t in 0..=k / 2 {
            let d = self.d(k - t)?;
            for sigma in rest.subsets(t) {
                out.add_scaled(&d.ad_zeta_set(&m, sigma.iter()), &Rational::one());
            }
        }
        self.theta_cache.insert(s, out.clone());
        Ok(out)
    }

    /// Perfect-matching sum of `u_{kl}` over `A ⊆ {2..n}`; zero for odd `|A|`.
    pub fn x_matching(&mut self, a: IndexSet) -> Result<CoeffPoly> {
        self.check_set(a)?;
        if a.contains(1) {
            return Err(Error::UnexpectedDistinguished(a.to_string()));
        }
        if let Some(p) = self.xm_cache.get(&a) {
            return Ok(p.clone());
        }
        let out = if a.is_empty() {
            CoeffPoly::one(&self.ring)
        } else if a.len() % 2 == 1 {
            CoeffPoly::zero(&self.ring)
        } else {
            let top = a.max().unwrap();
            let mut acc = CoeffPoly::zero(&self.ring);
            for j in a.without(top).iter() {
                let rest = self.x_matching(a.without(top).without(j))?;
                acc.add_product_scaled(&self.u(j, top), &rest, &Rational::one());
            }
            acc
        };
        self.xm_cache.insert(a, out.clone());
        Ok(out)
    }

    /// `X_S`: the matching sum when `1 ∉ S`, otherwise
    /// `Θ_S + Σ_{t≥1} Σ_{σ ⊆ S∖1, |σ|=2t} X_σ Θ_{S∖σ}`.
    pub fn x_set(&mut self, s: IndexSet) -> Result<DiffOp> {
        self.check_set(s)?;
        if !s.contains(1) {
            return Ok(DiffOp::multiplication(self.x_matching(s)?));
        }
        if let Some(op) = self.x_cache.get(&s) {
            return Ok(op.clone());
        }
        let k = s.len();
        let mut out = self.theta(s)?;
        let rest = s.without(1);
        for t in 1..=k.saturating_sub(2) / 2 {
            for sigma in rest.subsets(2 * t) {
                let xs = self.x_matching(sigma)?;
                let th = self.theta(s.minus(sigma))?;
                out.add_scaled(&th.left_mul(&xs), &Rational::one());
            }
        }
        self.x_cache.insert(s, out.clone());
        Ok(out)
    }

    /// `X` of the full system.
    pub fn x(&mut self) -> Result<DiffOp> {
        if self.n() < 2 {
            return Err(Error::SetTooSmall("X needs n >= 2".into()));
        }
        self.x_set(IndexSet::full(self.n()))
    }

    /// `H_S = -Δ_S + 2 Σ_{j<k ∈ S} u_{jk}`.
    pub fn h_set(&self, s: IndexSet) -> Result<DiffOp> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(Error::SetTooSmall("H needs a nonempty set".into()));
        }
        let n = self.n();
        let mut out = DiffOp::zero(&self.ring);
        let idx: Vec<usize> = s.iter().collect();
        for &j in &idx {
            let w = if j == 1 { self.m().clone() } else { Rational::one() };
            out.add_scaled(&DiffOp::monomial(&self.ring, -w, MultiIndex::power(n, j, 2)), &Rational::one());
        }
        let mut pot = CoeffPoly::zero(&self.ring);
        for (a, &j) in idx.iter().enumerate() {
            for &k in &idx[a + 1..] {
                pot.add_scaled(&self.u(j, k), &int(2));
            }
        }
        out.add_scaled(&DiffOp::multiplication(pot), &Rational::one());
        Ok(out)
    }

    pub fn h(&self) -> Result<DiffOp> {
        self.h_set(IndexSet::full(self.n()))
    }

    /// `I_S = Σ_{t=1}^{k-2} (-1)^{t+1} Σ_{σ ⊆ S, |σ|=t} I_{S∖σ} ∂_σ + (-1)^k (k-1) ∂_S + X_S`.
    pub fn i_set(&mut self, s: IndexSet) -> Result<DiffOp> {
        self.check_set(s)?;
        if s.len() < 2 {
            return Err(Error::SetTooSmall(format!("I needs |S| >= 2, got {s}")));
        }
        if let Some(op) = self.i_cache.get(&s) {
            return Ok(op.clone());
        }
        let k = s.len();
        let n = self.n();
        let mut out = self.x_set(s)?;
        for t in 1..=k - 2 {
            let sign = if t % 2 == 1 { Rational::one() } else { -Rational::one() };
            for sigma in s.subsets(t) {
                let sub = self.i_set(s.minus(sigma))?;
                // ∂_σ has constant coefficient, so right multiplication just shifts indices
                let shift = MultiIndex::of_set(n, sigma.iter());
                for (alpha, c) in sub.terms() {
                    out.add_scaled(&DiffOp::term(c.clone(), alpha.add(&shift)), &sign);
                }
            }
        }
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        out.add_scaled(&DiffOp::partial_set(&self.ring, s.iter()), &int(sign * (k as i64 - 1)));
        self.i_cache.insert(s, out.clone());
        Ok(out)
    }

    /// The highest integral `I` of the full system.
    pub fn i(&mut self) -> Result<DiffOp> {
        self.i_set(IndexSet::full(self.n()))
    }

    /// `[L₀ = I, L₁, …, L_{n-1}]` with `L_{k+1} = [θ, L_k]`.
    pub fn tower(&mut self) -> Result<Vec<DiffOp>> {
        if self.m().is_zero() {
            return Err(Error::ZeroMass);
        }
        let m = self.m().clone();
        let mut out = vec![self.i()?];
        for k in 0..self.n() - 1 {
            let next = out[k].ad_theta(&m)?;
            out.push(next);
        }
        Ok(out)
    }
}
