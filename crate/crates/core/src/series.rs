//! Truncated Laurent series with exact coefficients, and the coefficient
//! tables of the Weierstrass functions.
//!
//! `℘(z) = z⁻² + Σ γ₂ₖ z²ᵏ` with `γ₂ = g₂/20`, `γ₄ = g₃/28` and
//! `γ₂ₖ₊₂ = 3/((k-1)(2k+5)) Σ_{j=1}^{k-1} γ₂ⱼ γ₂ₖ₋₂ⱼ` for `k ≥ 2`.

use std::fmt;

use num::{One, Zero};
use serde::Serialize;

use crate::combinat::{binomial_q, factorial_q};
use crate::error::{Error, Result};
use crate::ring::{fmt_rational, int, rat, Rational};

/// Coefficients for exponents `lead .. order`; exponents `>= order` are unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    lead: i32,
    coeffs: Vec<Rational>,
    order: i32,
}

impl LaurentSeries {
    /// Builds a series from coefficients starting at `lead`; entries at or
    /// beyond `order` are dropped, missing ones are zero.
    pub fn new(lead: i32, mut coeffs: Vec<Rational>, order: i32) -> Self {
        let width = (order - lead).max(0) as usize;
        coeffs.resize(width, Rational::zero());
        LaurentSeries { lead, coeffs, order }
    }

    pub fn zero(order: i32) -> Self {
        Self::new(order, Vec::new(), order)
    }

    /// A single monomial `c z^e` known to `order`.
    pub fn monomial(c: Rational, e: i32, order: i32) -> Self {
        Self::new(e, vec![c], order)
    }

    pub fn lead(&self) -> i32 {
        self.lead
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Coefficient of `z^e`; `None` when `e` is beyond the truncation order.
    pub fn coeff(&self, e: i32) -> Option<Rational> {
        if e >= self.order {
            None
        } else if e < self.lead {
            Some(Rational::zero())
        } else {
            Some(self.coeffs[(e - self.lead) as usize].clone())
        }
    }

    /// Known `(exponent, coefficient)` pairs, zeros included.
    pub fn known(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.lead + i as i32, c))
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.known().find(|(_, c)| !c.is_zero()).map(|(e, _)| e)
    }

    /// All known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let lead = self.lead.min(other.lead);
        let order = self.order.min(other.order);
        let coeffs = (lead..order)
            .map(|e| self.coeff(e).unwrap() + other.coeff(e).unwrap())
            .collect();
        Self::new(lead, coeffs, order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.lead, self.coeffs.iter().map(|v| v * c).collect(), self.order)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let lead = self.lead + other.lead;
        let order = (self.order + other.lead).min(other.order + self.lead);
        let width = (order - lead).max(0) as usize;
        let mut coeffs = vec![Rational::zero(); width];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= width {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self::new(lead, coeffs, order)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            // exact constant, known as far as self is
            return Self::new(0, vec![Rational::one()], self.order - self.lead);
        }
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }

    /// `d/dz`; loses one order of precision.
    pub fn diff(&self) -> Self {
        let coeffs = self.known().map(|(e, c)| c * int(e as i64)).collect();
        Self::new(self.lead - 1, coeffs, self.order - 1)
    }

    pub fn nth_diff(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |s, _| s.diff())
    }

    /// Substitutes `z → a·z`.
    pub fn scale_arg(&self, a: &Rational) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Unsupported("scale_arg by zero".into()));
        }
        let coeffs = self.known().map(|(e, c)| c * pow_signed(a, e)).collect();
        Ok(Self::new(self.lead, coeffs, self.order))
    }
}

fn pow_signed(a: &Rational, e: i32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e.unsigned_abs() {
        out *= a;
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.known().filter(|(_, c)| !c.is_zero()) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})z^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order)
    }
}

/// `γ₂, γ₄, …, γ₂ₖ` for fixed invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaTable {
    #[serde(serialize_with = "ser_rationals")]
    values: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_rational))
}

impl GammaTable {
    pub fn from_values(values: Vec<Rational>) -> Self {
        GammaTable { values }
    }

    /// Number of stored entries `K`, i.e. the table holds up to `γ₂ₖ`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `γ₂ₖ` for `k ≥ 1`.
    pub fn gamma(&self, k: usize) -> Result<&Rational> {
        if k == 0 || k > self.values.len() {
            return Err(Error::GammaTableTooShort { need: 2 * k, have: 2 * self.values.len() });
        }
        Ok(&self.values[k - 1])
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Overwrites `γ₂ₖ`; used to build deliberately corrupted tables.
    pub fn with_gamma(mut self, k: usize, v: Rational) -> Self {
        self.values[k - 1] = v;
        self
    }

    /// Bernoulli–Hurwitz number `BH(2k+2) = (2k)!·(2k+2)·γ₂ₖ`.
    pub fn bernoulli_hurwitz(&self, k: usize) -> Result<Rational> {
        Ok(self.gamma(k)? * factorial_q(2 * k) * int(2 * k as i64 + 2))
    }
}

pub fn gamma_table(k_max: usize, g2: &Rational, g3: &Rational) -> Result<GammaTable> {
    if k_max == 0 {
        return Err(Error::Unsupported("gamma table needs K >= 1".into()));
    }
    let mut values = vec![g2 / int(20)];
    if k_max >= 2 {
        values.push(g3 / int(28));
    }
    // values[i] holds γ_{2(i+1)}; the step for index k produces γ_{2k+2}.
    for k in 2..k_max {
        let mut acc = Rational::zero();
        for j in 1..k {
            acc += &values[j - 1] * &values[k - j - 1];
        }
        let denom = int(((k - 1) * (2 * k + 5)) as i64);
        values.push(acc * int(3) / denom);
    }
    Ok(GammaTable { values })
}

/// Invariants of the trigonometric degeneration with roots `1/3, 1/3, -2/3`.
pub fn trig_invariants() -> (Rational, Rational) {
    (rat(4, 3), rat(-8, 27))
}

/// Even Bernoulli numbers `B₂, …, B₂ₖ` with `z/(eᶻ-1) = Σ Bₙ zⁿ/n!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    /// `B₂ₖ`.
    pub fn get(&self, k: usize) -> Result<&Rational> {
        if k == 0 || k > self.values.len() {
            return Err(Error::Unsupported(format!("B_{} not in table", 2 * k)));
        }
        Ok(&self.values[k - 1])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn bernoulli_table(k_max: usize) -> BernoulliTable {
    // Σ_{j=0}^{n} C(n+1, j) B_j = 0 for n ≥ 1, B_0 = 1.
    let top = 2 * k_max;
    let mut b = vec![Rational::one()];
    for n in 1..=top {
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += binomial_q(n + 1, j) * bj;
        }
        b.push(-acc / int(n as i64 + 1));
    }
    let values = (1..=k_max).map(|k| b[2 * k].clone()).collect();
    BernoulliTable { values }
}

/// `γ₂ₖ` of `℘(z) = 1/3 + 1/sinh²z` from the closed form in Bernoulli numbers.
pub fn trig_gamma(k: usize, bern: &BernoulliTable) -> Result<Rational> {
    let b = bern.get(k + 1)?;
    let two_pow = Rational::from_integer(num::BigInt::from(2).pow(2 * k as u32 + 2));
    Ok(-(two_pow / int(2 * k as i64 + 2)) * b / factorial_q(2 * k))
}

fn require_gamma(order: i32, gamma: &GammaTable) -> Result<()> {
    // exponents 2k with 2k < order
    let need = if order > 1 { ((order - 1) / 2) as usize } else { 0 };
    if need > gamma.len() {
        return Err(Error::GammaTableTooShort { need: 2 * need, have: 2 * gamma.len() });
    }
    Ok(())
}

/// `℘(z) = z⁻² + Σ γ₂ₖ z²ᵏ + O(z^order)`.
pub fn wp_series(order: i32, gamma: &GammaTable) -> Result<LaurentSeries> {
    require_gamma(order, gamma)?;
    let mut coeffs = vec![Rational::zero(); (order + 2).max(0) as usize];
    if !coeffs.is_empty() {
        coeffs[0] = Rational::one();
    }
    let mut k = 1;
    while 2 * k < order {
        coeffs[(2 * k + 2) as usize] = gamma.gamma(k as usize)?.clone();
        k += 1;
    }
    Ok(LaurentSeries::new(-2, coeffs, order))
}

/// `ζ(z) = z⁻¹ - Σ γ₂ₖ z²ᵏ⁺¹/(2k+1) + O(z^order)`, the odd antiderivative of `-℘`.
pub fn zeta_series(order: i32, gamma: &GammaTable) -> Result<LaurentSeries> {
    require_gamma(order - 1, gamma)?;
    let mut coeffs = vec![Rational::zero(); (order + 1).max(0) as usize];
    if !coeffs.is_empty() {
        coeffs[0] = Rational::one();
    }
    let mut k = 1;
    while 2 * k + 1 < order {
        let g = gamma.gamma(k as usize)?;
        coeffs[(2 * k + 2) as usize] = -g / int(2 * k as i64 + 1);
        k += 1;
    }
    Ok(LaurentSeries::new(-1, coeffs, order))
}

/// Coefficients of `(℘')² - 4℘³ + g₂℘ + g₃` as a series; vanishes for a consistent table.
pub fn curve_defect(order: i32, gamma: &GammaTable, g2: &Rational, g3: &Rational) -> Result<LaurentSeries> {
    let w = wp_series(order, gamma)?;
    let dw = w.diff();
    let lhs = dw.mul(&dw);
    let rhs = w.pow(3).scale(&int(4)).sub(&w.scale(g2)).sub(&LaurentSeries::monomial(g3.clone(), 0, order));
    Ok(lhs.sub(&rhs))
}

/// Whether every even/odd coefficient of the opposite parity is zero.
pub fn has_parity(s: &LaurentSeries, even: bool) -> bool {
    s.known()
        .filter(|(e, _)| (e.rem_euclid(2) == 0) != even)
        .all(|(_, c)| c.is_zero())
}
