//! One-variable identities in `∂ = ∂₁` whose coefficients are Laurent series in
//! `z = x₁ - xᵢ`, checked by exact series arithmetic.

use std::collections::BTreeMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{Report, Status, Witness};
use crate::cmbuild::ConstantTable;
use crate::combinat::{binomial_q, factorial_q};
use crate::error::{Error, Result};
use crate::ring::{fmt_rational, int, Rational};
use crate::series::{gamma_table, wp_series, zeta_series, GammaTable, LaurentSeries};

pub const DEFAULT_ORDER: i32 = 24;

/// `Σ aⱼ(z) ∂ʲ` with truncated coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesOp {
    order: i32,
    terms: BTreeMap<usize, LaurentSeries>,
}

impl SeriesOp {
    pub fn zero(order: i32) -> Self {
        SeriesOp { order, terms: BTreeMap::new() }
    }

    /// `c ∂ᵏ`.
    pub fn constant(c: Rational, k: usize, order: i32) -> Self {
        let mut out = Self::zero(order);
        out.add_term(k, LaurentSeries::monomial(c, 0, order));
        out
    }

    pub fn multiplication(f: LaurentSeries) -> Self {
        let mut out = Self::zero(f.order());
        out.add_term(0, f);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&usize, &LaurentSeries)> {
        self.terms.iter()
    }

    fn add_term(&mut self, k: usize, c: LaurentSeries) {
        let next = match self.terms.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        self.terms.insert(k, next);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.order = out.order.min(other.order);
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        SeriesOp {
            order: self.order,
            terms: self.terms.iter().map(|(k, c)| (*k, c.scale(s))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `a∂ⁱ · b∂ʲ = Σᵣ C(i,r) a b⁽ʳ⁾ ∂^{i+j-r}`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.order.min(other.order));
        for (&i, a) in &self.terms {
            for (&j, b) in &other.terms {
                let mut db = b.clone();
                for r in 0..=i {
                    if r > 0 {
                        db = db.diff();
                    }
                    let c = binomial_q(i, r);
                    out.add_term(i + j - r, a.mul(&db).scale(&c));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// Smallest truncation order over all coefficients.
    pub fn known_order(&self) -> i32 {
        self.terms.values().map(LaurentSeries::order).min().unwrap_or(self.order)
    }

    /// First `(∂-power, exponent, value)` with a nonzero known coefficient.
    pub fn first_nonzero(&self) -> Option<(usize, i32, Rational)> {
        self.terms.iter().find_map(|(k, c)| c.known().find(|(_, v)| !v.is_zero()).map(|(e, v)| (*k, e, v.clone())))
    }

    pub fn nonzero_count(&self) -> usize {
        self.terms.values().map(|c| c.known().filter(|(_, v)| !v.is_zero()).count()).sum()
    }

    pub fn known_count(&self) -> usize {
        self.terms.values().map(|c| c.known().count()).sum()
    }
}

/// One parameter point `(m, g₂, g₃)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentParams {
    pub m: Rational,
    pub g2: Rational,
    pub g3: Rational,
}

impl LaurentParams {
    pub fn new(m: Rational, g2: Rational, g3: Rational) -> Self {
        LaurentParams { m, g2, g3 }
    }
}

/// `count` random parameter points with `m ≠ 0`.
pub fn sample_params(count: usize, seed: u64) -> Vec<LaurentParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut small = |lo: i64| {
        let p: i64 = rng.gen_range(-12..=12);
        let q: i64 = rng.gen_range(1..=5);
        let p = if lo > 0 && p == 0 { 1 } else { p };
        Rational::new(p.into(), q.into())
    };
    (0..count).map(|_| LaurentParams::new(small(1), small(0), small(0))).collect()
}

/// Series and constants for one parameter point.
struct Kit {
    order: i32,
    m: Rational,
    gamma: GammaTable,
    wp: SeriesOp,
    wp1: SeriesOp,
    zeta: SeriesOp,
    table: ConstantTable,
}

impl Kit {
    fn new(params: &LaurentParams, order: i32, k_max: usize, gamma: Option<GammaTable>) -> Result<Self> {
        let len = (order as usize / 2 + 2).max(k_max);
        let gamma = match gamma {
            Some(g) => g,
            None => gamma_table(len, &params.g2, &params.g3)?,
        };
        let wp = wp_series(order, &gamma)?;
        let zeta = zeta_series(order, &gamma)?;
        let table = ConstantTable::new(&params.m, &gamma, k_max.max(2))?;
        Ok(Kit {
            order,
            m: params.m.clone(),
            wp1: SeriesOp::multiplication(wp.diff()),
            wp: SeriesOp::multiplication(wp),
            zeta: SeriesOp::multiplication(zeta),
            gamma,
            table,
        })
    }

    fn dpow(&self, c: Rational, k: usize) -> SeriesOp {
        SeriesOp::constant(c, k, self.order)
    }

    fn d_op(&self, k: usize) -> Result<SeriesOp> {
        let mut out = self.dpow(self.table.p0(k)?.clone(), k);
        for i in 2..=k / 2 {
            out = out.add(&self.dpow(self.table.p2i(i, k)?.clone(), k - 2 * i));
        }
        Ok(out)
    }

    /// `[A,℘] + (1+m)[[ζ,B],℘] + m[B,℘]∂ − (1+m)/2 ℘′B − (1−m)/2 B℘′`.
    fn shape(&self, a: &SeriesOp, b: &SeriesOp) -> SeriesOp {
        let one = Rational::one();
        let m = &self.m;
        let d = self.dpow(one.clone(), 1);
        let mut out = a.commutator(&self.wp);
        out = out.add(&self.zeta.commutator(b).commutator(&self.wp).scale(&(&one + m)));
        out = out.add(&b.commutator(&self.wp).compose(&d).scale(m));
        out = out.sub(&self.wp1.compose(b).scale(&((&one + m) / int(2))));
        out.sub(&b.compose(&self.wp1).scale(&((&one - m) / int(2))))
    }

    fn y(&self, n: usize) -> Result<SeriesOp> {
        Ok(self.shape(&self.d_op(n)?, &self.d_op(n - 1)?))
    }

    fn w(&self, k: usize) -> Result<SeriesOp> {
        let one = Rational::one();
        let m = &self.m;
        let lead = (&one - m * int(k as i64 - 1)) / int(k as i64);
        let mut out = self.shape(&self.dpow(lead, k), &self.dpow(one.clone(), k - 1));
        for i in 2..=(k - 1) / 2 {
            let c = factorial_q(2 * i - 2) * binomial_q(k - 1, k - 2 * i) * self.gamma.gamma(i - 1)?;
            let t = self.dpow(c, k - 2 * i).commutator(&self.wp);
            out = out.sub(&t.scale(&(&one + m)));
        }
        Ok(out)
    }
}

fn require_order(op: &SeriesOp, what: &str, order: i32) -> Result<()> {
    // the constant term must be among the retained coefficients
    if op.known_order() < 1 {
        return Err(Error::InsufficientOrder(format!(
            "{what} at truncation order {order} retains coefficients only below z^{}",
            op.known_order()
        )));
    }
    Ok(())
}

fn run<F>(label: &str, order: i32, samples: &[LaurentParams], build: F) -> Result<Report>
where
    F: Fn(&LaurentParams) -> Result<SeriesOp>,
{
    if samples.is_empty() {
        return Err(Error::Unsupported("need at least one parameter sample".into()));
    }
    let mut evaluations = 0;
    let mut nonzero = 0;
    let mut witness = None;
    for p in samples {
        let op = build(p)?;
        require_order(&op, label, order)?;
        evaluations += op.known_count();
        nonzero += op.nonzero_count();
        if witness.is_none() {
            if let Some((k, e, v)) = op.first_nonzero() {
                let mut params = BTreeMap::new();
                params.insert("g2".to_string(), fmt_rational(&p.g2));
                params.insert("g3".to_string(), fmt_rational(&p.g3));
                params.insert("order".to_string(), order.to_string());
                witness = Some(Witness {
                    m: fmt_rational(&p.m),
                    params,
                    curve: None,
                    location: format!("z^{e} in the coefficient of d^{k}"),
                    value: fmt_rational(&v),
                });
            }
        }
    }
    Ok(Report {
        identity: label.to_string(),
        n: 1,
        m_values: samples.iter().map(|p| fmt_rational(&p.m)).collect(),
        backend: "laurent".into(),
        trials: samples.len(),
        seed: 0,
        status: if nonzero == 0 { Status::Pass } else { Status::Fail },
        evaluations,
        nonzero,
        witness,
    })
}

/// The operator `𝒴ₙ` for one parameter point; `gamma` overrides the table.
pub fn y_operator(n: usize, order: i32, p: &LaurentParams, gamma: Option<GammaTable>) -> Result<SeriesOp> {
    if n == 0 {
        return Err(Error::Unsupported("Y_n needs n >= 1".into()));
    }
    Kit::new(p, order, n, gamma)?.y(n)
}

/// The operator `𝒲ₖ` for one parameter point.
pub fn w_operator(k: usize, order: i32, p: &LaurentParams) -> Result<SeriesOp> {
    if k < 5 {
        return Err(Error::Unsupported("W_k needs k >= 5".into()));
    }
    Kit::new(p, order, k, None)?.w(k)
}

pub fn laurent_y(n: usize, order: i32, samples: &[LaurentParams]) -> Result<Report> {
    run(&format!("laurent_Y({n})"), order, samples, |p| y_operator(n, order, p, None))
}

/// `𝒴ₙ` with `γ₂ₖ` shifted by `delta`, a sensitivity control.
pub fn laurent_y_corrupted(n: usize, order: i32, samples: &[LaurentParams], k: usize, delta: &Rational) -> Result<Report> {
    run(&format!("laurent_Y({n}) with gamma_{} shifted", 2 * k), order, samples, |p| {
        let len = (order as usize / 2 + 2).max(n);
        let g = gamma_table(len, &p.g2, &p.g3)?;
        let v = g.gamma(k)? + delta;
        y_operator(n, order, p, Some(g.with_gamma(k, v)))
    })
}

pub fn laurent_w(k: usize, order: i32, samples: &[LaurentParams]) -> Result<Report> {
    run(&format!("laurent_W({k})"), order, samples, |p| w_operator(k, order, p))
}

/// `(1/(2l(2l−1)))℘⁽²ˡ⁾ − (℘′℘⁽²ˡ⁻³⁾ + ℘℘⁽²ˡ⁻²⁾) + Σⱼ ((2l−2)!/(2l−2j)!) γ₂ⱼ₋₂ ℘⁽²ˡ⁻²ʲ⁾`.
pub fn k0_combination(l: usize, order: i32, g2: &Rational, g3: &Rational) -> Result<LaurentSeries> {
    if l < 2 {
        return Err(Error::Unsupported("K0 needs l >= 2".into()));
    }
    let gamma = gamma_table(order as usize / 2 + 2, g2, g3)?;
    let wp = wp_series(order, &gamma)?;
    let c = Rational::one() / int((2 * l * (2 * l - 1)) as i64);
    let mut out = wp.nth_diff(2 * l).scale(&c);
    out = out.sub(&wp.diff().mul(&wp.nth_diff(2 * l - 3)));
    out = out.sub(&wp.mul(&wp.nth_diff(2 * l - 2)));
    for j in 2..l {
        let c = factorial_q(2 * l - 2) / factorial_q(2 * l - 2 * j) * gamma.gamma(j - 1)?;
        out = out.add(&wp.nth_diff(2 * l - 2 * j).scale(&c));
    }
    Ok(out)
}

/// Whether every coefficient below `z⁰` vanishes.
pub fn principal_part_vanishes(s: &LaurentSeries) -> bool {
    s.known().all(|(e, v)| e >= 0 || v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn samples() -> Vec<LaurentParams> {
        sample_params(3, 11)
    }

    #[test]
    fn y1_vanishes() {
        assert!(laurent_y(1, DEFAULT_ORDER, &samples()).unwrap().passed());
    }

    #[test]
    fn y5_and_w5() {
        let r = laurent_y(5, DEFAULT_ORDER, &samples()).unwrap();
        assert!(r.passed(), "{r}");
        let r = laurent_w(5, DEFAULT_ORDER, &samples()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn gamma_corruption_fails() {
        let r = laurent_y_corrupted(5, DEFAULT_ORDER, &samples(), 3, &rat(1, 1)).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn short_order_is_an_error() {
        assert!(matches!(laurent_y(8, 6, &samples()), Err(Error::InsufficientOrder(_))));
    }

    #[test]
    fn k0_principal_part() {
        let k = k0_combination(3, DEFAULT_ORDER, &rat(3, 2), &rat(-1, 7)).unwrap();
        assert!(principal_part_vanishes(&k));
    }

    #[test]
    fn compose_leibniz() {
        // ∂ · z⁻¹ = z⁻¹∂ − z⁻²
        let d = SeriesOp::constant(Rational::one(), 1, 10);
        let f = SeriesOp::multiplication(LaurentSeries::monomial(Rational::one(), -1, 10));
        let lhs = d.compose(&f);
        let rhs = f.compose(&d).sub(&SeriesOp::multiplication(LaurentSeries::monomial(Rational::one(), -2, 10)));
        assert_eq!(lhs.sub(&rhs).nonzero_count(), 0);
    }
}
