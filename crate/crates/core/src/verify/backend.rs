//! Exact evaluation of the pair generators on the three degeneration regimes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::curve::{small_rational, CurveContext, Point};
use crate::error::{Error, Result};
use crate::ring::{fmt_rational, int, rat, GenKind, PairGen, Rational, Ring};
use crate::series::trig_invariants;

/// Retry budget for degenerate samples.
pub const MAX_RETRIES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// `℘(z) = z⁻²`.
    Rational,
    /// `℘(z) = 1/3 + 1/sinh²z`.
    Trig,
    /// Rational points on a random curve.
    Elliptic,
}

impl BackendKind {
    pub const ALL: [BackendKind; 3] = [BackendKind::Rational, BackendKind::Trig, BackendKind::Elliptic];

    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Rational => "rational",
            BackendKind::Trig => "trig",
            BackendKind::Elliptic => "elliptic",
        }
    }

    pub fn zeta_evaluable(self) -> bool {
        self == BackendKind::Rational
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rational" | "rationaldeg" => Ok(BackendKind::Rational),
            "trig" | "trigonometric" => Ok(BackendKind::Trig),
            "elliptic" => Ok(BackendKind::Elliptic),
            other => Err(Error::Unsupported(format!("unknown backend {other:?}"))),
        }
    }
}

/// A backend instance: the kind plus its fixed invariants (and curve).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Backend {
    pub kind: BackendKind,
    pub g2: Rational,
    pub g3: Rational,
    pub curve: Option<CurveContext>,
}

impl Backend {
    pub fn rational() -> Self {
        Backend { kind: BackendKind::Rational, g2: Rational::zero(), g3: Rational::zero(), curve: None }
    }

    pub fn trig() -> Self {
        let (g2, g3) = trig_invariants();
        Backend { kind: BackendKind::Trig, g2, g3, curve: None }
    }

    pub fn elliptic(curve: CurveContext) -> Self {
        Backend { kind: BackendKind::Elliptic, g2: curve.g2.clone(), g3: curve.g3.clone(), curve: Some(curve) }
    }

    /// Instance of `kind`; an elliptic curve is drawn from `rng`.
    pub fn sample<R: Rng>(kind: BackendKind, rng: &mut R) -> Result<Self> {
        Ok(match kind {
            BackendKind::Rational => Self::rational(),
            BackendKind::Trig => Self::trig(),
            BackendKind::Elliptic => {
                let b = Self::elliptic(CurveContext::sample(rng, MAX_RETRIES)?);
                b.self_check()?;
                b
            }
        })
    }

    pub fn ring(&self, n: usize) -> Arc<Ring> {
        Ring::new(n, self.g2.clone(), self.g3.clone())
    }

    /// Curve relation and addition theorem at a fixed triple of group points.
    fn self_check(&self) -> Result<()> {
        let a = self.assignment_from(PointData::Elliptic(vec![(0, 0), (1, 0), (0, 1)]))?;
        if !a.curve_relation_holds() || !a.addition_theorem_holds() {
            return Err(Error::DegeneratePoint("backend self-check failed".into()));
        }
        Ok(())
    }

    /// Draws a valid assignment for `n` variables, resampling on degeneracy.
    pub fn sample_assignment<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Assignment> {
        for _ in 0..MAX_RETRIES {
            let data = match self.kind {
                BackendKind::Rational => PointData::Rational((0..n).map(|_| small_rational(rng, 30, 7)).collect()),
                BackendKind::Trig => PointData::Trig(
                    (0..n)
                        .map(|_| {
                            let p: i64 = rng.gen_range(1..=30);
                            let q: i64 = rng.gen_range(1..=7);
                            rat(p, q)
                        })
                        .collect(),
                ),
                BackendKind::Elliptic => {
                    PointData::Elliptic((0..n).map(|_| (rng.gen_range(-2..=2), rng.gen_range(-2..=2))).collect())
                }
            };
            match self.assignment_from(data) {
                Ok(a) => return Ok(a),
                Err(Error::DegeneratePoint(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::RetriesExhausted(MAX_RETRIES))
    }

    /// Computes every generator value for the given per-variable data.
    pub fn assignment_from(&self, data: PointData) -> Result<Assignment> {
        let n = data.len();
        let mut values = HashMap::new();
        match &data {
            PointData::Rational(c) => {
                for i in 0..n {
                    for j in i + 1..n {
                        let z = &c[i] - &c[j];
                        if z.is_zero() {
                            return Err(Error::DegeneratePoint(format!("c{} = c{}", i + 1, j + 1)));
                        }
                        let inv = z.recip();
                        let (a, b) = (i + 1, j + 1);
                        values.insert(PairGen::p(a, b), &inv * &inv);
                        values.insert(PairGen::p1(a, b), int(-2) * &inv * &inv * &inv);
                        values.insert(PairGen::z(a, b), inv);
                    }
                }
            }
            PointData::Trig(q) => {
                for i in 0..n {
                    for j in i + 1..n {
                        if q[i].is_zero() || q[j].is_zero() {
                            return Err(Error::DegeneratePoint("q = 0".into()));
                        }
                        let r = &q[i] / &q[j];
                        let big_q = &r * &r;
                        let d = &big_q - Rational::one();
                        if d.is_zero() {
                            return Err(Error::DegeneratePoint(format!("q{} = ±q{}", i + 1, j + 1)));
                        }
                        let (a, b) = (i + 1, j + 1);
                        let p = rat(1, 3) + int(4) * &big_q / (&d * &d);
                        let p1 = int(-8) * &big_q * (&big_q + Rational::one()) / (&d * &d * &d);
                        values.insert(PairGen::p(a, b), p);
                        values.insert(PairGen::p1(a, b), p1);
                    }
                }
            }
            PointData::Elliptic(ab) => {
                let curve = self
                    .curve
                    .as_ref()
                    .ok_or_else(|| Error::Unsupported("elliptic data without a curve".into()))?;
                let pts: Vec<Point> = ab.iter().map(|&(a, b)| curve.combo(a, b)).collect();
                for i in 0..n {
                    for j in i + 1..n {
                        let d = curve.sub(&pts[i], &pts[j]);
                        let Point::Affine(x, y) = d else {
                            return Err(Error::DegeneratePoint(format!("x{} - x{} is a lattice point", i + 1, j + 1)));
                        };
                        values.insert(PairGen::p(i + 1, j + 1), x);
                        values.insert(PairGen::p1(i + 1, j + 1), y);
                    }
                }
            }
        }
        Ok(Assignment { kind: self.kind, g2: self.g2.clone(), g3: self.g3.clone(), data, values })
    }
}

/// Per-variable sample data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointData {
    /// `x_i ↦ c_i`.
    Rational(Vec<Rational>),
    /// `e^{x_i} ↦ q_i`.
    Trig(Vec<Rational>),
    /// `x_i ↦ a_i P₁ ⊕ b_i P₂`.
    Elliptic(Vec<(i64, i64)>),
}

impl PointData {
    pub fn len(&self) -> usize {
        match self {
            PointData::Rational(v) | PointData::Trig(v) => v.len(),
            PointData::Elliptic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x1 → "…"` description for reports.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match self {
            PointData::Rational(v) => {
                for (i, c) in v.iter().enumerate() {
                    out.insert(format!("c{}", i + 1), fmt_rational(c));
                }
            }
            PointData::Trig(v) => {
                for (i, q) in v.iter().enumerate() {
                    out.insert(format!("q{}", i + 1), fmt_rational(q));
                }
            }
            PointData::Elliptic(v) => {
                for (i, (a, b)) in v.iter().enumerate() {
                    out.insert(format!("x{}", i + 1), format!("{a}P1+{b}P2"));
                }
            }
        }
        out
    }
}

/// Generator values at one sample point.
#[derive(Clone, Debug)]
pub struct Assignment {
    kind: BackendKind,
    g2: Rational,
    g3: Rational,
    data: PointData,
    values: HashMap<PairGen, Rational>,
}

impl Assignment {
    pub fn data(&self) -> &PointData {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    pub fn value(&self, g: PairGen) -> Result<Rational> {
        if g.kind == GenKind::Z && !self.kind.zeta_evaluable() {
            return Err(Error::ZetaNotEvaluable(g));
        }
        self.values.get(&g).cloned().ok_or(Error::UnassignedGenerator(g))
    }

    /// `℘(x_a - x_b)` for any ordered pair.
    pub fn wp(&self, a: usize, b: usize) -> Rational {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.values[&PairGen::p(i, j)].clone()
    }

    /// `℘'(x_a - x_b)` for any ordered pair.
    pub fn wp_prime(&self, a: usize, b: usize) -> Rational {
        if a < b {
            self.values[&PairGen::p1(a, b)].clone()
        } else {
            -self.values[&PairGen::p1(b, a)].clone()
        }
    }

    /// `(P1)² = 4P³ - g₂P - g₃` for every pair.
    pub fn curve_relation_holds(&self) -> bool {
        let n = self.n();
        (1..=n).all(|i| {
            (i + 1..=n).all(|j| {
                let (p, p1) = (self.wp(i, j), self.wp_prime(i, j));
                &p1 * &p1 == int(4) * &p * &p * &p - &self.g2 * &p - &self.g3
            })
        })
    }

    /// `det[[℘ij, ℘jk, ℘ki], [℘'ij, ℘'jk, ℘'ki], [1, 1, 1]] = 0` for every triple.
    pub fn addition_theorem_holds(&self) -> bool {
        let n = self.n();
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    if !addition_det(self, i, j, k).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Value of the addition-theorem determinant at one triple.
pub fn addition_det(a: &Assignment, i: usize, j: usize, k: usize) -> Rational {
    let (x1, x2, x3) = (a.wp(i, j), a.wp(j, k), a.wp(k, i));
    let (y1, y2, y3) = (a.wp_prime(i, j), a.wp_prime(j, k), a.wp_prime(k, i));
    &x1 * (&y2 - &y3) - &x2 * (&y1 - &y3) + &x3 * (&y1 - &y2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_values() {
        let b = Backend::rational();
        let a = b.assignment_from(PointData::Rational(vec![int(1), int(0)])).unwrap();
        assert_eq!(a.value(PairGen::p(1, 2)).unwrap(), int(1));
        assert_eq!(a.value(PairGen::p1(1, 2)).unwrap(), int(-2));
        assert_eq!(a.value(PairGen::z(1, 2)).unwrap(), int(1));
        assert!(b.assignment_from(PointData::Rational(vec![int(1), int(1)])).is_err());
    }

    #[test]
    fn trig_values() {
        let b = Backend::trig();
        let a = b.assignment_from(PointData::Trig(vec![int(2), int(1)])).unwrap();
        assert_eq!(a.value(PairGen::p(1, 2)).unwrap(), rat(19, 9));
        assert_eq!(a.value(PairGen::z(1, 2)), Err(Error::ZetaNotEvaluable(PairGen::z(1, 2))));
        assert!(b.assignment_from(PointData::Trig(vec![int(2), int(-2)])).is_err());
    }

    #[test]
    fn soundness_on_every_backend() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in BackendKind::ALL {
            let b = Backend::sample(kind, &mut rng).unwrap();
            for _ in 0..3 {
                let a = b.sample_assignment(4, &mut rng).unwrap();
                assert!(a.curve_relation_holds(), "{kind}");
                assert!(a.addition_theorem_holds(), "{kind}");
            }
        }
    }

    #[test]
    fn same_seed_same_assignment() {
        let b = Backend::rational();
        let a1 = b.sample_assignment(3, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let a2 = b.sample_assignment(3, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a1.data(), a2.data());
        let PointData::Rational(c) = a1.data() else { panic!() };
        assert!(c[0] != c[1] && c[1] != c[2] && c[0] != c[2]);
    }

    #[test]
    fn missing_generator() {
        let a = Backend::rational().assignment_from(PointData::Rational(vec![int(1), int(0)])).unwrap();
        assert_eq!(a.value(PairGen::p(1, 3)), Err(Error::UnassignedGenerator(PairGen::p(1, 3))));
    }
}
