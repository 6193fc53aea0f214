//! Exact group law on `y² = 4x³ - g₂x - g₃` over the rationals.

use num::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{fmt_rational, int, Rational};

/// A point of the curve; `(x, y) = (℘(z), ℘'(z))` for the parameter `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Identity,
    Affine(Rational, Rational),
}

impl Point {
    pub fn x(&self) -> Option<&Rational> {
        match self {
            Point::Identity => None,
            Point::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            Point::Identity => None,
            Point::Affine(_, y) => Some(y),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Point::Identity)
    }
}

/// Invariants plus two base points generating the sample lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveContext {
    pub g2: Rational,
    pub g3: Rational,
    pub base: [Point; 2],
}

#[derive(Serialize)]
struct CurveView {
    g2: String,
    g3: String,
    base: [[String; 2]; 2],
}

impl Serialize for CurveContext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords = |p: &Point| match p {
            Point::Identity => ["inf".to_string(), "inf".to_string()],
            Point::Affine(x, y) => [fmt_rational(x), fmt_rational(y)],
        };
        CurveView {
            g2: fmt_rational(&self.g2),
            g3: fmt_rational(&self.g3),
            base: [coords(&self.base[0]), coords(&self.base[1])],
        }
        .serialize(s)
    }
}

/// Order bound used when rejecting torsion base points.
const TORSION_BOUND: i64 = 12;

impl CurveContext {
    /// The unique curve of this form through two points with distinct `x`.
    pub fn through(p: (Rational, Rational), q: (Rational, Rational)) -> Result<Self> {
        if p.0 == q.0 {
            return Err(Error::DegeneratePoint("base points share x".into()));
        }
        // g₂x + g₃ = 4x³ - y² at both points
        let r = |x: &Rational, y: &Rational| int(4) * x * x * x - y * y;
        let (rp, rq) = (r(&p.0, &p.1), r(&q.0, &q.1));
        let g2 = (&rp - &rq) / (&p.0 - &q.0);
        let g3 = &rp - &g2 * &p.0;
        let ctx = CurveContext {
            g2,
            g3,
            base: [Point::Affine(p.0, p.1), Point::Affine(q.0, q.1)],
        };
        if ctx.discriminant().is_zero() {
            return Err(Error::DegeneratePoint("singular curve".into()));
        }
        for b in &ctx.base {
            if b.y().is_some_and(Zero::is_zero) {
                return Err(Error::DegeneratePoint("2-torsion base point".into()));
            }
        }
        Ok(ctx)
    }

    /// `g₂³ - 27g₃²`.
    pub fn discriminant(&self) -> Rational {
        &self.g2 * &self.g2 * &self.g2 - int(27) * &self.g3 * &self.g3
    }

    pub fn on_curve(&self, p: &Point) -> bool {
        match p {
            Point::Identity => true,
            Point::Affine(x, y) => y * y == int(4) * x * x * x - &self.g2 * x - &self.g3,
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Identity => Point::Identity,
            Point::Affine(x, y) => Point::Affine(x.clone(), -y),
        }
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Identity, _) => return q.clone(),
            (_, Point::Identity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Point::Identity;
            }
            (int(12) * x1 * x1 - &self.g2) / (int(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda / int(4) - x1 - x2;
        let y3 = -(y1 + &lambda * (&x3 - x1));
        let out = Point::Affine(x3, y3);
        debug_assert!(self.on_curve(&out));
        out
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Point {
        self.add(p, &self.neg(q))
    }

    /// `k·p` by double-and-add.
    pub fn mul(&self, k: i64, p: &Point) -> Point {
        let mut base = if k < 0 { self.neg(p) } else { p.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = Point::Identity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `a·P₁ ⊕ b·P₂`.
    pub fn combo(&self, a: i64, b: i64) -> Point {
        self.add(&self.mul(a, &self.base[0]), &self.mul(b, &self.base[1]))
    }

    fn has_small_torsion(&self, p: &Point) -> bool {
        let mut acc = Point::Identity;
        for _ in 1..=TORSION_BOUND {
            acc = self.add(&acc, p);
            if acc.is_identity() {
                return true;
            }
        }
        false
    }

    /// Random curve through two random small rational points, neither of small order.
    pub fn sample<R: Rng>(rng: &mut R, retries: usize) -> Result<Self> {
        for _ in 0..retries {
            let mut coord = || small_rational(rng, 9, 4);
            let p = (coord(), coord());
            let q = (coord(), coord());
            let Ok(ctx) = CurveContext::through(p, q) else { continue };
            if ctx.base.iter().any(|b| ctx.has_small_torsion(b)) {
                continue;
            }
            if ctx.base[0] == ctx.base[1] || ctx.base[0] == ctx.neg(&ctx.base[1]) {
                continue;
            }
            return Ok(ctx);
        }
        Err(Error::RetriesExhausted(retries))
    }
}

/// Uniform `p/q` with `|p| ≤ num_bound`, `1 ≤ q ≤ den_bound`.
pub fn small_rational<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rational {
    let p = rng.gen_range(-num_bound..=num_bound);
    let q = rng.gen_range(1..=den_bound);
    Rational::new(p.into(), q.into())
}
