//! Operators written out by hand from the explicit low-order formulas.
#![allow(dead_code)]

use std::sync::Arc;

use cmq::cmbuild::{p0, Builder, IndexSet};
use cmq::ring::{int, rat};
use cmq::{CoeffPoly, DiffOp, MultiIndex, PairGen, Rational, Ring};
use num::One;

pub fn generic_ring(n: usize) -> Arc<Ring> {
    Ring::new(n, rat(7, 3), rat(-5, 11))
}

pub fn m_samples() -> Vec<Rational> {
    vec![rat(1, 2), rat(3, 1), rat(-2, 5), rat(7, 3), rat(2, 1)]
}

/// `c · ∂^{e}` from `(index, exponent)` pairs.
pub fn dm(ring: &Arc<Ring>, c: Rational, powers: &[(usize, u8)]) -> DiffOp {
    let mut v = vec![0u8; ring.n];
    for &(k, e) in powers {
        v[k - 1] += e;
    }
    DiffOp::monomial(ring, c, MultiIndex::from_slice(&v))
}

pub fn d(ring: &Arc<Ring>, idx: &[usize]) -> DiffOp {
    let powers: Vec<(usize, u8)> = idx.iter().map(|&k| (k, 1)).collect();
    dm(ring, Rational::one(), &powers)
}

pub fn p(ring: &Arc<Ring>, i: usize, j: usize) -> DiffOp {
    DiffOp::multiplication(CoeffPoly::gen(ring, PairGen::p(i, j)))
}

pub fn sum(ops: &[DiffOp]) -> DiffOp {
    let mut out = DiffOp::zero(ops[0].ring());
    for o in ops {
        out = &out + o;
    }
    out
}

pub fn half_one_minus(m: &Rational) -> Rational {
    (Rational::one() - m) / int(2)
}

pub fn third_order(m: &Rational) -> Rational {
    (Rational::one() - m) * (Rational::one() - int(2) * m) / int(6)
}

/// Two particles: `∂₁∂₂ + (1−m)/2 ∂₁² + (m+1)P₁₂`.
pub fn golden_i2(ring: &Arc<Ring>, m: &Rational, a: usize, b: usize) -> DiffOp {
    let mp1 = m + Rational::one();
    sum(&[
        d(ring, &[a, b]),
        dm(ring, half_one_minus(m), &[(a, 2)]),
        p(ring, a, b).scale(&mp1),
    ])
}

/// Pair without the distinguished particle: `∂ₖ∂ₗ + m(m+1)Pₖₗ`.
pub fn golden_i2_plain(ring: &Arc<Ring>, m: &Rational, k: usize, l: usize) -> DiffOp {
    let c = m * (m + Rational::one());
    &d(ring, &[k, l]) + &p(ring, k, l).scale(&c)
}

pub fn golden_i3(ring: &Arc<Ring>, m: &Rational) -> DiffOp {
    let mp1 = m + Rational::one();
    let h = half_one_minus(m);
    let d1 = d(ring, &[1]);
    let s = &p(ring, 1, 2) + &p(ring, 1, 3);
    sum(&[
        d(ring, &[1, 2, 3]),
        (&d(ring, &[2]) + &d(ring, &[3])).compose(&dm(ring, h.clone(), &[(1, 2)])),
        dm(ring, third_order(m), &[(1, 3)]),
        sum(&[
            p(ring, 2, 3).scale(m).compose(&d1),
            p(ring, 1, 3).compose(&d(ring, &[2])),
            p(ring, 1, 2).compose(&d(ring, &[3])),
        ])
        .scale(&mp1),
        (&s.compose(&d1) + &d1.compose(&s)).scale(&(h * &mp1)),
    ])
}

/// `I₂₃∂₁ + I₁₃∂₂ + I₁₂∂₃ − 2∂₁∂₂∂₃ + X`.
pub fn golden_i3_recursive(ring: &Arc<Ring>, m: &Rational) -> DiffOp {
    let mut b = Builder::new(ring, m).unwrap();
    let x = b.x().unwrap();
    sum(&[
        golden_i2_plain(ring, m, 2, 3).compose(&d(ring, &[1])),
        golden_i2(ring, m, 1, 3).compose(&d(ring, &[2])),
        golden_i2(ring, m, 1, 2).compose(&d(ring, &[3])),
        d(ring, &[1, 2, 3]).scale(&int(-2)),
        x,
    ])
}

pub fn golden_i4(ring: &Arc<Ring>, m: &Rational) -> DiffOp {
    let one = Rational::one();
    let mp1 = m + &one;
    let h = half_one_minus(m);
    let t = third_order(m);
    let d1 = d(ring, &[1]);
    let d11 = dm(ring, one.clone(), &[(1, 2)]);
    let pp = |i, j| p(ring, i, j);
    let s = sum(&[pp(1, 2), pp(1, 3), pp(1, 4)]);
    let mixed = sum(&[
        (&pp(1, 3) + &pp(1, 4)).compose(&d(ring, &[2])),
        (&pp(1, 2) + &pp(1, 4)).compose(&d(ring, &[3])),
        (&pp(1, 2) + &pp(1, 3)).compose(&d(ring, &[4])),
    ]);
    let prod = |a: DiffOp, b: DiffOp| a.compose(&b);
    sum(&[
        d(ring, &[1, 2, 3, 4]),
        sum(&[d(ring, &[2, 3]), d(ring, &[2, 4]), d(ring, &[3, 4])]).compose(&d11).scale(&h),
        sum(&[d(ring, &[2]), d(ring, &[3]), d(ring, &[4])]).compose(&dm(ring, t.clone(), &[(1, 3)])),
        dm(ring, p0(4, m), &[(1, 4)]),
        sum(&[
            pp(3, 4).compose(&d(ring, &[1, 2])),
            pp(2, 4).compose(&d(ring, &[1, 3])),
            pp(2, 3).compose(&d(ring, &[1, 4])),
        ])
        .scale(&(m * &mp1)),
        sum(&[
            pp(1, 4).compose(&d(ring, &[2, 3])),
            pp(1, 3).compose(&d(ring, &[2, 4])),
            pp(1, 2).compose(&d(ring, &[3, 4])),
        ])
        .scale(&mp1),
        d1.compose(&mixed).scale(&(&h * &mp1)),
        mixed.compose(&d1).scale(&(&h * &mp1)),
        sum(&[s.compose(&d11), d1.compose(&s).compose(&d1), d11.compose(&s)]).scale(&(&t * &mp1)),
        sum(&[pp(3, 4), pp(2, 4), pp(2, 3)]).compose(&d11).scale(&(&h * m * &mp1)),
        sum(&[prod(pp(1, 2), pp(1, 3)), prod(pp(1, 2), pp(1, 4)), prod(pp(1, 3), pp(1, 4))])
            .scale(&((&one - m) * &mp1 * &mp1)),
        sum(&[prod(pp(1, 2), pp(3, 4)), prod(pp(1, 3), pp(2, 4)), prod(pp(1, 4), pp(2, 3))])
            .scale(&(m * &mp1 * &mp1)),
    ])
}

/// `3∂₁∂₂∂₃∂₄ + X + Σⱼ I_ĵ ∂ⱼ − Σ_{k<l} I_{k̂l̂} ∂ₖ∂ₗ` with the smaller integrals from the builder.
pub fn golden_i4_recursive(ring: &Arc<Ring>, m: &Rational) -> DiffOp {
    let mut b = Builder::new(ring, m).unwrap();
    let full = IndexSet::full(4);
    let mut out = &d(ring, &[1, 2, 3, 4]).scale(&int(3)) + &b.x().unwrap();
    for j in 1..=4 {
        out = &out + &b.i_set(full.without(j)).unwrap().compose(&d(ring, &[j]));
    }
    for k in 1..=4 {
        for l in k + 1..=4 {
            out = &out - &b.i_set(full.without(k).without(l)).unwrap().compose(&d(ring, &[k, l]));
        }
    }
    out
}
