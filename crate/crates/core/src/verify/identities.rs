//! The operator identities behind the commutativity proof, as vanishing targets.

use std::sync::Arc;

use num::{One, Zero};

use super::{verify_zero, BackendKind, Report, Target, VerifyConfig};
use crate::cmbuild::{Builder, IndexSet};
use crate::error::{Error, Result};
use crate::opalg::{DiffOp, MultiIndex};
use crate::ring::{int, CoeffPoly, Rational, Ring};

pub const IDENTITIES: [&str; 11] = [
    "integral",
    "tower",
    "lemma2",
    "lemma4",
    "lemma5",
    "lemma6",
    "theta3",
    "addition",
    "htheta",
    "theta_derivative",
    "corrupted_integral",
];

/// Smallest `n` each identity makes sense for.
pub fn min_n(name: &str) -> Result<usize> {
    Ok(match name {
        "integral" | "tower" | "htheta" | "corrupted_integral" => 2,
        "lemma4" | "lemma5" | "lemma6" | "theta3" | "addition" | "theta_derivative" => 3,
        "lemma2" => 4,
        _ => return Err(Error::UnknownIdentity(name.to_string())),
    })
}

fn mult(f: CoeffPoly) -> DiffOp {
    DiffOp::multiplication(f)
}

/// `[T, f]`.
fn bracket_fn(t: &DiffOp, f: &CoeffPoly) -> DiffOp {
    -&t.ad_function(f)
}

fn one() -> Rational {
    Rational::one()
}

fn full_without(n: usize, drop: &[usize]) -> IndexSet {
    drop.iter().fold(IndexSet::full(n), |s, &k| s.without(k))
}

/// `[I, H]`.
pub fn integral(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let i = b.i()?;
    let h = b.h()?;
    Ok(vec![("[I,H]".into(), i.commutator(&h))])
}

/// `[I, H] + P₁₂`, a control that must fail.
pub fn corrupted_integral(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut t = integral(ring, m)?;
    t[0].1.add_scaled(&mult(CoeffPoly::wp(ring, 1, 2)), &one());
    Ok(t)
}

/// `[L_k, L_l]` for `k < l` and `[L_k, H]` for every `k`.
pub fn tower(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let ls = b.tower()?;
    let h = b.h()?;
    let mut out = Vec::new();
    for (k, lk) in ls.iter().enumerate() {
        out.push((format!("[L{k},H]"), lk.commutator(&h)));
        for (l, ll) in ls.iter().enumerate().skip(k + 1) {
            out.push((format!("[L{k},L{l}]"), lk.commutator(ll)));
        }
    }
    Ok(out)
}

/// Non-deformed identity on the particles `2..n`.
pub fn lemma2(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let n = ring.n;
    let rest = IndexSet::full(n).without(1);
    let mut t = mult(b.x_matching(rest)?).commutator(&b.h_set(rest)?);
    for j in rest.iter() {
        let mut pot = CoeffPoly::zero(ring);
        for l in rest.without(j).iter() {
            pot.add_scaled(&b.u(j, l), &int(2));
        }
        let op = mult(b.x_matching(rest.without(j))?).compose(&DiffOp::partial(ring, j));
        t.add_scaled(&bracket_fn(&op, &pot), &one());
    }
    for k in rest.iter() {
        for l in rest.iter().filter(|&l| l > k) {
            let op = mult(b.x_matching(rest.without(k).without(l))?).compose(&DiffOp::partial_set(ring, [k, l]));
            t.add_scaled(&bracket_fn(&op, &b.u(k, l).scale(&int(2))), &one());
        }
    }
    Ok(vec![("lemma2".into(), t)])
}

/// `[Θ, Σu₁ⱼ] + mΣ[Θ_ĵ,u₁ⱼ]∂₁ − (1+m)/2 Σu′₁ⱼΘ_ĵ − (1−m)/2 ΣΘ_ĵu′₁ⱼ + mΣ_{k≠l}[Θ_{k̂l̂},u₁ₖ]u₁ₗ`.
pub fn lemma4(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let n = ring.n;
    let theta = b.theta(IndexSet::full(n))?;
    let d1 = DiffOp::partial(ring, 1);
    let half_plus = (one() + m) / int(2);
    let half_minus = (one() - m) / int(2);
    let mut sum_u = CoeffPoly::zero(ring);
    for j in 2..=n {
        sum_u.add_scaled(&b.u(1, j), &one());
    }
    let mut t = bracket_fn(&theta, &sum_u);
    for j in 2..=n {
        let tj = b.theta(full_without(n, &[j]))?;
        let u = b.u(1, j);
        let up = b.u_prime(j);
        t.add_scaled(&bracket_fn(&tj, &u).compose(&d1), m);
        t.add_scaled(&tj.left_mul(&up), &-half_plus.clone());
        t.add_scaled(&tj.right_mul(&up), &-half_minus.clone());
    }
    for k in 2..=n {
        for l in (2..=n).filter(|&l| l != k) {
            let tkl = b.theta(full_without(n, &[k, l]))?;
            t.add_scaled(&bracket_fn(&tkl, &b.u(1, k)).right_mul(&b.u(1, l)), m);
        }
    }
    Ok(vec![("lemma4".into(), t)])
}

/// `[Δ,Θ]` minus its expansion through `[u₁ₖ, Θ_k̂]`, with `Δ = m∂₁² + Σ∂ₖ²`.
pub fn lemma5(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let n = ring.n;
    let theta = b.theta(IndexSet::full(n))?;
    let mut delta = DiffOp::monomial(ring, m.clone(), MultiIndex::power(n, 1, 2));
    for k in 2..=n {
        delta.add_scaled(&DiffOp::monomial(ring, one(), MultiIndex::power(n, k, 2)), &one());
    }
    let mut t = delta.commutator(&theta);
    let mut first = DiffOp::zero(ring);
    for k in 2..=n {
        let tk = b.theta(full_without(n, &[k]))?;
        // [u, Θ] = ad_function
        let c = tk.ad_function(&b.u(1, k));
        t.add_scaled(&c.compose(&DiffOp::partial(ring, k)), &int(-2));
        first.add_scaled(&c, &one());
        t.add_scaled(&tk.ad_function(&b.u_prime(k)), &(one() + m));
    }
    t.add_scaled(&first.compose(&DiffOp::partial(ring, 1)), &(int(2) * m));
    for k in 2..=n {
        for l in (2..=n).filter(|&l| l != k) {
            let tkl = b.theta(full_without(n, &[k, l]))?;
            t.add_scaled(&tkl.ad_function(&b.u(1, l)).ad_function(&b.u(1, k)), &-m.clone());
        }
    }
    Ok(vec![("lemma5".into(), t)])
}

/// `(ζ(x₁−xₗ) − ζ(x₁−xₖ))℘′ₖₗ − (℘₁ₖ+℘₁ₗ)℘ₖₗ + ℘₁ₖ℘₁ₗ`, constant in `x₁`.
pub fn lemma6_key(ring: &Arc<Ring>, k: usize, l: usize) -> CoeffPoly {
    let wp = |a, b| CoeffPoly::wp(ring, a, b);
    let zeta = &CoeffPoly::zeta(ring, 1, l) - &CoeffPoly::zeta(ring, 1, k);
    let mut out = &zeta * &CoeffPoly::wp_prime(ring, k, l);
    out.add_product_scaled(&(&wp(1, k) + &wp(1, l)), &wp(k, l), &-one());
    out.add_product_scaled(&wp(1, k), &wp(1, l), &one());
    out
}

/// `R = [Θ,H] + Σⱼ[Θ_ĵ∂ⱼ, 2Σ_{l≠j}uⱼₗ] + Σ_{k<l}[Θ_{k̂l̂}, 2(u₁ₖ+u₁ₗ)]uₖₗ` together with the
/// `x₁`-derivative of every key function; the key functions themselves vanish only in
/// the rational limit, so they are included when `with_zeta` is set.
pub fn lemma6(ring: &Arc<Ring>, m: &Rational, with_zeta: bool) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let n = ring.n;
    let mut r = b.theta(IndexSet::full(n))?.commutator(&b.h()?);
    for j in 2..=n {
        let mut pot = CoeffPoly::zero(ring);
        for l in (1..=n).filter(|&l| l != j) {
            pot.add_scaled(&b.u(j, l), &int(2));
        }
        let op = b.theta(full_without(n, &[j]))?.compose(&DiffOp::partial(ring, j));
        r.add_scaled(&bracket_fn(&op, &pot), &one());
    }
    for k in 2..=n {
        for l in k + 1..=n {
            let tkl = b.theta(full_without(n, &[k, l]))?;
            let f = (&b.u(1, k) + &b.u(1, l)).scale(&int(2));
            r.add_scaled(&bracket_fn(&tkl, &f).right_mul(&b.u(k, l)), &one());
        }
    }
    let mut out = vec![("R".to_string(), r)];
    for k in 2..=n {
        for l in k + 1..=n {
            let key = lemma6_key(ring, k, l);
            out.push((format!("d1 K{k}{l}"), mult(key.diff(1))));
            if with_zeta {
                out.push((format!("K{k}{l}"), mult(key)));
            }
        }
    }
    Ok(out)
}

/// `[Θ₁ₖₗ,H₁ₖₗ] + [∂₁, 2(u₁ₖ+u₁ₗ)]uₖₗ + [Θ₁ₗ∂ₖ, 2(u₁ₖ+uₖₗ)] + [Θ₁ₖ∂ₗ, 2(u₁ₗ+uₖₗ)]` for every `k < l`.
pub fn theta3(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let n = ring.n;
    let d1 = DiffOp::partial(ring, 1);
    let mut out = Vec::new();
    for k in 2..=n {
        for l in k + 1..=n {
            let s = IndexSet::from_indices([1, k, l]);
            let mut t = b.theta(s)?.commutator(&b.h_set(s)?);
            let f = (&b.u(1, k) + &b.u(1, l)).scale(&int(2));
            t.add_scaled(&bracket_fn(&d1, &f).right_mul(&b.u(k, l)), &one());
            for (a, c) in [(k, l), (l, k)] {
                let op = b.theta(IndexSet::from_indices([1, c]))?.compose(&DiffOp::partial(ring, a));
                let f = (&b.u(1, a) + &b.u(k, l)).scale(&int(2));
                t.add_scaled(&bracket_fn(&op, &f), &one());
            }
            out.push((format!("theta3 {s}"), t));
        }
    }
    Ok(out)
}

/// `T_ijk = det[[℘ᵢⱼ, ℘ⱼₖ, ℘ₖᵢ], [℘′ᵢⱼ, ℘′ⱼₖ, ℘′ₖᵢ], [1, 1, 1]]`.
pub fn addition_poly(ring: &Arc<Ring>, i: usize, j: usize, k: usize) -> CoeffPoly {
    let x = [CoeffPoly::wp(ring, i, j), CoeffPoly::wp(ring, j, k), CoeffPoly::wp(ring, k, i)];
    let y = [
        CoeffPoly::wp_prime(ring, i, j),
        CoeffPoly::wp_prime(ring, j, k),
        CoeffPoly::wp_prime(ring, k, i),
    ];
    let mut out = CoeffPoly::zero(ring);
    out.add_product_scaled(&x[0], &(&y[1] - &y[2]), &one());
    out.add_product_scaled(&x[1], &(&y[0] - &y[2]), &-one());
    out.add_product_scaled(&x[2], &(&y[0] - &y[1]), &one());
    out
}

pub fn addition(ring: &Arc<Ring>) -> Target {
    let n = ring.n;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                out.push((format!("T{i}{j}{k}"), mult(addition_poly(ring, i, j, k))));
            }
        }
    }
    out
}

/// `[θ,H] − 2Σ∂ⱼ` and `[Σ∂ⱼ, θ] − (1/m + n − 1)`.
pub fn htheta(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let b = Builder::new(ring, m)?;
    let n = ring.n;
    let mut sum_d = DiffOp::zero(ring);
    for j in 1..=n {
        sum_d.add_scaled(&DiffOp::partial(ring, j), &one());
    }
    let mut a = b.h()?.ad_theta(m)?;
    a.add_scaled(&sum_d, &int(-2));
    let mut c = -&sum_d.ad_theta(m)?;
    let expected = m.recip() + int(n as i64 - 1);
    c.add_scaled(&DiffOp::identity(ring), &-expected);
    Ok(vec![("[theta,H]".into(), a), ("[sum d,theta]".into(), c)])
}

/// `∂Θ/∂xₖ = [u₁ₖ, Θ_k̂]` for `k ≥ 2` and `∂Θ/∂x₁ = −Σₖ[u₁ₖ, Θ_k̂]`.
pub fn theta_derivative(ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    let mut b = Builder::new(ring, m)?;
    let n = ring.n;
    let theta = b.theta(IndexSet::full(n))?;
    let mut sum = DiffOp::zero(ring);
    let mut out = Vec::new();
    for k in 2..=n {
        let c = b.theta(full_without(n, &[k]))?.ad_function(&b.u(1, k));
        sum.add_scaled(&c, &one());
        out.push((format!("d{k} Theta"), &theta.diff_coeffs(k) - &c));
    }
    out.push(("d1 Theta".into(), &theta.diff_coeffs(1) + &sum));
    Ok(out)
}

/// Builds the named identity's left-hand side on a given ring.
pub fn build_identity(name: &str, backend: BackendKind, ring: &Arc<Ring>, m: &Rational) -> Result<Target> {
    match name {
        "integral" => integral(ring, m),
        "corrupted_integral" => corrupted_integral(ring, m),
        "tower" => tower(ring, m),
        "lemma2" => lemma2(ring, m),
        "lemma4" => lemma4(ring, m),
        "lemma5" => lemma5(ring, m),
        "lemma6" => lemma6(ring, m, backend.zeta_evaluable()),
        "theta3" => theta3(ring, m),
        "addition" => Ok(addition(ring)),
        "htheta" => htheta(ring, m),
        "theta_derivative" => theta_derivative(ring, m),
        _ => Err(Error::UnknownIdentity(name.to_string())),
    }
}

/// Builds and zero-tests a named identity.
pub fn check_identity(name: &str, n: usize, cfg: &VerifyConfig) -> Result<Report> {
    let lo = min_n(name)?;
    if n < lo {
        return Err(Error::SetTooSmall(format!("{name} needs n >= {lo}, got {n}")));
    }
    if cfg.m_values.iter().any(Zero::is_zero) && matches!(name, "tower" | "htheta") {
        return Err(Error::ZeroMass);
    }
    verify_zero(name, n, cfg, |ring, m| build_identity(name, cfg.backend, ring, m))
}
