use std::sync::Arc;

use cmq::cmbuild::{Builder, IndexSet};
use cmq::ring::{int, rat};
use cmq::series::{gamma_table, has_parity, wp_series, zeta_series};
use cmq::verify::{Backend, BackendKind, VerifyConfig};
use cmq::{CoeffPoly, DiffOp, GenKind, Monomial, MultiIndex, PairGen, Rational, Ring};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 3;

fn ring() -> Arc<Ring> {
    Ring::new(N, rat(5, 2), rat(-1, 3))
}

fn gen_strategy() -> impl Strategy<Value = PairGen> {
    (1usize..N, 0usize..3, 1usize..=N).prop_filter_map("i < j", |(i, k, j)| {
        let kind = [GenKind::P, GenKind::P1, GenKind::Z][k];
        (i < j).then(|| PairGen::new(i, j, kind).unwrap())
    })
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

/// Raw term data, turned into a polynomial on a concrete ring.
type PolySpec = Vec<(Rational, Vec<(PairGen, u32)>)>;

fn poly_spec() -> impl Strategy<Value = PolySpec> {
    prop::collection::vec((rational_strategy(), prop::collection::vec((gen_strategy(), 1u32..=2), 0..3)), 0..4)
}

fn poly(ring: &Arc<Ring>, spec: &PolySpec) -> CoeffPoly {
    let mut out = CoeffPoly::zero(ring);
    for (c, f) in spec {
        out = &out + &CoeffPoly::term(ring, Monomial::from_factors(f.iter().copied()), c.clone());
    }
    out
}

type OpSpec = Vec<([u8; N], PolySpec)>;

fn op_spec() -> impl Strategy<Value = OpSpec> {
    prop::collection::vec((prop::array::uniform3(0u8..=2), poly_spec()), 0..3)
}

fn op(ring: &Arc<Ring>, spec: &OpSpec) -> DiffOp {
    let mut out = DiffOp::zero(ring);
    for (alpha, p) in spec {
        out = &out + &DiffOp::term(poly(ring, p), MultiIndex::from_slice(alpha));
    }
    out
}

fn assignment(seed: u64) -> cmq::verify::Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Backend::rational().sample_assignment(N, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivatives_commute(a in poly_spec(), k in 1usize..=N, l in 1usize..=N) {
        let a = poly(&ring(), &a);
        prop_assert_eq!(a.diff(k).diff(l), a.diff(l).diff(k));
    }

    #[test]
    fn leibniz(a in poly_spec(), b in poly_spec(), k in 1usize..=N) {
        let r = ring();
        let (a, b) = (poly(&r, &a), poly(&r, &b));
        prop_assert_eq!((&a * &b).diff(k), &(&a.diff(k) * &b) + &(&a * &b.diff(k)));
    }

    #[test]
    fn unrelated_generators_are_constant(g in gen_strategy(), k in 1usize..=N) {
        let d = CoeffPoly::gen(&ring(), g).diff(k);
        prop_assert_eq!(d.is_zero(), g.sign_for(k) == 0);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly_spec(), b in poly_spec(), seed in any::<u64>()) {
        let r = ring();
        let (a, b) = (poly(&r, &a), poly(&r, &b));
        let asg = assignment(seed);
        let ev = |p: &CoeffPoly| p.eval_with(|g| asg.value(g)).unwrap();
        prop_assert_eq!(ev(&(&a * &b)), ev(&a) * ev(&b));
        prop_assert_eq!(ev(&(&a + &b)), ev(&a) + ev(&b));
    }

    #[test]
    fn composition_is_associative(a in op_spec(), b in op_spec(), c in op_spec()) {
        let r = ring();
        let (a, b, c) = (op(&r, &a), op(&r, &b), op(&r, &c));
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn jacobi(a in op_spec(), b in op_spec(), c in op_spec()) {
        let r = ring();
        let (a, b, c) = (op(&r, &a), op(&r, &b), op(&r, &c));
        let sum = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a))) + &c.commutator(&a.commutator(&b));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn ad_zeta_order_is_immaterial(a in op_spec(), m in rational_strategy()) {
        let t = op(&ring(), &a);
        let forward = t.ad_zeta_set(&m, [2, 3]);
        let backward = t.ad_zeta_set(&m, [3, 2]);
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn ad_theta_lowers_degree(a in op_spec(), m in rational_strategy()) {
        prop_assume!(m != int(0));
        let t = op(&ring(), &a);
        for (alpha, c) in t.terms() {
            let single = DiffOp::term(c.clone(), alpha.clone());
            let s = single.ad_theta(&m).unwrap();
            prop_assert_eq!(s.is_zero(), alpha.is_zero());
            for (beta, d) in s.terms() {
                prop_assert_eq!(beta.degree() + 1, alpha.degree());
                prop_assert!(d.generators().is_subset(&c.generators()));
            }
        }
    }

    #[test]
    fn series_relations(g2 in rational_strategy(), g3 in rational_strategy()) {
        let g = gamma_table(14, &g2, &g3).unwrap();
        let w = wp_series(24, &g).unwrap();
        let z = zeta_series(24, &g).unwrap();
        let s = z.diff().add(&w);
        prop_assert!(s.known().all(|(_, v)| *v == int(0)));
        prop_assert!(has_parity(&w, true));
        prop_assert!(has_parity(&z, false));
    }
}

#[test]
fn builder_operators_are_zeta_free() {
    let r = Ring::new(4, rat(1, 2), rat(3, 5));
    for m in [rat(2, 1), rat(-3, 7)] {
        let mut b = Builder::new(&r, &m).unwrap();
        let mut ops = vec![b.i().unwrap(), b.h().unwrap(), b.x().unwrap()];
        for s in [IndexSet::full(4), IndexSet::from_indices([1, 3]), IndexSet::from_indices([1, 2, 4])] {
            let theta = b.theta(s).unwrap();
            for j in 2..=4 {
                ops.push(theta.ad_zeta(&m, j));
            }
            ops.push(theta);
        }
        ops.extend(b.tower().unwrap());
        for t in ops {
            assert!(t.terms().all(|(_, c)| !c.contains_kind(GenKind::Z)));
        }
    }
}

/// Brute-force perfect matchings of a sorted index list.
fn matchings(idx: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if idx.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for t in 1..idx.len() {
        let rest: Vec<usize> = idx.iter().enumerate().filter(|&(s, _)| s != 0 && s != t).map(|(_, &v)| v).collect();
        for mut mm in matchings(&rest) {
            mm.push((idx[0], idx[t]));
            out.push(mm);
        }
    }
    out
}

#[test]
fn matching_sum_against_enumeration() {
    let r = Ring::rational(7);
    let m = rat(5, 3);
    let mut b = Builder::new(&r, &m).unwrap();
    for mask in 0u32..(1 << 6) {
        let idx: Vec<usize> = (0..6).filter(|s| mask & (1 << s) != 0).map(|s| s + 2).collect();
        let mut expected = CoeffPoly::zero(&r);
        if idx.len().is_multiple_of(2) {
            for mm in matchings(&idx) {
                let mut p = CoeffPoly::one(&r);
                for (k, l) in mm {
                    p = &p * &b.u(k, l);
                }
                expected = &expected + &p;
            }
        }
        assert_eq!(b.x_matching(IndexSet::from_indices(idx.clone())).unwrap(), expected, "{idx:?}");
    }
}

#[test]
fn theta_derivative_relation_is_syntactic() {
    for n in 2..=4 {
        let r = Ring::new(n, rat(2, 3), rat(1, 7));
        let m = rat(-5, 2);
        let mut b = Builder::new(&r, &m).unwrap();
        let theta = b.theta(IndexSet::full(n)).unwrap();
        let mut sum = DiffOp::zero(&r);
        for k in 2..=n {
            let c = b.theta(IndexSet::full(n).without(k)).unwrap().ad_function(&b.u(1, k));
            assert_eq!(theta.diff_coeffs(k), c, "n={n}, k={k}");
            sum = &sum + &c;
        }
        assert_eq!(theta.diff_coeffs(1), -&sum);
    }
}

#[test]
fn non_deformed_reduction() {
    for n in 3..=4 {
        for kind in BackendKind::ALL {
            let cfg = VerifyConfig::new(kind).with_m(vec![int(1)]).with_trials(3);
            let r = cmq::verify::identities::check_identity("integral", n, &cfg).unwrap();
            assert!(r.passed(), "{r}");
        }
    }
}

#[test]
fn backends_satisfy_curve_and_addition_laws() {
    for kind in BackendKind::ALL {
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = Backend::sample(kind, &mut rng).unwrap();
            let a = b.sample_assignment(5, &mut rng).unwrap();
            assert!(a.curve_relation_holds(), "{kind}");
            assert!(a.addition_theorem_holds(), "{kind}");
        }
    }
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    for kind in BackendKind::ALL {
        let cfg = VerifyConfig::new(kind).with_trials(2).with_seed(77);
        let a = cmq::verify::identities::check_identity("integral", 3, &cfg).unwrap();
        let b = cmq::verify::identities::check_identity("integral", 3, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
