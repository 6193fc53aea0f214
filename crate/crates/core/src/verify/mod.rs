//! Exact randomized zero testing of operator identities.
//!
//! Every coefficient of an operator is a function of the positions. An
//! identity is accepted when all coefficients evaluate to exactly zero at
//! every sampled point for every sampled `m`; a single nonzero value is a
//! certificate of failure.

pub mod backend;
pub mod curve;
pub mod identities;
pub mod lemma3;
pub mod report;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use backend::{Assignment, Backend, BackendKind, PointData};
pub use curve::{CurveContext, Point};
pub use report::{Report, Status, Witness};

use crate::error::{Error, Result};
use crate::opalg::DiffOp;
use crate::ring::{fmt_rational, rat, Rational, Ring};

/// Labelled operators that must all vanish.
pub type Target = Vec<(String, DiffOp)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub backend: BackendKind,
    pub m_values: Vec<Rational>,
    pub trials: usize,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(backend: BackendKind) -> Self {
        VerifyConfig { backend, m_values: default_m_values(), trials: 5, seed: 1 }
    }

    pub fn with_m(mut self, m: Vec<Rational>) -> Self {
        self.m_values = m;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub fn default_m_values() -> Vec<Rational> {
    vec![rat(2, 1), rat(3, 2), rat(-2, 5)]
}

struct Outcome {
    evaluations: usize,
    nonzero: usize,
    witness: Option<Witness>,
}

/// Independent stream per `m` sample so results do not depend on scheduling.
fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn run_one<F>(n: usize, cfg: &VerifyConfig, index: usize, m: &Rational, build: &F) -> Result<Outcome>
where
    F: Fn(&Arc<Ring>, &Rational) -> Result<Target> + Sync,
{
    let mut rng = rng_for(cfg.seed, index);
    let backend = Backend::sample(cfg.backend, &mut rng)?;
    let ring = backend.ring(n);
    let target = build(&ring, m)?;
    let mut out = Outcome { evaluations: 0, nonzero: 0, witness: None };
    for _ in 0..cfg.trials {
        let a = backend.sample_assignment(n, &mut rng)?;
        for (label, op) in &target {
            for (alpha, c) in op.terms() {
                let v = c.eval_with(|g| a.value(g))?;
                out.evaluations += 1;
                if v != Rational::from_integer(0.into()) {
                    out.nonzero += 1;
                    if out.witness.is_none() {
                        out.witness = Some(Witness {
                            m: fmt_rational(m),
                            params: a.data().describe(),
                            curve: backend.curve.clone(),
                            location: format!("{label} coefficient of {alpha}"),
                            value: fmt_rational(&v),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates every coefficient of the built operators at `trials` points per `m`.
pub fn verify_zero<F>(identity: &str, n: usize, cfg: &VerifyConfig, build: F) -> Result<Report>
where
    F: Fn(&Arc<Ring>, &Rational) -> Result<Target> + Sync,
{
    if cfg.m_values.is_empty() || cfg.trials == 0 {
        return Err(Error::Unsupported("need at least one m value and one trial".into()));
    }
    let outcomes: Vec<Result<Outcome>> = cfg
        .m_values
        .par_iter()
        .enumerate()
        .map(|(i, m)| run_one(n, cfg, i, m, &build))
        .collect();
    let mut evaluations = 0;
    let mut nonzero = 0;
    let mut witness = None;
    for o in outcomes {
        let o = o?;
        evaluations += o.evaluations;
        nonzero += o.nonzero;
        if witness.is_none() {
            witness = o.witness;
        }
    }
    Ok(Report {
        identity: identity.to_string(),
        n,
        m_values: cfg.m_values.iter().map(fmt_rational).collect(),
        backend: cfg.backend.to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        status: if nonzero == 0 { Status::Pass } else { Status::Fail },
        evaluations,
        nonzero,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{CoeffPoly, PairGen};

    #[test]
    fn zero_operator_passes() {
        let cfg = VerifyConfig::new(BackendKind::Rational).with_trials(2);
        let r = verify_zero("zero", 3, &cfg, |ring, _| Ok(vec![("T".into(), DiffOp::zero(ring))])).unwrap();
        assert!(r.passed());
        assert_eq!(r.nonzero, 0);
    }

    #[test]
    fn nonzero_function_fails_with_witness() {
        for kind in BackendKind::ALL {
            let cfg = VerifyConfig::new(kind).with_trials(1);
            let r = verify_zero("wp", 3, &cfg, |ring, _| {
                Ok(vec![("P".into(), DiffOp::multiplication(CoeffPoly::gen(ring, PairGen::p(1, 2))))])
            })
            .unwrap();
            assert!(!r.passed());
            assert!(r.witness.is_some());
        }
    }

    #[test]
    fn zeta_on_trig_is_an_error() {
        let cfg = VerifyConfig::new(BackendKind::Trig).with_trials(1);
        let r = verify_zero("z", 2, &cfg, |ring, _| {
            Ok(vec![("Z".into(), DiffOp::multiplication(CoeffPoly::gen(ring, PairGen::z(1, 2))))])
        });
        assert!(matches!(r, Err(Error::ZetaNotEvaluable(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = VerifyConfig::new(BackendKind::Elliptic).with_trials(2).with_seed(9);
        let build = |ring: &Arc<Ring>, _: &Rational| {
            Ok(vec![("P".into(), DiffOp::multiplication(CoeffPoly::gen(ring, PairGen::p(1, 3))))])
        };
        let a = verify_zero("wp", 3, &cfg, build).unwrap();
        let b = verify_zero("wp", 3, &cfg, build).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
