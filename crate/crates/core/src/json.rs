//! Canonical JSON form of an operator.
//!
//! ```json
//! {"n":2,"m":"1/2","terms":[{"d":[0,0],"coeff":[{"c":"3/2","mon":[{"pair":[1,2],"kind":"P","exp":1}]}]}]}
//! ```
//!
//! Terms are ordered by multi-index and monomials by generator, so equal
//! operators always produce identical bytes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{DiffOp, MultiIndex};
use crate::ring::{fmt_rational, parse_rational, CoeffPoly, GenKind, Monomial, PairGen, Rational, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub n: usize,
    pub m: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub d: Vec<u8>,
    pub coeff: Vec<CoeffDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffDoc {
    pub c: String,
    pub mon: Vec<FactorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub pair: [u8; 2],
    pub kind: GenKind,
    pub exp: u32,
}

impl OperatorDoc {
    pub fn from_op(op: &DiffOp, m: &Rational) -> Self {
        let terms = op
            .terms()
            .map(|(alpha, c)| TermDoc {
                d: alpha.as_slice().to_vec(),
                coeff: c
                    .sorted_terms()
                    .into_iter()
                    .map(|(mono, v)| CoeffDoc {
                        c: fmt_rational(v),
                        mon: mono
                            .factors()
                            .iter()
                            .map(|(g, e)| FactorDoc { pair: [g.i, g.j], kind: g.kind, exp: *e })
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        OperatorDoc { n: op.n(), m: fmt_rational(m), terms }
    }

    /// Rebuilds the operator on `ring`, which must have the document's `n`.
    pub fn to_op(&self, ring: &Arc<Ring>) -> Result<(DiffOp, Rational)> {
        if ring.n != self.n {
            return Err(Error::Json(format!("document has n = {}, ring has n = {}", self.n, ring.n)));
        }
        let m = parse_rational(&self.m)?;
        let mut op = DiffOp::zero(ring);
        for t in &self.terms {
            if t.d.len() != self.n {
                return Err(Error::Json(format!("multi-index {:?} has the wrong length", t.d)));
            }
            let mut c = CoeffPoly::zero(ring);
            for cd in &t.coeff {
                let mut factors = Vec::with_capacity(cd.mon.len());
                for f in &cd.mon {
                    let (i, j) = (f.pair[0] as usize, f.pair[1] as usize);
                    if j > self.n {
                        return Err(Error::Json(format!("pair ({i},{j}) out of range")));
                    }
                    factors.push((PairGen::new(i, j, f.kind)?, f.exp));
                }
                let mono = Monomial::from_factors(factors);
                c.add_scaled(&CoeffPoly::term(ring, mono, parse_rational(&cd.c)?), &Rational::from_integer(1.into()));
            }
            op.add_term(MultiIndex::from_slice(&t.d), &c);
        }
        Ok((op, m))
    }
}

pub fn to_json(op: &DiffOp, m: &Rational) -> String {
    serde_json::to_string(&OperatorDoc::from_op(op, m)).expect("operator serializes")
}

pub fn to_json_pretty(op: &DiffOp, m: &Rational) -> String {
    serde_json::to_string_pretty(&OperatorDoc::from_op(op, m)).expect("operator serializes")
}

pub fn from_json(text: &str, ring: &Arc<Ring>) -> Result<(DiffOp, Rational)> {
    let doc: OperatorDoc = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    doc.to_op(ring)
}
