use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::curve::CurveContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// First nonzero coefficient found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub m: String,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveContext>,
    pub location: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub identity: String,
    pub n: usize,
    pub m_values: Vec<String>,
    pub backend: String,
    pub trials: usize,
    pub seed: u64,
    pub status: Status,
    pub evaluations: usize,
    pub nonzero: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} n={} backend={} m=[{}] trials={} evaluations={}",
            self.status,
            self.identity,
            self.n,
            self.backend,
            self.m_values.join(","),
            self.trials,
            self.evaluations
        )?;
        if let Some(w) = &self.witness {
            write!(f, " witness: {} = {} at m={}", w.location, w.value, w.m)?;
        }
        Ok(())
    }
}
