//! Plain-text training records, one per line:
//!
//! ```text
//! stage=1 view=fou iteration=3 hta=4.1e-1 theta=0.1,0.2
//! stage=2 iteration=1 hta=5.0e-1 eta=0.25,0.75
//! ```
//!
//! Fields are space separated `key=value` pairs. `theta` lists the betas
//! then the gammas. Blank lines and lines starting with `#` are skipped.

use std::fmt;

use super::{Stage1View, Stage2Result};
use crate::error::{Error, Result};
use crate::qsim::AnsatzParams;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointRecord {
    pub stage: u8,
    pub view: Option<String>,
    pub iteration: usize,
    pub hta: f64,
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for CheckpointRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage={}", self.stage)?;
        if let Some(v) = &self.view {
            write!(f, " view={v}")?;
        }
        write!(f, " iteration={} hta={:e}", self.iteration, self.hta)?;
        if !self.theta.is_empty() {
            write!(f, " theta={}", join(&self.theta))?;
        }
        if !self.eta.is_empty() {
            write!(f, " eta={}", join(&self.eta))?;
        }
        Ok(())
    }
}

impl CheckpointRecord {
    /// One record per Stage-1 iteration (parameters at its start), plus a
    /// final record with the returned parameters.
    pub fn from_stage1(view: &str, result: &Stage1View) -> Vec<Self> {
        let mut out: Vec<Self> = result
            .trace
            .iter()
            .zip(&result.param_trace)
            .enumerate()
            .map(|(t, (&hta, theta))| Self {
                stage: 1,
                view: Some(view.to_string()),
                iteration: t + 1,
                hta,
                theta: theta.clone(),
                eta: Vec::new(),
            })
            .collect();
        out.push(Self {
            stage: 1,
            view: Some(view.to_string()),
            iteration: result.trace.len() + 1,
            hta: result.final_hta,
            theta: result.params.to_vec(),
            eta: Vec::new(),
        });
        out
    }

    /// A record per Stage-2 trace entry (HTA only) and a final one with `η*`.
    pub fn from_stage2(result: &Stage2Result) -> Vec<Self> {
        let mut out: Vec<Self> = result
            .trace
            .iter()
            .enumerate()
            .map(|(t, &hta)| Self {
                stage: 2,
                view: None,
                iteration: t + 1,
                hta,
                theta: Vec::new(),
                eta: Vec::new(),
            })
            .collect();
        out.push(Self {
            stage: 2,
            view: None,
            iteration: result.trace.len() + 1,
            hta: result.final_hta,
            theta: Vec::new(),
            eta: result.eta().to_vec(),
        });
        out
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {v:?}: {e}")))
        })
        .collect()
}

/// Parses every record in `text`.
pub fn parse_checkpoint(text: &str) -> Result<Vec<CheckpointRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut stage = None;
        let mut view = None;
        let mut iteration = None;
        let mut hta = None;
        let mut theta = Vec::new();
        let mut eta = Vec::new();
        for field in line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: field {field:?} lacks '='", lineno + 1)))?;
            let bad = |e: &dyn fmt::Display| Error::Parse(format!("line {}: {key}: {e}", lineno + 1));
            match key {
                "stage" => stage = Some(value.parse::<u8>().map_err(|e| bad(&e))?),
                "view" => view = Some(value.to_string()),
                "iteration" => iteration = Some(value.parse::<usize>().map_err(|e| bad(&e))?),
                "hta" => hta = Some(value.parse::<f64>().map_err(|e| bad(&e))?),
                "theta" => theta = parse_list(value)?,
                "eta" => eta = parse_list(value)?,
                _ => return Err(bad(&"unknown key")),
            }
        }
        let missing = |k: &str| Error::Parse(format!("line {}: missing {k}", lineno + 1));
        out.push(CheckpointRecord {
            stage: stage.ok_or_else(|| missing("stage"))?,
            view,
            iteration: iteration.ok_or_else(|| missing("iteration"))?,
            hta: hta.ok_or_else(|| missing("hta"))?,
            theta,
            eta,
        });
    }
    Ok(out)
}

/// Parameters from the last Stage-1 record of `view`, if any.
pub fn resume_params(records: &[CheckpointRecord], view: &str) -> Result<Option<AnsatzParams>> {
    records
        .iter()
        .rev()
        .find(|r| r.stage == 1 && r.view.as_deref() == Some(view) && !r.theta.is_empty())
        .map(|r| AnsatzParams::from_slice(&r.theta))
        .transpose()
}
