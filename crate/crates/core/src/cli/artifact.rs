//! The structured result document written by `qfactor factor`.
//!
//! Field names are fixed; unknown fields are rejected on load. The document
//! carries no timestamps, so re-running a recorded configuration reproduces
//! it byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::Model;
use crate::instances::Instance;
use crate::qaoa::{OptimizerConfig, RunRecord};
use crate::simulator::InitPattern;

pub const SCHEMA: &str = "qfactor.run/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceInfo {
    #[serde(rename = "N")]
    pub semiprime: u64,
    pub n: usize,
    pub n_p: usize,
    pub n_q: usize,
    pub solutions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub layers: usize,
    pub restarts: usize,
    pub seed: u64,
    pub init: InitPattern,
    pub omega: f64,
    pub tolerance: f64,
    pub evals_per_layer: usize,
    pub step: f64,
    pub adaptive: bool,
    pub reseed: bool,
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Population {
    pub bitstring: String,
    pub probability: f64,
    pub is_solution: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthEntry {
    pub l: usize,
    pub c_min: f64,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub fidelity: f64,
    pub confidence: f64,
    pub populations: Vec<Population>,
    pub others: f64,
    pub solution_rank: usize,
    pub converged: bool,
    pub evaluations: usize,
    pub ratio_prev: Option<f64>,
    pub ratio_first: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArtifact {
    pub schema: String,
    pub tool: ToolInfo,
    pub instance: InstanceInfo,
    pub config: RunConfig,
    pub n: usize,
    pub model: Model,
    pub depths: Vec<DepthEntry>,
}

impl RunArtifact {
    pub fn new(
        inst: &Instance,
        layers: usize,
        config: &OptimizerConfig,
        record: &RunRecord,
    ) -> Self {
        let depths = record
            .depths
            .iter()
            .map(|d| DepthEntry {
                l: d.l,
                c_min: d.c_min,
                gammas: d.gammas.clone(),
                betas: d.betas.clone(),
                fidelity: d.fidelity,
                confidence: d.confidence,
                populations: d
                    .populations
                    .entries
                    .iter()
                    .map(|e| Population {
                        bitstring: e.bitstring.clone(),
                        probability: e.probability,
                        is_solution: e.is_solution,
                    })
                    .collect(),
                others: d.populations.others,
                solution_rank: d.populations.solution_rank,
                converged: d.converged,
                evaluations: d.evaluations,
                ratio_prev: d.ratio_prev,
                ratio_first: d.ratio_first,
            })
            .collect();
        RunArtifact {
            schema: SCHEMA.to_string(),
            tool: ToolInfo {
                name: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            instance: InstanceInfo {
                semiprime: inst.semiprime(),
                n: inst.num_qubits(),
                n_p: inst.n_p(),
                n_q: inst.n_q(),
                solutions: inst
                    .solutions()
                    .iter()
                    .map(|&b| inst.bitstring(b))
                    .collect(),
            },
            config: RunConfig {
                model: record.model,
                layers,
                restarts: config.restarts,
                seed: config.seed,
                init: record.pattern,
                omega: config.mixer.omega(),
                tolerance: config.tolerance,
                evals_per_layer: config.evals_per_layer,
                step: config.step,
                adaptive: config.adaptive,
                reseed: config.reseed,
                top_k: config.top_k,
            },
            n: inst.num_qubits(),
            model: record.model,
            depths,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    /// Parses a document and checks it against the schema rules.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RunArtifact = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed result document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.schema != SCHEMA {
            return fail(format!("unknown schema {:?}", self.schema));
        }
        if self.n != self.instance.n || self.instance.n != self.instance.n_p + self.instance.n_q {
            return fail("qubit counts are inconsistent".into());
        }
        if self.model != self.config.model || self.depths.len() != self.config.layers {
            return fail("config does not match the recorded depths".into());
        }
        let mut prev = f64::INFINITY;
        for (k, d) in self.depths.iter().enumerate() {
            if d.l != k + 1 || d.gammas.len() != d.l || d.betas.len() != d.l {
                return fail(format!("depth entry {k} has inconsistent layer data"));
            }
            if d.c_min.is_nan() || d.c_min < 0.0 || d.c_min > prev {
                return fail(format!("c_min at l = {} is negative or increasing", d.l));
            }
            prev = d.c_min;
            if !(0.0..=1.0).contains(&d.confidence) || !(0.0..=1.0 + 1e-12).contains(&d.fidelity) {
                return fail(format!("metric out of range at l = {}", d.l));
            }
            let total: f64 = d.populations.iter().map(|p| p.probability).sum::<f64>() + d.others;
            if (total - 1.0).abs() > 1e-10 {
                return fail(format!("populations at l = {} sum to {total}", d.l));
            }
            if d.populations.iter().any(|p| p.bitstring.len() != self.n) {
                return fail(format!("bitstring width mismatch at l = {}", d.l));
            }
        }
        Ok(())
    }
}
