//! Strict JSON scenario files.
//!
//! Unknown keys are rejected so a typo in a physics knob fails loudly
//! instead of silently running the defaults.

use crate::advantage::{AdvantageScenario, AttemptRate, ModeRule};
use crate::distinguishability::DecayModel;
use crate::interference::LogBase;
use crate::permanent::CostModel;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// On-disk scenario document: every [`AdvantageScenario`] knob plus the
/// photon-number range and the source models used by the distance curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    pub error_tolerance: f64,
    pub runtime_budget_s: f64,
    pub flops: f64,
    pub rep_rate_hz: f64,
    pub eta_dx: f64,
    pub eta_net: f64,
    pub eta_d: f64,
    pub visibility: f64,
    pub mode_rule: ModeRule,
    pub cost_model: CostModel,
    pub log_base: LogBase,
    pub attempt_rate: AttemptRate,
    pub n_min: usize,
    pub n_max: usize,
    /// Sources compared by the distance/separation curves; empty means a
    /// single uniform source at `visibility`.
    pub sources: Vec<DecayModel>,
    /// Seed for sampled diagnostics; recorded in outputs for provenance.
    pub seed: u64,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        let sc = AdvantageScenario::default();
        Self {
            error_tolerance: sc.error_tolerance,
            runtime_budget_s: sc.runtime_budget_s,
            flops: sc.flops,
            rep_rate_hz: sc.rep_rate_hz,
            eta_dx: sc.eta_dx,
            eta_net: sc.eta_net,
            eta_d: sc.eta_d,
            visibility: sc.visibility,
            mode_rule: sc.mode_rule,
            cost_model: sc.cost_model,
            log_base: sc.log_base,
            attempt_rate: sc.attempt_rate,
            n_min: 2,
            n_max: 120,
            sources: Vec::new(),
            seed: 0,
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario().validate()?;
        if self.n_min < 2 || self.n_max < self.n_min {
            return Err(Error::InvalidInput(format!(
                "photon range [{}, {}] must satisfy 2 <= n_min <= n_max",
                self.n_min, self.n_max
            )));
        }
        for s in &self.sources {
            s.validate()?;
        }
        Ok(())
    }

    pub fn scenario(&self) -> AdvantageScenario {
        AdvantageScenario {
            error_tolerance: self.error_tolerance,
            runtime_budget_s: self.runtime_budget_s,
            flops: self.flops,
            rep_rate_hz: self.rep_rate_hz,
            eta_dx: self.eta_dx,
            eta_net: self.eta_net,
            eta_d: self.eta_d,
            visibility: self.visibility,
            mode_rule: self.mode_rule,
            cost_model: self.cost_model,
            log_base: self.log_base,
            attempt_rate: self.attempt_rate,
        }
    }

    /// Source list with the single-uniform-source fallback applied.
    pub fn sources_or_default(&self) -> Vec<DecayModel> {
        if self.sources.is_empty() {
            vec![DecayModel::uniform(self.visibility)]
        } else {
            self.sources.clone()
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}
