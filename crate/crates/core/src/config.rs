//! Evaluation configuration.
//!
//! Every knob that influences a score or a verdict lives here so that a
//! report can embed the exact configuration it was produced under. All
//! fields have serde defaults; a configuration file may specify any
//! subset.

use serde::{Deserialize, Serialize};

use crate::oracle::OracleConfig;

/// Confidence-band cut points. A confidence `c` maps to `Top` when
/// `c >= top`, to `High` when `high <= c < top`, to `Medium` when
/// `medium <= c < high`, and to `Low` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandThresholds {
    pub top: f64,
    pub high: f64,
    pub medium: f64,
}

impl Default for BandThresholds {
    fn default() -> Self {
        Self {
            top: 0.99,
            high: 0.70,
            medium: 0.50,
        }
    }
}

impl BandThresholds {
    /// Cut points must be descending and inside [0, 1].
    pub fn validate(&self) -> Result<(), String> {
        let ordered = self.top >= self.high && self.high >= self.medium;
        let in_range = [self.top, self.high, self.medium]
            .iter()
            .all(|t| (0.0..=1.0).contains(t));
        if ordered && in_range {
            Ok(())
        } else {
            Err(format!(
                "band thresholds must satisfy 1 >= top >= high >= medium >= 0, got {}/{}/{}",
                self.top, self.high, self.medium
            ))
        }
    }
}

/// How proposition texts are matched against the input record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatcherMode {
    /// Lowercased, punctuation-stripped substring containment in the claim
    /// or in any evidence passage.
    #[default]
    NormalizedSubstring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MatcherConfig {
    pub mode: MatcherMode,
}

/// Full evaluation configuration; also serves as the provenance snapshot
/// embedded in metric reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub oracle: OracleConfig,
    /// Largest subset size enumerated by coherence scoring and checking
    /// once a document exceeds the full-enumeration limit.
    pub max_subset_size: usize,
    pub bands: BandThresholds,
    /// Base score assigned to an argument with no supporters or attackers.
    pub base_strength: f64,
    /// Arguments with strength at or below this value count as
    /// dialectically weak.
    pub weak_threshold: f64,
    pub matcher: MatcherConfig,
    /// Seed recorded in provenance and used by the generator.
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            oracle: OracleConfig::default(),
            max_subset_size: 3,
            bands: BandThresholds::default(),
            base_strength: 0.5,
            weak_threshold: 0.5,
            matcher: MatcherConfig::default(),
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.bands.validate()?;
        self.oracle.validate()?;
        if !(0.0..=1.0).contains(&self.base_strength) {
            return Err(format!("base_strength {} outside [0, 1]", self.base_strength));
        }
        if !(0.0..=1.0).contains(&self.weak_threshold) {
            return Err(format!("weak_threshold {} outside [0, 1]", self.weak_threshold));
        }
        if self.max_subset_size < 1 {
            return Err("max_subset_size must be at least 1".to_owned());
        }
        Ok(())
    }
}
