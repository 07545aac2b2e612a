//! Solver configuration with paper-default parameters, loadable from TOML.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMetric {
    /// `m` in the gate's density test is the instance's edge count.
    Edges,
    /// `m` is `|UD|`.
    UdCount,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultiLpConfig {
    pub enabled: bool,
    /// Gap threshold in `sol + r > q − gap`.
    pub gap: f64,
    /// Minimum committed-vertex count `r` before tightening is considered.
    pub min_r: usize,
    pub density_metric: DensityMetric,
}

impl Default for MultiLpConfig {
    fn default() -> Self {
        MultiLpConfig {
            enabled: true,
            gap: 1.1,
            min_r: 8,
            density_metric: DensityMetric::Edges,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RulesConfig {
    /// Bit `i − 1` enables rule `i`; all nine are on by default.
    pub enabled_mask: u16,
}

impl Default for RulesConfig {
    fn default() -> Self {
        RulesConfig { enabled_mask: 0b1_1111_1111 }
    }
}

impl RulesConfig {
    pub fn rule_enabled(&self, rule: u8) -> bool {
        debug_assert!((1..=9).contains(&rule));
        self.enabled_mask & (1 << (rule - 1)) != 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchStrategy {
    /// The lexicographic degree-priority selection.
    Ldpb,
    /// Smallest-id maximum-degree node; trivial baseline.
    Maxdeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BranchingConfig {
    pub strategy: BranchStrategy,
}

impl Default for BranchingConfig {
    fn default() -> Self {
        BranchingConfig { strategy: BranchStrategy::Ldpb }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub seed: u64,
    pub time_limit_seconds: Option<f64>,
    pub multilp: MultiLpConfig,
    pub rules: RulesConfig,
    pub branching: BranchingConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            time_limit_seconds: None,
            multilp: MultiLpConfig::default(),
            rules: RulesConfig::default(),
            branching: BranchingConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_paper_parameters() {
        let cfg = Config::default();
        assert!(cfg.multilp.enabled);
        assert!((cfg.multilp.gap - 1.1).abs() < 1e-12);
        assert_eq!(cfg.multilp.min_r, 8);
        assert_eq!(cfg.rules.enabled_mask, 511);
        assert_eq!(cfg.branching.strategy, BranchStrategy::Ldpb);
    }

    #[test]
    fn partial_toml_overrides() {
        let cfg = Config::from_toml("seed = 7\n[multilp]\nenabled = false\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(!cfg.multilp.enabled);
        assert_eq!(cfg.multilp.min_r, 8);
    }

    #[test]
    fn rule_mask_lookup() {
        let rules = RulesConfig { enabled_mask: 0b0_0000_0101 };
        assert!(rules.rule_enabled(1));
        assert!(!rules.rule_enabled(2));
        assert!(rules.rule_enabled(3));
        assert!(!rules.rule_enabled(9));
    }
}
