//! Integration strategy: weights, thresholds, xi modes, aliases and value
//! compatibility.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// The bundled default strategy.
pub const DEFAULT_STRATEGY_JSON: &str = include_str!("../data/default.strategy.json");

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("malformed strategy JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("weight of `{0}` must be a finite non-negative number")]
    NegativeWeight(String),
    #[error("weight of `{0}` exceeds 100 (percent scale)")]
    WeightOutOfRange(String),
    #[error("sum of weights must be positive")]
    ZeroWeightSum,
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("beta must lie in (0, 1), got {0}")]
    BetaOutOfRange(f64),
    #[error("alias `{0}` points at `{1}`, which is itself an alias")]
    AliasNotIdempotent(String, String),
    #[error("compatibility matrix for `{attribute}`: {reason}")]
    Compat { attribute: String, reason: String },
    #[error("value {0} cannot be represented in the chosen scalar type")]
    NotRepresentable(f64),
}

/// How values of an attribute are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiMode {
    Scalar,
    Set,
}

/// Allowed values of an attribute with a symmetric compatibility relation,
/// stored as the strict upper triangle of the value-by-value matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityMatrix {
    values: Vec<String>,
    index: HashMap<String, usize>,
    upper: Vec<bool>,
}

impl CompatibilityMatrix {
    pub fn new<I, T>(values: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(format!("value `{v}` listed twice"));
            }
        }
        let n = values.len();
        Ok(Self { values, index, upper: vec![false; n * n.saturating_sub(1) / 2] })
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn contains(&self, value: &str) -> bool {
        self.index.contains_key(value)
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let n = self.values.len();
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn lookup(&self, value: &str) -> Result<usize, String> {
        self.index.get(value).copied().ok_or_else(|| value.to_owned())
    }

    pub fn mark_compatible(&mut self, a: &str, b: &str) -> Result<(), String> {
        let (i, j) = (self.lookup(a)?, self.lookup(b)?);
        if i != j {
            let slot = self.slot(i, j);
            self.upper[slot] = true;
        }
        Ok(())
    }

    /// Whether two allowed values are compatible. Equal values always are.
    /// Errors with the offending value when one is not allowed.
    pub fn compatible(&self, a: &str, b: &str) -> Result<bool, String> {
        let (i, j) = (self.lookup(a)?, self.lookup(b)?);
        Ok(i == j || self.upper[self.slot(i, j)])
    }

    /// Compatible pairs in value order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let n = self.values.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.upper[self.slot(i, j)] {
                    out.push((self.values[i].clone(), self.values[j].clone()));
                }
            }
        }
        out
    }
}

/// Parameters governing unit equivalence.
#[derive(Debug, Clone)]
pub struct Strategy<S> {
    weights: BTreeMap<String, S>,
    alpha: S,
    beta: S,
    xi_mode: BTreeMap<String, XiMode>,
    aliases: BTreeMap<String, String>,
    compat: BTreeMap<String, CompatibilityMatrix>,
    weight_sum: S,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyConfig {
    weights: BTreeMap<String, f64>,
    alpha: f64,
    beta: f64,
    #[serde(default)]
    xi_mode: BTreeMap<String, XiMode>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
    #[serde(default)]
    compat: BTreeMap<String, CompatConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompatConfig {
    values: Vec<String>,
    #[serde(default)]
    pairs: Vec<(String, String)>,
}

impl<S: Scalar> Strategy<S> {
    /// Weights cname 50%, bname 35%, btype 15%, others 0; alpha 1; beta 0.5;
    /// btype compatibility: state-realisation with selection only.
    pub fn default_strategy() -> Self {
        Self::from_json(DEFAULT_STRATEGY_JSON).expect("bundled default strategy is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, StrategyError> {
        let config: StrategyConfig = serde_json::from_str(text)?;
        Self::from_config(config)
    }

    fn from_config(config: StrategyConfig) -> Result<Self, StrategyError> {
        let conv = |x: f64| S::from_config(x).ok_or(StrategyError::NotRepresentable(x));

        if !(0.0..=1.0).contains(&config.alpha) {
            return Err(StrategyError::AlphaOutOfRange(config.alpha));
        }
        if !(config.beta > 0.0 && config.beta < 1.0) {
            return Err(StrategyError::BetaOutOfRange(config.beta));
        }
        for (alias, target) in &config.aliases {
            if let Some(next) = config.aliases.get(target) {
                if next != target {
                    return Err(StrategyError::AliasNotIdempotent(alias.clone(), target.clone()));
                }
            }
        }
        let canonical = |name: &str| config.aliases.get(name).cloned().unwrap_or_else(|| name.to_owned());

        let mut percent = false;
        for (name, &w) in &config.weights {
            if !w.is_finite() || w < 0.0 {
                return Err(StrategyError::NegativeWeight(name.clone()));
            }
            if w > 100.0 {
                return Err(StrategyError::WeightOutOfRange(name.clone()));
            }
            percent |= w > 1.0;
        }
        let hundred = S::from_fraction(100, 1);
        let mut weights = BTreeMap::new();
        let mut weight_sum = S::zero();
        for (name, &w) in &config.weights {
            let mut w = conv(w)?;
            if percent {
                w = w / hundred.clone();
            }
            weight_sum = weight_sum + w.clone();
            let entry = weights.entry(canonical(name)).or_insert_with(S::zero);
            *entry = entry.clone() + w;
        }
        if weight_sum <= S::zero() {
            return Err(StrategyError::ZeroWeightSum);
        }

        let xi_mode = config.xi_mode.iter().map(|(k, v)| (canonical(k), *v)).collect();

        let mut compat = BTreeMap::new();
        for (attr, cc) in config.compat {
            let bad = |reason: String| StrategyError::Compat { attribute: attr.clone(), reason };
            let mut m = CompatibilityMatrix::new(cc.values).map_err(bad)?;
            for (a, b) in &cc.pairs {
                m.mark_compatible(a, b)
                    .map_err(|v| bad(format!("pair mentions `{v}`, which is not an allowed value")))?;
            }
            compat.insert(canonical(&attr), m);
        }

        Ok(Self {
            weights,
            alpha: conv(config.alpha)?,
            beta: conv(config.beta)?,
            xi_mode,
            aliases: config.aliases,
            compat,
            weight_sum,
        })
    }

    /// The effective strategy as JSON, weights on the fraction scale.
    pub fn to_json(&self) -> String {
        let config = StrategyConfig {
            weights: self.weights.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            xi_mode: self.xi_mode.clone(),
            aliases: self.aliases.clone(),
            compat: self
                .compat
                .iter()
                .map(|(k, m)| (k.clone(), CompatConfig { values: m.values().to_vec(), pairs: m.pairs() }))
                .collect(),
        };
        let value = serde_json::to_value(config).expect("strategy is serializable");
        serde_json::to_string_pretty(&value).expect("value is serializable")
    }

    /// A copy with a different equivalence threshold.
    pub fn with_alpha(&self, alpha: S) -> Result<Self, StrategyError> {
        let a = alpha.to_f64();
        if alpha < S::zero() || alpha > S::one() {
            return Err(StrategyError::AlphaOutOfRange(a));
        }
        Ok(Self { alpha, ..self.clone() })
    }

    /// A copy with every weight multiplied by `factor` (must be positive).
    pub fn scaled_weights(&self, factor: S) -> Self {
        let weights: BTreeMap<_, _> =
            self.weights.iter().map(|(k, w)| (k.clone(), w.clone() * factor.clone())).collect();
        let weight_sum = self.weight_sum.clone() * factor;
        Self { weights, weight_sum, ..self.clone() }
    }

    /// A copy with one weight replaced.
    pub fn with_weight(&self, name: &str, weight: S) -> Result<Self, StrategyError> {
        let mut weights = self.weights.clone();
        weights.insert(self.canonical_name(name).to_owned(), weight);
        let weight_sum = weights.values().fold(S::zero(), |acc, w| acc + w.clone());
        if weight_sum <= S::zero() {
            return Err(StrategyError::ZeroWeightSum);
        }
        Ok(Self { weights, weight_sum, ..self.clone() })
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    pub fn weights(&self) -> &BTreeMap<String, S> {
        &self.weights
    }

    pub fn weight_sum(&self) -> &S {
        &self.weight_sum
    }

    pub fn weight(&self, name: &str) -> S {
        self.weights.get(self.canonical_name(name)).cloned().unwrap_or_else(S::zero)
    }

    pub fn xi_mode(&self, name: &str) -> Option<XiMode> {
        self.xi_mode.get(self.canonical_name(name)).copied()
    }

    pub fn compat(&self, name: &str) -> Option<&CompatibilityMatrix> {
        self.compat.get(self.canonical_name(name))
    }

    /// Canonical attribute name after alias mapping.
    pub fn canonical_name<'a>(&'a self, name: &'a str) -> &'a str {
        self.aliases.get(name).map(String::as_str).unwrap_or(name)
    }
}
