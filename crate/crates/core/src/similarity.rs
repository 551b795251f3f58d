//! Attribute and unit similarity, and the equivalence predicate.
//!
//! Attribute similarity is nonzero only for attributes with the same
//! (alias-mapped) name; values are then compared by one of the xi functions:
//!
//! * scalar: 1 when equal, beta when the compatibility matrix marks the two
//!   values compatible, 0 otherwise;
//! * set: 1 when one set contains the other, the Jaccard ratio when they
//!   overlap, beta when every cross pair is compatible, 0 otherwise.
//!
//! Unit similarity is the weight-normalized average of attribute
//! similarities; two units are equivalent when it reaches alpha.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Attribute, AttributeValue, BehavioralUnit, BNAME, CNAME, KNOWN_ATTRIBUTES};
use crate::scalar::Scalar;
use crate::strategy::{CompatibilityMatrix, Strategy, XiMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("value `{value}` of attribute `{attribute}` is not in its allowed value set")]
    ValueNotAllowed { attribute: String, value: String },
    #[error("attribute `{0}` has a nonzero weight but is unknown and absent from both units")]
    UnknownAttribute(String),
    #[error("sum of weights is zero")]
    ZeroWeightSum,
}

fn not_allowed(value: String) -> SimilarityError {
    SimilarityError::ValueNotAllowed { attribute: String::new(), value }
}

fn with_attribute(e: SimilarityError, name: &str) -> SimilarityError {
    match e {
        SimilarityError::ValueNotAllowed { value, .. } => {
            SimilarityError::ValueNotAllowed { attribute: name.to_owned(), value }
        }
        other => other,
    }
}

/// Scalar xi: 1 on equality, beta on compatibility, else 0.
pub fn xi_scalar<S: Scalar>(
    v1: &str,
    v2: &str,
    beta: &S,
    matrix: Option<&CompatibilityMatrix>,
) -> Result<S, SimilarityError> {
    if v1 == v2 {
        return Ok(S::one());
    }
    match matrix {
        Some(m) if m.compatible(v1, v2).map_err(not_allowed)? => Ok(beta.clone()),
        _ => Ok(S::zero()),
    }
}

/// Set xi, branches evaluated in order: containment, overlap ratio,
/// all-pairs compatibility, 0.
pub fn xi_set<S: Scalar, T: AsRef<str> + Ord>(
    s1: &BTreeSet<T>,
    s2: &BTreeSet<T>,
    beta: &S,
    matrix: Option<&CompatibilityMatrix>,
) -> Result<S, SimilarityError> {
    if s1.is_subset(s2) || s1.is_superset(s2) {
        return Ok(S::one());
    }
    let common = s1.intersection(s2).count();
    if common > 0 {
        let union = s1.len() + s2.len() - common;
        return Ok(S::from_fraction(common as u64, union as u64));
    }
    let Some(m) = matrix else {
        return Ok(S::zero());
    };
    for a in s1 {
        for b in s2 {
            if !m.compatible(a.as_ref(), b.as_ref()).map_err(not_allowed)? {
                return Ok(S::zero());
            }
        }
    }
    Ok(beta.clone())
}

/// A value after name-specific normalization: trimmed tokens, and
/// case-folded for component and behavior names.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NormValue {
    scalar: bool,
    tokens: BTreeSet<String>,
}

fn normalize(name: &str, value: &AttributeValue) -> NormValue {
    let fold = name == CNAME || name == BNAME;
    let norm = |t: &str| if fold { t.trim().to_lowercase() } else { t.trim().to_owned() };
    match value {
        AttributeValue::Scalar(s) => NormValue { scalar: true, tokens: std::iter::once(norm(s)).collect() },
        AttributeValue::Set(set) => NormValue { scalar: false, tokens: set.iter().map(|t| norm(t)).collect() },
    }
}

fn compare<S: Scalar>(
    mode: Option<XiMode>,
    v1: &NormValue,
    v2: &NormValue,
    strategy: &Strategy<S>,
    name: &str,
) -> Result<S, SimilarityError> {
    let mode = mode.unwrap_or(if v1.scalar && v2.scalar { XiMode::Scalar } else { XiMode::Set });
    let matrix = strategy.compat(name);
    let (t1, t2) = (&v1.tokens, &v2.tokens);
    let result = match mode {
        XiMode::Set => xi_set(t1, t2, strategy.beta(), matrix),
        XiMode::Scalar => match (single(t1), single(t2)) {
            (Some(a), Some(b)) => xi_scalar(a, b, strategy.beta(), matrix),
            // Multi-token or empty values under scalar mode: equality only.
            _ => Ok(if t1 == t2 { S::one() } else { S::zero() }),
        },
    };
    result.map_err(|e| with_attribute(e, name))
}

fn single(tokens: &BTreeSet<String>) -> Option<&str> {
    if tokens.len() == 1 {
        tokens.iter().next().map(String::as_str)
    } else {
        None
    }
}

/// Similarity of two attributes: 0 unless their names agree after alias
/// mapping, otherwise the configured xi of their values.
pub fn attribute_similarity<S: Scalar>(
    a1: &Attribute,
    a2: &Attribute,
    strategy: &Strategy<S>,
) -> Result<S, SimilarityError> {
    let name = strategy.canonical_name(&a1.name);
    if name != strategy.canonical_name(&a2.name) {
        return Ok(S::zero());
    }
    compare(
        strategy.xi_mode(name),
        &normalize(name, &a1.value),
        &normalize(name, &a2.value),
        strategy,
        name,
    )
}

/// A unit reduced to the normalized values of the strategy's weighted
/// attributes, so repeated comparisons skip the string work.
#[derive(Debug, Clone)]
pub(crate) struct PreparedUnit {
    values: Vec<NormValue>,
}

fn find_attribute<'u, S: Scalar>(
    unit: &'u BehavioralUnit,
    canonical: &str,
    strategy: &Strategy<S>,
) -> Option<&'u AttributeValue> {
    unit.get(canonical).or_else(|| {
        unit.attributes()
            .find(|(n, _)| strategy.canonical_name(n) == canonical)
            .map(|(_, v)| v)
    })
}

fn weighted<S: Scalar>(strategy: &Strategy<S>) -> impl Iterator<Item = (&String, &S)> {
    strategy.weights().iter().filter(|(_, w)| **w != S::zero())
}

impl PreparedUnit {
    pub(crate) fn new<S: Scalar>(unit: &BehavioralUnit, strategy: &Strategy<S>) -> Self {
        let empty = AttributeValue::empty();
        let values = weighted(strategy)
            .map(|(name, _)| normalize(name, find_attribute(unit, name, strategy).unwrap_or(&empty)))
            .collect();
        Self { values }
    }
}

fn check_known<S: Scalar>(
    w1: &BehavioralUnit,
    w2: &BehavioralUnit,
    strategy: &Strategy<S>,
) -> Result<(), SimilarityError> {
    for (name, _) in weighted(strategy) {
        if !KNOWN_ATTRIBUTES.contains(&name.as_str())
            && find_attribute(w1, name, strategy).is_none()
            && find_attribute(w2, name, strategy).is_none()
        {
            return Err(SimilarityError::UnknownAttribute(name.clone()));
        }
    }
    Ok(())
}

pub(crate) fn prepared_similarity<S: Scalar>(
    p1: &PreparedUnit,
    p2: &PreparedUnit,
    strategy: &Strategy<S>,
) -> Result<S, SimilarityError> {
    if *strategy.weight_sum() == S::zero() {
        return Err(SimilarityError::ZeroWeightSum);
    }
    let mut total = S::zero();
    for (((name, weight), v1), v2) in weighted(strategy).zip(&p1.values).zip(&p2.values) {
        let sim = compare(strategy.xi_mode(name), v1, v2, strategy, name)?;
        total = total + sim * weight.clone();
    }
    Ok(total / strategy.weight_sum().clone())
}

/// Weighted similarity of two units, attributes paired by canonical name.
/// A missing attribute counts as the empty set.
pub fn unit_similarity<S: Scalar>(
    w1: &BehavioralUnit,
    w2: &BehavioralUnit,
    strategy: &Strategy<S>,
) -> Result<S, SimilarityError> {
    check_known(w1, w2, strategy)?;
    prepared_similarity(&PreparedUnit::new(w1, strategy), &PreparedUnit::new(w2, strategy), strategy)
}

/// Whether `unit_similarity(w1, w2) >= alpha`.
pub fn equivalent<S: Scalar>(
    w1: &BehavioralUnit,
    w2: &BehavioralUnit,
    strategy: &Strategy<S>,
) -> Result<bool, SimilarityError> {
    Ok(unit_similarity(w1, w2, strategy)? >= *strategy.alpha())
}

/// True when some component or behavior name of the two units matches only
/// after case folding.
pub fn case_folded_match(w1: &BehavioralUnit, w2: &BehavioralUnit) -> bool {
    [CNAME, BNAME].iter().any(|name| match (w1.scalar(name), w2.scalar(name)) {
        (Some(a), Some(b)) => a.trim() != b.trim() && a.trim().to_lowercase() == b.trim().to_lowercase(),
        _ => false,
    })
}

pub(crate) fn check_units<S: Scalar>(
    units: &[&BehavioralUnit],
    strategy: &Strategy<S>,
) -> Result<(), SimilarityError> {
    for (name, _) in weighted(strategy) {
        if !KNOWN_ATTRIBUTES.contains(&name.as_str())
            && !units.iter().any(|u| find_attribute(u, name, strategy).is_some())
        {
            return Err(SimilarityError::UnknownAttribute(name.clone()));
        }
    }
    Ok(())
}
