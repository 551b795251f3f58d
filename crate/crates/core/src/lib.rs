//! Requirements-defect analysis over Behavior Tree models.
//!
//! Requirement Behavior Trees are parsed from the `.bts` text format into
//! [`ModelSet`]s. Under a configurable [`Strategy`] the relation detector
//! finds units that are equivalent across models and classifies them into
//! integration relations; the defect mapper turns those relations, plus the
//! analyst's accept/reject [`Decision`]s, into incomplete, ambiguous,
//! incorrect and redundant defects.
//!
//! The numeric parts are generic over [`Scalar`]; the aliases below pin the
//! two instantiations used in practice.

pub mod bts;
pub mod decisions;
pub mod defects;
pub mod json;
pub mod model;
pub mod relations;
pub mod scalar;
pub mod similarity;
pub mod strategy;

pub use decisions::{Decision, DecisionSet, PairVerdict, Verdict};
pub use defects::{
    defect_report, detect_ambiguous, detect_incomplete, detect_incorrect, detect_redundant,
    Confirmation, Defect, DefectReport, DefectType,
};
pub use model::{
    build_model, downward_paths, position_of, Attribute, AttributeValue, BehavioralModel,
    BehavioralUnit, Edge, EdgeKind, ModelError, ModelId, ModelSet, Position, SourceSpan, UnitId,
};
pub use relations::{
    classify_primary, multi_preconditions, non_root_relations, primary_relations, relation_graph,
    sub_path_relations, NonRootPair, PrimaryPair, RelationCandidate, RelationError, RelationGraph,
    RelationKind, SubPathMatch,
};
pub use scalar::Scalar;
pub use similarity::{
    attribute_similarity, equivalent, unit_similarity, xi_scalar, xi_set, SimilarityError,
};
pub use strategy::{CompatibilityMatrix, Strategy, StrategyError, XiMode};

/// Exact rational scalar used by the CLI and the review service.
pub type Rational = num_rational::Ratio<i64>;

pub type ExactStrategy = Strategy<Rational>;
pub type FloatStrategy = Strategy<f64>;
pub type ExactRelationGraph = RelationGraph<Rational>;
pub type FloatRelationGraph = RelationGraph<f64>;
