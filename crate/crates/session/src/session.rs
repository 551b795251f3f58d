use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use btlint_core::bts::{parse_bts_named, ParseError};
use btlint_core::decisions::{emit_decision_log, parse_decision_log};
use btlint_core::json::{emit_json, parse_json, SchemaError};
use btlint_core::{
    defect_report, relation_graph, Decision, DecisionSet, DefectReport, ExactRelationGraph, ExactStrategy,
    ModelError, ModelSet, RelationError, StrategyError,
};
use chrono::Utc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{}: file not found", .0.display())]
    FileNotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{}: invalid model JSON: {source}", path.display())]
    ModelSchema { path: PathBuf, source: SchemaError },
    #[error("{}: invalid strategy: {source}", path.display())]
    StrategyInvalid { path: PathBuf, source: StrategyError },
    #[error("{}: invalid decision log: {source}", path.display())]
    Schema { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Relation(#[from] RelationError),
    #[error("no relation with id `{0}`")]
    UnknownRelation(String),
}

/// A logged decision whose relation no longer exists, usually because the
/// source was edited since the decision was made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaleDecision {
    pub relation_id: String,
}

impl fmt::Display for StaleDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stale decision: relation `{}` no longer exists", self.relation_id)
    }
}

fn read(path: &Path) -> Result<String, SessionError> {
    fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            SessionError::FileNotFound(path.to_owned())
        } else {
            SessionError::Io { path: path.to_owned(), source }
        }
    })
}

/// Reads `.bts` files, or `.json` model sets, into one model set.
pub fn load_model_set<P: AsRef<Path>>(paths: &[P]) -> Result<ModelSet, SessionError> {
    let mut set = ModelSet::default();
    for path in paths {
        let path = path.as_ref();
        let text = read(path)?;
        let part = if path.extension().is_some_and(|e| e == "json") {
            parse_json(&text).map_err(|source| SessionError::ModelSchema { path: path.to_owned(), source })?
        } else {
            parse_bts_named(&path.display().to_string(), &text)?
        };
        set.extend(part)?;
    }
    Ok(set)
}

/// The strategy at `path`, or the bundled default.
pub fn load_strategy(path: Option<&Path>) -> Result<ExactStrategy, SessionError> {
    match path {
        None => Ok(ExactStrategy::default_strategy()),
        Some(p) => ExactStrategy::from_json(&read(p)?)
            .map_err(|source| SessionError::StrategyInvalid { path: p.to_owned(), source }),
    }
}

fn read_log(path: &Path) -> Result<Vec<Decision>, SessionError> {
    let text = read(path)?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    parse_decision_log(&text).map_err(|source| SessionError::Schema { path: path.to_owned(), source })
}

/// Models and strategy are fixed for the life of a session; only the
/// decision log grows.
#[derive(Debug, Clone)]
pub struct Session {
    model_set: ModelSet,
    strategy: ExactStrategy,
    graph: ExactRelationGraph,
    log: Vec<Decision>,
    sidecar: Option<PathBuf>,
    warnings: Vec<StaleDecision>,
}

impl Session {
    pub fn new(model_set: ModelSet, strategy: ExactStrategy) -> Result<Self, SessionError> {
        let graph = relation_graph(&model_set, &strategy)?;
        Ok(Self { model_set, strategy, graph, log: Vec::new(), sidecar: None, warnings: Vec::new() })
    }

    /// Loads inputs without a sidecar file.
    pub fn from_paths<P: AsRef<Path>>(paths: &[P], strategy: Option<&Path>) -> Result<Self, SessionError> {
        Self::new(load_model_set(paths)?, load_strategy(strategy)?)
    }

    /// Loads inputs and the sidecar `<first input>.decisions.json`, replaying
    /// it if it exists. Later decisions are written back to the sidecar.
    pub fn open<P: AsRef<Path>>(paths: &[P], strategy: Option<&Path>) -> Result<Self, SessionError> {
        let mut session = Self::from_paths(paths, strategy)?;
        if let Some(first) = paths.first() {
            let mut name = first.as_ref().as_os_str().to_owned();
            name.push(".decisions.json");
            let sidecar = PathBuf::from(name);
            if sidecar.exists() {
                session.load(&sidecar)?;
            }
            session.sidecar = Some(sidecar);
        }
        Ok(session)
    }

    pub fn model_set(&self) -> &ModelSet {
        &self.model_set
    }

    pub fn strategy(&self) -> &ExactStrategy {
        &self.strategy
    }

    pub fn graph(&self) -> &ExactRelationGraph {
        &self.graph
    }

    /// Every decision ever recorded, oldest first.
    pub fn log(&self) -> &[Decision] {
        &self.log
    }

    pub fn sidecar(&self) -> Option<&Path> {
        self.sidecar.as_deref()
    }

    pub fn warnings(&self) -> &[StaleDecision] {
        &self.warnings
    }

    pub fn effective_decisions(&self) -> DecisionSet {
        DecisionSet::from_log(&self.log)
    }

    pub fn report(&self) -> DefectReport {
        defect_report(&self.model_set, &self.graph, &self.effective_decisions())
    }

    /// Appends `decision` unless it repeats the current one for its relation.
    pub fn record_decision(&mut self, mut decision: Decision) -> Result<DefectReport, SessionError> {
        if self.graph.get(&decision.relation_id).is_none() {
            return Err(SessionError::UnknownRelation(decision.relation_id));
        }
        let current = self.effective_decisions();
        if !current.get(&decision.relation_id).is_some_and(|d| d.same_as(&decision)) {
            decision.timestamp.get_or_insert_with(Utc::now);
            self.log.push(decision);
            if let Some(path) = self.sidecar.clone() {
                self.save(&path)?;
            }
        }
        Ok(self.report())
    }

    /// Appends a log without validation, returning decisions that name
    /// relations absent from the graph. Those stay in the log but have no
    /// effect.
    pub fn replay(&mut self, log: Vec<Decision>) -> Vec<StaleDecision> {
        let stale: Vec<_> = log
            .iter()
            .filter(|d| self.graph.get(&d.relation_id).is_none())
            .map(|d| StaleDecision { relation_id: d.relation_id.clone() })
            .collect();
        self.log.extend(log);
        self.warnings.extend(stale.iter().cloned());
        stale
    }

    pub fn save(&self, path: &Path) -> Result<(), SessionError> {
        fs::write(path, emit_decision_log(&self.log))
            .map_err(|source| SessionError::Io { path: path.to_owned(), source })
    }

    pub fn load(&mut self, path: &Path) -> Result<Vec<StaleDecision>, SessionError> {
        let log = read_log(path)?;
        Ok(self.replay(log))
    }

    pub fn models_json(&self) -> String {
        emit_json(&self.model_set)
    }

    pub fn relations_json(&self) -> String {
        pretty(&self.graph.to_json())
    }

    pub fn decisions_json(&self) -> String {
        emit_decision_log(&self.log)
    }

    pub fn strategy_json(&self) -> String {
        let mut s = self.strategy.to_json();
        s.push('\n');
        s
    }
}

pub(crate) fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
