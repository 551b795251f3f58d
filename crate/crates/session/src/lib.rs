//! Review sessions: a loaded model set, its relation graph and the
//! analyst's decision log, plus the HTTP API served over them.

mod http;
mod session;

pub use http::{router, serve, SharedSession};
pub use session::{load_model_set, load_strategy, Session, SessionError, StaleDecision};
