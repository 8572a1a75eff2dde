use thiserror::Error;

use crate::model::ValidationReport;

/// Structural problems detected while assembling a game tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("game has no players")]
    NoPlayers,
    #[error("duplicate player `{0}`")]
    DuplicatePlayer(String),
    #[error("game has no nodes")]
    NoNodes,
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("no root node")]
    NoRoot,
    #[error("more than one root: `{0}` and `{1}`")]
    MultipleRoots(String, String),
    #[error("root `{0}` cannot carry a move")]
    RootWithMove(String),
    #[error("node `{0}` has an empty move")]
    EmptyMove(String),
    #[error("node `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("duplicate information set id `{0}`")]
    DuplicateInfoset(String),
    #[error("information set `{0}` is empty")]
    EmptyInfoset(String),
}

/// Errors raised by queries and transformations over a game.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid game structure:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown information set `{0}`")]
    UnknownInfoset(String),
    #[error("no active players at terminal `{0}`")]
    TerminalNode(String),
    #[error("action `{action}` is not feasible at information set `{infoset}`")]
    InfeasibleAction { infoset: String, action: String },
    #[error("information set `{infoset}` is not owned by player `{player}`")]
    OwnerMismatch { infoset: String, player: String },
    #[error("strategies belong to different players ({0} and {1})")]
    StrategyOwnerMismatch(String, String),
    #[error("bad strategy profile: {0}")]
    BadProfile(String),
    #[error("invalid site: {0}")]
    InvalidSite(String),
    #[error("no admissible re-sequencing: {0}")]
    NoResequencing(String),
    #[error("empty node set")]
    EmptyNodeSet,
}
