use crate::{Label, Node};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: Node, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(Node),

    #[error("pair {{{0}, {1}}} listed more than once")]
    DuplicatePair(Node, Node),

    #[error("label {label} on {{{u}, {v}}} outside 1..={lifetime}")]
    InvalidLabel {
        u: Node,
        v: Node,
        label: Label,
        lifetime: Label,
    },

    #[error("incomplete host: {missing} node pairs have no label")]
    IncompleteHost { missing: usize },

    #[error("host labels are not consecutive: label {0} is unused")]
    NonConsecutiveLabels(Label),

    #[error("edge {{{u}, {v}}} is not an edge of the host with the same label")]
    NotSubgraph { u: Node, v: Node },

    #[error("endpoint {endpoint} of agent {agent} out of range (n = {n})")]
    EndpointOutOfRange { agent: Node, endpoint: Node, n: usize },

    #[error("agent {0} lists itself in its strategy")]
    SelfPurchase(Node),

    #[error("profile has {profile} agents but the host has {host} nodes")]
    SizeMismatch { profile: usize, host: usize },

    #[error("arc ({owner}, {endpoint}) is not in the created graph")]
    ArcNotPresent { owner: Node, endpoint: Node },

    #[error("antiparallel arcs ({0}, {1}) and ({1}, {0}) carry different labels")]
    ArcLabelMismatch(Node, Node),

    #[error("search space exceeded: more than {cap} search nodes")]
    SearchSpaceExceeded { cap: u64 },

    #[error("graph is not temporally connected")]
    NotTemporallyConnected,

    #[error("profile is not a temporal spanner: {unreached} ordered pairs unreached")]
    ProfileNotSpanner { unreached: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid set-cover instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
