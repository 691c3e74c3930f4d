use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("table is not a group: {0}")]
    TableNotGroup(String),

    #[error("group order {order} exceeds the order cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("invalid coset representatives: {0}")]
    InvalidReps(String),

    #[error("not a homomorphism: map({a}*{b}) != map({a})*map({b})")]
    NotAHomomorphism { a: String, b: String },

    #[error("generator images reach only {reached} of {order} elements")]
    GeneratorsInsufficient { reached: usize, order: usize },

    #[error("closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    #[error("{what} has size {size}, above the cap {cap}")]
    SizeCapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("connection set is not closed under inverses: {0} is missing its inverse")]
    AsymmetricConnectionSet(String),

    #[error("connection set contains the identity")]
    IdentityInConnectionSet,

    #[error("fiber map of block {block} is not a graph epimorphism onto the induced subgraph")]
    LambdaNotEpimorphism { block: String },

    #[error("blocks do not partition the vertex set: {0}")]
    SigmaNotPartition(String),

    #[error("theta is not an epimorphism onto H: {0}")]
    ThetaNotEpimorphism(String),

    #[error("theorem choices unavailable: {0}")]
    TheoremChoicesUnavailable(String),

    #[error("candidate set J*F is not closed under composition")]
    NotClosed,

    #[error("candidate group does not act regularly")]
    NotRegular,

    #[error("no valid lift choice found after {evaluated} candidate evaluations")]
    SynthesisFailed { evaluated: usize },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for the errors that signal a desk-scale cap was hit.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::OrderCapExceeded { .. }
                | Error::ClosureCapExceeded { .. }
                | Error::SizeCapExceeded { .. }
        )
    }
}
