use thiserror::Error;

/// Which group axiom a candidate multiplication table violated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAxiom {
    Shape,
    LatinSquare,
    Identity,
    Inverse,
    Associativity,
}

impl std::fmt::Display for GroupAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GroupAxiom::Shape => "shape",
            GroupAxiom::LatinSquare => "latin-square",
            GroupAxiom::Identity => "identity",
            GroupAxiom::Inverse => "inverse",
            GroupAxiom::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group: {axiom} ({detail})")]
    NotAGroup { axiom: GroupAxiom, detail: String },

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("subgroup is not normal: {0}")]
    NotNormal(String),

    #[error("numerical splitting did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("multiplicity {value} is not within tolerance of an integer")]
    NonIntegralMultiplicity { value: f64 },

    #[error("the representation contains the trivial irreducible of the stationary subgroup (m = {multiplicity}); the stationary subgroup would have nonzero fixed vectors")]
    TrivialComponentPresent { multiplicity: usize },

    #[error("objects belong to different models")]
    ModelMismatch,

    #[error("block {component} is singular")]
    SingularBlock { component: usize },

    #[error("no invertible intertwiner lifts base translation {a}")]
    NoInvertibleIntertwiner { a: usize },

    #[error("automorphism permutes isotypic components and does not restrict to them")]
    ComponentsPermuted,

    #[error("transition data is not compatible: {0}")]
    NotCompatible(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
