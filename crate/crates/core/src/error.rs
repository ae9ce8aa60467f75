use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different number fields")]
    FieldMismatch,
    #[error("minimal polynomial is not irreducible over the rationals: {0}")]
    Reducible(String),
    #[error("minimal polynomial must be monic with integer coefficients and degree 1..=8")]
    BadMinpoly,
    #[error("embedding box does not isolate a single root: {0}")]
    AmbiguousEmbedding(String),
    #[error("field is not closed under complex conjugation")]
    NotConjugationClosed,
    #[error("field is not Galois over the rationals")]
    NotGalois,
    #[error("field does not contain a primitive {0}-th root of unity")]
    RootOfUnityUnavailable(u64),
    #[error("exponents are equal; Stokes directions are undefined")]
    EqualExponents,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{0} is not an irregular point of the datum")]
    NotIrregularPoint(String),
    #[error("no embedding of the source field into the target field")]
    NoEmbedding,
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("automorphism is outside the group: {0}")]
    AutomorphismOutsideGroup(String),
    #[error("rank condition violated: {0}")]
    RankConditionViolated(String),
    #[error("vectors do not span a lattice: {0}")]
    NotALattice(String),
    #[error("cocycle condition fails: {0}")]
    CocycleViolation(String),
    #[error("averaging produced no admissible operator after {tries} attempts (seeds {first_seed}..)")]
    AveragingFailed { tries: u32, first_seed: u64 },
    #[error("exponent set is not stable under conjugation: {0}")]
    NotConjugationStable(String),
    #[error("involution condition fails: {0}")]
    InvolutionFails(String),
    #[error("grid resolution too coarse: component counts {0} and {1} disagree")]
    ResolutionTooCoarse(usize, usize),
    #[error("singular matrix")]
    Singular,
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// The variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::FieldMismatch => "FieldMismatch",
            Error::Reducible(..) => "Reducible",
            Error::BadMinpoly => "BadMinpoly",
            Error::AmbiguousEmbedding(..) => "AmbiguousEmbedding",
            Error::NotConjugationClosed => "NotConjugationClosed",
            Error::NotGalois => "NotGalois",
            Error::RootOfUnityUnavailable(..) => "RootOfUnityUnavailable",
            Error::EqualExponents => "EqualExponents",
            Error::ShapeMismatch(..) => "ShapeMismatch",
            Error::NotIrregularPoint(..) => "NotIrregularPoint",
            Error::NoEmbedding => "NoEmbedding",
            Error::StructureMismatch(..) => "StructureMismatch",
            Error::AutomorphismOutsideGroup(..) => "AutomorphismOutsideGroup",
            Error::RankConditionViolated(..) => "RankConditionViolated",
            Error::NotALattice(..) => "NotALattice",
            Error::CocycleViolation(..) => "CocycleViolation",
            Error::AveragingFailed { .. } => "AveragingFailed",
            Error::NotConjugationStable(..) => "NotConjugationStable",
            Error::InvolutionFails(..) => "InvolutionFails",
            Error::ResolutionTooCoarse(..) => "ResolutionTooCoarse",
            Error::Singular => "Singular",
            Error::Malformed(..) => "Malformed",
        }
    }
}
