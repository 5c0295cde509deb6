use thiserror::Error;

/// Every failure the library can report. Domain verdicts that are merely
/// `false` are returned as booleans, not as errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("subspaces live in different ambient spaces")]
    MixedAmbient,
    #[error("vector is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("not a subspace of the given ambient space: {0}")]
    NotASubspace(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspace is not coisotropic")]
    NotCoisotropic,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("relation is not Lagrangian")]
    NotLagrangian,
    #[error("relation is not a reduction")]
    NotReduction,
    #[error("target of the first relation differs from the source of the second")]
    SourceTargetMismatch,
    #[error("span is not orthogonal")]
    NotOrthogonal,
    #[error("reduction does not factor: image of the transpose is not contained")]
    DoesNotFactor,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("vectors do not form a basis")]
    NotABasis,
    #[error("subspaces are not complementary")]
    NotComplementary,
    #[error("formal functions live on different spaces")]
    SpaceMismatch,
    #[error("exponential needs minimal weight at least 1")]
    WeightNotPositive,
    #[error("logarithm needs constant term 1 and higher terms of positive weight")]
    NotUnital,
    #[error("differential is not compatible with the symplectic form: {0}")]
    NotCompatible(String),
    #[error("isotrope is degenerate for the free action")]
    Degenerate,
    #[error("quadratic form is singular")]
    SingularForm,
    #[error("composition undefined: free action degenerate on the compositor kernel")]
    NonComposable,
    #[error("malformed action: {0}")]
    MalformedAction(String),
    #[error("certificate does not certify a relation")]
    InvalidCertificate,
    #[error("truncation orders differ")]
    TruncationMismatch,
    #[error("invalid symplectic form: {0}")]
    InvalidForm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MixedAmbient => "MixedAmbient",
            Error::NotHomogeneous(_) => "NotHomogeneous",
            Error::NotASubspace(_) => "NotASubspace",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotCoisotropic => "NotCoisotropic",
            Error::NotIsotropic => "NotIsotropic",
            Error::NotLagrangian => "NotLagrangian",
            Error::NotReduction => "NotReduction",
            Error::SourceTargetMismatch => "SourceTargetMismatch",
            Error::NotOrthogonal => "NotOrthogonal",
            Error::DoesNotFactor => "DoesNotFactor",
            Error::NotInvertible => "NotInvertible",
            Error::NotABasis => "NotABasis",
            Error::NotComplementary => "NotComplementary",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::WeightNotPositive => "WeightNotPositive",
            Error::NotUnital => "NotUnital",
            Error::NotCompatible(_) => "NotCompatible",
            Error::Degenerate => "Degenerate",
            Error::SingularForm => "SingularForm",
            Error::NonComposable => "NonComposable",
            Error::MalformedAction(_) => "MalformedAction",
            Error::InvalidCertificate => "InvalidCertificate",
            Error::TruncationMismatch => "TruncationMismatch",
            Error::InvalidForm(_) => "InvalidForm",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
