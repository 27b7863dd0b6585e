use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the layer that raises them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // exact arithmetic
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{0}` as a Gaussian rational")]
    Parse(String),

    // series ring
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("series is not a unit (zero constant term)")]
    NotAUnit,
    #[error("matrix is singular at the origin")]
    SingularAtOrigin,
    #[error("coefficient matrix has deficient rank at the origin")]
    RankDeficientAtOrigin,
    #[error("linear system is inconsistent as series")]
    InconsistentSystem,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    // cubic calculus
    #[error("the zero cubic has no classification")]
    ZeroCubic,
    #[error("cubic is not degenerate")]
    NotDegenerate,
    #[error("fiber over the plane meets only the degeneracy cone")]
    DegenerateFiber,
    #[error("fiber solution space does not have rank 2")]
    SolutionSpaceNotRank2,
    #[error("combination of tangent maps is not an isomorphism")]
    NotAnIsomorphism,
    #[error("image line of the map does not match kappa of the cubic")]
    WrongKappaImage,
    #[error("rank of the supplied map does not match the construction")]
    RankMismatch,
    #[error("group element is singular")]
    SingularGroupElement,

    // CK solver
    #[error("truncation order too small for the CK recursion")]
    OrderExhausted,

    // germs / pipeline
    #[error("germ is not immersed at the origin")]
    NotImmersed,
    #[error("curve germ is not a null curve")]
    NotNullCurve,
    #[error("no admissible base chart found")]
    NoAdmissibleChart,
    #[error("coframe pairing determinant is not a unit")]
    E0ConditionFails,
    #[error("coframe is not closed to the certified order")]
    NotClosed,
    #[error("certificate verification failed: {0}")]
    VerificationFailed(String),
    #[error("invalid germ: {0}")]
    InvalidGerm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
