use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("h(x0) is not divisible by the uniformizer")]
    NotARoot,
    #[error("h'(x0) is not a unit; the root is not simple")]
    NonSimpleRoot,
    #[error("result does not lie in the base ring: {0}")]
    NotInBase(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("operands live in different rings or variable spaces")]
    RingMismatch,
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("linear coefficient is not a uniformizer: {0}")]
    NotAUniformizer(String),
    #[error("theta condition fails: {0}")]
    ThetaConditionFailed(String),
    #[error("norms differ, no unit links the two uniformizers")]
    NormMismatch,
    #[error("element is not divisible by the requested power of the uniformizer")]
    NotDivisible,
    #[error("element has negative valuation")]
    NotIntegral,
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("coefficients do not descend to the base: {0}")]
    DescentFailed(String),
    #[error("division left a nonzero remainder at degree {0}")]
    DivisionRemainder(usize),
    #[error("generator is not a uniformizer of the extension")]
    NotUniformizer,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("invalid Lubin-Tate polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid automorphism data: {0}")]
    InvalidPresentation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
