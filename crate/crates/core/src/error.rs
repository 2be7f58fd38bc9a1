use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("polynomial has a zero or non-finite leading coefficient")]
    DegenerateLeadingCoefficient,

    #[error("no sign change on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("invalid model: {}", format_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("time grid is not uniform")]
    NonUniformGrid,

    #[error("strain history must start from zero strain")]
    NonzeroInitialStrain,

    #[error("root bracket failure: {0}")]
    BracketFailure(String),

    #[error("point at radius {radius} lies outside the ball of radius {ball_radius}")]
    OutsideDomain { radius: f64, ball_radius: f64 },

    #[error("shear rate {tau} is not below bulk rate {kappa}; shear/bulk index split is ambiguous")]
    OrderingViolation { tau: f64, kappa: f64 },

    #[error("strength alpha[{index}] = {alpha:e} is negligible; secular brackets collapse")]
    DegenerateStrengths { index: usize, alpha: f64 },

    #[error("cross-check failure: {0}")]
    CrossCheckFailure(String),

    #[error("time step {step} exceeds the stability bound {bound}")]
    StepTooLarge { step: f64, bound: f64 },

    #[error("inconsistent clusters: {0}")]
    InconsistentClusters(String),

    #[error("recovered decay rates are not real, positive and distinct: {0}")]
    ComplexBeta(String),

    #[error("recovered strength alpha[{index}] = {alpha:e} is not positive")]
    NonPositiveAlpha { index: usize, alpha: f64 },

    #[error("recovered moduli violate strong convexity (lambda0 = {lambda0}, mu0 = {mu0})")]
    NegativeModulus { lambda0: f64, mu0: f64 },

    #[error("adjacent decay-rate ratio {ratio:.4} is below {threshold}; inversion is ill-conditioned")]
    IllConditioned { ratio: f64, threshold: f64 },

    #[error("cluster multiplier ratio is inconsistent: {0}")]
    RatioInconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSymmetric { .. } => "NonSymmetric",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DegenerateLeadingCoefficient => "DegenerateLeadingCoefficient",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::InvalidModel(_) => "InvalidModel",
            Error::NegativeTime(_) => "NegativeTime",
            Error::NonUniformGrid => "NonUniformGrid",
            Error::NonzeroInitialStrain => "NonzeroInitialStrain",
            Error::BracketFailure(_) => "BracketFailure",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::OrderingViolation { .. } => "OrderingViolation",
            Error::DegenerateStrengths { .. } => "DegenerateStrengths",
            Error::CrossCheckFailure(_) => "CrossCheckFailure",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::InconsistentClusters(_) => "InconsistentClusters",
            Error::ComplexBeta(_) => "ComplexBeta",
            Error::NonPositiveAlpha { .. } => "NonPositiveAlpha",
            Error::NegativeModulus { .. } => "NegativeModulus",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::RatioInconsistent(_) => "RatioInconsistent",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
