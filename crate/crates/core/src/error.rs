use thiserror::Error;

/// Domain errors raised by the workbench. Every variant maps to a stable
/// machine-readable code used by the command-line surface.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the open set is empty")]
    EmptyOpen,
    #[error("split value {value} exceeds the schedule bound {bound} at the stem")]
    SplitOutOfRange { value: u64, bound: u64 },
    #[error("sequence is not compatible with the open: {0}")]
    IncompatibleSeq(String),
    #[error("malformed bounding schedule: {0}")]
    MalformedSchedule(String),
    #[error("term has no table entry for node {0:?}")]
    TermNotTotal(Vec<u64>),
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("amalgamation pieces overlap with conflicting values {0} and {1}")]
    AmbiguousAmalgamation(u64, u64),
    #[error("bad candidate: {0}")]
    BadCandidate(String),
    #[error("no good extension exists: {0}")]
    NoGoodExtension(String),
    #[error("point is not a member of the open")]
    PointNotInOpen,
    #[error("oracle is not total: {0}")]
    OracleNotTotal(String),
    #[error("set is bounded and is not a point of the space")]
    NotAPoint,
    #[error("the second open is not a subopen of the first")]
    NotASubopen,
    #[error("inconsistent term family: {0}")]
    InconsistentTermFamily(String),
    #[error("malformed oracle: {0}")]
    MalformedOracle(String),
    #[error("escape schedule is unsound: {0}")]
    ScheduleUnsound(String),
    #[error("invalid totality certificate {cert} for program {program}")]
    BadCertificate { cert: u64, program: String },
    #[error("pseudo-boundedness violated at n={n}: f(n)={value}")]
    TheoremViolated { n: u64, value: u64 },
    #[error("evaluation budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("no stabilization within the supplied sequence")]
    NoStabilization,
    #[error("program syntax error: {0}")]
    ProgramSyntax(String),
    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyOpen => "EmptyOpen",
            Error::SplitOutOfRange { .. } => "SplitOutOfRange",
            Error::IncompatibleSeq(_) => "IncompatibleSeq",
            Error::MalformedSchedule(_) => "MalformedSchedule",
            Error::TermNotTotal(_) => "TermNotTotal",
            Error::MalformedTerm(_) => "MalformedTerm",
            Error::AmbiguousAmalgamation(..) => "AmbiguousAmalgamation",
            Error::BadCandidate(_) => "BadCandidate",
            Error::NoGoodExtension(_) => "NoGoodExtension",
            Error::PointNotInOpen => "PointNotInOpen",
            Error::OracleNotTotal(_) => "OracleNotTotal",
            Error::NotAPoint => "NotAPoint",
            Error::NotASubopen => "NotASubopen",
            Error::InconsistentTermFamily(_) => "InconsistentTermFamily",
            Error::MalformedOracle(_) => "MalformedOracle",
            Error::ScheduleUnsound(_) => "ScheduleUnsound",
            Error::BadCertificate { .. } => "BadCertificate",
            Error::TheoremViolated { .. } => "TheoremViolated",
            Error::BudgetExhausted(_) => "BudgetExhausted",
            Error::NoStabilization => "NoStabilization",
            Error::ProgramSyntax(_) => "ProgramSyntax",
            Error::CertificateMismatch(_) => "CertificateMismatch",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
