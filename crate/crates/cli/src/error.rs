use thiserror::Error;

use sharpflat_core::curve::CurveError;
use sharpflat_core::dieudonne::DieudonneError;
use sharpflat_core::io::IoError;
use sharpflat_core::log_transform::LogError;
use sharpflat_core::padic::PadicError;
use sharpflat_core::report::ReportError;
use sharpflat_core::series::SeriesError;
use sharpflat_core::vanishing::VanishingError;

/// Failure with its exit code: 1 for bad input, 2 for precision-blocked results, 3 for detected inconsistencies.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Undetermined(String),
    #[error("{0}")]
    Inconsistent(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Undetermined(_) => 2,
            CliError::Inconsistent(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::ZeroSeries | SeriesError::Inexact(_) => CliError::Undetermined(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<LogError> for CliError {
    fn from(e: LogError) -> Self {
        match e {
            LogError::IntegralityViolation(_) => CliError::Inconsistent(e.to_string()),
            LogError::NotStabilized { .. } | LogError::ColumnNotStabilized(_) | LogError::Singular => CliError::Undetermined(e.to_string()),
            LogError::Series(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<VanishingError> for CliError {
    fn from(e: VanishingError) -> Self {
        match e {
            VanishingError::DichotomyViolated { .. } => CliError::Inconsistent(e.to_string()),
            VanishingError::NotExact(_) | VanishingError::ZeroInput { .. } => CliError::Undetermined(e.to_string()),
            VanishingError::Log(l) => l.into(),
            VanishingError::Series(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<DieudonneError> for CliError {
    fn from(e: DieudonneError) -> Self {
        match e {
            DieudonneError::Rationality(_) | DieudonneError::NotRational(_) => CliError::Inconsistent(e.to_string()),
            DieudonneError::DegeneratePairing | DieudonneError::SingularZ => CliError::Undetermined(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::ZeroPair => CliError::Undetermined(e.to_string()),
            ReportError::NoConventionSign { .. } => CliError::Inconsistent(e.to_string()),
            ReportError::Log(l) => l.into(),
            ReportError::Vanishing(v) => v.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}
