use alloc::string::String;

/// Errors raised by fitting, resampling and selection routines.
///
/// Conditions that the algorithms recover from on their own (rank
/// exhaustion, GLM non-convergence, degenerate bootstrap distributions) are
/// reported through flags on the returned values instead.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(usize),

    #[error("response has zero variance")]
    ZeroVarianceResponse,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("design matrix is rank deficient")]
    SingularDesign,

    #[error("training fold of {train} rows cannot support {k} components")]
    FoldTooSmall { train: usize, k: usize },

    #[error("criterion requires {required} family (got `{criterion}`)")]
    FamilyMismatch {
        criterion: &'static str,
        required: &'static str,
    },

    #[error("both samples have zero variance")]
    DegenerateVariances,

    #[error("normalizing sum of squares is zero")]
    ZeroDenominator,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
