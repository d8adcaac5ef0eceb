use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// A single violated dataset invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationIssue {
    #[error("scale invalid: {0}")]
    Scale(String),
    #[error("categories invalid: {0}")]
    Categories(String),
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("evaluator `{0}` has an empty criteria set")]
    EmptyCriteriaSet(String),
    #[error("evaluator `{evaluator}` lists unknown criterion `{criterion}`")]
    EvaluatorUnknownCriterion {
        evaluator: String,
        criterion: String,
    },
    #[error(
        "grade out of scale: {grade} given by `{evaluator}` to `{alternative}` on `{criterion}`"
    )]
    GradeOutOfScale {
        alternative: String,
        evaluator: String,
        criterion: String,
        grade: String,
    },
    #[error("duplicate record for (`{alternative}`, `{evaluator}`, `{criterion}`)")]
    DuplicateRecord {
        alternative: String,
        evaluator: String,
        criterion: String,
    },
    #[error("record references unknown {kind} `{id}`")]
    UnknownReference { kind: &'static str, id: String },
    #[error("evaluator `{evaluator}` graded criterion `{criterion}` outside its criteria set")]
    CriterionNotUsed {
        evaluator: String,
        criterion: String,
    },
    #[error("weight entry references unknown {kind} `{id}`")]
    UnknownWeightReference { kind: &'static str, id: String },
    #[error("boundary count {found} != {expected} (categories - 1){}", scope_suffix(.scope))]
    BoundaryCount {
        expected: usize,
        found: usize,
        scope: Option<(String, String)>,
    },
    #[error("boundaries not strictly decreasing: ({values}){}", scope_suffix(.scope))]
    BoundariesNotDecreasing {
        values: String,
        scope: Option<(String, String)>,
    },
}

fn scope_suffix(scope: &Option<(String, String)>) -> String {
    match scope {
        Some((criterion, evaluator)) => {
            format!(" for criterion `{criterion}`, evaluator `{evaluator}`")
        }
        None => String::new(),
    }
}

/// Every violation found while validating a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ValidationIssue>);

impl ValidationErrors {
    pub fn issues(&self) -> &[ValidationIssue] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// Pipeline stage, used to tag errors surfaced by the orchestrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Credibility,
    Sorting,
    Sensitivity,
    Grouping,
    Diagnostics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Credibility => "credibility",
            Stage::Sorting => "sorting",
            Stage::Sensitivity => "sensitivity",
            Stage::Grouping => "grouping",
            Stage::Diagnostics => "diagnostics",
            Stage::Output => "output",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value `{value}`: {reason}")]
    Format { value: String, reason: String },

    #[error(transparent)]
    Validation(#[from] ValidationErrors),

    #[error("alternative `{0}`: no evaluations")]
    NoEvaluations(String),

    #[error("alternative `{0}`: total weight of its evaluations is zero")]
    ZeroWeight(String),

    #[error("invalid credibility vector for `{alternative}`: {reason}")]
    Credibility { alternative: String, reason: String },

    #[error("credibility vector for `{alternative}` has {found} levels, expected {expected}")]
    LevelMismatch {
        alternative: String,
        expected: usize,
        found: usize,
    },

    #[error("lambda grid is empty")]
    EmptyGrid,

    #[error("invalid lambda grid: {0}")]
    Grid(String),

    #[error("k_groups = {requested} out of range 1..={available}")]
    GroupCount { requested: usize, available: usize },

    #[error("exhaustive partitioning supports at most {max} alternatives, got {found}")]
    ExhaustiveTooLarge { max: usize, found: usize },

    #[error("group override missing alternatives: {}", .0.join(", "))]
    OverrideMissing(Vec<String>),

    #[error("group override names unknown alternatives: {}", .0.join(", "))]
    OverrideUnknown(Vec<String>),

    #[error("group override places `{0}` in more than one group")]
    OverrideDuplicate(String),

    #[error("group `{0}` is empty")]
    EmptyGroup(String),

    #[error("record for `{0}` belongs to no group")]
    Ungrouped(String),

    #[error("mode table has no column for group `{0}`")]
    MissingGroupModes(String),

    #[error("{}:{line}: {message}", path.display())]
    Csv {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("[{stage}] {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn format(value: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            value: value.into(),
            reason: reason.into(),
        }
    }

    pub fn at_stage(self, stage: Stage) -> Self {
        match self {
            already @ Error::Stage { .. } => already,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
