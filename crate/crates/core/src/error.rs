use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate metric: determinant vanishes identically")]
    DegenerateMetric,
    #[error("singular operator: determinant vanishes identically")]
    SingularOperator,
    #[error("operator is not self-adjoint with respect to the metric (component {0:?})")]
    NotSelfAdjoint(Vec<usize>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("coordinate map and inverse do not compose to the identity")]
    InverseCheckFailed,
    #[error("multiplier {index} depends on foreign variable `{var}`")]
    ForeignVariable { index: usize, var: String },
    #[error("curvature chain disagreement at k = {k}: direct {direct}, criterion {criterion}")]
    ChainDisagreement {
        k: usize,
        direct: String,
        criterion: String,
    },
    #[error("curvature mismatch: expected {expected}, found {found}")]
    CurvatureMismatch { expected: String, found: String },
    #[error("CFL violation: number {cfl:.3} exceeds limit {limit:.3}")]
    Cfl { cfl: f64, limit: f64 },
    #[error("non-finite value at t = {t}")]
    Blowup { t: f64 },
    #[error("denominator {value:e} near singular locus at cell {cell}")]
    SingularLocus { cell: usize, value: f64 },
    #[error("document error: {0}")]
    Document(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
