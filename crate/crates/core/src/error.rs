use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("exponent at position {position} is not an integer constant")]
    NonIntegerExponent { position: usize },

    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expression is not a polynomial")]
    NotPolynomial,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("lagrangian is not quadratic in the velocities")]
    NotQuadraticInVelocities,
    #[error("invalid lagrangian: {0}")]
    InvalidLagrangian(String),
    #[error("dimension too small: {0}")]
    DimensionTooSmall(String),
    #[error("invalid g-tensor component: {0}")]
    InvalidComponent(String),

    #[error("symbolic size limit exceeded: {size} > {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("singular matrix")]
    SingularMatrix,
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("matrix has odd size {0}")]
    OddSize(usize),
    #[error("matrix is not square or shapes do not match: {0}")]
    Shape(String),

    #[error("regularization search failed after {0} tries")]
    SearchFailed(usize),
    #[error("newton iteration did not converge after {0} iterations")]
    NewtonDivergence(usize),
    #[error("no symbolic Hamiltonian in Legendre coordinates: {0}")]
    HamiltonianUnavailable(String),
    #[error("system is not regular: {0}")]
    NotRegular(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("grid check requires {0}")]
    GridUnsupported(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
