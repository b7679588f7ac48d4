use crate::polyalg::PolyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("anchor points a1 and a2 coincide")]
    CoincidentAnchors,
    #[error("architecturally degenerate: {0}")]
    ArchitecturallyDegenerate(String),
    #[error("singularity polynomial vanishes identically at this orientation")]
    OrientationDegenerate,
    #[error("singularity polynomial vanishes identically at this position")]
    PositionDegenerate,
    #[error("orientation (0,0,1) is excluded by the stereographic chart")]
    NorthPole,
    #[error("line lies on the quadric: coefficient of a is {coefficient:e}")]
    LineOnQuadric { coefficient: f64 },
    #[error("configuration is not singular (normalized |F| = {residual:e})")]
    NotSingular { residual: f64 },
    #[error("degenerate orientation: K(lambda) vanishes identically")]
    DegenerateOrientation,
    #[error("no pedal point found, enlarge box or starts")]
    NoPedalPoint,
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
