use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid extent: x_max ({x_max}) must exceed x_min ({x_min})")]
    InvalidExtent { x_min: f64, x_max: f64 },
    #[error("too few points: need at least {min}, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("well {well} does not fit in the box with margin {margin}")]
    WellOutsideBox { well: char, margin: f64 },
    #[error("invalid well geometry: {0}")]
    InvalidWells(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid mismatch between orbitals")]
    GridMismatch,
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("shift {shift} is too close to an eigenvalue")]
    NearSingularShift { shift: f64 },
    #[error("levels {index} and {next} are not an isolated doublet (splitting {splitting:e}, gap {gap:e})")]
    NotADoublet { index: usize, next: usize, splitting: f64, gap: f64 },
    #[error("energy {energy} is above the barrier top {top}")]
    NoBarrier { energy: f64, top: f64 },
    #[error("{count} turning points found in the barrier region, expected 2")]
    TurningPointAmbiguity { count: usize },
    #[error("non-perturbative: |{coupling:e}| exceeds 0.1 x |{detuning:e}|")]
    NonPerturbative { coupling: f64, detuning: f64 },
    #[error("externals are not orthonormal (deviation {deviation:e})")]
    NonOrthonormal { deviation: f64 },
    #[error("tail region is empty")]
    RegionEmpty,
    #[error("well b holds {found} bound levels, need at least {needed}")]
    InsufficientLevels { found: usize, needed: usize },
    #[error("two-body grid too large: n = {n} (max {max})")]
    TooLarge { n: usize, max: usize },
    #[error("no natural orbital overlaps the level-1 doublet (best weight {best:.3})")]
    NoIdentifiableOrbital { best: f64 },
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("could not identify the doubly occupied states ({found} candidates)")]
    StatesNotIdentifiable { found: usize },
    #[error("fit input must be positive (offending value {value})")]
    NonPositive { value: f64 },
    #[error("curves do not cross in the shared window")]
    NoCrossing,
    #[error("curves cross {count} times in the shared window")]
    MultipleCrossings { count: usize },
    #[error("scan values are empty")]
    EmptyValues,
    #[error("scan values must be strictly monotone")]
    NotMonotone,
}
