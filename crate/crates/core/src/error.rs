use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every module in this crate.
///
/// Construction errors (bad factors, bad polynomials, bad windows) are reported
/// eagerly so that the numerical routines can assume validated inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial degree {0} outside supported range 1..=64 for root finding")]
    DegreeOutOfRange(usize),

    #[error("eigenvalue iteration failed to converge for companion matrix of degree {0}")]
    EigenFailure(usize),

    #[error("Hénon factor needs deg p >= 2, got {0}")]
    FactorDegree(usize),

    #[error("Hénon factor needs a != 0")]
    FactorZeroA,

    #[error("non-finite coefficient in Hénon factor")]
    FactorNonFinite,

    #[error("a Hénon-type map needs at least one factor")]
    EmptyComposition,

    #[error("composite degree overflows supported range (product of factor degrees > 2^32)")]
    DegreeOverflow,

    #[error("map description parse error on line {line}: {msg}")]
    MapParse { line: usize, msg: String },

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("iteration budget must be at least 1")]
    BadBudget,

    #[error("point has a non-finite coordinate")]
    NonFinitePoint,

    #[error("level-set threshold must be >= 0, got {0}")]
    BadLevel(f64),

    #[error("grid axis needs at least 2 samples, got {0}x{1}")]
    BadGridSize(usize, usize),

    #[error("window is empty or not finite")]
    BadWindow,

    #[error("slice resolution must be at least 8 cells per axis, got {0}")]
    BadSliceResolution(usize),

    #[error("quadrature resolution must be at least 8 per axis, got {0}")]
    BadQuadResolution(usize),

    #[error("complex line needs a nonzero direction")]
    ZeroDirection,

    #[error("test form needs a positive radius, got {0}")]
    BadRadius(f64),

    #[error("curve is empty or has only zero coefficients")]
    EmptyCurve,

    #[error("curve closure passes through the inverse map's indeterminacy point at infinity (the z1-axis direction); pullbacks along it do not converge")]
    CurveThroughIMinus,

    #[error("equidistribution range is empty")]
    EmptyRange,

    #[error("test-form battery is empty")]
    EmptyTestForms,

    #[error("pullback depth {0} exceeds the extended-arithmetic budget {1}")]
    PullbackDepth(u32, u32),

    #[error("no bounded-class seed found for automatic test-form placement")]
    NoBoundedSeed,

    #[error("no escaping-class point found along the placement ray")]
    NoEscapingSeed,

    #[error("operation requires a single-factor map, composition has {0} factors")]
    NotSingleFactor(usize),

    #[error("period must be at least 1")]
    BadPeriod,

    #[error("seed grid needs at least 2 seeds per axis, got {0}")]
    BadSeedGrid(usize),

    #[error("period-{n} search incomplete: found {found} of {expected} solutions")]
    IncompleteSearch { n: u32, found: usize, expected: u64 },

    #[error("period-n solution count {0} exceeds the search budget 4096")]
    SearchBudget(u64),

    #[error("point is not a saddle: multiplier moduli {0} and {1}")]
    NotASaddle(f64, f64),

    #[error("stable eigenvector residual {0:.3e} exceeds 1e-8")]
    BadEigenvector(f64),

    #[error("stable-manifold residual {residual:.3e} exceeds 1e-8 at xi = {xi} (deepen the inverse-iteration depth)")]
    ManifoldResidual { xi: Complex64, residual: f64 },

    #[error("curve sample at xi = {xi} has G+ = {g:.3e} > {tol:.1e}; parametrization left the forward-bounded set")]
    NotInKPlus { xi: Complex64, g: f64, tol: f64 },

    #[error("radius list must be positive and strictly increasing")]
    BadRadiusList,

    #[error("radius {r} exceeds the curve's domain radius {max}")]
    DomainRadius { r: f64, max: f64 },

    #[error("characteristic T({0}) = {1:.3e} must be positive; the curve may be constant")]
    NonPositiveCharacteristic(f64, f64),

    #[error("Hölder estimate needs at least one depth")]
    EmptyDepths,

    #[error("no grid point stayed certificate-free for {0} steps; enlarge the region or lower the depth")]
    NoBoundedSamples(usize),

    #[error("holder grid needs at least 2 samples per axis, got {0}")]
    BadHolderGrid(usize),

    #[error("family declares degree {expected} but the built map has degree {got}")]
    FamilyDegree { expected: u64, got: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
