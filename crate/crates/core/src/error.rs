use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: must be a non-square not divisible by 4")]
    InvalidDiscriminant(i64),

    #[error("discriminant {0} exceeds the supported range")]
    DiscriminantRange(String),

    /// The conic has a rational point; use an ordinary hyperelliptic tool.
    #[error("square discriminant: the conic has a rational point on every scanned line (use an ordinary hyperelliptic point counter)")]
    SquareDiscriminant,

    #[error("degenerate line: restricted form is zero or tangent")]
    DegenerateLine,

    #[error("base point lies on the auxiliary line")]
    PointOnLine,

    #[error("degenerate conic (zero Gram determinant)")]
    DegenerateConic,

    #[error("not a genus-3 model: {0}")]
    NotGenus3(String),

    #[error("translates collide modulo {0}")]
    TranslatesCollide(u64),

    #[error("h(0) vanishes modulo a prime above {0}")]
    BadH0(u64),

    #[error("bad reduction at {0}")]
    BadReduction(u64),

    #[error("kappa {kappa} out of range 0..={max}")]
    KappaRange { kappa: u32, max: u32 },

    #[error("Frobenius-twisted characteristic polynomial is not defined over F_{0}")]
    NotRational(u64),

    #[error("no lifting candidates at {0}")]
    NoCandidates(u64),

    #[error("scalar is not a multiple of the element order")]
    NotMultiple,

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("curve file line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
