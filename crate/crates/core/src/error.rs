use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bidegree ({u},{v}) outside 0..={q} x 0..={p}")]
    Bidegree { u: isize, v: isize, p: usize, q: usize },

    #[error("shape mismatch in {context}: expected {expected:?}, found {found:?}")]
    Shape { context: String, expected: (usize, usize), found: (usize, usize) },

    #[error("degenerate basis: {columns} columns but rank {rank}")]
    DegenerateBasis { rank: usize, columns: usize },

    #[error("twist is not leafwise closed: dF W + W dF != 0 on block ({u},{v})")]
    TwistNotClosed { u: usize, v: usize },

    #[error("wedge by omega does not square to zero on block ({u},{v})")]
    TwistNotNilpotent { u: usize, v: usize },

    #[error("twisted differential does not square to zero on block ({u},{v})")]
    TwistedNotDifferential { u: usize, v: usize },

    #[error("invalid leaf complex: {0}")]
    InvalidLeafComplex(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("star operators violate `{identity}` on block ({u},{v})")]
    StarInvariant { identity: String, u: usize, v: usize },

    #[error("map is not invertible on block ({u},{v})")]
    NotInvertible { u: usize, v: usize },

    #[error("map does not intertwine the twisted differentials on block ({u},{v})")]
    NotIntertwining { u: usize, v: usize },

    #[error("Betti numbers differ on block ({u},{v}): source {source_betti}, target {target_betti}")]
    BettiMismatch { u: usize, v: usize, source_betti: usize, target_betti: usize },

    #[error(
        "harmonic and rank-nullity Betti numbers disagree on block ({u},{v}): {harmonic} vs {rank_nullity}"
    )]
    InconsistentBetti { u: usize, v: usize, harmonic: usize, rank_nullity: usize },

    #[error("twisted complexes are built over different base complexes")]
    MismatchedBases,

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("backend mismatch: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
