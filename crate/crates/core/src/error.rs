use thiserror::Error;

/// Classification of a non-hyperbolic isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonHyperbolicKind {
    Parabolic,
    Elliptic,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("isometry is not hyperbolic ({kind:?}, |trace| = {abs_trace})")]
    NotHyperbolic { kind: NonHyperbolicKind, abs_trace: f64 },
    #[error("segments lie on the same carrier geodesic")]
    SameCarrier,
    #[error("invalid gluing: {0}")]
    Structural(String),
    #[error("glued complex is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("topology mismatch: declared (g={declared_genus}, b={declared_boundary}, hexagons={declared_hexagons}), realized (g={genus}, b={boundary}, hexagons={hexagons})")]
    TopologyMismatch {
        declared_genus: usize,
        declared_boundary: usize,
        declared_hexagons: usize,
        genus: usize,
        boundary: usize,
        hexagons: usize,
    },
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("search frontier exceeded {limit} nodes (completed up to radius {reached})")]
    Resource { limit: usize, reached: f64 },
    #[error("cutoff {cutoff} is too small; retry with at least {suggested}")]
    NeedsLargerCutoff { cutoff: f64, suggested: f64 },
    #[error("near-tangential crossing (angle {angle:e}) cannot be classified")]
    Precision { angle: f64 },
    #[error("spectrum kind mismatch: {0}")]
    KindMismatch(String),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
