use thiserror::Error;

use crate::geometry::{HexCoord, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid floral arrangement: {0}")]
    InvalidArrangement(String),

    #[error("configuration outside support of μ: {0}")]
    OutsideSupport(String),

    #[error("enumeration too large: {non_iris} non-iris hexagons (cap {cap}), {irises} irises (cap 2)")]
    EnumerationTooLarge { non_iris: usize, irises: usize, cap: usize },

    #[error("hexagon {0:?} is not in the domain")]
    HexOutsideDomain(HexCoord),

    #[error("vertex {0:?} is not a vertex of the domain")]
    VertexOutsideDomain(VertexId),

    #[error("malformed event: {0}")]
    MalformedEvent(String),

    #[error("invalid petal sets: {0}")]
    InvalidPetalSets(String),

    #[error("petal configuration inconsistent with the conditioned petals: {0}")]
    InconsistentPetals(String),

    #[error("balance infeasible: {0}")]
    BalanceInfeasible(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("missing field value at contour vertex {0:?}")]
    MissingFieldValue(VertexId),

    #[error("point ({x}, {y}) lies outside the unit triangle")]
    OutsideTriangle { x: f64, y: f64 },

    #[error("domain too large to render: {hexes} hexagons (limit {limit})")]
    TooLargeToRender { hexes: usize, limit: usize },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
