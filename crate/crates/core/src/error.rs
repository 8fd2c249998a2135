use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector norm {norm:e} is too small to normalize")]
    DegenerateVector { norm: f64 },
    #[error("points are equal or antipodal (|p·q| = {dot})")]
    AntipodalOrEqual { dot: f64 },
    #[error("spanning pair is not orthonormal: {0}")]
    InvalidCircle(String),
    #[error("matrix is not in SO(4): {0}")]
    NotOrthogonal(String),
    #[error("invalid Lawson parameters: {0}")]
    InvalidParams(String),
    #[error("group closure exceeded {max_order} elements")]
    OrderOverflow { max_order: usize },
    #[error("cannot locate tile for point: {0}")]
    TileLocationAmbiguous(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("line search stalled at iteration {iter} (area {area})")]
    LineSearchStalled { iter: usize, area: f64 },
    #[error("vertex {vertex} has merge candidates {distance:e} apart")]
    WeldAmbiguous { vertex: usize, distance: f64 },
    #[error("mesh is not closed: {open_edges} edges without exactly two triangles")]
    NotClosed { open_edges: usize },
    #[error("mesh is not orientable")]
    NotOrientable,
    #[error("mesh has {components} connected components")]
    Disconnected { components: usize },
    #[error("Euler characteristic {chi} is odd")]
    OddEuler { chi: i64 },
    #[error("vertex {vertex} has zero mixed area")]
    ZeroMixedArea { vertex: usize },
    #[error("vertex {vertex} lies within {distance:e} of the projection pole")]
    PoleProximity { vertex: usize, distance: f64 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("malformed group data: {0}")]
    MalformedGroup(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateVector { .. } => "degenerate_vector",
            Error::AntipodalOrEqual { .. } => "antipodal_or_equal",
            Error::InvalidCircle(_) => "invalid_circle",
            Error::NotOrthogonal(_) => "not_orthogonal",
            Error::InvalidParams(_) => "invalid_params",
            Error::OrderOverflow { .. } => "order_overflow",
            Error::TileLocationAmbiguous(_) => "tile_location_ambiguous",
            Error::InvalidMesh(_) => "invalid_mesh",
            Error::LineSearchStalled { .. } => "line_search_stalled",
            Error::WeldAmbiguous { .. } => "weld_ambiguous",
            Error::NotClosed { .. } => "not_closed",
            Error::NotOrientable => "not_orientable",
            Error::Disconnected { .. } => "disconnected",
            Error::OddEuler { .. } => "odd_euler",
            Error::ZeroMixedArea { .. } => "zero_mixed_area",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::Parse { .. } => "parse",
            Error::MalformedGroup(_) => "malformed_group",
        }
    }
}
