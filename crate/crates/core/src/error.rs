use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gluing table: {0}")]
    InvalidTable(String),

    #[error("gluing table is disconnected ({0} components)")]
    Disconnected(usize),

    #[error("invalid marking: {0}")]
    InvalidMarking(String),

    #[error("cylinder decomposition failed: {0}")]
    NotAnAnnulus(String),

    #[error("invalid curve system: {0}")]
    InvalidCurveSystem(String),

    #[error("invalid dual graph: {0}")]
    InvalidGraph(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("census incomplete: requested L = {requested}, census covers areas up to {available}")]
    CensusIncomplete { requested: u32, available: u32 },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
