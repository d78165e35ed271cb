use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse descriptor {src:?}: {msg}")]
    Descriptor { src: String, msg: String },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("not rank-one connected: smallest/largest singular value of A1 - A0 is {ratio:e}")]
    NotRankOne { ratio: f64 },

    #[error("point outside domain: {0}")]
    OutsideDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
