use alloc::string::String;

use crate::dual::SurvivorCounts;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("requested {requested} items from a cloud of {available} points")]
    Size { requested: usize, available: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("point cloud has no normals")]
    MissingNormals,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown part label `{0}`")]
    UnknownPart(String),

    #[error("part `{part}` references index {index} but the cloud has {len} points")]
    PartIndexOutOfRange { part: String, index: usize, len: usize },

    #[error("part `{0}` is empty")]
    EmptyPart(String),

    #[error("parts `{0}` and `{1}` overlap")]
    OverlappingParts(String, String),

    #[error("target region too small ({first} and {second} points)")]
    RegionTooSmall { first: usize, second: usize },

    #[error("target cloud is empty")]
    EmptyTarget,

    #[error("no feasible grasp pair: {0}")]
    NoFeasiblePair(SurvivorCounts),
}
