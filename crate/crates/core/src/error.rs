use thiserror::Error;

use crate::diffpoly::{DiffPoly, JetVariable};

#[derive(Debug, Error)]
pub enum Error {
    #[error("no substitution rule for {0}")]
    UnmappedVariable(JetVariable),

    #[error("not a total x-derivative; obstruction: {remainder}")]
    NotExact { remainder: DiffPoly },

    #[error("retained window is empty: floor {floor} > ceiling {ceiling}")]
    EmptyWindow { floor: i64, ceiling: i64 },

    #[error("residue requested but the operator is only certified down to d^{floor}")]
    ResidueBelowFloor { floor: i64 },

    #[error("coefficient of d^{requested} requested but the operator is only certified down to d^{floor}")]
    InsufficientFloor { requested: i64, floor: i64 },

    #[error("odd power eps^{0} cannot be specialized through eps^2")]
    OddEpsPower(u32),

    #[error("map is not triangular at {0}")]
    NotTriangular(JetVariable),

    #[error("inconsistent constraints: {0}")]
    NoSolution(String),

    #[error("solution is not unique: {free} undetermined coefficient(s)")]
    NonUnique { free: usize, kernel: Vec<Vec<(usize, String)>> },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unsupported structured format version {0}")]
    Version(u32),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
