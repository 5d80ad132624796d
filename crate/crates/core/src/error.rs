use thiserror::Error;

use crate::lattice::DivisorClass;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("reflection index {0} out of range 0..=5")]
    RootIndex(usize),
    #[error("orbit of {seed} exceeded the cap of {cap} elements")]
    OrbitCap { seed: DivisorClass, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown Dynkin type {0:?}")]
    UnknownType(String),
    #[error("anticanonical class is not nef on this configuration")]
    AnticanonicalNotNef,
    #[error("class {0} is not nef")]
    NotNef(DivisorClass),
    #[error("class {0} is not effective")]
    NotEffective(DivisorClass),
    #[error("h1 requested for {0} of degree below -2")]
    DegreeTooLow(DivisorClass),
    #[error("{0} is not a nef member of the orbit of E0")]
    NotPlaneModel(DivisorClass),
    #[error("cannot parse class {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
