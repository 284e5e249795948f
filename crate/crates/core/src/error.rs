use thiserror::Error;

use crate::expr::ExprError;
use crate::geometry::{GeometryError, Region};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidSpec(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid Picard parameters: {0}")]
    InvalidPicard(String),
    #[error("expression `{field}`: {source}")]
    Expression {
        field: &'static str,
        #[source]
        source: ExprError,
    },
    #[error(
        "Picard iteration did not converge in region {region} (strip {strip}, {iterations} iterations, last update {last_update:.3e})"
    )]
    NonConvergence {
        region: Region,
        strip: usize,
        iterations: usize,
        last_update: f64,
    },
    #[error("coverage: {0}")]
    Coverage(String),
    #[error("point (t={t}, x={x}) is outside the solved window")]
    OutOfWindow { t: f64, x: f64 },
    #[error("point (t={t}, x={x}) is too close to a characteristic for the stencil")]
    TooCloseToCharacteristic { t: f64, x: f64 },
    #[error("the nonlinearity f is not the zero literal")]
    NotLinear,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl Error {
    pub(crate) fn expr(field: &'static str) -> impl FnOnce(ExprError) -> Error {
        move |source| Error::Expression { field, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
