//! Characteristic coordinates, region classification and the parallelogram
//! vertex construction for the region between the two characteristics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("wave speed must be positive")]
    InvalidSpeed,
    #[error("point lies below the initial line t = 0")]
    NegativeTime,
    #[error("point is outside the closed region between the characteristics")]
    OutOfRegion,
}

/// The three pieces of the upper half-plane cut out by the characteristics
/// `x - a t = x0` and `x + a t = x0`.
///
/// `Q1Star` and `Q2Star` are open on the characteristic side; the
/// characteristics themselves belong to `Q3Star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Q1Star,
    Q2Star,
    Q3Star,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Q1Star, Region::Q2Star, Region::Q3Star];

    /// 1, 2 or 3.
    pub fn number(self) -> u8 {
        match self {
            Region::Q1Star => 1,
            Region::Q2Star => 2,
            Region::Q3Star => 3,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.number() as usize - 1
    }

    /// Classification from the signed offsets `x + a t - x0` and
    /// `x - a t - x0`, in any common unit.
    pub fn from_offsets(left: f64, right: f64) -> Region {
        if left < 0.0 {
            Region::Q1Star
        } else if right > 0.0 {
            Region::Q2Star
        } else {
            Region::Q3Star
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A point in characteristic coordinates `xi = x - a t`, `eta = x + a t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoint {
    pub xi: f64,
    pub eta: f64,
}

fn check_speed(a: f64) -> Result<(), GeometryError> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidSpeed)
    }
}

pub fn to_characteristic(a: f64, t: f64, x: f64) -> Result<CharPoint, GeometryError> {
    check_speed(a)?;
    if t < 0.0 {
        return Err(GeometryError::NegativeTime);
    }
    Ok(CharPoint {
        xi: x - a * t,
        eta: x + a * t,
    })
}

/// Returns `(t, x)`.
pub fn from_characteristic(a: f64, p: CharPoint) -> Result<(f64, f64), GeometryError> {
    check_speed(a)?;
    if p.eta < p.xi {
        return Err(GeometryError::NegativeTime);
    }
    Ok(((p.eta - p.xi) / (2.0 * a), (p.eta + p.xi) / 2.0))
}

pub fn classify_point(a: f64, x0: f64, t: f64, x: f64) -> Result<Region, GeometryError> {
    check_speed(a)?;
    if t < 0.0 {
        return Err(GeometryError::NegativeTime);
    }
    Ok(Region::from_offsets(x + a * t - x0, x - a * t - x0))
}

/// Vertices of the characteristic parallelogram with apex `(t, x)` and
/// opposite corner `(0, x0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parallelogram {
    /// `(0, x0)`.
    pub a: (f64, f64),
    /// On the left characteristic `x = x0 - a t`.
    pub b: (f64, f64),
    /// The point itself.
    pub c: (f64, f64),
    /// On the right characteristic `x = x0 + a t`.
    pub d: (f64, f64),
}

pub fn parallelogram_vertices(a: f64, x0: f64, t: f64, x: f64) -> Result<Parallelogram, GeometryError> {
    if classify_point(a, x0, t, x)? != Region::Q3Star {
        return Err(GeometryError::OutOfRegion);
    }
    let at = a * t;
    Ok(Parallelogram {
        a: (0.0, x0),
        b: ((x0 + at - x) / (2.0 * a), (x0 - at + x) / 2.0),
        c: (t, x),
        d: ((at + x - x0) / (2.0 * a), (at + x + x0) / 2.0),
    })
}
