//! Classical solutions of the Cauchy problem for the one-dimensional
//! semilinear wave equation
//!
//! ```text
//! u_tt - a^2 u_xx + f(t, x, u, u_t, u_x) = F(t, x),   t > 0,
//! ```
//!
//! with initial data that jumps at a single point `x0`, computed by the
//! method of characteristics.
//!
//! The two characteristics through `(0, x0)` split the half-plane into three
//! regions. On the outer two the solution is that of an ordinary Cauchy
//! problem with one smooth piece of the data ([`cauchy`]). Between them it
//! solves a Goursat problem whose boundary values are the outer solutions
//! shifted by the prescribed jumps ([`goursat`]). [`assembly`] glues the three
//! together and classifies the discontinuity; [`verify`] holds independent
//! checks against closed forms, quadrature oracles and residuals.

pub mod assembly;
pub mod cauchy;
pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod goursat;
mod picard;
pub mod problem;
pub mod verify;

pub use assembly::{evaluate, solve, CaseKind, Evaluation, Solution};
pub use error::{Error, Result};
pub use field::{NodeValue, PicardReport, RegionField};
pub use geometry::Region;
pub use problem::{Grid, GridParams, PicardParams, ProblemSpec};
