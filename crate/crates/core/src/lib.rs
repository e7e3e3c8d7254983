//! Karcher-mean ergodic averages on Hadamard spaces.
//!
//! The crate builds orbits of nonexpansive maps and trajectories of
//! contraction semigroups on three model Hadamard spaces (Euclidean space,
//! the river-metric plane and the Poincaré disk), averages them with Karcher
//! means, and checks the geometric inequalities and convergence diagnostics
//! that govern those averages.
//!
//! * [`metric`]: the geodesic-space interface, quasi-inner product,
//!   inequality samplers, convex projections and asymptotic centers.
//! * [`spaces`]: the shipped model spaces.
//! * [`frechet`]: Fréchet functionals, certified Karcher means.
//! * [`nonexpansive`]: a catalog of nonexpansive maps.
//! * [`ergodic`]: orbits, mean sequences, diagnostics and verdicts.
//! * [`semigroup`]: flows of monotone vector fields and their time averages.
//! * [`experiment`]: config files, batch runs and CSV traces.

pub mod ergodic;
pub mod error;
pub mod experiment;
pub mod frechet;
pub mod metric;
pub mod nonexpansive;
pub mod semigroup;
pub mod spaces;
mod text;

pub use error::{Error, Result};
pub use metric::{GeodesicSpace, Point, SpaceId};
pub use spaces::SpaceHandle;
