//! Geodesic metric spaces and the point type shared by every other module.
//!
//! A space is anything implementing [`GeodesicSpace`]: a membership predicate,
//! a distance and a constant-speed geodesic `x_t = (1-t) x_0 ⊕ t x_1`. The
//! checked entry points ([`GeodesicSpace::distance`],
//! [`GeodesicSpace::geodesic_point`]) validate that points carry the right
//! space tag; the `*_coords` methods are the raw oracles used in inner loops.

use std::fmt;

use rand::SeedableRng;

use crate::error::{Error, Result};

pub mod center;
pub mod checks;
pub mod convex;

pub use center::{estimate_asymptotic_center, AsymptoticCenter};
pub use checks::{
    check_cat0_sample, check_cauchy_schwarz_sample, check_geodesic_sample, check_metric_sample,
    check_q4bar_sample, check_quasi_identities_sample, geometry_suite, ViolationReport, Witness,
    SUITE_Q4_GRID,
};
pub use convex::{check_projection_sample, project_convex, ConvexSet};

/// Tolerance ladder used across the crate.
pub mod tol {
    /// Algebraic identities (quasi-inner product, closed forms).
    pub const ALGEBRAIC: f64 = 1e-10;
    /// Geodesic and projection contracts.
    pub const CONTRACT: f64 = 1e-9;
    /// Iterative-solver certificates.
    pub const CERTIFICATE: f64 = 1e-6;
}

/// Deterministic generator used by every sampler.
pub type SampleRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

/// Identifies the space a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceId {
    Euclidean(usize),
    River,
    Disk,
    /// Arc-length circle; a non-CAT(0) control space.
    Circle,
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceId::Euclidean(dim) => write!(f, "euclidean:{dim}"),
            SpaceId::River => f.write_str("river"),
            SpaceId::Disk => f.write_str("disk"),
            SpaceId::Circle => f.write_str("circle"),
        }
    }
}

/// A point tagged with the space that owns its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
    space: SpaceId,
}

impl Point {
    /// Builds a point without checking membership. Callers inside the crate
    /// use this only for coordinates produced by the space's own oracles.
    pub(crate) fn from_raw(space: SpaceId, coords: Vec<f64>) -> Self {
        Point { coords, space }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A uniquely geodesic metric space with closed-form oracles.
pub trait GeodesicSpace {
    fn id(&self) -> SpaceId;

    /// Membership predicate on raw coordinates.
    fn contains(&self, coords: &[f64]) -> bool;

    /// Distance between raw coordinates of two members.
    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64;

    /// Point at parameter `t` of the geodesic from `a` to `b`; `t ∈ [0, 1]`.
    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64>;

    /// Draws a member from the space's sampling distribution.
    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64>;

    fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.iter().all(|c| c.is_finite()) && self.contains(&coords) {
            Ok(Point::from_raw(self.id(), coords))
        } else {
            Err(Error::NotInSpace {
                space: self.id(),
                coords,
            })
        }
    }

    fn sample(&self, rng: &mut SampleRng) -> Point {
        Point::from_raw(self.id(), self.sample_coords(rng))
    }

    /// Rejects points owned by another space.
    fn check(&self, p: &Point) -> Result<()> {
        if p.space == self.id() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.id(),
                found: p.space,
            })
        }
    }

    fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist_coords(&a.coords, &b.coords))
    }

    fn geodesic_point(&self, a: &Point, b: &Point, t: f64) -> Result<Point> {
        self.check(a)?;
        self.check(b)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                reason: "geodesic parameter must lie in [0, 1]",
            });
        }
        Ok(Point::from_raw(
            self.id(),
            self.geodesic_coords(&a.coords, &b.coords, t),
        ))
    }
}

impl<S: GeodesicSpace + ?Sized> GeodesicSpace for &S {
    fn id(&self) -> SpaceId {
        (**self).id()
    }
    fn contains(&self, coords: &[f64]) -> bool {
        (**self).contains(coords)
    }
    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        (**self).dist_coords(a, b)
    }
    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        (**self).geodesic_coords(a, b, t)
    }
    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64> {
        (**self).sample_coords(rng)
    }
}

pub(crate) fn quasi_inner_coords<S: GeodesicSpace + ?Sized>(
    space: &S,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
) -> f64 {
    let sq = |x: &[f64], y: &[f64]| {
        let r = space.dist_coords(x, y);
        r * r
    };
    0.5 * (sq(a, d) + sq(b, c) - sq(a, c) - sq(b, d))
}

/// Quasi-inner product `⟨ab, cd⟩ = ½{d²(a,d) + d²(b,c) − d²(a,c) − d²(b,d)}`.
pub fn quasi_inner<S: GeodesicSpace + ?Sized>(
    space: &S,
    a: &Point,
    b: &Point,
    c: &Point,
    d: &Point,
) -> Result<f64> {
    for p in [a, b, c, d] {
        space.check(p)?;
    }
    Ok(quasi_inner_coords(
        space, &a.coords, &b.coords, &c.coords, &d.coords,
    ))
}
