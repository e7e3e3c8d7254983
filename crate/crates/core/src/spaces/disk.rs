//! The Poincaré disk model of the hyperbolic plane, curvature −1.
//!
//! Distances follow `d(0, z) = 2 artanh |z|`, transported by the disk
//! automorphisms `φ_a(z) = (z − a) / (1 − āz)`. Tangent vectors are expressed
//! in the orthonormal frame obtained by pushing the standard frame at the
//! origin through `φ_a⁻¹`, so the length of a tangent vector is its
//! hyperbolic length.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::metric::{GeodesicSpace, Point, SampleRng, SpaceId};

/// Slack on the margin radius absorbing rounding in geodesic constructions.
const RADIUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareDisk {
    boundary_margin: f64,
}

impl Default for PoincareDisk {
    fn default() -> Self {
        PoincareDisk {
            boundary_margin: 0.05,
        }
    }
}

pub(crate) fn c(coords: &[f64]) -> Complex64 {
    Complex64::new(coords[0], coords[1])
}

pub(crate) fn v(z: Complex64) -> Vec<f64> {
    vec![z.re, z.im]
}

/// `φ_a(z) = (z − a) / (1 − āz)`, the automorphism sending `a` to 0.
pub(crate) fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

pub(crate) fn dist_c(a: Complex64, b: Complex64) -> f64 {
    2.0 * mobius(a, b).norm().min(1.0).atanh()
}

/// Log map in the orthonormal frame at `base`.
pub(crate) fn log_c(base: Complex64, target: Complex64) -> Complex64 {
    let w = mobius(base, target);
    let r = w.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    w * (2.0 * r.min(1.0).atanh() / r)
}

/// Exponential map; may leave the margin region.
pub(crate) fn exp_c(base: Complex64, tangent: Complex64) -> Complex64 {
    let n = tangent.norm();
    if n == 0.0 {
        return base;
    }
    let w = tangent * ((0.5 * n).tanh() / n);
    mobius(-base, w)
}

impl PoincareDisk {
    pub fn new(boundary_margin: f64) -> Result<Self> {
        if !(boundary_margin > 0.0 && boundary_margin < 1.0) {
            return Err(Error::OutOfRange {
                name: "boundary_margin",
                value: boundary_margin,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(PoincareDisk { boundary_margin })
    }

    pub fn boundary_margin(&self) -> f64 {
        self.boundary_margin
    }

    /// Largest admissible Euclidean radius.
    pub fn max_radius(&self) -> f64 {
        1.0 - self.boundary_margin
    }

    fn admissible(&self, z: Complex64) -> bool {
        z.re.is_finite() && z.im.is_finite() && z.norm() <= self.max_radius() + RADIUS_SLACK
    }

    pub(crate) fn checked(&self, z: Complex64) -> Result<Point> {
        if self.admissible(z) {
            Ok(Point::from_raw(SpaceId::Disk, v(z)))
        } else {
            Err(Error::BoundaryExcursion {
                space: SpaceId::Disk,
                coords: v(z),
            })
        }
    }

    /// Tangent vector at `base` pointing to `target`, with length equal to
    /// their hyperbolic distance.
    pub fn disk_log(&self, base: &Point, target: &Point) -> Result<[f64; 2]> {
        for p in [base, target] {
            self.check(p)?;
            if !self.admissible(c(p.coords())) {
                return Err(Error::NotInSpace {
                    space: SpaceId::Disk,
                    coords: p.coords().to_vec(),
                });
            }
        }
        let l = log_c(c(base.coords()), c(target.coords()));
        Ok([l.re, l.im])
    }

    /// Follows the geodesic from `base` with initial velocity `tangent` for
    /// unit time. Excursions beyond the margin are an error.
    pub fn disk_exp(&self, base: &Point, tangent: [f64; 2]) -> Result<Point> {
        self.check(base)?;
        let z = exp_c(c(base.coords()), Complex64::new(tangent[0], tangent[1]));
        self.checked(z)
    }
}

impl GeodesicSpace for PoincareDisk {
    fn id(&self) -> SpaceId {
        SpaceId::Disk
    }

    fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == 2 && self.admissible(c(coords))
    }

    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        dist_c(c(a), c(b))
    }

    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        if t == 0.0 {
            return a.to_vec();
        }
        if t == 1.0 {
            return b.to_vec();
        }
        let (za, zb) = (c(a), c(b));
        let w = mobius(za, zb);
        let r = w.norm();
        if r == 0.0 {
            return a.to_vec();
        }
        let wt = w * ((t * r.min(1.0).atanh()).tanh() / r);
        v(mobius(-za, wt))
    }

    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64> {
        let r = rng.random_range(0.0..=0.95f64.min(self.max_radius()));
        let theta = rng.random_range(0.0..TAU);
        vec![r * theta.cos(), r * theta.sin()]
    }
}
