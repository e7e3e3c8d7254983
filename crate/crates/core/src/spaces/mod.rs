//! The shipped Hadamard model spaces.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metric::{GeodesicSpace, SampleRng, SpaceId};

mod circle;
mod disk;
mod euclidean;
mod river;

pub use circle::CircleArc;
pub use disk::PoincareDisk;
pub use euclidean::EuclideanSpace;
pub use river::{river_canonical_path, RiverPath, RiverPlane};

pub(crate) use disk::{c as to_complex, dist_c, exp_c, log_c, mobius};

/// One of the shipped spaces, selected at run time.
///
/// Parses from and prints as `euclidean:<dim>`, `river` or `disk:<margin>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceHandle {
    Euclidean(EuclideanSpace),
    River(RiverPlane),
    Disk(PoincareDisk),
}

impl SpaceHandle {
    pub fn euclidean(dim: usize) -> Self {
        SpaceHandle::Euclidean(EuclideanSpace::new(dim))
    }

    pub fn river() -> Self {
        SpaceHandle::River(RiverPlane)
    }

    pub fn disk(margin: f64) -> Result<Self> {
        Ok(SpaceHandle::Disk(PoincareDisk::new(margin)?))
    }

    pub fn as_disk(&self) -> Option<&PoincareDisk> {
        match self {
            SpaceHandle::Disk(d) => Some(d),
            _ => None,
        }
    }

    /// Length of a coordinate tuple in this space.
    pub fn coord_len(&self) -> usize {
        match self {
            SpaceHandle::Euclidean(e) => e.dim(),
            SpaceHandle::River(_) | SpaceHandle::Disk(_) => 2,
        }
    }
}

macro_rules! delegate {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            SpaceHandle::Euclidean($s) => $e,
            SpaceHandle::River($s) => $e,
            SpaceHandle::Disk($s) => $e,
        }
    };
}

impl GeodesicSpace for SpaceHandle {
    fn id(&self) -> SpaceId {
        delegate!(self, s => s.id())
    }

    fn contains(&self, coords: &[f64]) -> bool {
        delegate!(self, s => s.contains(coords))
    }

    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        delegate!(self, s => s.dist_coords(a, b))
    }

    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        delegate!(self, s => s.geodesic_coords(a, b, t))
    }

    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64> {
        delegate!(self, s => s.sample_coords(rng))
    }
}

impl fmt::Display for SpaceHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceHandle::Euclidean(e) => write!(f, "euclidean:{}", e.dim()),
            SpaceHandle::River(_) => f.write_str("river"),
            SpaceHandle::Disk(d) => write!(f, "disk:{}", d.boundary_margin()),
        }
    }
}

impl FromStr for SpaceHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let invalid = |reason: &str| Error::InvalidProblem(format!("space `{s}`: {reason}"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s, None),
        };
        match (kind, arg) {
            ("euclidean", Some(dim)) => match dim.parse::<usize>() {
                Ok(d) if d > 0 => Ok(SpaceHandle::euclidean(d)),
                _ => Err(invalid("dimension must be a positive integer")),
            },
            ("euclidean", None) => Err(invalid("missing dimension, expected euclidean:<dim>")),
            ("river", None) => Ok(SpaceHandle::river()),
            ("disk", None) => Ok(SpaceHandle::Disk(PoincareDisk::default())),
            ("disk", Some(m)) => {
                let margin = m
                    .parse::<f64>()
                    .map_err(|_| invalid("margin must be a number"))?;
                SpaceHandle::disk(margin)
            }
            _ => Err(invalid("unknown space kind")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for text in ["euclidean:3", "river", "disk:0.05", "disk:0.2"] {
            let h: SpaceHandle = text.parse().unwrap();
            assert_eq!(h.to_string(), text);
        }
        assert_eq!(
            "disk".parse::<SpaceHandle>().unwrap().to_string(),
            "disk:0.05"
        );
        for bad in ["euclidean:0", "euclidean", "sphere", "disk:1.5", "disk:x"] {
            assert!(bad.parse::<SpaceHandle>().is_err(), "{bad}");
        }
    }

    #[test]
    fn distance_examples() {
        let e = SpaceHandle::euclidean(2);
        let a = e.point(vec![0.0, 0.0]).unwrap();
        let b = e.point(vec![3.0, 4.0]).unwrap();
        assert_eq!(e.distance(&a, &b).unwrap(), 5.0);

        let r = SpaceHandle::river();
        let p = |x: f64, y: f64| r.point(vec![x, y]).unwrap();
        assert_eq!(r.distance(&p(1.0, 2.0), &p(1.0, 5.0)).unwrap(), 3.0);
        assert_eq!(r.distance(&p(0.0, 1.0), &p(2.0, 3.0)).unwrap(), 6.0);
    }

    #[test]
    fn mixing_spaces_is_an_error() {
        let e = SpaceHandle::euclidean(2);
        let r = SpaceHandle::river();
        let a = e.point(vec![0.0, 0.0]).unwrap();
        let b = r.point(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            e.distance(&a, &b),
            Err(Error::SpaceMismatch { .. })
        ));
        assert!(matches!(
            r.geodesic_point(&b, &a, 0.5),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn geodesic_parameter_out_of_range() {
        let e = SpaceHandle::euclidean(2);
        let a = e.point(vec![0.0, 0.0]).unwrap();
        let b = e.point(vec![2.0, 2.0]).unwrap();
        assert_eq!(e.geodesic_point(&a, &b, 0.5).unwrap().coords(), &[1.0, 1.0]);
        assert_eq!(e.geodesic_point(&a, &b, 0.0).unwrap(), a);
        assert!(matches!(
            e.geodesic_point(&a, &b, 1.5),
            Err(Error::OutOfRange { name: "t", .. })
        ));
    }
}
