use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::metric::{GeodesicSpace, SampleRng, SpaceId};

/// The unit circle with its arc-length metric, coordinates are angles in
/// `[0, 2π)`. It is geodesic but positively curved, so it fails the CAT(0)
/// inequality; the geometry checks use it as a negative control.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CircleArc;

fn signed_delta(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

impl GeodesicSpace for CircleArc {
    fn id(&self) -> SpaceId {
        SpaceId::Circle
    }

    fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == 1 && (0.0..TAU).contains(&coords[0])
    }

    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        signed_delta(a[0], b[0]).abs()
    }

    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        if t == 1.0 {
            return b.to_vec();
        }
        vec![(a[0] + t * signed_delta(a[0], b[0])).rem_euclid(TAU)]
    }

    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64> {
        vec![rng.random_range(0.0..TAU)]
    }
}
