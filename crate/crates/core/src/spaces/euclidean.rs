use rand_distr::{Distribution, StandardNormal};

use crate::metric::{GeodesicSpace, SampleRng, SpaceId};

/// `ℝⁿ` with the ℓ₂ metric; geodesics are straight segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EuclideanSpace {
    dim: usize,
}

impl EuclideanSpace {
    /// # Panics
    /// If `dim` is zero.
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "euclidean dimension must be positive");
        EuclideanSpace { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl GeodesicSpace for EuclideanSpace {
    fn id(&self) -> SpaceId {
        SpaceId::Euclidean(self.dim)
    }

    fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim
    }

    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| (1.0 - t) * x + t * y)
            .collect()
    }

    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64> {
        (0..self.dim).map(|_| StandardNormal.sample(rng)).collect()
    }
}
