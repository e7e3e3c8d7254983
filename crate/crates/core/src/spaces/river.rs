//! The plane with the river metric.
//!
//! Travel between points with the same abscissa goes straight along the
//! vertical line; otherwise it goes down to the x-axis (the river), along it,
//! and up again:
//!
//! ```text
//! r((x,y),(x',y')) = |y − y'|              if x = x'
//!                    |y| + |y'| + |x − x'| otherwise
//! ```
//!
//! The result is an ℝ-tree, so geodesics are the unique tree paths.

use rand::Rng;

use crate::metric::{GeodesicSpace, SampleRng, SpaceId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RiverPlane;

/// Piecewise-linear tree path between two points, with cumulative arclength
/// at each breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct RiverPath {
    pub breakpoints: Vec<[f64; 2]>,
    pub cumulative: Vec<f64>,
}

impl RiverPath {
    pub fn length(&self) -> f64 {
        *self
            .cumulative
            .last()
            .expect("path has at least one breakpoint")
    }

    /// Point at arclength `s` from the start, clamped to the path. A value
    /// landing exactly on a breakpoint is resolved on the earlier segment.
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        let n = self.breakpoints.len();
        if n == 1 || s <= 0.0 {
            return self.breakpoints[0];
        }
        let seg = (0..n - 1)
            .find(|&j| self.cumulative[j + 1] >= s)
            .unwrap_or(n - 2);
        let (p, q) = (self.breakpoints[seg], self.breakpoints[seg + 1]);
        let len = self.cumulative[seg + 1] - self.cumulative[seg];
        let u = ((s - self.cumulative[seg]) / len).clamp(0.0, 1.0);
        [p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])]
    }
}

/// The tree path `a → (aₓ,0) → (bₓ,0) → b`, or the vertical segment when
/// the abscissas agree, with zero-length legs dropped.
pub fn river_canonical_path(a: [f64; 2], b: [f64; 2]) -> RiverPath {
    let candidates: Vec<[f64; 2]> = if a[0] == b[0] {
        vec![a, b]
    } else {
        vec![a, [a[0], 0.0], [b[0], 0.0], b]
    };
    let mut breakpoints: Vec<[f64; 2]> = Vec::with_capacity(4);
    for p in candidates {
        if breakpoints.last() != Some(&p) {
            breakpoints.push(p);
        }
    }
    let mut cumulative = vec![0.0];
    for w in breakpoints.windows(2) {
        // Each leg is axis-parallel.
        let leg = (w[1][0] - w[0][0]).abs() + (w[1][1] - w[0][1]).abs();
        cumulative.push(cumulative.last().unwrap() + leg);
    }
    RiverPath {
        breakpoints,
        cumulative,
    }
}

pub(crate) fn river_dist(a: &[f64], b: &[f64]) -> f64 {
    if a[0] == b[0] {
        (a[1] - b[1]).abs()
    } else {
        a[1].abs() + b[1].abs() + (a[0] - b[0]).abs()
    }
}

impl GeodesicSpace for RiverPlane {
    fn id(&self) -> SpaceId {
        SpaceId::River
    }

    fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == 2
    }

    fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        river_dist(a, b)
    }

    fn geodesic_coords(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        if t == 0.0 {
            return a.to_vec();
        }
        if t == 1.0 {
            return b.to_vec();
        }
        let path = river_canonical_path([a[0], a[1]], [b[0], b[1]]);
        path.point_at(t * path.length()).to_vec()
    }

    fn sample_coords(&self, rng: &mut SampleRng) -> Vec<f64> {
        vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_abscissa_is_a_vertical_segment() {
        let path = river_canonical_path([1.0, 2.0], [1.0, 5.0]);
        assert_eq!(path.breakpoints, vec![[1.0, 2.0], [1.0, 5.0]]);
        assert_eq!(path.length(), 3.0);
        assert_eq!(river_dist(&[1.0, 2.0], &[1.0, 5.0]), 3.0);
    }

    #[test]
    fn distinct_abscissas_route_through_the_river() {
        let path = river_canonical_path([0.0, 1.0], [2.0, 3.0]);
        assert_eq!(
            path.breakpoints,
            vec![[0.0, 1.0], [0.0, 0.0], [2.0, 0.0], [2.0, 3.0]]
        );
        assert_eq!(path.cumulative, vec![0.0, 1.0, 3.0, 6.0]);
        assert_eq!(river_dist(&[0.0, 1.0], &[2.0, 3.0]), 6.0);
    }

    #[test]
    fn degenerate_path() {
        let path = river_canonical_path([4.0, -1.0], [4.0, -1.0]);
        assert_eq!(path.breakpoints.len(), 1);
        assert_eq!(path.length(), 0.0);
        assert_eq!(path.point_at(0.0), [4.0, -1.0]);
    }

    #[test]
    fn legs_on_the_axis_are_dropped() {
        let path = river_canonical_path([0.0, 0.0], [3.0, -2.0]);
        assert_eq!(path.breakpoints, vec![[0.0, 0.0], [3.0, 0.0], [3.0, -2.0]]);
        assert_eq!(path.length(), 5.0);
    }

    #[test]
    fn midpoint_by_arclength() {
        let g = RiverPlane.geodesic_coords(&[0.0, 1.0], &[2.0, 3.0], 0.5);
        assert_eq!(g, vec![2.0, 0.0]);
        // A breakpoint lookup stays on the earlier segment.
        let path = river_canonical_path([0.0, 1.0], [2.0, 3.0]);
        assert_eq!(path.point_at(1.0), [0.0, 0.0]);
    }
}
