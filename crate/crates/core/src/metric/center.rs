//! Finite-window estimate of the asymptotic center.
//!
//! The asymptotic center of a sequence minimizes `x ↦ limsup d(x, xₙ)`. Only
//! a finite tail window is ever available, so the estimate minimizes
//! `x ↦ maxᵢ d(x, wᵢ)` over the window instead and is always flagged as
//! approximate.

use super::{GeodesicSpace, Point};
use crate::error::{Error, Result};
use crate::frechet::{FrechetProblem, KarcherSolver};
use crate::spaces::SpaceHandle;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCenter {
    pub center: Point,
    pub radius: f64,
    /// Always `true`: the estimate only sees a finite window.
    pub approximate: bool,
}

const STEP_FLOOR: f64 = 1e-9;

fn radius(space: &SpaceHandle, c: &[f64], window: &[Point]) -> f64 {
    window
        .iter()
        .map(|w| space.dist_coords(c, w.coords()))
        .fold(0.0, f64::max)
}

/// Seeds at the window's Karcher mean, runs geodesic steps toward the
/// farthest point with shrinking weights, then polishes with a pattern
/// search along geodesics until the step falls below `1e-9`.
pub fn estimate_asymptotic_center(
    space: &SpaceHandle,
    window: &[Point],
) -> Result<AsymptoticCenter> {
    if window.is_empty() {
        return Err(Error::InvalidProblem("empty window".into()));
    }
    let problem = FrechetProblem::uniform(*space, window.to_vec())?;
    let mut c = KarcherSolver::new(1e-12).minimize(&problem)?.into_coords();
    let mut r = radius(space, &c, window);

    let mut walker = c.clone();
    for i in 1..=500 {
        let far = window
            .iter()
            .max_by(|a, b| {
                space
                    .dist_coords(&walker, a.coords())
                    .total_cmp(&space.dist_coords(&walker, b.coords()))
            })
            .unwrap();
        walker = space.geodesic_coords(&walker, far.coords(), 1.0 / (i as f64 + 1.0));
        let rw = radius(space, &walker, window);
        if rw < r {
            r = rw;
            c = walker.clone();
        }
    }

    let mut step = r.max(STEP_FLOOR);
    while step >= STEP_FLOOR {
        // Directions: every window point and the midpoints between the
        // three farthest ones.
        let mut by_distance: Vec<&Point> = window.iter().collect();
        by_distance.sort_by(|a, b| {
            space
                .dist_coords(&c, b.coords())
                .total_cmp(&space.dist_coords(&c, a.coords()))
        });
        let mut targets: Vec<Vec<f64>> = window.iter().map(|w| w.coords().to_vec()).collect();
        let top = &by_distance[..by_distance.len().min(3)];
        for i in 0..top.len() {
            for j in i + 1..top.len() {
                targets.push(space.geodesic_coords(top[i].coords(), top[j].coords(), 0.5));
            }
        }
        let mut improved = false;
        for target in &targets {
            let d = space.dist_coords(&c, target);
            if d == 0.0 {
                continue;
            }
            let candidate = space.geodesic_coords(&c, target, (step / d).min(1.0));
            let rc = radius(space, &candidate, window);
            if rc < r - 1e-15 {
                c = candidate;
                r = rc;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(AsymptoticCenter {
        center: Point::from_raw(space.id(), c),
        radius: r,
        approximate: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_point_window() {
        let e = SpaceHandle::euclidean(2);
        let p = e.point(vec![1.5, -2.0]).unwrap();
        let ac = estimate_asymptotic_center(&e, std::slice::from_ref(&p)).unwrap();
        assert_eq!(ac.center, p);
        assert_eq!(ac.radius, 0.0);
        assert!(ac.approximate);
    }

    #[test]
    fn two_points_give_the_midpoint() {
        let e = SpaceHandle::euclidean(2);
        let w = vec![
            e.point(vec![-1.0, 0.0]).unwrap(),
            e.point(vec![1.0, 0.0]).unwrap(),
        ];
        let ac = estimate_asymptotic_center(&e, &w).unwrap();
        assert_abs_diff_eq!(ac.center.coords()[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ac.center.coords()[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ac.radius, 1.0, epsilon = 1e-9);

        let r = SpaceHandle::river();
        let w = vec![
            r.point(vec![-2.0, 1.0]).unwrap(),
            r.point(vec![2.0, 1.0]).unwrap(),
        ];
        let ac = estimate_asymptotic_center(&r, &w).unwrap();
        assert_eq!(ac.center.coords(), &[0.0, 0.0]);
        assert_eq!(ac.radius, 3.0);
    }

    #[test]
    fn acute_triangle_circumcenter() {
        let e = SpaceHandle::euclidean(2);
        let w: Vec<Point> = [[0.0, 0.0], [4.0, 0.0], [1.0, 3.0]]
            .iter()
            .map(|c| e.point(c.to_vec()).unwrap())
            .collect();
        // Circumcenter of this acute triangle is (2, 1), radius √5.
        let ac = estimate_asymptotic_center(&e, &w).unwrap();
        assert_abs_diff_eq!(ac.radius, 5f64.sqrt(), epsilon = 1e-7);
        assert_abs_diff_eq!(ac.center.coords()[0], 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(ac.center.coords()[1], 1.0, epsilon = 1e-6);
    }
}
