//! Brute-force Karcher oracle shared by the oracle and acceptance tests. It
//! only evaluates distances: nested grids in the plane and the disk, and a
//! search over the river plus the vertical fibres through the anchors in the
//! river plane (the convex hull of the anchors lives on those lines).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hadamard_ergodic::{GeodesicSpace, SpaceHandle};

pub fn value(space: &SpaceHandle, anchors: &[Vec<f64>], x: &[f64]) -> f64 {
    anchors
        .iter()
        .map(|a| space.dist_coords(a, x).powi(2))
        .sum::<f64>()
        / anchors.len() as f64
}

/// Refines a grid around the best node until the spacing is `1e-9`.
fn grid_min(
    f: impl Fn(&[f64]) -> f64,
    lo: [f64; 2],
    hi: [f64; 2],
    admissible: impl Fn(&[f64]) -> bool,
) -> Vec<f64> {
    const M: usize = 60;
    let (mut lo, mut hi) = (lo, hi);
    let mut best = (f64::INFINITY, vec![0.0, 0.0]);
    loop {
        let step = [(hi[0] - lo[0]) / M as f64, (hi[1] - lo[1]) / M as f64];
        for i in 0..=M {
            for j in 0..=M {
                let x = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1]];
                if admissible(&x) {
                    let v = f(&x);
                    if v < best.0 {
                        best = (v, x.to_vec());
                    }
                }
            }
        }
        if step[0].max(step[1]) < 1e-9 {
            return best.1;
        }
        let c = &best.1;
        lo = [c[0] - 3.0 * step[0], c[1] - 3.0 * step[1]];
        hi = [c[0] + 3.0 * step[0], c[1] + 3.0 * step[1]];
    }
}

fn line_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const M: usize = 200;
    let (mut lo, mut hi) = (lo, hi);
    let mut best = (f64::INFINITY, 0.0);
    loop {
        let step = (hi - lo) / M as f64;
        for i in 0..=M {
            let s = lo + i as f64 * step;
            let v = f(s);
            if v < best.0 {
                best = (v, s);
            }
        }
        if step < 1e-11 {
            return (best.1, best.0);
        }
        lo = best.1 - 3.0 * step;
        hi = best.1 + 3.0 * step;
    }
}

pub fn oracle(space: &SpaceHandle, anchors: &[Vec<f64>]) -> Vec<f64> {
    let f = |x: &[f64]| value(space, anchors, x);
    match space {
        SpaceHandle::Euclidean(_) => grid_min(f, [-6.0, -6.0], [6.0, 6.0], |_| true),
        SpaceHandle::Disk(_) => grid_min(f, [-1.0, -1.0], [1.0, 1.0], |x| x[0].hypot(x[1]) < 0.99),
        SpaceHandle::River(_) => {
            let (s, v) = line_min(|s| f(&[s, 0.0]), -6.0, 6.0);
            let mut best = (v, vec![s, 0.0]);
            for a in anchors {
                let (y, v) = line_min(|y| f(&[a[0], y]), -6.0, 6.0);
                if v < best.0 {
                    best = (v, vec![a[0], y]);
                }
            }
            best.1
        }
    }
}

/// Up to six anchors; every third river problem puts all anchors on one fibre.
pub fn random_anchors(space: &SpaceHandle, rng: &mut ChaCha8Rng, case: usize) -> Vec<Vec<f64>> {
    let n = rng.random_range(1..=6);
    (0..n)
        .map(|_| match space {
            SpaceHandle::Disk(_) => {
                let (r, a): (f64, f64) = (
                    rng.random_range(0.0..0.9),
                    rng.random_range(0.0..std::f64::consts::TAU),
                );
                vec![r * a.cos(), r * a.sin()]
            }
            SpaceHandle::River(_) if case.is_multiple_of(3) => {
                vec![1.5, rng.random_range(-5.0..5.0)]
            }
            _ => vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)],
        })
        .collect()
}
