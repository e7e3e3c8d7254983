//! Closed convex sets with closed-form metric projections.
//!
//! Every projector returns the nearest point of the set, which in a Hadamard
//! space satisfies `d²(x, Pₛx) + d²(Pₛx, y) ≤ d²(x, y)` for every `y` in the
//! set. [`check_projection_sample`] verifies that inequality together with
//! membership and nonexpansiveness of the projector.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use super::{seeded_rng, GeodesicSpace, Point, SampleRng, ViolationReport, Witness};
use crate::error::{Error, Result};
use crate::spaces::{mobius, to_complex, SpaceHandle};

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// The whole space.
    Whole,
    Singleton(Point),
    /// Geodesic segment `[a, b]`.
    Segment(Point, Point),
    /// `F(near, far) = {z : d(near, z) ≤ d(z, far)}`.
    HalfSpace {
        near: Point,
        far: Point,
    },
    /// The first coordinate axis: the line `{(s, 0, …)}` in Euclidean space,
    /// the river itself in the river plane, the real diameter in the disk.
    XAxis,
    /// River-plane subtree `[x_lo, x_hi] × [y_lo, y_hi]`. Unless the
    /// abscissa range is a single point it must straddle the river.
    RiverBox {
        x: (f64, f64),
        y: (f64, f64),
    },
}

impl fmt::Display for ConvexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexSet::Whole => f.write_str("whole space"),
            ConvexSet::Singleton(p) => write!(f, "{{{p}}}"),
            ConvexSet::Segment(a, b) => write!(f, "[{a}, {b}]"),
            ConvexSet::HalfSpace { near, far } => write!(f, "F({near}, {far})"),
            ConvexSet::XAxis => f.write_str("x-axis"),
            ConvexSet::RiverBox { x, y } => {
                write!(f, "[{}, {}] x [{}, {}]", x.0, x.1, y.0, y.1)
            }
        }
    }
}

impl ConvexSet {
    pub fn river_box(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        let ordered = x.0 <= x.1 && y.0 <= y.1;
        let connected = x.0 == x.1 || (y.0 <= 0.0 && 0.0 <= y.1);
        if !ordered || !connected {
            return Err(Error::InvalidProblem(format!(
                "river box [{}, {}] x [{}, {}] is not a convex subtree",
                x.0, x.1, y.0, y.1
            )));
        }
        Ok(ConvexSet::RiverBox { x, y })
    }

    fn unsupported(&self, space: &SpaceHandle) -> Error {
        Error::Unsupported {
            what: format!("projection onto {self}"),
            space: space.id(),
        }
    }

    fn points(&self) -> Vec<&Point> {
        match self {
            ConvexSet::Singleton(p) => vec![p],
            ConvexSet::Segment(a, b) => vec![a, b],
            ConvexSet::HalfSpace { near, far } => vec![near, far],
            _ => vec![],
        }
    }

    /// Membership up to `tol`.
    pub fn contains(&self, space: &SpaceHandle, x: &Point, tol: f64) -> Result<bool> {
        space.check(x)?;
        for p in self.points() {
            space.check(p)?;
        }
        let d = |a: &Point, b: &Point| space.dist_coords(a.coords(), b.coords());
        let c = x.coords();
        Ok(match self {
            ConvexSet::Whole => true,
            ConvexSet::Singleton(p) => d(p, x) <= tol,
            ConvexSet::Segment(a, b) => d(a, x) + d(x, b) - d(a, b) <= tol,
            ConvexSet::HalfSpace { near, far } => d(near, x) <= d(x, far) + tol,
            ConvexSet::XAxis => c[1..].iter().all(|v| v.abs() <= tol),
            ConvexSet::RiverBox { x: xr, y: yr } => {
                if !matches!(space, SpaceHandle::River(_)) {
                    return Err(self.unsupported(space));
                }
                c[0] >= xr.0 - tol && c[0] <= xr.1 + tol && c[1] >= yr.0 - tol && c[1] <= yr.1 + tol
            }
        })
    }

    /// Draws a member of the set.
    pub fn sample_member(&self, space: &SpaceHandle, rng: &mut SampleRng) -> Result<Point> {
        let id = space.id();
        Ok(match self {
            ConvexSet::Whole => space.sample(rng),
            ConvexSet::Singleton(p) => p.clone(),
            ConvexSet::Segment(a, b) => {
                let t: f64 = rng.random();
                space.geodesic_point(a, b, t)?
            }
            ConvexSet::HalfSpace { .. } => {
                for _ in 0..1000 {
                    let z = space.sample(rng);
                    if self.contains(space, &z, 0.0)? {
                        return Ok(z);
                    }
                }
                let z = space.sample(rng);
                project_convex(space, self, &z)?
            }
            ConvexSet::XAxis => {
                let mut c = vec![0.0; space.coord_len()];
                c[0] = match space {
                    SpaceHandle::Euclidean(_) => {
                        rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)
                    }
                    SpaceHandle::River(_) => rng.random_range(-5.0..5.0),
                    SpaceHandle::Disk(disk) => {
                        let r = 0.95f64.min(disk.max_radius());
                        rng.random_range(-r..=r)
                    }
                };
                Point::from_raw(id, c)
            }
            ConvexSet::RiverBox { x, y } => {
                let bounded = |lo: f64, hi: f64| (lo.max(-5.0).min(hi), hi.min(5.0).max(lo));
                let (x0, x1) = bounded(x.0, x.1);
                let (y0, y1) = bounded(y.0, y.1);
                let px = if x0 < x1 {
                    rng.random_range(x0..=x1)
                } else {
                    x0
                };
                let py = if y0 < y1 {
                    rng.random_range(y0..=y1)
                } else {
                    y0
                };
                Point::from_raw(id, vec![px, py])
            }
        })
    }
}

/// Euclidean parameter of the foot of the perpendicular from `w` onto the
/// imaginary diameter of the Poincaré disk, i.e. the foot is `i·s`.
fn disk_foot_on_imaginary(w: Complex64) -> f64 {
    if w.im == 0.0 {
        return 0.0;
    }
    // The perpendicular geodesic is the circle centred at i·k orthogonal to
    // the unit circle, k = (|w|² + 1) / (2 Im w).
    let k = (w.norm_sqr() + 1.0) / (2.0 * w.im);
    k.signum() / (k.abs() + (k * k - 1.0).max(0.0).sqrt())
}

fn disk_foot_on_real(w: Complex64) -> f64 {
    disk_foot_on_imaginary(Complex64::i() * w)
}

fn disk_point(z: Complex64) -> Point {
    Point::from_raw(crate::metric::SpaceId::Disk, vec![z.re, z.im])
}

/// Nearest point of `set` to `x`.
pub fn project_convex(space: &SpaceHandle, set: &ConvexSet, x: &Point) -> Result<Point> {
    space.check(x)?;
    for p in set.points() {
        space.check(p)?;
    }
    let id = space.id();
    let xc = x.coords();
    match (set, space) {
        (ConvexSet::Whole, _) => Ok(x.clone()),
        (ConvexSet::Singleton(p), _) => Ok(p.clone()),

        (ConvexSet::Segment(a, b), SpaceHandle::Euclidean(_)) => {
            let (ac, bc) = (a.coords(), b.coords());
            let len2: f64 = ac.iter().zip(bc).map(|(p, q)| (q - p) * (q - p)).sum();
            if len2 == 0.0 {
                return Ok(a.clone());
            }
            let dot: f64 = xc
                .iter()
                .zip(ac)
                .zip(bc)
                .map(|((x, p), q)| (x - p) * (q - p))
                .sum();
            space.geodesic_point(a, b, (dot / len2).clamp(0.0, 1.0))
        }
        (ConvexSet::Segment(a, b), SpaceHandle::River(_)) => {
            // In an ℝ-tree the path from x meets [a, b] at distance
            // (d(a,x) + d(a,b) − d(b,x)) / 2 from a.
            let d = |p: &[f64], q: &[f64]| space.dist_coords(p, q);
            let ab = d(a.coords(), b.coords());
            if ab == 0.0 {
                return Ok(a.clone());
            }
            let s = 0.5 * (d(a.coords(), xc) + ab - d(b.coords(), xc));
            space.geodesic_point(a, b, (s / ab).clamp(0.0, 1.0))
        }
        (ConvexSet::Segment(a, b), SpaceHandle::Disk(_)) => {
            let (za, zb) = (to_complex(a.coords()), to_complex(b.coords()));
            let bb = mobius(za, zb);
            let len = bb.norm();
            if len == 0.0 {
                return Ok(a.clone());
            }
            let rot = bb.conj() / len;
            let s = disk_foot_on_real(mobius(za, to_complex(xc)) * rot);
            if s <= 0.0 {
                Ok(a.clone())
            } else if s >= len {
                Ok(b.clone())
            } else {
                Ok(disk_point(mobius(-za, Complex64::new(s, 0.0) / rot)))
            }
        }

        (ConvexSet::HalfSpace { near, far }, _) => {
            if set.contains(space, x, 0.0)? {
                return Ok(x.clone());
            }
            match space {
                SpaceHandle::Euclidean(_) => {
                    let (p, v) = (near.coords(), far.coords());
                    let n: Vec<f64> = p.iter().zip(v).map(|(p, v)| v - p).collect();
                    let n2: f64 = n.iter().map(|c| c * c).sum();
                    let off: f64 = xc
                        .iter()
                        .zip(p.iter().zip(v))
                        .zip(&n)
                        .map(|((x, (p, v)), n)| (x - 0.5 * (p + v)) * n)
                        .sum();
                    let coords = xc.iter().zip(&n).map(|(x, n)| x - off / n2 * n).collect();
                    Ok(Point::from_raw(id, coords))
                }
                // Outside points reach F(p, v) through the midpoint of [p, v].
                SpaceHandle::River(_) => space.geodesic_point(near, far, 0.5),
                SpaceHandle::Disk(_) => {
                    let m = to_complex(&space.geodesic_coords(near.coords(), far.coords(), 0.5));
                    let vv = mobius(m, to_complex(far.coords()));
                    let rot = vv.conj() / vv.norm();
                    let w = mobius(m, to_complex(xc)) * rot;
                    let foot = Complex64::new(0.0, disk_foot_on_imaginary(w));
                    Ok(disk_point(mobius(-m, foot / rot)))
                }
            }
        }

        (ConvexSet::XAxis, SpaceHandle::Euclidean(_)) => {
            let mut c = vec![0.0; xc.len()];
            c[0] = xc[0];
            Ok(Point::from_raw(id, c))
        }
        (ConvexSet::XAxis, SpaceHandle::River(_)) => Ok(Point::from_raw(id, vec![xc[0], 0.0])),
        (ConvexSet::XAxis, SpaceHandle::Disk(_)) => {
            let s = disk_foot_on_real(to_complex(xc));
            Ok(disk_point(Complex64::new(s, 0.0)))
        }

        (ConvexSet::RiverBox { x: xr, y: yr }, SpaceHandle::River(_)) => {
            let coords = if xc[0] >= xr.0 && xc[0] <= xr.1 {
                vec![xc[0], xc[1].clamp(yr.0, yr.1)]
            } else {
                vec![xc[0].clamp(xr.0, xr.1), 0.0f64.clamp(yr.0, yr.1)]
            };
            Ok(Point::from_raw(id, coords))
        }
        (ConvexSet::RiverBox { .. }, _) => Err(set.unsupported(space)),
    }
}

/// Samples `n_points` points `x`, projects them, and checks membership of
/// `Pₛx`, the projection inequality against `n_members` sampled members
/// `y`, and `d(Pₛx, Pₛx') ≤ d(x, x')` for consecutive samples.
pub fn check_projection_sample(
    space: &SpaceHandle,
    set: &ConvexSet,
    rng_seed: u64,
    n_points: usize,
    n_members: usize,
    tol: f64,
) -> Result<ViolationReport> {
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("projection inequality", tol);
    let members: Vec<Point> = (0..n_members)
        .map(|_| set.sample_member(space, &mut rng))
        .collect::<Result<_>>()?;
    let d = |a: &Point, b: &Point| space.dist_coords(a.coords(), b.coords());
    let mut previous: Option<(Point, Point)> = None;
    for _ in 0..n_points {
        let x = space.sample(&mut rng);
        let px = project_convex(space, set, &x)?;
        let wit = |extra: &Point| Witness {
            points: vec![x.clone(), px.clone(), extra.clone()],
            params: vec![],
        };
        let outside = if set.contains(space, &px, tol)? {
            0.0
        } else {
            f64::INFINITY
        };
        let mut worst = outside;
        let mut worst_y = &px;
        for y in &members {
            let excess = d(&x, &px).powi(2) + d(&px, y).powi(2) - d(&x, y).powi(2);
            if excess > worst {
                worst = excess;
                worst_y = y;
            }
        }
        if let Some((x0, p0)) = &previous {
            let excess = d(&px, p0) - d(&x, x0);
            if excess > worst {
                worst = excess;
                worst_y = x0;
            }
        }
        report.record(worst, || wit(worst_y));
        previous = Some((x, px));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(space: &SpaceHandle, c: &[f64]) -> Point {
        space.point(c.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_segment_projection() {
        let e = SpaceHandle::euclidean(2);
        let set = ConvexSet::Segment(pt(&e, &[0.0, 0.0]), pt(&e, &[2.0, 0.0]));
        let p = project_convex(&e, &set, &pt(&e, &[1.0, 5.0])).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0]);
        let p = project_convex(&e, &set, &pt(&e, &[-3.0, 1.0])).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn river_axis_projection_is_the_foot_of_the_leg() {
        let r = SpaceHandle::river();
        let p = project_convex(&r, &ConvexSet::XAxis, &pt(&r, &[3.0, 2.0])).unwrap();
        assert_eq!(p.coords(), &[3.0, 0.0]);
    }

    #[test]
    fn members_project_to_themselves() {
        let r = SpaceHandle::river();
        let x = pt(&r, &[3.0, 0.0]);
        assert_eq!(project_convex(&r, &ConvexSet::XAxis, &x).unwrap(), x);
        let e = SpaceHandle::euclidean(2);
        let seg = ConvexSet::Segment(pt(&e, &[0.0, 0.0]), pt(&e, &[2.0, 0.0]));
        let x = pt(&e, &[0.5, 0.0]);
        assert_eq!(project_convex(&e, &seg, &x).unwrap(), x);
        let d = SpaceHandle::disk(0.05).unwrap();
        let x = pt(&d, &[0.1, -0.3]);
        assert_eq!(project_convex(&d, &ConvexSet::Whole, &x).unwrap(), x);
    }

    #[test]
    fn river_box_projection() {
        let r = SpaceHandle::river();
        let set = ConvexSet::river_box((-1.0, 1.0), (0.0, 0.0)).unwrap();
        assert_eq!(
            project_convex(&r, &set, &pt(&r, &[0.5, 3.0]))
                .unwrap()
                .coords(),
            &[0.5, 0.0]
        );
        assert_eq!(
            project_convex(&r, &set, &pt(&r, &[4.0, -3.0]))
                .unwrap()
                .coords(),
            &[1.0, 0.0]
        );
        assert!(ConvexSet::river_box((-1.0, 1.0), (1.0, 2.0)).is_err());
        let e = SpaceHandle::euclidean(2);
        assert!(matches!(
            project_convex(&e, &set, &pt(&e, &[0.0, 0.0])),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn disk_axis_projection_of_axis_point_is_identity() {
        let d = SpaceHandle::disk(0.05).unwrap();
        let x = pt(&d, &[0.4, 0.0]);
        let p = project_convex(&d, &ConvexSet::XAxis, &x).unwrap();
        assert!((p.coords()[0] - 0.4).abs() < 1e-15);
        assert_eq!(p.coords()[1], 0.0);
    }

    #[test]
    fn projection_inequality_on_every_space() {
        let e = SpaceHandle::euclidean(2);
        let r = SpaceHandle::river();
        let d = SpaceHandle::disk(0.05).unwrap();
        let mut cases = vec![
            (e, ConvexSet::XAxis),
            (r, ConvexSet::XAxis),
            (d, ConvexSet::XAxis),
        ];
        for space in [e, r, d] {
            let mut rng = seeded_rng(3);
            let a = space.sample(&mut rng);
            let b = space.sample(&mut rng);
            cases.push((space, ConvexSet::Segment(a.clone(), b.clone())));
            cases.push((
                space,
                ConvexSet::HalfSpace {
                    near: a.clone(),
                    far: b,
                },
            ));
            cases.push((space, ConvexSet::Singleton(a)));
        }
        cases.push((r, ConvexSet::river_box((-2.0, 1.5), (-1.0, 3.0)).unwrap()));
        cases.push((r, ConvexSet::river_box((1.0, 1.0), (1.0, 3.0)).unwrap()));
        for (space, set) in cases {
            let report = check_projection_sample(&space, &set, 11, 500, 64, 1e-9).unwrap();
            assert!(
                report.passed(),
                "{space} {set}: {report} {:?}",
                report.witness
            );
        }
    }
}
