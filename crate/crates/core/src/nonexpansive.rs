//! Nonexpansive self-maps with known fixed-point sets.
//!
//! A [`MappingSpec`] pairs a map `T` with its space and, when it is known in
//! closed form, the closed convex set `F(T)` of its fixed points. Maps are
//! immutable once built and [`apply`] is pure.
//!
//! Maps can be written as description strings:
//!
//! ```text
//! identity
//! rotation:theta=1.0
//! river_product:f=pl[(-5,-2.5),(5,2.5)];g=pl[(-5,-2.5),(5,2.5)]
//! proj:x-axis | proj:point:(0,0) | proj:segment:(0,0),(1,1)
//! proj:halfspace:(0,0),(2,0) | proj:box:x=[-1,1];y=[-2,2]
//! compose:rotation:theta=1|proj:x-axis
//! ```

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metric::{
    project_convex, seeded_rng, ConvexSet, GeodesicSpace, Point, ViolationReport, Witness,
};
use crate::spaces::SpaceHandle;
use crate::text::{format_tuple, parse_interval, parse_tuple, parse_tuples};

/// Continuous piecewise-linear map of the real line through the given nodes,
/// extended linearly beyond the outer nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    nodes: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Needs at least two finite nodes with strictly increasing abscissas.
    /// Slopes are not restricted here; [`MappingSpec::river_product`] does
    /// that.
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        let finite = nodes.iter().all(|(x, y)| x.is_finite() && y.is_finite());
        let increasing = nodes.windows(2).all(|w| w[0].0 < w[1].0);
        if nodes.len() < 2 || !finite || !increasing {
            return Err(Error::InvalidProblem(
                "a piecewise-linear map needs two or more finite nodes with increasing abscissas"
                    .into(),
            ));
        }
        Ok(PiecewiseLinear { nodes })
    }

    /// `s ↦ c·s`.
    pub fn scale(c: f64) -> Self {
        PiecewiseLinear {
            nodes: vec![(-1.0, -c), (1.0, c)],
        }
    }

    pub fn identity() -> Self {
        Self::scale(1.0)
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.nodes.len();
        let seg = if s <= self.nodes[0].0 {
            0
        } else {
            (0..n - 1)
                .find(|&j| s <= self.nodes[j + 1].0)
                .unwrap_or(n - 2)
        };
        let ((x0, y0), (x1, y1)) = (self.nodes[seg], self.nodes[seg + 1]);
        y0 + (y1 - y0) / (x1 - x0) * (s - x0)
    }

    pub fn lipschitz(&self) -> f64 {
        self.slopes().map(f64::abs).fold(0.0, f64::max)
    }

    /// Strictly monotone, hence injective on the whole line.
    pub fn is_injective(&self) -> bool {
        let slopes: Vec<f64> = self.slopes().collect();
        slopes.iter().all(|&s| s > 0.0) || slopes.iter().all(|&s| s < 0.0)
    }

    /// The fixed-point set as a closed interval with possibly infinite ends,
    /// or `None` when there are no fixed points. For a map with slopes in
    /// `[−1, 1]`, `s ↦ f(s) − s` is nonincreasing, so the zero set is an
    /// interval and its hull is exact.
    pub fn fixed_interval(&self) -> Option<(f64, f64)> {
        let n = self.nodes.len();
        let slopes: Vec<f64> = self.slopes().collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut include = |a: f64, b: f64| {
            lo = lo.min(a);
            hi = hi.max(b);
        };
        // Piece j spans [x_{j-1}, x_j] with the outer rays as pieces 0 and n.
        for j in 0..=n {
            let (left, right) = (
                if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    self.nodes[j - 1].0
                },
                if j == n {
                    f64::INFINITY
                } else {
                    self.nodes[j].0
                },
            );
            let (anchor, slope) = match j {
                0 => (self.nodes[0], slopes[0]),
                j if j == n => (self.nodes[n - 1], slopes[n - 2]),
                j => (self.nodes[j - 1], slopes[j - 1]),
            };
            let h = anchor.1 - anchor.0;
            if slope == 1.0 {
                if h == 0.0 {
                    include(left, right);
                }
                continue;
            }
            let root = anchor.0 - h / (slope - 1.0);
            if root >= left && root <= right {
                include(root, root);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

impl fmt::Display for PiecewiseLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .nodes
            .iter()
            .map(|&(x, y)| format_tuple(&[x, y]))
            .collect();
        write!(f, "pl[{}]", parts.join(","))
    }
}

fn parse_pl(text: &str) -> Option<PiecewiseLinear> {
    let inner = text.trim().strip_prefix("pl[")?.strip_suffix(']')?;
    let nodes = parse_tuples(inner)?
        .into_iter()
        .map(|t| (t.len() == 2).then(|| (t[0], t[1])))
        .collect::<Option<Vec<_>>>()?;
    PiecewiseLinear::new(nodes).ok()
}

pub type CustomFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct CustomMap {
    pub name: String,
    pub func: CustomFn,
}

impl fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMap")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum MapKind {
    Identity,
    /// Rotation about the origin by `theta` radians, in the Euclidean plane
    /// or the disk.
    Rotation {
        theta: f64,
    },
    /// `T(x, y) = (f(x), g(y))` on the river plane.
    RiverProduct {
        f: PiecewiseLinear,
        g: PiecewiseLinear,
    },
    /// Metric projection onto a closed convex set.
    Projection(ConvexSet),
    /// Applied in the listed order.
    Composition(Vec<MappingSpec>),
    Custom(CustomMap),
}

#[derive(Debug, Clone)]
pub struct MappingSpec {
    space: SpaceHandle,
    kind: MapKind,
    fixed_set: Option<ConvexSet>,
}

impl MappingSpec {
    pub fn identity(space: SpaceHandle) -> Self {
        MappingSpec {
            space,
            kind: MapKind::Identity,
            fixed_set: Some(ConvexSet::Whole),
        }
    }

    pub fn rotation(space: SpaceHandle, theta: f64) -> Result<Self> {
        let planar = match space {
            SpaceHandle::Euclidean(e) => e.dim() == 2,
            SpaceHandle::Disk(_) => true,
            SpaceHandle::River(_) => false,
        };
        if !planar {
            return Err(Error::Unsupported {
                what: "rotation".into(),
                space: space.id(),
            });
        }
        if !theta.is_finite() {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                reason: "must be finite",
            });
        }
        let fixed_set = if theta.rem_euclid(TAU) == 0.0 {
            ConvexSet::Whole
        } else {
            ConvexSet::Singleton(space.point(vec![0.0, 0.0])?)
        };
        Ok(MappingSpec {
            space,
            kind: MapKind::Rotation { theta },
            fixed_set: Some(fixed_set),
        })
    }

    /// Requires `f` injective, both maps 1-Lipschitz, and `g(0) = 0`. The
    /// fixed set is `Fix(f) × Fix(g)`, or unknown when `f` has no fixed
    /// point.
    pub fn river_product(f: PiecewiseLinear, g: PiecewiseLinear) -> Result<Self> {
        let reason = if f.lipschitz() > 1.0 || g.lipschitz() > 1.0 {
            Some("slopes must lie in [-1, 1]")
        } else if !f.is_injective() {
            Some("f must be strictly monotone")
        } else if g.eval(0.0) != 0.0 {
            Some("g must fix 0")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(Error::InvalidMapping {
                text: format!("river_product:f={f};g={g}"),
                reason: reason.into(),
            });
        }
        let fixed_set = match (f.fixed_interval(), g.fixed_interval()) {
            (Some(x), Some(y)) => Some(ConvexSet::river_box(x, y)?),
            _ => None,
        };
        Ok(MappingSpec {
            space: SpaceHandle::river(),
            kind: MapKind::RiverProduct { f, g },
            fixed_set,
        })
    }

    /// Skips every hypothesis check, for building negative controls such as
    /// an expansive `f`. No fixed set is attached.
    pub fn river_product_unchecked(f: PiecewiseLinear, g: PiecewiseLinear) -> Self {
        MappingSpec {
            space: SpaceHandle::river(),
            kind: MapKind::RiverProduct { f, g },
            fixed_set: None,
        }
    }

    pub fn projection(space: SpaceHandle, set: ConvexSet) -> Result<Self> {
        // Surface unsupported set/space pairs at construction.
        let probe = space.sample(&mut seeded_rng(0));
        project_convex(&space, &set, &probe)?;
        Ok(MappingSpec {
            space,
            kind: MapKind::Projection(set.clone()),
            fixed_set: Some(set),
        })
    }

    pub fn composition(space: SpaceHandle, maps: Vec<MappingSpec>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidProblem("empty composition".into()));
        }
        if let Some(m) = maps.iter().find(|m| m.space != space) {
            return Err(Error::SpaceMismatch {
                expected: space.id(),
                found: m.space.id(),
            });
        }
        Ok(MappingSpec {
            space,
            kind: MapKind::Composition(maps),
            fixed_set: None,
        })
    }

    /// A user-supplied map on raw coordinates. Nonexpansiveness is the
    /// caller's claim; [`check_nonexpansive`] can test it.
    pub fn custom(
        space: SpaceHandle,
        name: impl Into<String>,
        fixed_set: Option<ConvexSet>,
        func: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        MappingSpec {
            space,
            kind: MapKind::Custom(CustomMap {
                name: name.into(),
                func: Arc::new(func),
            }),
            fixed_set,
        }
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn fixed_set(&self) -> Option<&ConvexSet> {
        self.fixed_set.as_ref()
    }

    /// Some fixed point of the map, when the fixed set is known and
    /// nonempty.
    pub fn fixed_point(&self) -> Option<Point> {
        let set = self.fixed_set.as_ref()?;
        let origin = self.space.point(vec![0.0; self.space.coord_len()]).ok()?;
        project_convex(&self.space, set, &origin).ok()
    }

    fn apply_coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(match &self.kind {
            MapKind::Identity => x.to_vec(),
            MapKind::Rotation { theta } => {
                let z = Complex64::new(x[0], x[1]) * Complex64::from_polar(1.0, *theta);
                vec![z.re, z.im]
            }
            MapKind::RiverProduct { f, g } => vec![f.eval(x[0]), g.eval(x[1])],
            MapKind::Projection(set) => {
                let p = Point::from_raw(self.space.id(), x.to_vec());
                project_convex(&self.space, set, &p)?.into_coords()
            }
            MapKind::Composition(maps) => {
                let mut c = x.to_vec();
                for m in maps {
                    c = m.apply_coords(&c)?;
                }
                c
            }
            MapKind::Custom(m) => (m.func)(x),
        })
    }

    /// Parses a description string for a map on `space`.
    pub fn parse(space: SpaceHandle, text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |reason: &str| Error::InvalidMapping {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        match kind.trim() {
            "identity" if rest.is_empty() => Ok(Self::identity(space)),
            "rotation" => {
                let theta = rest
                    .trim()
                    .strip_prefix("theta=")
                    .and_then(|t| t.trim().parse::<f64>().ok())
                    .ok_or_else(|| bad("expected rotation:theta=<radians>"))?;
                Self::rotation(space, theta)
            }
            "river_product" => {
                if !matches!(space, SpaceHandle::River(_)) {
                    return Err(bad("river_product needs the river space"));
                }
                let (mut f, mut g) = (None, None);
                for part in rest.split(';') {
                    match part.trim().split_once('=') {
                        Some(("f", v)) => f = parse_pl(v),
                        Some(("g", v)) => g = parse_pl(v),
                        _ => return Err(bad("expected f=pl[...];g=pl[...]")),
                    }
                }
                match (f, g) {
                    (Some(f), Some(g)) => Self::river_product(f, g),
                    _ => Err(bad("expected f=pl[...];g=pl[...]")),
                }
            }
            "proj" => {
                let set = parse_set(&space, rest).ok_or_else(|| bad("unknown convex set"))?;
                Self::projection(space, set)
            }
            "compose" => {
                let maps = rest
                    .split('|')
                    .map(|m| {
                        if m.trim_start().starts_with("compose") {
                            Err(bad("nested compositions are not supported"))
                        } else {
                            Self::parse(space, m)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::composition(space, maps)
            }
            _ => Err(bad("unknown map kind")),
        }
    }
}

fn parse_set(space: &SpaceHandle, text: &str) -> Option<ConvexSet> {
    let text = text.trim();
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let points = |s: &str, n: usize| -> Option<Vec<Point>> {
        let tuples = parse_tuples(s)?;
        if tuples.len() != n {
            return None;
        }
        tuples.into_iter().map(|t| space.point(t).ok()).collect()
    };
    match kind {
        "whole" => Some(ConvexSet::Whole),
        "x-axis" => Some(ConvexSet::XAxis),
        "point" => Some(ConvexSet::Singleton(space.point(parse_tuple(rest)?).ok()?)),
        "segment" => {
            let mut p = points(rest, 2)?;
            let b = p.pop()?;
            Some(ConvexSet::Segment(p.pop()?, b))
        }
        "halfspace" => {
            let mut p = points(rest, 2)?;
            let far = p.pop()?;
            Some(ConvexSet::HalfSpace {
                near: p.pop()?,
                far,
            })
        }
        "box" => {
            let (x, y) = rest.split_once(';')?;
            let x = parse_interval(x.trim().strip_prefix("x=")?)?;
            let y = parse_interval(y.trim().strip_prefix("y=")?)?;
            ConvexSet::river_box(x, y).ok()
        }
        _ => None,
    }
}

fn describe_set(set: &ConvexSet) -> String {
    match set {
        ConvexSet::Whole => "whole".into(),
        ConvexSet::XAxis => "x-axis".into(),
        ConvexSet::Singleton(p) => format!("point:{}", format_tuple(p.coords())),
        ConvexSet::Segment(a, b) => {
            format!(
                "segment:{},{}",
                format_tuple(a.coords()),
                format_tuple(b.coords())
            )
        }
        ConvexSet::HalfSpace { near, far } => format!(
            "halfspace:{},{}",
            format_tuple(near.coords()),
            format_tuple(far.coords())
        ),
        ConvexSet::RiverBox { x, y } => format!("box:x=[{},{}];y=[{},{}]", x.0, x.1, y.0, y.1),
    }
}

/// Prints the description string; it parses back to the same map except
/// for custom maps, which print as `custom:<name>`.
impl fmt::Display for MappingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Identity => f.write_str("identity"),
            MapKind::Rotation { theta } => write!(f, "rotation:theta={theta}"),
            MapKind::RiverProduct { f: ff, g } => write!(f, "river_product:f={ff};g={g}"),
            MapKind::Projection(set) => write!(f, "proj:{}", describe_set(set)),
            MapKind::Composition(maps) => {
                let parts: Vec<String> = maps.iter().map(|m| m.to_string()).collect();
                write!(f, "compose:{}", parts.join("|"))
            }
            MapKind::Custom(m) => write!(f, "custom:{}", m.name),
        }
    }
}

/// `T x`. Results outside the space are an error; in the disk this is a
/// boundary excursion.
pub fn apply(map: &MappingSpec, x: &Point) -> Result<Point> {
    map.space.check(x)?;
    let c = map.apply_coords(x.coords())?;
    if c.iter().all(|v| v.is_finite()) && map.space.contains(&c) {
        return map.space.point(c);
    }
    Err(match map.space {
        SpaceHandle::Disk(_) => Error::BoundaryExcursion {
            space: map.space.id(),
            coords: c,
        },
        _ => Error::NotInSpace {
            space: map.space.id(),
            coords: c,
        },
    })
}

/// `d(x, T x)`.
pub fn residual(map: &MappingSpec, x: &Point) -> Result<f64> {
    let tx = apply(map, x)?;
    Ok(map.space.dist_coords(x.coords(), tx.coords()))
}

/// Nearest fixed point of `map` to `x`.
pub fn project_fixed_set(map: &MappingSpec, x: &Point) -> Result<Point> {
    match &map.fixed_set {
        Some(set) => project_convex(&map.space, set, x),
        None => Err(Error::Unsupported {
            what: format!("projection onto the fixed set of `{map}` (fixed set unknown)"),
            space: map.space.id(),
        }),
    }
}

/// Samples pairs and records `d(Tx, Ty) − d(x, y)`. In the river plane every
/// fourth pair shares its abscissa so the vertical branch of the metric is
/// exercised too.
pub fn check_nonexpansive(
    map: &MappingSpec,
    rng_seed: u64,
    n_pairs: usize,
    tol: f64,
) -> Result<ViolationReport> {
    let space = &map.space;
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new(format!("nonexpansive {map}"), tol);
    for i in 0..n_pairs {
        let x = space.sample(&mut rng);
        let mut y = space.sample(&mut rng);
        if matches!(space, SpaceHandle::River(_)) && i % 4 == 3 {
            y = space.point(vec![x.coords()[0], y.coords()[1]])?;
        }
        let (tx, ty) = (apply(map, &x)?, apply(map, &y)?);
        let excess =
            space.dist_coords(tx.coords(), ty.coords()) - space.dist_coords(x.coords(), y.coords());
        report.record(excess, || Witness {
            points: vec![x.clone(), y.clone(), tx.clone(), ty.clone()],
            params: vec![],
        });
    }
    Ok(report)
}

/// Samples members `p` of the declared fixed set and records `d(p, T p)`.
pub fn check_fixed_set(
    map: &MappingSpec,
    rng_seed: u64,
    n_points: usize,
    tol: f64,
) -> Result<ViolationReport> {
    let set = map.fixed_set.as_ref().ok_or_else(|| Error::Unsupported {
        what: format!("fixed-set check for `{map}` (fixed set unknown)"),
        space: map.space.id(),
    })?;
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new(format!("fixed set of {map}"), tol);
    for _ in 0..n_points {
        let p = set.sample_member(&map.space, &mut rng)?;
        let r = residual(map, &p)?;
        report.record(r, || Witness {
            points: vec![p.clone()],
            params: vec![r],
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn halving() -> PiecewiseLinear {
        PiecewiseLinear::scale(0.5)
    }

    fn river(x: f64, y: f64) -> Point {
        SpaceHandle::river().point(vec![x, y]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let e = SpaceHandle::euclidean(2);
        let rot = MappingSpec::rotation(e, 1.0).unwrap();
        let y = apply(&rot, &e.point(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(y.coords()[0], 1f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(y.coords()[1], 1f64.sin(), epsilon = 1e-15);

        let prod = MappingSpec::river_product(halving(), halving()).unwrap();
        assert_eq!(apply(&prod, &river(2.0, 2.0)).unwrap(), river(1.0, 1.0));

        let proj = MappingSpec::projection(SpaceHandle::river(), ConvexSet::XAxis).unwrap();
        assert_eq!(apply(&proj, &river(3.0, 2.0)).unwrap(), river(3.0, 0.0));
    }

    #[test]
    fn nonexpansive_examples() {
        let rot = MappingSpec::rotation(SpaceHandle::euclidean(2), 1.0).unwrap();
        let rep = check_nonexpansive(&rot, 1, 2000, 1e-12).unwrap();
        assert!(rep.worst_violation <= 1e-12, "{rep}");

        let prod = MappingSpec::river_product(halving(), halving()).unwrap();
        let rep = check_nonexpansive(&prod, 2, 2000, 1e-9).unwrap();
        assert!(rep.passed() && rep.worst_violation <= 1e-9, "{rep}");

        let bad = MappingSpec::river_product_unchecked(PiecewiseLinear::scale(2.0), halving());
        let rep = check_nonexpansive(&bad, 3, 200, 1e-9).unwrap();
        assert!(rep.worst_violation > 0.0);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn expansive_factor_is_rejected() {
        assert!(matches!(
            MappingSpec::river_product(PiecewiseLinear::scale(2.0), halving()),
            Err(Error::InvalidMapping { .. })
        ));
        let g = PiecewiseLinear::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(MappingSpec::river_product(halving(), g).is_err());
        let constant = PiecewiseLinear::new(vec![(-1.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(MappingSpec::river_product(constant, halving()).is_err());
    }

    #[test]
    fn projection_onto_fixed_set_examples() {
        let e = SpaceHandle::euclidean(2);
        let rot = MappingSpec::rotation(e, 1.0).unwrap();
        let x = e.point(vec![0.3, -4.0]).unwrap();
        assert_eq!(project_fixed_set(&rot, &x).unwrap().coords(), &[0.0, 0.0]);

        let prod = MappingSpec::river_product(PiecewiseLinear::identity(), halving()).unwrap();
        assert_eq!(
            project_fixed_set(&prod, &river(3.0, 2.0)).unwrap(),
            river(3.0, 0.0)
        );
        assert_eq!(
            project_fixed_set(&prod, &river(3.0, 0.0)).unwrap(),
            river(3.0, 0.0)
        );

        let comp = MappingSpec::composition(e, vec![rot.clone(), rot]).unwrap();
        assert!(matches!(
            project_fixed_set(&comp, &x),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn residual_examples() {
        let e = SpaceHandle::euclidean(2);
        let rot = MappingSpec::rotation(e, 1.0).unwrap();
        let r = residual(&rot, &e.point(vec![0.6, 0.8]).unwrap()).unwrap();
        assert_abs_diff_eq!(r, 2.0 * 0.5f64.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(r, 0.9589, epsilon = 1e-4);
        assert_eq!(
            residual(&rot, &e.point(vec![0.0, 0.0]).unwrap()).unwrap(),
            0.0
        );

        let prod = MappingSpec::river_product(halving(), halving()).unwrap();
        assert_eq!(residual(&prod, &river(2.0, 2.0)).unwrap(), 4.0);
    }

    #[test]
    fn fixed_intervals() {
        assert_eq!(halving().fixed_interval(), Some((0.0, 0.0)));
        assert_eq!(
            PiecewiseLinear::identity().fixed_interval(),
            Some((f64::NEG_INFINITY, f64::INFINITY))
        );
        // Identity on [−1, 1], shrinking towards it outside.
        let clamp =
            PiecewiseLinear::new(vec![(-3.0, -2.0), (-1.0, -1.0), (1.0, 1.0), (3.0, 2.0)]).unwrap();
        assert_eq!(clamp.fixed_interval(), Some((-1.0, 1.0)));
        let shift = PiecewiseLinear::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(shift.fixed_interval(), None);
        // The extrapolated ray carries the only fixed point.
        let f = PiecewiseLinear::new(vec![(0.0, 2.0), (2.0, 3.0)]).unwrap();
        assert_eq!(f.fixed_interval(), Some((4.0, 4.0)));

        let prod = MappingSpec::river_product(clamp, halving()).unwrap();
        assert_eq!(
            prod.fixed_set(),
            Some(&ConvexSet::RiverBox {
                x: (-1.0, 1.0),
                y: (0.0, 0.0)
            })
        );
        let rep = check_fixed_set(&prod, 5, 500, 1e-10).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn disk_rotation_fixes_the_centre() {
        let d = SpaceHandle::disk(0.05).unwrap();
        let rot = MappingSpec::rotation(d, 0.7).unwrap();
        let rep = check_nonexpansive(&rot, 9, 2000, 1e-12).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rot.fixed_point().unwrap().coords(), &[0.0, 0.0]);
        assert!(MappingSpec::rotation(SpaceHandle::river(), 1.0).is_err());
        let full = MappingSpec::rotation(d, 0.0).unwrap();
        assert_eq!(full.fixed_set(), Some(&ConvexSet::Whole));
    }

    #[test]
    fn compositions_stay_nonexpansive() {
        let e = SpaceHandle::euclidean(2);
        let comp =
            MappingSpec::parse(e, "compose:rotation:theta=0.4|proj:halfspace:(0,0),(1,2)").unwrap();
        let rep = check_nonexpansive(&comp, 4, 2000, 1e-9).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn description_strings_round_trip() {
        let r = SpaceHandle::river();
        let e = SpaceHandle::euclidean(2);
        let cases = [
            (
                r,
                "river_product:f=pl[(-5,-2.5),(5,2.5)];g=pl[(-5,-2.5),(5,2.5)]",
            ),
            (r, "proj:x-axis"),
            (r, "proj:box:x=[-1,2];y=[-inf,0.5]"),
            (e, "rotation:theta=1"),
            (e, "identity"),
            (e, "proj:point:(1,2)"),
            (e, "proj:segment:(0,0),(1,1)"),
            (e, "compose:rotation:theta=0.5|proj:x-axis"),
        ];
        for (space, text) in cases {
            let m = MappingSpec::parse(space, text).unwrap();
            assert_eq!(m.to_string(), text);
        }
        let m = MappingSpec::parse(
            r,
            "river_product:f=pl[(-5,-2.5),(5,2.5)];g=pl[(-5,-2.5),(5,2.5)]",
        )
        .unwrap();
        assert_eq!(apply(&m, &river(2.0, 2.0)).unwrap(), river(1.0, 1.0));
        for bad in [
            "rotation",
            "rotation:theta=x",
            "spin:theta=1",
            "proj:blob",
            "compose:compose:identity",
            "river_product:f=pl[(0,0)];g=pl[(0,0),(1,1)]",
        ] {
            assert!(MappingSpec::parse(e, bad).is_err(), "{bad}");
        }
        assert!(
            MappingSpec::parse(e, "river_product:f=pl[(0,0),(1,1)];g=pl[(0,0),(1,1)]").is_err()
        );
    }
}
