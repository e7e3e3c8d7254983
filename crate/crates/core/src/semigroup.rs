//! Contraction semigroups generated by monotone vector fields.
//!
//! The semigroup is the flow `S(t)x` of `x′(t) = −A(x(t))`, integrated with
//! the classical fourth-order Runge–Kutta scheme on a uniform grid of step
//! `h` (the last step is shortened to land on the requested time). With the
//! skew field `A = J` the flow turns clockwise.
//!
//! Continuous means replace the orbit sum by a time integral:
//! `σ_T^s` minimizes `y ↦ ∫₀ᵀ d²(S(s+t)x, y) dt`, discretized with composite
//! trapezoid weights normalized to sum to one, so it is an ordinary weighted
//! Karcher mean of grid points. `σ_T = σ_T⁰`.
//!
//! Field descriptions:
//!
//! ```text
//! skew2d                   A = [[0, −1], [1, 0]] on euclidean:2
//! decay:<rate>             A = rate·I
//! grad:quadratic:<q11,…>   A = Q for the convex quadratic ½ xᵀQx, Q row-major
//! disk-rotation:<omega>    A(z) = iωz on the disk, so S(t)z = e^{−iωt}z
//! ```

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::ergodic::{AgreementBasis, Verdict, VerdictStatus};
use crate::error::{Error, Result};
use crate::frechet::{FrechetProblem, KarcherSolver, MeanCertificate};
use crate::metric::{seeded_rng, tol, GeodesicSpace, Point, ViolationReport, Witness};
use crate::spaces::{log_c, to_complex, SpaceHandle};

/// Solver tolerance for continuous means.
pub const MEAN_TOL: f64 = 1e-10;
/// Fewest grid nodes accepted in a mean window.
pub const MIN_WINDOW_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum VectorField {
    Skew2d,
    Decay(f64),
    /// Row-major symmetric positive semidefinite matrix.
    Quadratic(Vec<f64>),
    DiskRotation(f64),
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Skew2d => f.write_str("skew2d"),
            VectorField::Decay(r) => write!(f, "decay:{r}"),
            VectorField::Quadratic(q) => {
                let parts: Vec<String> = q.iter().map(|v| v.to_string()).collect();
                write!(f, "grad:quadratic:{}", parts.join(","))
            }
            VectorField::DiskRotation(w) => write!(f, "disk-rotation:{w}"),
        }
    }
}

impl VectorField {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |reason: &str| Error::InvalidField {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let number = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        if text == "skew2d" {
            return Ok(VectorField::Skew2d);
        }
        if let Some(r) = text.strip_prefix("decay:") {
            return number(r)
                .map(VectorField::Decay)
                .ok_or_else(|| bad("rate must be a number"));
        }
        if let Some(w) = text.strip_prefix("disk-rotation:") {
            return number(w)
                .map(VectorField::DiskRotation)
                .ok_or_else(|| bad("omega must be a number"));
        }
        if let Some(q) = text.strip_prefix("grad:quadratic:") {
            let entries: Option<Vec<f64>> = q.split(',').map(number).collect();
            return entries
                .map(VectorField::Quadratic)
                .ok_or_else(|| bad("matrix entries must be numbers"));
        }
        Err(bad("unknown field kind"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupSpec {
    space: SpaceHandle,
    field: VectorField,
    h: f64,
    /// Matrix of a linear field on Euclidean space.
    matrix: Option<DMatrix<f64>>,
    /// Orthonormal basis of the singular set `A⁻¹(0)` of a linear field.
    kernel: Option<DMatrix<f64>>,
    monotone: bool,
}

impl SemigroupSpec {
    pub fn new(space: SpaceHandle, field: VectorField, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::OutOfRange {
                name: "h",
                value: h,
                reason: "step must be positive",
            });
        }
        let bad = |reason: String| Error::InvalidField {
            text: field.to_string(),
            reason,
        };
        let dim = space.coord_len();
        let matrix = match (&field, &space) {
            (VectorField::DiskRotation(_), SpaceHandle::Disk(_)) => None,
            (VectorField::DiskRotation(_), _) => {
                return Err(bad(format!("needs the disk, got {space}")))
            }
            (_, SpaceHandle::Euclidean(_)) => Some(match &field {
                VectorField::Skew2d if dim == 2 => {
                    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
                }
                VectorField::Skew2d => return Err(bad(format!("needs euclidean:2, got {space}"))),
                VectorField::Decay(r) => DMatrix::identity(dim, dim) * *r,
                VectorField::Quadratic(q) => {
                    if q.len() != dim * dim {
                        return Err(bad(format!("expected {} entries for {space}", dim * dim)));
                    }
                    let m = DMatrix::from_row_slice(dim, dim, q);
                    if (&m - m.transpose()).amax() > 0.0 {
                        return Err(bad("matrix must be symmetric".into()));
                    }
                    if SymmetricEigen::new(m.clone()).eigenvalues.min() < -tol::ALGEBRAIC {
                        return Err(bad("matrix must be positive semidefinite".into()));
                    }
                    m
                }
                VectorField::DiskRotation(_) => unreachable!(),
            }),
            _ => return Err(bad(format!("needs a Euclidean space, got {space}"))),
        };
        let (kernel, monotone) = match &matrix {
            Some(m) => {
                let sym = (m + m.transpose()) * 0.5;
                let monotone = SymmetricEigen::new(sym).eigenvalues.min() >= -tol::ALGEBRAIC;
                (Some(kernel_basis(m)), monotone)
            }
            // Rotations are isometries.
            None => (None, true),
        };
        Ok(SemigroupSpec {
            space,
            field,
            h,
            matrix,
            kernel,
            monotone,
        })
    }

    pub fn parse(space: SpaceHandle, field: &str, h: f64) -> Result<Self> {
        Self::new(space, VectorField::parse(field)?, h)
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Whether the field is monotone, decided exactly from its symmetric
    /// part.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// The same field with another step.
    pub fn with_step(&self, h: f64) -> Result<Self> {
        Self::new(self.space, self.field.clone(), h)
    }

    /// `A(x)` in coordinates.
    fn field_at(&self, x: &[f64]) -> Vec<f64> {
        match (&self.matrix, &self.field) {
            (Some(m), _) => (m * DVector::from_column_slice(x)).as_slice().to_vec(),
            (None, VectorField::DiskRotation(w)) => {
                let z = Complex64::new(0.0, *w) * Complex64::new(x[0], x[1]);
                vec![z.re, z.im]
            }
            _ => unreachable!("non-linear fields are disk rotations"),
        }
    }

    /// Length of `A(x)` in the space's metric.
    pub fn field_norm(&self, x: &Point) -> Result<f64> {
        self.space.check(x)?;
        let v = self.field_at(x.coords());
        let e = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok(match self.space {
            SpaceHandle::Disk(_) => 2.0 * e / (1.0 - to_complex(x.coords()).norm_sqr()),
            _ => e,
        })
    }

    /// Nearest singularity of the field: the projection onto `A⁻¹(0)`.
    pub fn project_singular(&self, x: &Point) -> Result<Point> {
        self.space.check(x)?;
        let coords = match (&self.kernel, &self.field) {
            (Some(k), _) => {
                let v = DVector::from_column_slice(x.coords());
                (k * (k.transpose() * v)).as_slice().to_vec()
            }
            (None, VectorField::DiskRotation(w)) if *w == 0.0 => x.coords().to_vec(),
            (None, _) => vec![0.0, 0.0],
        };
        self.space.point(coords)
    }

    fn rk4_step(&self, x: &[f64], dt: f64) -> Vec<f64> {
        let f = |y: &[f64]| -> Vec<f64> { self.field_at(y).into_iter().map(|v| -v).collect() };
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(a, b)| a + s * b).collect()
        };
        let k1 = f(x);
        let k2 = f(&axpy(x, 0.5 * dt, &k1));
        let k3 = f(&axpy(x, 0.5 * dt, &k2));
        let k4 = f(&axpy(x, dt, &k3));
        x.iter()
            .enumerate()
            .map(|(i, xi)| xi + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    /// Number of steps and the length of the last one for horizon `t`.
    fn steps(&self, t: f64) -> (usize, f64) {
        let ratio = t / self.h;
        let rounded = ratio.round();
        if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
            (rounded as usize, self.h)
        } else {
            let n = ratio.ceil() as usize;
            (n, t - (n - 1) as f64 * self.h)
        }
    }
}

fn kernel_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let scale = svd.singular_values.max().max(1.0);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| i >= svd.singular_values.len() || svd.singular_values[i] <= 1e-12 * scale)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    pub start: Point,
    /// `0 = t₀ < … < t_M = T`, uniform except possibly the last step.
    pub times: Vec<f64>,
    /// `S(tᵢ)x`.
    pub points: Vec<Point>,
    pub h: f64,
}

impl CurveTrace {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn end(&self) -> &Point {
        self.points.last().unwrap()
    }

    /// Index of the node at time `t`, if `t` is a node.
    fn node(&self, t: f64) -> Option<usize> {
        let i = (t / self.h).round() as usize;
        let near = |j: usize| (self.times[j] - t).abs() <= 1e-9 * t.max(1.0);
        if i < self.times.len() && near(i) {
            Some(i)
        } else if near(self.times.len() - 1) {
            Some(self.times.len() - 1)
        } else {
            None
        }
    }
}

/// Integrates the flow from `start` up to time `t_end`. For monotone fields
/// the distance to the nearest singularity must not grow; growth means the
/// step is unstable.
pub fn flow(spec: &SemigroupSpec, start: &Point, t_end: f64) -> Result<CurveTrace> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::OutOfRange {
            name: "T",
            value: t_end,
            reason: "horizon must be positive",
        });
    }
    let space = &spec.space;
    space.check(start)?;
    let anchor = spec.project_singular(start)?;
    let d0 = space.dist_coords(start.coords(), anchor.coords());
    let (n, last) = spec.steps(t_end);
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    times.push(0.0);
    points.push(start.clone());
    let mut x = start.coords().to_vec();
    for i in 1..=n {
        let dt = if i == n { last } else { spec.h };
        x = spec.rk4_step(&x, dt);
        let t = if i == n { t_end } else { i as f64 * spec.h };
        if !x.iter().all(|v| v.is_finite()) || !space.contains(&x) {
            return Err(match space {
                SpaceHandle::Disk(_) => Error::BoundaryExcursion {
                    space: space.id(),
                    coords: x,
                },
                _ => Error::StepInstability {
                    time: t,
                    growth: f64::INFINITY,
                },
            });
        }
        if spec.monotone {
            let d = space.dist_coords(&x, anchor.coords());
            if d > d0 * (1.0 + tol::CONTRACT) + tol::ALGEBRAIC {
                return Err(Error::StepInstability {
                    time: t,
                    growth: d / d0,
                });
            }
        }
        times.push(t);
        points.push(Point::from_raw(space.id(), x.clone()));
    }
    Ok(CurveTrace {
        start: start.clone(),
        times,
        points,
        h: spec.h,
    })
}

/// `S(t)x` without keeping the trajectory; `S(0)x = x`.
pub fn evolve(spec: &SemigroupSpec, x: &Point, t: f64) -> Result<Point> {
    if t == 0.0 {
        spec.space.check(x)?;
        return Ok(x.clone());
    }
    Ok(flow(spec, x, t)?.points.pop().unwrap())
}

/// Certified continuous mean over the window `[s, s + t_eval]`, whose ends
/// must be grid nodes.
pub fn continuous_mean(
    space: &SpaceHandle,
    curve: &CurveTrace,
    t_eval: f64,
    s: f64,
) -> Result<(Point, MeanCertificate)> {
    let (problem, init) = window_problem(space, curve, t_eval, s)?;
    KarcherSolver::new(MEAN_TOL)
        .warm_start(init)
        .solve(&problem)
}

fn window_problem(
    space: &SpaceHandle,
    curve: &CurveTrace,
    t_eval: f64,
    s: f64,
) -> Result<(FrechetProblem, Point)> {
    if t_eval.is_nan() || t_eval <= 0.0 || s < 0.0 {
        return Err(Error::InvalidProblem(format!(
            "mean window [{s}, {s} + {t_eval}] is empty or starts before 0"
        )));
    }
    if s + t_eval > curve.horizon() * (1.0 + 1e-12) {
        return Err(Error::InvalidProblem(format!(
            "mean window ends at {} beyond the curve horizon {}",
            s + t_eval,
            curve.horizon()
        )));
    }
    let (i0, i1) = match (curve.node(s), curve.node(s + t_eval)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InvalidProblem(format!(
                "mean window [{s}, {}] is not aligned with the step {}",
                s + t_eval,
                curve.h
            )))
        }
    };
    if i1 + 1 - i0 < MIN_WINDOW_NODES {
        return Err(Error::InvalidProblem(format!(
            "grid too coarse: {} nodes in the mean window, need {MIN_WINDOW_NODES}",
            i1 + 1 - i0
        )));
    }
    let t = &curve.times[i0..=i1];
    let mut weights = vec![0.0; t.len()];
    for (j, w) in t.windows(2).enumerate() {
        let half = 0.5 * (w[1] - w[0]);
        weights[j] += half;
        weights[j + 1] += half;
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let anchors = curve.points[i0..=i1].to_vec();
    let init = anchors[anchors.len() / 2].clone();
    Ok((FrechetProblem::weighted(*space, anchors, weights)?, init))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupRecord {
    pub t: f64,
    pub mean: Point,
    pub certificate: MeanCertificate,
    /// `(s, σ_T^s, certificate)` in `s_list` order.
    pub shifted: Vec<(f64, Point, MeanCertificate)>,
    /// `d(σ_T, S(r)σ_T)`.
    pub residual_r: f64,
    /// `d(σ_T, σ_T^s)`.
    pub shift_gaps: Vec<f64>,
    /// `d(P S(T)x, S(T)x)` with `P` the projection onto the singular set.
    pub proj_dist: f64,
    pub cert_gap: f64,
    /// `d(σ_T, p̂)` for the limit candidate `p̂`.
    pub limit_dist: f64,
    /// `d(S(T)x, S(r)S(T)x)`.
    pub state_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupDiagnostics {
    pub r: f64,
    pub s_list: Vec<f64>,
    /// `P S(T)x` at the curve horizon.
    pub limit: Point,
    pub records: Vec<SemigroupRecord>,
    /// Step-to-step increases of `d(P S(t)x, S(t)x)` along the curve.
    pub projection_monotone: ViolationReport,
}

/// Means at every `T` in `t_list` with their residual, shift and projection
/// diagnostics. The curve must reach `max T + max s`.
pub fn semigroup_diagnostics(
    spec: &SemigroupSpec,
    curve: &CurveTrace,
    t_list: &[f64],
    s_list: &[f64],
    r: f64,
) -> Result<SemigroupDiagnostics> {
    let space = spec.space;
    if t_list.is_empty() || t_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProblem(
            "T list must be nonempty and increasing".into(),
        ));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            reason: "residual time must be positive",
        });
    }
    let d = |a: &Point, b: &Point| space.dist_coords(a.coords(), b.coords());

    let mut projection_monotone =
        ViolationReport::new("projection distance nonincreasing", tol::CONTRACT);
    let mut prev: Option<f64> = None;
    for (i, x) in curve.points.iter().enumerate() {
        let dist = d(&spec.project_singular(x)?, x);
        if let Some(p) = prev {
            projection_monotone.record(dist - p, || Witness {
                points: vec![x.clone()],
                params: vec![curve.times[i]],
            });
        }
        prev = Some(dist);
    }
    let limit = spec.project_singular(curve.end())?;

    let mut records = Vec::with_capacity(t_list.len());
    let mut warm: Vec<Option<Point>> = vec![None; s_list.len() + 1];
    for &t in t_list {
        let mut solved = Vec::with_capacity(s_list.len() + 1);
        for (slot, s) in std::iter::once(0.0)
            .chain(s_list.iter().copied())
            .enumerate()
        {
            let (problem, init) = window_problem(&space, curve, t, s)?;
            let init = warm[slot].take().unwrap_or(init);
            let (m, c) = KarcherSolver::new(MEAN_TOL)
                .warm_start(init)
                .solve(&problem)?;
            warm[slot] = Some(m.clone());
            solved.push((s, m, c));
        }
        let (_, mean, certificate) = solved.remove(0);
        let state = &curve.points[curve.node(t).expect("window checked")];
        let proj_dist = d(&spec.project_singular(state)?, state);
        let cert_gap = std::iter::once(&certificate)
            .chain(solved.iter().map(|(_, _, c)| c))
            .map(|c| c.worst_gap.min(c.worst_slack))
            .fold(f64::INFINITY, f64::min);
        records.push(SemigroupRecord {
            t,
            residual_r: d(&mean, &evolve(spec, &mean, r)?),
            shift_gaps: solved.iter().map(|(_, m, _)| d(&mean, m)).collect(),
            proj_dist,
            cert_gap,
            limit_dist: d(&mean, &limit),
            state_residual: d(state, &evolve(spec, state, r)?),
            mean,
            certificate,
            shifted: solved,
        });
    }
    Ok(SemigroupDiagnostics {
        r,
        s_list: s_list.to_vec(),
        limit,
        records,
        projection_monotone,
    })
}

/// Converged when the largest-`T` mean is within `tol_verdict` of the limit
/// candidate `P S(T)x` and its residual under `S(r)` is within `tol_verdict`.
pub fn semigroup_verdict(diag: &SemigroupDiagnostics, tol_verdict: f64) -> Verdict {
    let ok = |r: &SemigroupRecord| r.limit_dist <= tol_verdict && r.residual_r <= tol_verdict;
    let last = diag.records.last().expect("diagnostics are never empty");
    Verdict {
        limit_candidate: diag.limit.clone(),
        agreement: last.limit_dist,
        agreement_basis: AgreementBasis::ProjectionLimit,
        residual: last.residual_r,
        status: if ok(last) {
            VerdictStatus::Converged
        } else {
            VerdictStatus::Inconclusive
        },
        converged_at: diag.records.iter().find(|r| ok(r)).map(|r| r.t),
        tol_verdict,
    }
}

/// Sampled monotonicity: `⟨A(x) − A(y), x − y⟩ ≥ 0` in Euclidean space and
/// `⟨A(x), log_x y⟩ + ⟨A(y), log_y x⟩ ≤ 0` on the disk. The recorded excess
/// is the amount by which monotonicity fails.
pub fn check_monotone(
    spec: &SemigroupSpec,
    rng_seed: u64,
    n_pairs: usize,
    tol: f64,
) -> ViolationReport {
    let space = &spec.space;
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new(format!("monotone {}", spec.field), tol);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(a, b)| a * b).sum::<f64>();
    for _ in 0..n_pairs {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let (ax, ay) = (spec.field_at(x.coords()), spec.field_at(y.coords()));
        let excess = match space {
            SpaceHandle::Disk(_) => {
                // Coordinate velocity u at z is 2u / (1 − |z|²) in the
                // orthonormal frame used by log.
                let frame = |z: &[f64], u: &[f64]| {
                    let s = 2.0 / (1.0 - to_complex(z).norm_sqr());
                    [s * u[0], s * u[1]]
                };
                let lxy = log_c(to_complex(x.coords()), to_complex(y.coords()));
                let lyx = log_c(to_complex(y.coords()), to_complex(x.coords()));
                dot(&frame(x.coords(), &ax), &[lxy.re, lxy.im])
                    + dot(&frame(y.coords(), &ay), &[lyx.re, lyx.im])
            }
            _ => {
                let da: Vec<f64> = ax.iter().zip(&ay).map(|(a, b)| a - b).collect();
                let dx: Vec<f64> = x
                    .coords()
                    .iter()
                    .zip(y.coords())
                    .map(|(a, b)| a - b)
                    .collect();
                -dot(&da, &dx)
            }
        };
        report.record(excess, || Witness {
            points: vec![x.clone(), y.clone()],
            params: vec![],
        });
    }
    report
}

/// One report per semigroup axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    /// (i) `S(0)x = x`.
    pub identity: ViolationReport,
    /// (ii) `S(t+s)x = S(t)S(s)x` on grid-aligned times.
    pub composition: ViolationReport,
    /// (iii) `d(S(δ)x, x) ≤ δ·|A(x)|` for short grid times `δ`.
    pub continuity: ViolationReport,
    /// (iv) `d(S(t)x, S(t)y) ≤ d(x, y)(1 + h²)`; the `h²` term is the
    /// discretization slack.
    pub contraction: ViolationReport,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.all().iter().all(|r| r.passed())
    }

    pub fn all(&self) -> [&ViolationReport; 4] {
        [
            &self.identity,
            &self.composition,
            &self.continuity,
            &self.contraction,
        ]
    }
}

/// Samples points and grid times `t, s ∈ {0, h, …, 200h}` and checks the
/// four semigroup axioms.
pub fn check_semigroup_axioms(
    spec: &SemigroupSpec,
    rng_seed: u64,
    n_samples: usize,
) -> Result<AxiomReport> {
    let space = &spec.space;
    let h = spec.h;
    let mut rng = seeded_rng(rng_seed);
    let d = |a: &Point, b: &Point| space.dist_coords(a.coords(), b.coords());
    let slack = h * h;
    let mut report = AxiomReport {
        identity: ViolationReport::new("S(0) = identity", 0.0),
        composition: ViolationReport::new("S(t+s) = S(t)S(s)", tol::CONTRACT),
        continuity: ViolationReport::new("d(S(t)x, x) <= t|A(x)|", tol::CONTRACT),
        contraction: ViolationReport::new(
            format!("d(S(t)x, S(t)y) <= d(x, y)(1 + {slack:e})"),
            tol::CONTRACT,
        ),
    };
    for _ in 0..n_samples {
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let (i, j) = (
            rng.random_range(0..=200usize),
            rng.random_range(0..=200usize),
        );
        let (t, s) = (i as f64 * h, j as f64 * h);
        let wit = |pts: Vec<Point>, params: Vec<f64>| {
            move || Witness {
                points: pts,
                params,
            }
        };

        let s0 = evolve(spec, &x, 0.0)?;
        report
            .identity
            .record(d(&s0, &x), wit(vec![x.clone()], vec![0.0]));

        let lhs = evolve(spec, &x, (i + j) as f64 * h)?;
        let rhs = evolve(spec, &evolve(spec, &x, s)?, t)?;
        report.composition.record(
            d(&lhs, &rhs),
            wit(vec![x.clone(), lhs.clone(), rhs.clone()], vec![t, s]),
        );

        let delta = rng.random_range(1..=10usize) as f64 * h;
        let moved = evolve(spec, &x, delta)?;
        let bound = delta * spec.field_norm(&x)?;
        report.continuity.record(
            d(&moved, &x) - bound,
            wit(vec![x.clone(), moved.clone()], vec![delta]),
        );

        let (tx, ty) = (evolve(spec, &x, t)?, evolve(spec, &y, t)?);
        let excess = d(&tx, &ty) - d(&x, &y) * (1.0 + slack);
        report.contraction.record(
            excess,
            wit(vec![x.clone(), y.clone(), tx.clone(), ty.clone()], vec![t]),
        );
    }
    Ok(report)
}

/// Samples singular points `z` (with `A(z) = 0`) and records the largest
/// `d(S(t)z, z)` over the grid times up to `t_max`.
pub fn check_singularities_fixed(
    spec: &SemigroupSpec,
    rng_seed: u64,
    n_points: usize,
    t_max: f64,
) -> Result<ViolationReport> {
    let space = &spec.space;
    let mut rng = seeded_rng(rng_seed);
    let mut report = ViolationReport::new("singularities are fixed", tol::CONTRACT);
    for _ in 0..n_points {
        let z = spec.project_singular(&space.sample(&mut rng))?;
        let curve = flow(spec, &z, t_max)?;
        let worst = curve
            .points
            .iter()
            .map(|p| space.dist_coords(p.coords(), z.coords()))
            .fold(0.0, f64::max);
        report.record(worst, || Witness {
            points: vec![z.clone()],
            params: vec![t_max],
        });
    }
    Ok(report)
}

/// Drift of `σ_T` between steps `h`, `h/2` and `h/4`: returns
/// `(d(σ_h, σ_{h/2}), d(σ_{h/2}, σ_{h/4}))`. Their ratio is about 4 for a
/// second-order quadrature.
pub fn quadrature_drifts(spec: &SemigroupSpec, start: &Point, t_eval: f64) -> Result<(f64, f64)> {
    let space = &spec.space;
    let means: Vec<Point> = [1.0, 0.5, 0.25]
        .iter()
        .map(|f| {
            let spec = spec.with_step(spec.h * f)?;
            let curve = flow(&spec, start, t_eval)?;
            Ok(continuous_mean(space, &curve, t_eval, 0.0)?.0)
        })
        .collect::<Result<_>>()?;
    let d = |a: &Point, b: &Point| space.dist_coords(a.coords(), b.coords());
    Ok((d(&means[0], &means[1]), d(&means[1], &means[2])))
}
