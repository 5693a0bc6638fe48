//! Fine rigid registration by direct minimization of `q_tot`.
//!
//! The pose has six parameters: a translation vector and intrinsic XYZ
//! Euler angles in degrees, both about the moving cloud's centroid taken
//! once at the input pose. Every candidate transform is rebuilt from the
//! parameter vector, so rotations stay orthonormal no matter how many
//! steps the optimizer takes.
//!
//! The search never leaves the region of interest. Callers either supply
//! pose bounds or let the module derive them from one-dimensional sweeps
//! through the starting pose.

use crate::cloud::PointCloud;
use crate::entropy::{self, EntropyParams};
use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::sweep::{self, Axis, MetricKind, SweepMode, SweepSpec};
use crate::transform::{apply_transform, RigidTransform};
use crate::{cast, Scalar};
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    PatternSearch,
    NelderMead,
}

/// Inclusive bounds on the six pose parameters, ordered tx, ty, tz,
/// rx, ry, rz (translations in cloud units, rotations in degrees).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoseRoi<T> {
    pub lower: [T; 6],
    pub upper: [T; 6],
}

impl<T: Scalar> PoseRoi<T> {
    pub fn new(lower: [T; 6], upper: [T; 6]) -> Result<Self> {
        for i in 0..6 {
            if !(lower[i] <= upper[i]) {
                return Err(Error::validation(format!(
                    "pose bound {i}: lower {} exceeds upper {}",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(PoseRoi { lower, upper })
    }

    pub fn contains(&self, p: &[T; 6]) -> bool {
        (0..6).all(|i| self.lower[i] <= p[i] && p[i] <= self.upper[i])
    }

    fn clamp(&self, p: &mut [T; 6]) {
        for i in 0..6 {
            p[i] = p[i].max(self.lower[i]).min(self.upper[i]);
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegistrationConfig<T> {
    /// Radius multiplier for the frozen entropy radius.
    pub a: T,
    pub optimizer: Optimizer,
    /// Pose bounds; `None` derives them from six axis sweeps.
    pub roi: Option<PoseRoi<T>>,
    /// Starting guess applied to the moving cloud, default identity.
    pub initial_pose: RigidTransform<T>,
    /// Outer iteration budget covering accepted steps and shrinks.
    pub max_iters: usize,
    /// Convergence on the q_tot improvement of an accepted step; zero
    /// keeps stepping until the step floor is reached.
    pub q_tolerance: T,
    /// Convergence on translation step size; `None` means a thousandth
    /// of the initial step.
    pub step_tolerance: Option<T>,
    /// Initial translation step; `None` means r/4.
    pub translation_step: Option<T>,
    /// Initial rotation step in degrees.
    pub rotation_step_deg: T,
    /// Auto-ROI sweep geometry. Translation range `None` means 6r.
    pub roi_translation_step: T,
    pub roi_translation_range: Option<T>,
    pub roi_rotation_step_deg: T,
    pub roi_rotation_range_deg: T,
}

impl<T: Scalar> RegistrationConfig<T> {
    pub fn new(a: T) -> Self {
        RegistrationConfig {
            a,
            optimizer: Optimizer::PatternSearch,
            roi: None,
            initial_pose: RigidTransform::identity(),
            max_iters: 1000,
            q_tolerance: T::zero(),
            step_tolerance: None,
            translation_step: None,
            rotation_step_deg: T::one(),
            roi_translation_step: T::one(),
            roi_translation_range: None,
            roi_rotation_step_deg: T::one(),
            roi_rotation_range_deg: cast(30.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a > T::zero()) {
            return Err(Error::validation("scale factor a must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        if !(self.q_tolerance >= T::zero()) {
            return Err(Error::validation("q tolerance must be nonnegative"));
        }
        if let Some(s) = self.step_tolerance {
            if !(s > T::zero()) {
                return Err(Error::validation("step tolerance must be positive"));
            }
        }
        if let Some(s) = self.translation_step {
            if !(s > T::zero()) {
                return Err(Error::validation("translation step must be positive"));
            }
        }
        if !(self.rotation_step_deg > T::zero()) {
            return Err(Error::validation("rotation step must be positive"));
        }
        Ok(())
    }
}

/// One accepted point of the optimization path.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStep<T> {
    pub params: [T; 6],
    pub q_tot: T,
}

#[derive(Debug, Clone)]
pub struct RegistrationResult<T> {
    /// Maps the moving cloud as passed in onto the fixed cloud.
    pub transform: RigidTransform<T>,
    /// q_tot at the returned pose, the minimum found inside the ROI.
    pub q_idem: T,
    /// Accepted improvement steps.
    pub iterations: usize,
    /// Total metric evaluations spent.
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TraceStep<T>>,
    /// Frozen entropy radius used for every evaluation.
    pub r: T,
    pub roi: PoseRoi<T>,
}

/// Registers `moving` onto `fixed`, minimizing q_tot inside the ROI.
pub fn register<T: Scalar>(
    fixed: &PointCloud<T>,
    moving: &PointCloud<T>,
    config: &RegistrationConfig<T>,
) -> Result<RegistrationResult<T>> {
    config.validate()?;

    let r = config.a * entropy::weighted_r4th(fixed, moving)?;
    let params = EntropyParams::with_radius(config.a, r)?;
    let center = moving.centroid();

    let roi = match &config.roi {
        Some(roi) => roi.clone(),
        None => auto_roi(fixed, moving, config, r)?,
    };

    let (t0, ang0) = config.initial_pose.to_pose(center);
    let p0 = [t0.x, t0.y, t0.z, ang0[0], ang0[1], ang0[2]];
    if !roi.contains(&p0) {
        return Err(Error::PreAlignmentRequired(format!(
            "initial pose {:?} lies outside the region of interest",
            p0.map(|v| v.to_f64().unwrap_or(f64::NAN))
        )));
    }

    let mut evaluations = 0usize;
    let mut eval = |p: &[T; 6]| -> Result<T> {
        evaluations += 1;
        let transform = pose_transform(center, p);
        let moved = apply_transform(moving, &transform);
        entropy::q_tot(fixed, &moved, &params)
    };

    let ts = config.translation_step.unwrap_or(r / cast(4.0));
    let rs = config.rotation_step_deg;
    let step_floor = config
        .step_tolerance
        .unwrap_or(ts * cast(1e-3));

    let outcome = match config.optimizer {
        Optimizer::PatternSearch => pattern_search(
            p0, ts, rs, step_floor, &roi, config, &mut eval,
        )?,
        Optimizer::NelderMead => nelder_mead(
            p0, ts, rs, step_floor, &roi, config, &mut eval,
        )?,
    };

    let final_params = outcome.trace.last().expect("trace starts non-empty");
    Ok(RegistrationResult {
        transform: pose_transform(center, &final_params.params),
        q_idem: final_params.q_tot,
        iterations: outcome.trace.len() - 1,
        evaluations,
        converged: outcome.converged,
        trace: outcome.trace,
        r,
        roi,
    })
}

fn pose_transform<T: Scalar>(center: Point3<T>, p: &[T; 6]) -> RigidTransform<T> {
    RigidTransform::from_pose(center, Point3::new(p[0], p[1], p[2]), [p[3], p[4], p[5]])
}

/// Bounds the pose space with six one-dimensional q_tot sweeps through the
/// starting pose, one per translation axis and rotation axis.
fn auto_roi<T: Scalar>(
    fixed: &PointCloud<T>,
    moving: &PointCloud<T>,
    config: &RegistrationConfig<T>,
    r: T,
) -> Result<PoseRoi<T>> {
    let mut lower = [T::zero(); 6];
    let mut upper = [T::zero(); 6];
    let t_range = config
        .roi_translation_range
        .unwrap_or(r * cast(6.0));
    for (i, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
        let spec = SweepSpec {
            mode: SweepMode::TranslateAxis,
            axes: vec![axis],
            range: t_range,
            step: config.roi_translation_step,
            metrics: vec![MetricKind::QTot],
            a: config.a,
        };
        let grid = sweep::run_sweep(fixed, moving, &spec)?;
        let bounds = sweep::locate_roi(&grid, MetricKind::QTot)?;
        lower[i] = bounds.lower[0];
        upper[i] = bounds.upper[0];
    }
    for (i, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
        let spec = SweepSpec {
            mode: SweepMode::RotateAxis,
            axes: vec![axis],
            range: config.roi_rotation_range_deg,
            step: config.roi_rotation_step_deg,
            metrics: vec![MetricKind::QTot],
            a: config.a,
        };
        let grid = sweep::run_sweep(fixed, moving, &spec)?;
        let bounds = sweep::locate_roi(&grid, MetricKind::QTot)?;
        lower[3 + i] = bounds.lower[0];
        upper[3 + i] = bounds.upper[0];
    }
    PoseRoi::new(lower, upper)
}

/// Outcome of one pattern-search probe round.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome<T> {
    /// Strictly better pose found.
    Accepted([T; 6], T),
    /// No coordinate move improved; caller halves the steps.
    Shrink,
}

/// Probes +/- one step along each pose coordinate in fixed order and
/// accepts the first strict improvement. Candidates are clamped to the
/// ROI; a coordinate already pinned at a bound is skipped in that
/// direction.
pub fn pattern_search_step<T: Scalar>(
    p: &[T; 6],
    q: T,
    steps: &[T; 6],
    roi: &PoseRoi<T>,
    mut eval: impl FnMut(&[T; 6]) -> Result<T>,
) -> Result<StepOutcome<T>> {
    for coord in 0..6 {
        for sign in [T::one(), -T::one()] {
            let mut candidate = *p;
            candidate[coord] = candidate[coord] + sign * steps[coord];
            roi.clamp(&mut candidate);
            if candidate[coord] == p[coord] {
                continue;
            }
            let qc = eval(&candidate)?;
            if qc < q {
                return Ok(StepOutcome::Accepted(candidate, qc));
            }
        }
    }
    Ok(StepOutcome::Shrink)
}

struct SearchOutcome<T> {
    trace: Vec<TraceStep<T>>,
    converged: bool,
}

fn pattern_search<T: Scalar>(
    p0: [T; 6],
    translation_step: T,
    rotation_step: T,
    step_floor: T,
    roi: &PoseRoi<T>,
    config: &RegistrationConfig<T>,
    eval: &mut impl FnMut(&[T; 6]) -> Result<T>,
) -> Result<SearchOutcome<T>> {
    let mut p = p0;
    let mut q = eval(&p)?;
    let mut trace = vec![TraceStep { params: p, q_tot: q }];
    let mut steps = [
        translation_step,
        translation_step,
        translation_step,
        rotation_step,
        rotation_step,
        rotation_step,
    ];
    let half = cast::<T>(0.5);

    for _ in 0..config.max_iters {
        match pattern_search_step(&p, q, &steps, roi, &mut *eval)? {
            StepOutcome::Accepted(pc, qc) => {
                let gain = q - qc;
                p = pc;
                q = qc;
                trace.push(TraceStep { params: p, q_tot: q });
                if gain <= config.q_tolerance && config.q_tolerance > T::zero() {
                    return Ok(SearchOutcome { trace, converged: true });
                }
            }
            StepOutcome::Shrink => {
                for s in &mut steps {
                    *s = *s * half;
                }
                if steps[0] < step_floor {
                    return Ok(SearchOutcome { trace, converged: true });
                }
            }
        }
    }
    Ok(SearchOutcome { trace, converged: false })
}

fn nelder_mead<T: Scalar>(
    p0: [T; 6],
    translation_step: T,
    rotation_step: T,
    step_floor: T,
    roi: &PoseRoi<T>,
    config: &RegistrationConfig<T>,
    eval: &mut impl FnMut(&[T; 6]) -> Result<T>,
) -> Result<SearchOutcome<T>> {
    let offsets = [
        translation_step,
        translation_step,
        translation_step,
        rotation_step,
        rotation_step,
        rotation_step,
    ];

    let mut vertices: Vec<([T; 6], T)> = Vec::with_capacity(7);
    let q0 = eval(&p0)?;
    vertices.push((p0, q0));
    for i in 0..6 {
        let mut v = p0;
        v[i] = v[i] + offsets[i];
        roi.clamp(&mut v);
        if v[i] == p0[i] {
            // pinned at the upper bound: grow the simplex downward instead
            v[i] = p0[i] - offsets[i];
            roi.clamp(&mut v);
        }
        let qv = eval(&v)?;
        vertices.push((v, qv));
    }

    let mut trace = vec![TraceStep { params: p0, q_tot: q0 }];
    let mut best = q0;
    let half = cast::<T>(0.5);
    let two = cast::<T>(2.0);

    for _ in 0..config.max_iters {
        vertices.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite q_tot"));
        if vertices[0].1 < best {
            best = vertices[0].1;
            trace.push(TraceStep { params: vertices[0].0, q_tot: best });
        }

        let spread = vertices[6].1 - vertices[0].1;
        let diameter = simplex_diameter(&vertices);
        if spread <= config.q_tolerance || diameter < step_floor {
            return Ok(SearchOutcome { trace, converged: true });
        }

        let centroid = simplex_centroid(&vertices);
        let worst = vertices[6];

        let reflect = combine(&centroid, &worst.0, two, -T::one(), roi);
        let q_reflect = eval(&reflect)?;
        if q_reflect < vertices[0].1 {
            let expand = combine(&centroid, &worst.0, cast(3.0), -two, roi);
            let q_expand = eval(&expand)?;
            vertices[6] = if q_expand < q_reflect {
                (expand, q_expand)
            } else {
                (reflect, q_reflect)
            };
            continue;
        }
        if q_reflect < vertices[5].1 {
            vertices[6] = (reflect, q_reflect);
            continue;
        }
        let contract = if q_reflect < worst.1 {
            combine(&centroid, &reflect, half, half, roi)
        } else {
            combine(&centroid, &worst.0, half, half, roi)
        };
        let q_contract = eval(&contract)?;
        if q_contract < worst.1.min(q_reflect) {
            vertices[6] = (contract, q_contract);
            continue;
        }
        // shrink everything toward the best vertex
        let anchor = vertices[0].0;
        for v in vertices.iter_mut().skip(1) {
            let mut shrunk = [T::zero(); 6];
            for i in 0..6 {
                shrunk[i] = anchor[i] + half * (v.0[i] - anchor[i]);
            }
            roi.clamp(&mut shrunk);
            let qv = eval(&shrunk)?;
            *v = (shrunk, qv);
        }
    }
    vertices.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite q_tot"));
    if vertices[0].1 < best {
        trace.push(TraceStep { params: vertices[0].0, q_tot: vertices[0].1 });
    }
    Ok(SearchOutcome { trace, converged: false })
}

fn simplex_centroid<T: Scalar>(vertices: &[([T; 6], T)]) -> [T; 6] {
    // centroid of the six best vertices, the worst excluded
    let mut c = [T::zero(); 6];
    for v in &vertices[..6] {
        for i in 0..6 {
            c[i] = c[i] + v.0[i];
        }
    }
    let n = cast::<T>(6.0);
    for x in &mut c {
        *x = *x / n;
    }
    c
}

fn simplex_diameter<T: Scalar>(vertices: &[([T; 6], T)]) -> T {
    let mut d = T::zero();
    for a in vertices {
        for b in vertices {
            let mut acc = T::zero();
            for i in 0..6 {
                let delta = a.0[i] - b.0[i];
                acc = acc + delta * delta;
            }
            d = d.max(acc.sqrt());
        }
    }
    d
}

/// `wa * centroid + wb * other`, clamped to the ROI.
fn combine<T: Scalar>(
    centroid: &[T; 6],
    other: &[T; 6],
    wa: T,
    wb: T,
    roi: &PoseRoi<T>,
) -> [T; 6] {
    let mut out = [T::zero(); 6];
    for i in 0..6 {
        out[i] = wa * centroid[i] + wb * other[i];
    }
    roi.clamp(&mut out);
    out
}

/// Writes the registration path as CSV: one row per accepted step.
pub fn write_trace_csv<T: Scalar>(
    result: &RegistrationResult<T>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("step,tx,ty,tz,rx_deg,ry_deg,rz_deg,q_tot\n");
    for (i, step) in result.trace.iter().enumerate() {
        let p = &step.params;
        out.push_str(&format!(
            "{i},{},{},{},{},{},{},{}\n",
            p[0], p[1], p[2], p[3], p[4], p[5], step.q_tot
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes the final transform and run facts as JSON. The matrix is the
/// 4x4 row-major homogeneous form of the aligning transform.
pub fn write_transform_json<T: Scalar>(
    result: &RegistrationResult<T>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let m = result.transform.to_matrix4();
    let matrix: Vec<Vec<f64>> = m
        .iter()
        .map(|row| row.iter().map(|v| v.to_f64().unwrap()).collect())
        .collect();
    let doc = serde_json::json!({
        "matrix": matrix,
        "q_idem": result.q_idem.to_f64(),
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "r": result.r.to_f64(),
        "roi": {
            "lower": result.roi.lower.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>(),
            "upper": result.roi.upper.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>(),
        },
    });
    std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::io(path, e))
}
