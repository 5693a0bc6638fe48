//! Exhaustive metric evaluation over misalignment lattices.
//!
//! A sweep pins cloud 1 in place and moves cloud 2 over a regular lattice
//! of translations along, or rotations about, one to three axes. Rotations
//! spin the moving cloud about its own centroid, taken once at the input
//! pose. The entropy radius is likewise frozen from the input pose, so
//! every cell sees the same `r`.
//!
//! The lattice always contains the exact-zero cell, which is what argmin
//! displacement errors are measured against.

use crate::cloud::PointCloud;
use crate::entropy::{kahan_sum, r4th_mean};
use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::spatial::SpatialIndex;
use crate::transform::{apply_transform, RigidTransform};
use crate::{cast, Scalar};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(&self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    /// Parses a compact axis list such as "xy" or "xz".
    pub fn parse_list(s: &str) -> Result<Vec<Axis>> {
        s.chars()
            .map(|c| match c.to_ascii_lowercase() {
                'x' => Ok(Axis::X),
                'y' => Ok(Axis::Y),
                'z' => Ok(Axis::Z),
                other => Err(Error::validation(format!("unknown axis '{other}'"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    TranslateAxis,
    TranslatePlane,
    TranslateVolume,
    RotateAxis,
    RotatePlane,
    RotateVolume,
}

impl SweepMode {
    pub fn arity(&self) -> usize {
        match self {
            SweepMode::TranslateAxis | SweepMode::RotateAxis => 1,
            SweepMode::TranslatePlane | SweepMode::RotatePlane => 2,
            SweepMode::TranslateVolume | SweepMode::RotateVolume => 3,
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(
            self,
            SweepMode::RotateAxis | SweepMode::RotatePlane | SweepMode::RotateVolume
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepMode::TranslateAxis => "translate-axis",
            SweepMode::TranslatePlane => "translate-plane",
            SweepMode::TranslateVolume => "translate-volume",
            SweepMode::RotateAxis => "rotate-axis",
            SweepMode::RotatePlane => "rotate-plane",
            SweepMode::RotateVolume => "rotate-volume",
        }
    }
}

impl FromStr for SweepMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "translate-axis" => Ok(SweepMode::TranslateAxis),
            "translate-plane" => Ok(SweepMode::TranslatePlane),
            "translate-volume" => Ok(SweepMode::TranslateVolume),
            "rotate-axis" => Ok(SweepMode::RotateAxis),
            "rotate-plane" => Ok(SweepMode::RotatePlane),
            "rotate-volume" => Ok(SweepMode::RotateVolume),
            other => Err(Error::validation(format!("unknown sweep mode '{other}'"))),
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    #[serde(rename = "qtot")]
    QTot,
    #[serde(rename = "rmse-12")]
    Rmse1to2,
    #[serde(rename = "rmse-21")]
    Rmse2to1,
    Chamfer,
    Hausdorff,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::QTot,
        MetricKind::Rmse1to2,
        MetricKind::Rmse2to1,
        MetricKind::Chamfer,
        MetricKind::Hausdorff,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::QTot => "qtot",
            MetricKind::Rmse1to2 => "rmse-12",
            MetricKind::Rmse2to1 => "rmse-21",
            MetricKind::Chamfer => "chamfer",
            MetricKind::Hausdorff => "hausdorff",
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qtot" => Ok(MetricKind::QTot),
            "rmse-12" => Ok(MetricKind::Rmse1to2),
            "rmse-21" => Ok(MetricKind::Rmse2to1),
            "chamfer" => Ok(MetricKind::Chamfer),
            "hausdorff" => Ok(MetricKind::Hausdorff),
            other => Err(Error::validation(format!("unknown metric '{other}'"))),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What to sweep: lattice geometry, metrics to evaluate, entropy scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub mode: SweepMode,
    pub axes: Vec<Axis>,
    /// Half-extent: cells run from -range to +range. Units are length for
    /// translation modes, degrees for rotation modes.
    pub range: T,
    pub step: T,
    pub metrics: Vec<MetricKind>,
    pub a: T,
}

impl<T: Scalar> SweepSpec<T> {
    fn validate(&self) -> Result<()> {
        if self.axes.len() != self.mode.arity() {
            return Err(Error::validation(format!(
                "mode {} needs {} axes, got {}",
                self.mode,
                self.mode.arity(),
                self.axes.len()
            )));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[..i].contains(a) {
                return Err(Error::validation(format!("axis {} repeated", a.name())));
            }
        }
        if !(self.step > T::zero()) {
            return Err(Error::validation("step must be positive"));
        }
        if !(self.range >= self.step) {
            return Err(Error::validation("range must be at least one step"));
        }
        if self.metrics.is_empty() {
            return Err(Error::validation("at least one metric required"));
        }
        for (i, m) in self.metrics.iter().enumerate() {
            if self.metrics[..i].contains(m) {
                return Err(Error::validation(format!("metric {m} repeated")));
            }
        }
        if !(self.a > T::zero()) {
            return Err(Error::validation("scale factor a must be positive"));
        }
        Ok(())
    }

    /// Lattice coordinates for one axis: `i * step` for integer `i`, so the
    /// zero cell is exact.
    fn coords(&self) -> Vec<T> {
        let per_side = (self.range.to_f64().unwrap() / self.step.to_f64().unwrap() + 1e-9)
            .floor() as i64;
        (-per_side..=per_side)
            .map(|i| cast::<T>(i as f64) * self.step)
            .collect()
    }
}

/// One metric's values over the lattice, row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone)]
pub struct MetricLayer<T> {
    pub metric: MetricKind,
    pub values: Vec<T>,
}

/// Evaluated sweep result.
#[derive(Debug, Clone)]
pub struct SweepGrid<T> {
    pub spec: SweepSpec<T>,
    /// Lattice coordinates per swept axis.
    pub coords: Vec<Vec<T>>,
    pub dims: Vec<usize>,
    pub layers: Vec<MetricLayer<T>>,
    /// Frozen entropy radius (a * weighted r4th at the input pose).
    pub r: T,
    pub r4th_1: T,
    pub r4th_2: T,
    pub weighted_r4th: T,
    pub rotation_center: Option<Point3<T>>,
}

impl<T: Scalar> SweepGrid<T> {
    pub fn cell_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Grid index of the exact-zero cell on every axis.
    pub fn zero_cell(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d / 2).collect()
    }

    fn flat_index(&self, cell: &[usize]) -> usize {
        let mut idx = 0;
        for (i, &c) in cell.iter().enumerate() {
            idx = idx * self.dims[i] + c;
        }
        idx
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut cell = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            cell[i] = flat % self.dims[i];
            flat /= self.dims[i];
        }
        cell
    }

    pub fn layer(&self, metric: MetricKind) -> Result<&MetricLayer<T>> {
        self.layers
            .iter()
            .find(|l| l.metric == metric)
            .ok_or_else(|| Error::validation(format!("grid has no {metric} layer")))
    }

    pub fn value_at(&self, metric: MetricKind, cell: &[usize]) -> Result<T> {
        Ok(self.layer(metric)?.values[self.flat_index(cell)])
    }

    /// Physical offset of a cell from the zero cell (Euclidean over the
    /// swept axes; degrees count as the unit for rotation sweeps).
    pub fn cell_offset_norm(&self, cell: &[usize]) -> T {
        let mut acc = T::zero();
        for (axis, &c) in cell.iter().enumerate() {
            let v = self.coords[axis][c];
            acc = acc + v * v;
        }
        acc.sqrt()
    }

    /// Minimizing cell of a metric. Exact ties prefer the zero cell, then
    /// the cell nearest zero, then the lexicographically smallest index.
    pub fn argmin_cell(&self, metric: MetricKind) -> Result<Vec<usize>> {
        let layer = self.layer(metric)?;
        let mut min = T::infinity();
        for &v in &layer.values {
            min = min.min(v);
        }
        let zero = self.zero_cell();
        if layer.values[self.flat_index(&zero)] == min {
            return Ok(zero);
        }
        let mut best: Option<(T, Vec<usize>)> = None;
        for (flat, &v) in layer.values.iter().enumerate() {
            if v == min {
                let cell = self.unflatten(flat);
                let d = self.cell_offset_norm(&cell);
                let better = match &best {
                    None => true,
                    Some((bd, _)) => d < *bd,
                };
                if better {
                    best = Some((d, cell));
                }
            }
        }
        Ok(best.expect("grid is non-empty").1)
    }

    /// Distance from the metric's argmin cell to the zero cell, in sweep
    /// units. This is the per-metric alignment error the experiment tables
    /// report.
    pub fn argmin_error(&self, metric: MetricKind) -> Result<T> {
        let cell = self.argmin_cell(metric)?;
        Ok(self.cell_offset_norm(&cell))
    }

    /// Values along one axis through the zero cell.
    pub fn line_through_zero(&self, metric: MetricKind, axis: usize) -> Result<Vec<T>> {
        let layer = self.layer(metric)?;
        let mut cell = self.zero_cell();
        Ok((0..self.dims[axis])
            .map(|i| {
                cell[axis] = i;
                layer.values[self.flat_index(&cell)]
            })
            .collect())
    }

    /// 2D slice through the zero cell of the remaining axes; values row-major
    /// over (axis_a, axis_b).
    pub fn slice_through_zero(
        &self,
        metric: MetricKind,
        axis_a: usize,
        axis_b: usize,
    ) -> Result<Vec<T>> {
        let layer = self.layer(metric)?;
        let mut cell = self.zero_cell();
        let mut out = Vec::with_capacity(self.dims[axis_a] * self.dims[axis_b]);
        for i in 0..self.dims[axis_a] {
            for j in 0..self.dims[axis_b] {
                cell[axis_a] = i;
                cell[axis_b] = j;
                out.push(layer.values[self.flat_index(&cell)]);
            }
        }
        Ok(out)
    }
}

/// Runs a sweep of `spec` holding `cloud1` fixed and moving `cloud2`.
pub fn run_sweep<T: Scalar>(
    cloud1: &PointCloud<T>,
    cloud2: &PointCloud<T>,
    spec: &SweepSpec<T>,
) -> Result<SweepGrid<T>> {
    spec.validate()?;

    let r4th_1 = r4th_mean(cloud1)?;
    let r4th_2 = r4th_mean(cloud2)?;
    let weighted = crate::entropy::cross_weighted_mean(r4th_1, cloud1.len(), r4th_2, cloud2.len());
    let r = spec.a * weighted;

    let rotation_center = spec.mode.is_rotation().then(|| cloud2.centroid());

    let axis_coords = spec.coords();
    let coords: Vec<Vec<T>> = spec.axes.iter().map(|_| axis_coords.clone()).collect();
    let dims: Vec<usize> = coords.iter().map(|c| c.len()).collect();
    let total: usize = dims.iter().product();

    let want_baselines = spec
        .metrics
        .iter()
        .any(|m| *m != MetricKind::QTot);
    let fixed_index = want_baselines.then(|| SpatialIndex::build(cloud1));

    let cell_values: Vec<Vec<T>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let cell = unflatten(flat, &dims);
            let transform = cell_transform(spec, &coords, &cell, rotation_center);
            let moved = apply_transform(cloud2, &transform);
            evaluate_cell(cloud1, &moved, spec, r, fixed_index.as_ref())
        })
        .collect::<Result<Vec<_>>>()?;

    let layers = spec
        .metrics
        .iter()
        .enumerate()
        .map(|(mi, &metric)| MetricLayer {
            metric,
            values: cell_values.iter().map(|cv| cv[mi]).collect(),
        })
        .collect();

    Ok(SweepGrid {
        spec: spec.clone(),
        coords,
        dims,
        layers,
        r,
        r4th_1,
        r4th_2,
        weighted_r4th: weighted,
        rotation_center,
    })
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut cell = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        cell[i] = flat % dims[i];
        flat /= dims[i];
    }
    cell
}

fn cell_transform<T: Scalar>(
    spec: &SweepSpec<T>,
    coords: &[Vec<T>],
    cell: &[usize],
    rotation_center: Option<Point3<T>>,
) -> RigidTransform<T> {
    if spec.mode.is_rotation() {
        let mut angles = [T::zero(); 3];
        for (i, axis) in spec.axes.iter().enumerate() {
            angles[axis.index()] = coords[i][cell[i]];
        }
        RigidTransform::from_pose(
            rotation_center.expect("rotation sweeps carry a center"),
            Point3::zero(),
            angles,
        )
    } else {
        let mut t = Point3::zero();
        for (i, axis) in spec.axes.iter().enumerate() {
            match axis {
                Axis::X => t.x = coords[i][cell[i]],
                Axis::Y => t.y = coords[i][cell[i]],
                Axis::Z => t.z = coords[i][cell[i]],
            }
        }
        RigidTransform::translation_only(t)
    }
}

/// Evaluates the requested metrics for one already-transformed cell.
///
/// Nearest-neighbour distances are computed once per direction and shared
/// by RMSE, Chamfer, and Hausdorff; the arithmetic is identical to the
/// standalone metric functions.
fn evaluate_cell<T: Scalar>(
    fixed: &PointCloud<T>,
    moved: &PointCloud<T>,
    spec: &SweepSpec<T>,
    r: T,
    fixed_index: Option<&SpatialIndex<'_, T>>,
) -> Result<Vec<T>> {
    let mut d12: Vec<T> = Vec::new();
    let mut d21: Vec<T> = Vec::new();
    if let Some(fixed_index) = fixed_index {
        let moved_index = SpatialIndex::build(moved);
        d12 = fixed.iter().map(|p| moved_index.nearest_distance(p)).collect();
        d21 = moved.iter().map(|p| fixed_index.nearest_distance(p)).collect();
    }

    let rmse = |d: &[T]| {
        let sum = kahan_sum(d.iter().map(|&x| x * x));
        (sum / cast::<T>(d.len() as f64)).sqrt()
    };
    let mean = |d: &[T]| kahan_sum(d.iter().copied()) / cast::<T>(d.len() as f64);
    let max = |d: &[T]| d.iter().copied().fold(T::zero(), T::max);

    spec.metrics
        .iter()
        .map(|metric| {
            Ok(match metric {
                MetricKind::QTot => crate::entropy::q_tot(
                    fixed,
                    moved,
                    &crate::entropy::EntropyParams::with_radius(spec.a, r)?,
                )?,
                MetricKind::Rmse1to2 => rmse(&d12),
                MetricKind::Rmse2to1 => rmse(&d21),
                MetricKind::Chamfer => (mean(&d12) + mean(&d21)) / cast::<T>(2.0),
                MetricKind::Hausdorff => max(&d12).max(max(&d21)),
            })
        })
        .collect()
}

/// Per-axis region of interest: the band between the outermost local maxima
/// bracketing the zero cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoiBounds<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

/// Derives the region of interest from a metric's profiles through the zero
/// cell, one axis at a time.
///
/// A local maximum is a cell strictly above both neighbours; a plateau of
/// equal values above both neighbours counts once, at its cell nearest
/// zero. Maxima below a relative noise floor of the profile's peak are
/// ignored. Errors if either side of zero lacks a maximum on some axis.
pub fn locate_roi<T: Scalar>(grid: &SweepGrid<T>, metric: MetricKind) -> Result<RoiBounds<T>> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for axis in 0..grid.dims.len() {
        let profile = grid.line_through_zero(metric, axis)?;
        let coords = &grid.coords[axis];
        let peaks = local_maxima(&profile, coords);
        let left = peaks
            .iter()
            .filter(|&&(c, _)| c < T::zero())
            .map(|&(c, _)| c)
            .fold(None::<T>, |acc, c| Some(acc.map_or(c, |a| a.min(c))));
        let right = peaks
            .iter()
            .filter(|&&(c, _)| c > T::zero())
            .map(|&(c, _)| c)
            .fold(None::<T>, |acc, c| Some(acc.map_or(c, |a| a.max(c))));
        match (left, right) {
            (Some(l), Some(r)) => {
                lower.push(l);
                upper.push(r);
            }
            _ => {
                return Err(Error::NoRoi(format!(
                    "axis {} profile of {metric} has no local maxima bracketing zero",
                    grid.spec.axes[axis].name()
                )));
            }
        }
    }
    Ok(RoiBounds { lower, upper })
}

/// (coordinate, value) of each significant interior local maximum.
fn local_maxima<T: Scalar>(profile: &[T], coords: &[T]) -> Vec<(T, T)> {
    let n = profile.len();
    let mut global_max = T::zero();
    for &v in profile {
        global_max = global_max.max(v);
    }
    // Relative floor keeps last-bit wiggles in flat tails from counting as
    // structure.
    let floor = global_max * cast::<T>(1e-9);

    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if profile[i] <= profile[i - 1] {
            i += 1;
            continue;
        }
        // run of equal values starting at i
        let mut j = i;
        while j + 1 < n && profile[j + 1] == profile[i] {
            j += 1;
        }
        if j + 1 < n && profile[j + 1] < profile[i] && profile[i] > floor {
            // representative cell: the run cell nearest zero coordinate
            let rep = (i..=j)
                .min_by(|&a, &b| {
                    coords[a]
                        .abs()
                        .partial_cmp(&coords[b].abs())
                        .expect("finite coords")
                })
                .unwrap();
            peaks.push((coords[rep], profile[i]));
        }
        i = j + 1;
    }
    peaks
}

/// Writes one metric layer as CSV.
///
/// 1D grids become (coordinate, value) rows; 2D grids a matrix with the
/// first axis down the rows and the second across the columns, coordinates
/// in the header row and column; 3D grids one (x, y, z, value) row per cell.
pub fn export_grid<T: Scalar>(
    grid: &SweepGrid<T>,
    metric: MetricKind,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let layer = grid.layer(metric)?;
    let mut out = String::new();
    match grid.dims.len() {
        1 => {
            out.push_str(&format!("{},{}\n", grid.spec.axes[0].name(), metric));
            for (i, &v) in layer.values.iter().enumerate() {
                out.push_str(&format!("{},{}\n", grid.coords[0][i], v));
            }
        }
        2 => {
            out.push_str(&format!(
                "{}\\{}",
                grid.spec.axes[0].name(),
                grid.spec.axes[1].name()
            ));
            for c in &grid.coords[1] {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
            for i in 0..grid.dims[0] {
                out.push_str(&format!("{}", grid.coords[0][i]));
                for j in 0..grid.dims[1] {
                    out.push_str(&format!(",{}", layer.values[i * grid.dims[1] + j]));
                }
                out.push('\n');
            }
        }
        _ => {
            let names: Vec<&str> = grid.spec.axes.iter().map(|a| a.name()).collect();
            out.push_str(&format!("{},{}\n", names.join(","), metric));
            for (flat, &v) in layer.values.iter().enumerate() {
                let cell = grid.unflatten(flat);
                let coords: Vec<String> = cell
                    .iter()
                    .enumerate()
                    .map(|(a, &c)| format!("{}", grid.coords[a][c]))
                    .collect();
                out.push_str(&format!("{},{}\n", coords.join(","), v));
            }
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes a metric layer as a portable graymap (`P2`), min-max normalized,
/// plus a `<path>.json` sidecar recording the value range and the zero and
/// argmin cells. 1D and 2D grids only; volume grids are exported per slice.
pub fn export_image<T: Scalar>(
    grid: &SweepGrid<T>,
    metric: MetricKind,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let layer = grid.layer(metric)?;
    let (height, width) = match grid.dims.len() {
        1 => (1, grid.dims[0]),
        2 => (grid.dims[0], grid.dims[1]),
        n => {
            return Err(Error::validation(format!(
                "image export supports 1D and 2D grids, this one has {n} axes"
            )));
        }
    };

    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &v in &layer.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = hi - lo;

    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "P2")?;
        writeln!(w, "{width} {height}")?;
        writeln!(w, "255")?;
        for row in 0..height {
            let mut line = String::new();
            for col in 0..width {
                let v = layer.values[row * width + col];
                let g = if span > T::zero() {
                    ((v - lo) / span * cast::<T>(255.0))
                        .round()
                        .to_f64()
                        .unwrap() as u8
                } else {
                    0
                };
                if col > 0 {
                    line.push(' ');
                }
                line.push_str(&g.to_string());
            }
            writeln!(w, "{line}")?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))?;

    let sidecar = serde_json::json!({
        "metric": metric.name(),
        "width": width,
        "height": height,
        "min": lo.to_f64(),
        "max": hi.to_f64(),
        "zero_cell": grid.zero_cell(),
        "argmin_cell": grid.argmin_cell(metric)?,
        "axes": grid.spec.axes.iter().map(|a| a.name()).collect::<Vec<_>>(),
    });
    let sidecar_path = path.with_extension(format!(
        "{}.json",
        path.extension().and_then(|e| e.to_str()).unwrap_or("pgm")
    ));
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar).unwrap())
        .map_err(|e| Error::io(&sidecar_path, e))
}

/// Per-metric summary of a finished sweep, shaped for `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary<T> {
    pub mode: String,
    pub axes: Vec<String>,
    pub range: T,
    pub step: T,
    pub a: T,
    pub r: T,
    pub r4th_1: T,
    pub r4th_2: T,
    pub weighted_r4th: T,
    pub metrics: Vec<MetricSummary<T>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricSummary<T> {
    pub metric: String,
    pub argmin_cell: Vec<usize>,
    pub argmin_offset: Vec<T>,
    pub argmin_error: T,
    pub min: T,
    pub max: T,
    pub value_at_zero: T,
}

pub fn summarize<T: Scalar>(grid: &SweepGrid<T>) -> Result<SweepSummary<T>> {
    let mut metrics = Vec::new();
    for layer in &grid.layers {
        let cell = grid.argmin_cell(layer.metric)?;
        let offset: Vec<T> = cell
            .iter()
            .enumerate()
            .map(|(a, &c)| grid.coords[a][c])
            .collect();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &v in &layer.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        metrics.push(MetricSummary {
            metric: layer.metric.name().to_string(),
            argmin_error: grid.cell_offset_norm(&cell),
            argmin_cell: cell,
            argmin_offset: offset,
            min: lo,
            max: hi,
            value_at_zero: grid.value_at(layer.metric, &grid.zero_cell())?,
        });
    }
    Ok(SweepSummary {
        mode: grid.spec.mode.name().to_string(),
        axes: grid.spec.axes.iter().map(|a| a.name().to_string()).collect(),
        range: grid.spec.range,
        step: grid.spec.step,
        a: grid.spec.a,
        r: grid.r,
        r4th_1: grid.r4th_1,
        r4th_2: grid.r4th_2,
        weighted_r4th: grid.weighted_r4th,
        metrics,
    })
}
