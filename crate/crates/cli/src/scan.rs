//! One-parameter scans of the rotation number.

use std::str::FromStr;

use emch::series::{rotation_number, run_series};
use emch::{Circle, Direction, Error, Point, Scene, TangentCircle};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{closure_record, ClosureRecord};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Alpha0,
    Alpha1,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Radius,
    CenterX,
    CenterY,
}

/// A scalar of the scene, written `delta.radius`, `alpha0.center.x`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Param {
    pub which: Which,
    pub field: Field,
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, tail) = s.split_once('.').ok_or_else(|| format!("unknown parameter {s:?}"))?;
        let which = match head {
            "alpha0" | "α0" | "α₀" => Which::Alpha0,
            "alpha1" | "α1" | "α₁" => Which::Alpha1,
            "delta" | "δ" => Which::Delta,
            _ => return Err(format!("unknown circle {head:?} in {s:?}")),
        };
        let field = match tail {
            "radius" => Field::Radius,
            "center.x" => Field::CenterX,
            "center.y" => Field::CenterY,
            _ => return Err(format!("unknown field {tail:?} in {s:?}")),
        };
        Ok(Self { which, field })
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let head = match self.which {
            Which::Alpha0 => "alpha0",
            Which::Alpha1 => "alpha1",
            Which::Delta => "delta",
        };
        let tail = match self.field {
            Field::Radius => "radius",
            Field::CenterX => "center.x",
            Field::CenterY => "center.y",
        };
        write!(f, "{head}.{tail}")
    }
}

impl Param {
    /// The scene with this parameter set to `value`.
    pub fn apply(&self, scene: &Scene, value: f64) -> Result<Scene, Error> {
        let slot = |c: &Circle| -> Result<Circle, Error> {
            match self.field {
                Field::Radius => Circle::new(c.center, value),
                Field::CenterX => Circle::new(Point::new(value, c.center.y), c.radius),
                Field::CenterY => Circle::new(Point::new(c.center.x, value), c.radius),
            }
        };
        let (mut a0, mut a1, mut d) = (scene.alpha0, scene.alpha1, scene.delta);
        match self.which {
            Which::Alpha0 => a0 = slot(&a0)?,
            Which::Alpha1 => a1 = slot(&a1)?,
            Which::Delta => d = slot(&d)?,
        }
        Scene::new(a0, a1, d, scene.index, scene.tolerances)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    NotNested,
    Blocked,
    Invalid,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NotNested => "not_nested",
            RowStatus::Blocked => "blocked",
            RowStatus::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub parameter: f64,
    pub rotation: Option<f64>,
    pub closed: Option<bool>,
    pub n: Option<usize>,
    pub winding: Option<i64>,
    pub status: RowStatus,
}

/// Fixed inputs of a scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanSetup {
    pub scene: Scene,
    pub param: Param,
    /// Angle on the carrier near which each row's first circle is sought.
    pub start_angle: f64,
    /// Step budget of the closure verdict of each row.
    pub max_steps: usize,
    /// Quadrature tolerance used while refining a target.
    pub refine_quad: f64,
}

impl ScanSetup {
    fn scene_at(&self, value: f64, quad: Option<f64>) -> Result<Scene, Error> {
        let mut s = self.param.apply(&self.scene, value)?;
        if let Some(q) = quad {
            s.tolerances.quad = q;
        }
        Ok(s)
    }

    fn start(&self, scene: &Scene) -> Result<TangentCircle, Error> {
        scene.start_circle_near(self.start_angle)
    }

    /// Rotation number at `value`, with the refinement tolerance when `fine`.
    pub fn rotation(&self, value: f64, fine: bool) -> Result<f64, Error> {
        let scene = self.scene_at(value, fine.then_some(self.refine_quad))?;
        if !scene.is_nested() {
            return Err(Error::NotNested);
        }
        let omega = self.start(&scene)?;
        Ok(rotation_number(scene, omega, 1)?.value)
    }

    pub fn row(&self, value: f64) -> ScanRow {
        let mut row = ScanRow {
            parameter: value,
            rotation: None,
            closed: None,
            n: None,
            winding: None,
            status: RowStatus::Invalid,
        };
        let Ok(scene) = self.scene_at(value, None) else {
            return row;
        };
        if !scene.is_nested() {
            row.status = RowStatus::NotNested;
            return row;
        }
        let Ok(omega) = self.start(&scene) else {
            row.status = RowStatus::Blocked;
            return row;
        };
        let Ok(rot) = rotation_number(scene, omega, 1) else {
            row.status = RowStatus::Blocked;
            return row;
        };
        row.rotation = Some(rot.value);
        match run_series(scene, omega, Direction::Ccw, self.max_steps) {
            Ok((_, report)) if report.blocked.is_none() => {
                row.closed = Some(report.closed);
                row.n = report.n;
                row.winding = report.winding;
                row.status = RowStatus::Ok;
            }
            _ => row.status = RowStatus::Blocked,
        }
        row
    }

    /// The closure run of `n` circles at `value`.
    pub fn verify(&self, value: f64, n: usize) -> Result<ClosureRecord, Error> {
        let scene = self.scene_at(value, None)?;
        let omega = self.start(&scene)?;
        let (_, report) = run_series(scene, omega, Direction::Ccw, n)?;
        Ok(closure_record(&report))
    }
}

/// Equally spaced parameters from `from` to `to`; empty unless `from < to`.
pub fn grid(from: f64, to: f64, samples: usize) -> Vec<f64> {
    if !(from < to) || samples == 0 {
        return Vec::new();
    }
    if samples == 1 {
        return vec![from];
    }
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|j| {
            if j + 1 == samples {
                to
            } else {
                from + (to - from) * j as f64 / last
            }
        })
        .collect()
}

/// Rows in parameter order; computed in parallel.
pub fn scan(setup: &ScanSetup, params: &[f64]) -> Vec<ScanRow> {
    params.par_iter().map(|&p| setup.row(p)).collect()
}

pub fn to_csv(param: &Param, rows: &[ScanRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Input(e.to_string());
    w.write_record([
        param.to_string().as_str(),
        "rotation_number",
        "closed",
        "n",
        "winding",
        "status",
    ])
    .map_err(io)?;
    for r in rows {
        w.write_record([
            crate::format::num(r.parameter),
            r.rotation.map(crate::format::num).unwrap_or_default(),
            r.closed.map(|c| c.to_string()).unwrap_or_default(),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.winding.map(|n| n.to_string()).unwrap_or_default(),
            r.status.name().to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// The rotation number crosses `1/n` between two rows.
    Crossing,
    /// The rotation number touches `1/n` at a local extremum.
    Extremum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetCandidate {
    pub parameter: f64,
    pub kind: TargetKind,
    pub rotation_number: f64,
    /// `rotation_number - 1/n`.
    pub offset: f64,
    pub verification: Option<ClosureRecord>,
    pub verified: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetReport {
    pub parameter: String,
    pub target_n: usize,
    pub target_rotation: f64,
    pub candidates: Vec<TargetCandidate>,
    pub found: bool,
}

const BISECT_ITERATIONS: usize = 200;
/// Largest `|rot - 1/n|` accepted at a refined extremum.
pub const EXTREMUM_TOL: f64 = 1e-10;

// width below which bracket halving stops
fn converged(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    !(mid > a.min(b) && mid < a.max(b)) || (b - a).abs() <= 4.0 * f64::EPSILON * mid.abs().max(1.0)
}

fn bisect<F: Fn(f64) -> Result<f64, Error>>(f: F, mut a: f64, mut b: f64) -> Result<f64, Error> {
    let mut fa = f(a)?;
    for _ in 0..BISECT_ITERATIONS {
        if converged(a, b) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Central difference with one Richardson step, `O(h⁴)`.
fn derivative<F: Fn(f64) -> Result<f64, Error>>(f: &F, x: f64, h: f64) -> Result<f64, Error> {
    let d = |h: f64| -> Result<f64, Error> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Crossings and tangential touches of `1/n` along the scanned rows, each
/// refined and checked by an `n`-circle closure run.
pub fn find_targets(setup: &ScanSetup, rows: &[ScanRow], n: usize) -> TargetReport {
    let target = 1.0 / n as f64;
    let g = |p: f64| setup.rotation(p, true).map(|r| r - target);
    let ok: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.status == RowStatus::Ok)
        .filter_map(|r| Some((r.parameter, r.rotation? - target)))
        .collect();

    let mut found: Vec<(f64, TargetKind)> = Vec::new();
    for w in ok.windows(2) {
        let ((a, ga), (b, gb)) = (w[0], w[1]);
        if ga == 0.0 {
            found.push((a, TargetKind::Crossing));
        } else if ga * gb < 0.0 {
            if let Ok(p) = bisect(g, a, b) {
                found.push((p, TargetKind::Crossing));
            }
        }
    }
    if let Some(&(p, gp)) = ok.last() {
        if gp == 0.0 {
            found.push((p, TargetKind::Crossing));
        }
    }
    for w in ok.windows(3) {
        let ((a, ga), (_, gm), (b, gb)) = (w[0], w[1], w[2]);
        let peak = gm > ga && gm >= gb && gm < 0.0;
        let trough = gm < ga && gm <= gb && gm > 0.0;
        if !(peak || trough) {
            continue;
        }
        let h = 1e-3 * (b - a);
        let slope = |p: f64| derivative(&g, p, h);
        let (lo, hi) = (a + h, b - h);
        let sign = if peak { 1.0 } else { -1.0 };
        let (Ok(dl), Ok(dh)) = (slope(lo), slope(hi)) else {
            continue;
        };
        if !(sign * dl > 0.0 && sign * dh < 0.0) {
            continue;
        }
        let Ok(p) = bisect(|x| slope(x).map(|d| sign * d), lo, hi) else {
            continue;
        };
        if g(p).is_ok_and(|v| v.abs() <= EXTREMUM_TOL) {
            found.push((p, TargetKind::Extremum));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));

    let candidates: Vec<TargetCandidate> = found
        .into_iter()
        .map(|(p, kind)| {
            let rot = setup.rotation(p, true);
            let ver = setup.verify(p, n);
            let verified = ver
                .as_ref()
                .is_ok_and(|c| c.closed && c.n == Some(n) && c.winding.map(i64::abs) == Some(1));
            TargetCandidate {
                parameter: p,
                kind,
                rotation_number: rot.as_ref().copied().unwrap_or(f64::NAN),
                offset: rot.map(|r| r - target).unwrap_or(f64::NAN),
                error: ver.as_ref().err().map(|e| e.to_string()),
                verification: ver.ok(),
                verified,
            }
        })
        .collect();
    TargetReport {
        parameter: setup.param.to_string(),
        target_n: n,
        target_rotation: target,
        found: candidates.iter().any(|c| c.verified),
        candidates,
    }
}
