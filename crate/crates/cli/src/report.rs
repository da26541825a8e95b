//! Run reports.

use emch::measure::verify_prop1;
use emch::series::{run_series, ClosureReport};
use emch::{Direction, Error, Tolerances};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::format::to_canonical;
use crate::scene::{CircleSpec, Resolved, SceneFile};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceRecord {
    pub geo: f64,
    pub quad: f64,
    pub close: f64,
}

impl From<Tolerances> for ToleranceRecord {
    fn from(t: Tolerances) -> Self {
        Self {
            geo: t.geo,
            quad: t.quad,
            close: t.close,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// SHA-256 of the canonical normalized scene.
    pub scene_sha256: String,
    pub version: String,
    pub tolerances: ToleranceRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub omega: CircleSpec,
    pub touch0: [f64; 2],
    pub touch1: [f64; 2],
    pub x: [f64; 2],
    pub x_next: [f64; 2],
    pub mass: f64,
    pub mass_error: f64,
    pub orientation: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRecord {
    pub direction: String,
    pub steps: Vec<StepRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureRecord {
    pub closed: bool,
    pub n: Option<usize>,
    pub winding: Option<i64>,
    /// `None` when no candidate circle was compared.
    pub residual: Option<f64>,
    pub steps: usize,
    pub blocked: Option<String>,
    pub total_mass: Option<f64>,
    pub step_mass: Option<f64>,
    pub signed_mass_sum: f64,
    pub quantization_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantRecord {
    /// `max_k |m̃_k - m̃₁| / m̃₁`.
    pub step_mass_spread: Option<f64>,
    /// Largest relative deviation of `ρ h` over the series circles.
    pub prop1_max_deviation: Option<f64>,
    pub prop1_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub provenance: Provenance,
    pub scene: SceneFile,
    pub series: SeriesRecord,
    pub closure: ClosureRecord,
    pub invariants: InvariantRecord,
}

const PROP1_SAMPLES: usize = 64;

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn xy(p: emch::Point) -> [f64; 2] {
    [p.x, p.y]
}

fn blocked_name(reason: emch::BlockReason) -> String {
    match serde_json::to_value(reason) {
        Ok(serde_json::Value::String(s)) => s,
        _ => format!("{reason:?}"),
    }
}

pub fn scene_hash(file: &SceneFile) -> Result<String, CliError> {
    let bytes = to_canonical(file).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn provenance(resolved: &Resolved) -> Result<Provenance, CliError> {
    Ok(Provenance {
        scene_sha256: scene_hash(&resolved.file)?,
        version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: resolved.scene.tolerances.into(),
    })
}

fn direction_name(d: Direction) -> String {
    match d {
        Direction::Ccw => "ccw".into(),
        Direction::Cw => "cw".into(),
    }
}

/// Build the series of a resolved scene for at most `steps` circles.
///
/// A series that cannot start or stops early still yields a report; its
/// `closure.blocked` names the reason.
pub fn run(resolved: &Resolved, steps: usize) -> Result<RunReport, CliError> {
    let scene = resolved.scene;
    let omega1 = resolved.omega1()?;
    let total_mass = scene.measure().and_then(|m| m.total()).map(|e| e.value).ok();
    let (series, closure) = match run_series(scene, omega1, resolved.direction, steps) {
        Ok((series, report)) => (Some(series), closure_record(&report)),
        Err(Error::SeriesBlocked(reason)) => (
            None,
            ClosureRecord {
                closed: false,
                n: None,
                winding: None,
                residual: None,
                steps: 0,
                blocked: Some(blocked_name(reason)),
                total_mass,
                step_mass: None,
                signed_mass_sum: 0.0,
                quantization_residual: None,
            },
        ),
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let step_records: Vec<StepRecord> = series
        .as_ref()
        .map(|s| {
            s.steps
                .iter()
                .map(|st| StepRecord {
                    omega: CircleSpec::from_circle(&st.omega.circle),
                    touch0: xy(st.omega.touch0),
                    touch1: xy(st.omega.touch1),
                    x: xy(st.x),
                    x_next: xy(st.x_next),
                    mass: st.mass,
                    mass_error: st.mass_error,
                    orientation: st.orientation,
                })
                .collect()
        })
        .unwrap_or_default();

    let invariants = match &series {
        Some(s) if !s.steps.is_empty() => {
            let m1 = s.steps[0].mass;
            let spread = s.steps.iter().map(|st| (st.mass - m1).abs() / m1).fold(0.0, f64::max);
            let density = scene.density();
            let mut worst: Option<f64> = None;
            let mut skipped = 0;
            for st in &s.steps {
                match verify_prop1(&st.omega, &density, PROP1_SAMPLES, scene.tolerances.geo) {
                    Ok(r) => {
                        worst = Some(worst.unwrap_or(0.0).max(r.max_relative_deviation));
                        skipped += r.skipped;
                    }
                    Err(_) => skipped += PROP1_SAMPLES,
                }
            }
            InvariantRecord {
                step_mass_spread: finite(spread),
                prop1_max_deviation: worst.and_then(finite),
                prop1_skipped: skipped,
            }
        }
        _ => InvariantRecord {
            step_mass_spread: None,
            prop1_max_deviation: None,
            prop1_skipped: 0,
        },
    };

    Ok(RunReport {
        provenance: provenance(resolved)?,
        scene: resolved.file.clone(),
        series: SeriesRecord {
            direction: direction_name(series.as_ref().map_or(resolved.direction, |s| s.direction)),
            steps: step_records,
        },
        closure,
        invariants,
    })
}

pub fn closure_record(r: &ClosureReport) -> ClosureRecord {
    ClosureRecord {
        closed: r.closed,
        n: r.n,
        winding: r.winding,
        residual: finite(r.residual),
        steps: r.steps,
        blocked: r.blocked.map(blocked_name),
        total_mass: finite(r.total_mass),
        step_mass: r.step_mass,
        signed_mass_sum: r.signed_mass_sum,
        quantization_residual: r.quantization_residual,
    }
}
