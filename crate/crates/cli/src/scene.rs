//! Scene files: schema, normalization and resolution into core types.
//!
//! ```json
//! {
//!   "alpha0": {"center": [0, 0], "radius": 1},
//!   "alpha1": {"center": [0, 0], "radius": 3},
//!   "delta": {"center": [0, 0], "radius": 1.7320508075688772},
//!   "index": 1,
//!   "start": {"angle": 0.0, "choice": 0},
//!   "direction": "ccw",
//!   "pencil": {"t0": [1, 0.9], "t1": [1, 1.2], "order": [1, 0]},
//!   "tolerances": {"geo": 1e-9, "quad": 1e-10, "close": 1e-8}
//! }
//! ```
//!
//! Only the three circles are required. `start` holds exactly one of
//! `angle`, `point` or `circle`; `choice` picks among the family circles
//! through the start point.

use emch::geometry::circle_circle_intersection;
use emch::pencils::PairSequence;
use emch::{Circle, Direction, Point, Scene, TangencyIndex, TangentCircle, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default tolerance profile.
pub const PROFILE_ENV: &str = "EMCH_TOLERANCE_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

impl CircleSpec {
    pub fn from_circle(c: &Circle) -> Self {
        Self {
            center: [c.center.x, c.center.y],
            radius: c.radius,
        }
    }

    pub fn to_circle(self, name: &str) -> Result<Circle, CliError> {
        if !self.center.iter().all(|v| v.is_finite()) {
            return Err(CliError::Input(format!("{name}: center must be finite")));
        }
        Circle::new(Point::new(self.center[0], self.center[1]), self.radius)
            .map_err(|e| CliError::Input(format!("{name}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<CircleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionSpec {
    Ccw,
    Cw,
}

impl From<DirectionSpec> for Direction {
    fn from(d: DirectionSpec) -> Self {
        match d {
            DirectionSpec::Ccw => Direction::Ccw,
            DirectionSpec::Cw => Direction::Cw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilSpec {
    pub t0: Vec<f64>,
    pub t1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub close: Option<f64>,
}

impl ToleranceSpec {
    pub fn over(self, base: Tolerances) -> Tolerances {
        Tolerances {
            geo: self.geo.unwrap_or(base.geo),
            quad: self.quad.unwrap_or(base.quad),
            close: self.close.unwrap_or(base.close),
        }
    }
}

/// Scene file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub alpha0: CircleSpec,
    pub alpha1: CircleSpec,
    pub delta: CircleSpec,
    #[serde(default = "default_index")]
    pub index: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

fn default_index() -> u8 {
    1
}

/// Named tolerance sets selectable through [`PROFILE_ENV`].
pub fn profile(name: &str) -> Result<Tolerances, CliError> {
    match name {
        "default" => Ok(Tolerances::default()),
        "strict" => Ok(Tolerances {
            geo: 1e-11,
            quad: 1e-12,
            close: 1e-10,
        }),
        "loose" => Ok(Tolerances {
            geo: 1e-7,
            quad: 1e-8,
            close: 1e-6,
        }),
        other => Err(CliError::Input(format!(
            "unknown tolerance profile {other:?} (expected default, strict or loose)"
        ))),
    }
}

/// Profile from the environment, or the defaults when unset.
pub fn env_profile() -> Result<Tolerances, CliError> {
    match std::env::var(PROFILE_ENV) {
        Ok(name) => profile(name.trim()),
        Err(std::env::VarError::NotPresent) => Ok(Tolerances::default()),
        Err(e) => Err(CliError::Input(format!("{PROFILE_ENV}: {e}"))),
    }
}

pub fn parse(text: &str) -> Result<SceneFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("scene schema: {e}")))
}

pub fn load(path: &std::path::Path) -> Result<SceneFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text)
}

/// A scene whose start, direction and tolerances are all explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub file: SceneFile,
    pub scene: Scene,
    pub direction: Direction,
}

impl SceneFile {
    /// Fill defaults and check everything that does not need a series.
    ///
    /// Tolerances come from `flags`, then the file, then `base`.
    pub fn normalize(&self, base: Tolerances, flags: ToleranceSpec) -> Result<Resolved, CliError> {
        let tolerances = flags.over(self.tolerances.unwrap_or_default().over(base));
        tolerances.validate().map_err(|e| CliError::Input(e.to_string()))?;
        let index = match self.index {
            0 => TangencyIndex::Zero,
            1 => TangencyIndex::One,
            other => return Err(CliError::Input(format!("index must be 0 or 1, got {other}"))),
        };
        let scene = Scene::new(
            self.alpha0.to_circle("alpha0")?,
            self.alpha1.to_circle("alpha1")?,
            self.delta.to_circle("delta")?,
            index,
            tolerances,
        )
        .map_err(|e| CliError::Input(e.to_string()))?;

        let start = match &self.start {
            None => StartSpec {
                angle: Some(0.0),
                choice: Some(0),
                ..StartSpec::default()
            },
            Some(s) => {
                let kinds =
                    usize::from(s.angle.is_some()) + usize::from(s.point.is_some()) + usize::from(s.circle.is_some());
                if kinds != 1 {
                    return Err(CliError::Input(
                        "start needs exactly one of angle, point, circle".into(),
                    ));
                }
                if s.circle.is_some() && s.choice.is_some() {
                    return Err(CliError::Input("start.choice does not apply to a start circle".into()));
                }
                StartSpec {
                    choice: if s.circle.is_some() {
                        None
                    } else {
                        Some(s.choice.unwrap_or(0))
                    },
                    ..s.clone()
                }
            }
        };
        if let Some(a) = start.angle {
            if !a.is_finite() {
                return Err(CliError::Input("start.angle must be finite".into()));
            }
        }

        if let Some(p) = &self.pencil {
            if p.t0.len() != p.t1.len() || p.t0.is_empty() {
                return Err(CliError::Input(
                    "pencil.t0 and pencil.t1 must be nonempty and of equal length".into(),
                ));
            }
            if let Some(order) = &p.order {
                let mut seen = vec![false; p.t0.len()];
                if order.len() != seen.len()
                    || order
                        .iter()
                        .any(|&k| k >= seen.len() || std::mem::replace(&mut seen[k], true))
                {
                    return Err(CliError::Input(
                        "pencil.order must be a permutation of the pairs".into(),
                    ));
                }
            }
        }

        let direction = self.direction.unwrap_or(DirectionSpec::Ccw);
        let file = SceneFile {
            alpha0: CircleSpec::from_circle(&scene.alpha0),
            alpha1: CircleSpec::from_circle(&scene.alpha1),
            delta: CircleSpec::from_circle(&scene.delta),
            index: index.value(),
            start: Some(start),
            direction: Some(direction),
            pencil: self.pencil.clone().map(|p| PencilSpec {
                order: Some(p.order.unwrap_or_else(|| (0..p.t0.len()).collect())),
                ..p
            }),
            tolerances: Some(ToleranceSpec {
                geo: Some(tolerances.geo),
                quad: Some(tolerances.quad),
                close: Some(tolerances.close),
            }),
        };
        Ok(Resolved {
            file,
            scene,
            direction: direction.into(),
        })
    }
}

impl Resolved {
    pub fn start(&self) -> &StartSpec {
        self.file.start.as_ref().expect("normalized scenes have a start")
    }

    /// The first circle of the series.
    pub fn omega1(&self) -> Result<TangentCircle, CliError> {
        let s = &self.scene;
        let eps = s.tolerances.geo;
        let start = self.start();
        if let Some(c) = start.circle {
            let circle = c.to_circle("start.circle")?;
            let omega = TangentCircle::from_circle(circle, &s.alpha0, &s.alpha1, eps)
                .map_err(|e| CliError::Input(format!("start circle: {e}")))?;
            if omega.index != s.index {
                return Err(CliError::Input(format!(
                    "start circle has index {} but the scene asks for {}",
                    omega.index.value(),
                    s.index.value()
                )));
            }
            return Ok(omega);
        }
        let at = match (start.angle, start.point) {
            (Some(a), _) => s.delta.point_at(a),
            (None, Some(p)) => {
                let p = Point::new(p[0], p[1]);
                let off = (p.distance(s.delta.center) - s.delta.radius).abs();
                if !(off <= eps) {
                    return Err(CliError::Input(format!("start point is {off:.3e} away from delta")));
                }
                p
            }
            _ => unreachable!("normalize checks the start kind"),
        };
        let choice = start.choice.unwrap_or(0);
        let found = emch::tangency::tangent_circles_through_point(&s.alpha0, &s.alpha1, at, s.index, eps)
            .map_err(|e| CliError::Input(format!("start: {e}")))?;
        found.get(choice).copied().ok_or_else(|| {
            CliError::Input(format!(
                "start.choice {choice} out of range: {} family circles through the start point",
                found.len()
            ))
        })
    }

    /// The scene's pencil block as a pair sequence and an order.
    pub fn pairs(&self) -> Result<Option<(PairSequence, Vec<usize>)>, CliError> {
        let Some(p) = &self.file.pencil else { return Ok(None) };
        let s = &self.scene;
        let seq = PairSequence::new(s.delta, s.alpha0, s.alpha1, p.t0.clone(), p.t1.clone())
            .map_err(|e| CliError::Input(format!("pencil: {e}")))?;
        let order = p.order.clone().unwrap_or_else(|| (0..seq.len()).collect());
        Ok(Some((seq, order)))
    }

    /// Whether `omega` cuts the carrier in two distinct points.
    pub fn cuts_twice(&self, omega: &Circle) -> bool {
        let eps = self.scene.tolerances.geo;
        circle_circle_intersection(&self.scene.delta, omega, eps)
            .is_ok_and(|p| p.len() == 2 && p[0].distance(p[1]) > eps)
    }
}
