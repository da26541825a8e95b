//! Verification suites over one scene.

use std::f64::consts::TAU;

use emch::conic_bridge::{
    double_line_member, equivalence_witness, equivalent_pencil, quadric_to_circle_pair, series_chords,
    series_poncelet_quadric, verify_prop1_prime, Cyclic,
};
use emch::measure::{verify_invariance, verify_prop1, PROP1_THRESHOLD};
use emch::pencils::{diagonal_fixed_circle, run_generalized_series, verify_prop3, PencilMember};
use emch::series::{run_series, signed_invariant_check, CircularSeries};
use emch::tangency::tangent_circles_through_point;
use emch::{Error, TangencyIndex};
use serde::Serialize;

use crate::scene::Resolved;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Measure,
    Prop1,
    Signed,
    Pencil,
    Quadric,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Reported value with no bound.
    Info,
    /// Not applicable to this scene.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn bounded(name: &str, value: f64, bound: f64) -> Self {
        Self {
            check: name.into(),
            value: Some(value),
            bound: Some(bound),
            status: if value <= bound { Status::Pass } else { Status::Fail },
            detail: String::new(),
        }
    }

    fn info(name: &str, value: f64) -> Self {
        Self {
            check: name.into(),
            value: Some(value),
            bound: None,
            status: Status::Info,
            detail: String::new(),
        }
    }

    fn failed(name: &str, e: impl std::fmt::Display) -> Self {
        Self {
            check: name.into(),
            value: None,
            bound: None,
            status: Status::Fail,
            detail: e.to_string(),
        }
    }

    fn skipped(name: &str, why: impl std::fmt::Display) -> Self {
        Self {
            status: Status::Skip,
            ..Self::failed(name, why)
        }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub const STEP_MASS_BOUND: f64 = 1e-8;
pub const FD_EPSILON: f64 = 1e-4;
const FD_BOUND: f64 = 1e-2;
const FD_FLOOR: f64 = 1e-10;
pub const PROP3_BOUND: f64 = 1e-10;
pub const DIAGONAL_BOUND: f64 = 1e-8;
pub const CHORD_BOUND: f64 = 1e-8;
pub const EQUIVALENCE_BOUND: f64 = 1e-10;
pub const PROP1_PRIME_BOUND: f64 = 1e-9;

const PERM_LIMIT: usize = 4;

fn series(r: &Resolved, steps: usize, angle_shift: f64) -> Result<CircularSeries, CliError> {
    let scene = r.scene;
    let omega = if angle_shift == 0.0 {
        r.omega1()?
    } else {
        let a = r.start().angle.unwrap_or(0.0) + angle_shift;
        scene.start_circle_near(a).map_err(|e| CliError::Input(e.to_string()))?
    };
    let mut s = CircularSeries::start(scene, omega, r.direction).map_err(|e| CliError::Input(e.to_string()))?;
    match s.extend(steps.saturating_sub(1)) {
        Ok(()) | Err(Error::SeriesBlocked(_)) => Ok(s),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

pub fn run_suite(r: &Resolved, suite: Suite) -> Result<SuiteReport, CliError> {
    let checks = match suite {
        Suite::Measure => measure(r)?,
        Suite::Prop1 => prop1(r),
        Suite::Signed => signed(r)?,
        Suite::Pencil => pencil(r)?,
        Suite::Quadric => quadric(r)?,
        Suite::Cyclic => cyclic(r)?,
    };
    let name = clap::ValueEnum::to_possible_value(&suite)
        .expect("no skipped variants")
        .get_name()
        .to_string();
    Ok(SuiteReport {
        suite: name,
        passed: checks.iter().all(|c| c.status != Status::Fail),
        checks,
    })
}

fn measure(r: &Resolved) -> Result<Vec<Check>, CliError> {
    let scene = r.scene;
    let (s, report) = run_series(scene, r.omega1()?, r.direction, 50).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = Vec::new();
    if s.steps.is_empty() {
        out.push(Check::failed("step_mass_spread", "empty series"));
        return Ok(out);
    }
    let m1 = s.steps[0].mass;
    let spread = s.steps.iter().map(|st| (st.mass - m1).abs() / m1).fold(0.0, f64::max);
    out.push(Check::bounded("step_mass_spread", spread, STEP_MASS_BOUND).with(format!("{} steps", s.steps.len())));
    out.push(Check::info("step_mass", m1));
    out.push(Check::info("total_mass", report.total_mass));
    if let (Some(n), Some(q)) = (report.n, report.quantization_residual) {
        out.push(Check::bounded("quantization_residual", q, scene.tolerances.close).with(format!("n = {n}")));
    }

    let density = scene.density();
    let mut worst: Option<emch::measure::InvarianceReport> = None;
    let mut ok = true;
    for st in s.steps.iter().take(8) {
        match verify_invariance(&density, &scene.delta, &st.omega, FD_EPSILON, scene.tolerances.geo) {
            Ok(rep) if !rep.skipped => {
                ok &= rep.passes(FD_BOUND, FD_FLOOR);
                if worst.is_none_or(|w| rep.residual > w.residual) {
                    worst = Some(rep);
                }
            }
            Ok(_) => {}
            Err(e) => {
                out.push(Check::failed("invariance_fd", e));
                return Ok(out);
            }
        }
    }
    if let Some(w) = worst {
        out.push(Check {
            check: "invariance_fd".into(),
            value: w.residual,
            bound: Some(FD_BOUND),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: format!("halving ratio {:.3}", w.halving_ratio().unwrap_or(f64::NAN)),
        });
    }
    Ok(out)
}

fn prop1(r: &Resolved) -> Vec<Check> {
    let scene = r.scene;
    let density = scene.density();
    let mut worst = 0.0f64;
    let (mut circles, mut skipped) = (0usize, 0usize);
    for k in 0..64 {
        let Ok(found) = scene.circles_at(k as f64 * TAU / 64.0) else {
            continue;
        };
        for c in found {
            match verify_prop1(&c, &density, 256, scene.tolerances.geo) {
                Ok(rep) => {
                    worst = worst.max(rep.max_relative_deviation);
                    skipped += rep.skipped;
                    circles += 1;
                }
                Err(e) => return vec![Check::failed("prop1_max_deviation", e)],
            }
        }
    }
    if circles == 0 {
        return vec![Check::failed(
            "prop1_max_deviation",
            "no family circle through the carrier",
        )];
    }
    vec![Check::bounded("prop1_max_deviation", worst, PROP1_THRESHOLD)
        .with(format!("{circles} circles, {skipped} samples skipped"))]
}

fn signed(r: &Resolved) -> Result<Vec<Check>, CliError> {
    let s = series(r, 12, 0.0)?;
    if s.steps.len() < 3 {
        return Ok(vec![Check::failed("signed_spread", "series has fewer than 3 circles")]);
    }
    let rep = match signed_invariant_check(&s, FD_EPSILON) {
        Ok(rep) => rep,
        Err(e) => return Ok(vec![Check::failed("signed_spread", e)]),
    };
    let ratio = rep.signed_spread / rep.signed_spread_half;
    let halves = rep.signed_spread <= FD_FLOOR || (ratio > 1.5 && ratio < 2.5);
    let mut c = Check::bounded("signed_spread", rep.signed_spread, FD_BOUND).with(format!("halving ratio {ratio:.3}"));
    if !halves {
        c.status = Status::Fail;
    }
    Ok(vec![
        c,
        Check::info("signed_spread_half", rep.signed_spread_half),
        Check::info("plain_spread", rep.plain_spread),
        Check::info("absolute_spread", rep.absolute_spread),
    ])
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..n {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn pencil(r: &Resolved) -> Result<Vec<Check>, CliError> {
    let scene = r.scene;
    let mut out = Vec::new();
    match r.pairs()? {
        None => out.push(Check::skipped("prop3_spread", "scene has no pencil block")),
        Some((seq, order)) => {
            match verify_prop3(&seq, 256) {
                Ok(p3) => {
                    out.push(Check::bounded("prop3_spread", p3.max_spread, PROP3_BOUND));
                    out.push(Check::bounded("prop3_identity", p3.max_identity_error, PROP3_BOUND));
                }
                Err(e) => out.push(Check::failed("prop3_spread", e)),
            }
            let orders = if seq.len() <= PERM_LIMIT {
                permutations(seq.len())
            } else {
                vec![order]
            };
            let angle = r.start().angle.unwrap_or(0.0);
            let mut verdicts = Vec::new();
            let mut failure = None;
            for o in &orders {
                let verdict = seq.pair(o[0]).and_then(|(c0, c1)| {
                    let omega = tangent_circles_through_point(
                        &c0,
                        &c1,
                        scene.delta.point_at(angle),
                        TangencyIndex::One,
                        scene.tolerances.geo,
                    )?
                    .into_iter()
                    .next()
                    .ok_or(Error::NoRealSolution)?;
                    run_generalized_series(&seq, &omega, o, r.direction, scene.tolerances)
                });
                match verdict {
                    Ok((_, rep)) => verdicts.push(rep.closed),
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            match failure {
                Some(e) => out.push(Check::failed("generalized_verdicts", e)),
                None => {
                    let closed = verdicts.iter().filter(|&&c| c).count();
                    let agree = closed == 0 || closed == verdicts.len();
                    out.push(Check {
                        check: "generalized_verdicts".into(),
                        value: Some(closed as f64),
                        bound: None,
                        status: if agree { Status::Pass } else { Status::Fail },
                        detail: format!("{closed} of {} orders close", verdicts.len()),
                    });
                }
            }
        }
    }
    if !scene.is_nested() {
        out.push(Check::skipped("diagonal_spread", "scene is not nested"));
        return Ok(out);
    }
    let s = series(r, 8, 0.0)?;
    for k in [2usize, 3] {
        let name = format!("diagonal_r{k}_spread");
        match diagonal_fixed_circle(&s, k, None) {
            Ok(rep) => {
                let member = match rep.member {
                    PencilMember::Circle { circle } => format!("circle radius {:.12}", circle.radius),
                    PencilMember::PointCircle { .. } => "point circle".into(),
                    PencilMember::Line { .. } => "line".into(),
                    PencilMember::Conic { .. } => "conic".into(),
                };
                out.push(Check::bounded(&name, rep.spread, DIAGONAL_BOUND).with(format!(
                    "t = {:.12}, index {}, {member}",
                    rep.parameter,
                    rep.index.value()
                )));
            }
            Err(e) => out.push(Check::failed(&name, e)),
        }
    }
    Ok(out)
}

fn quadric(r: &Resolved) -> Result<Vec<Check>, CliError> {
    let scene = r.scene;
    let s = series(r, 20, 0.0)?;
    let mut out = Vec::new();
    let g = match series_poncelet_quadric(&s) {
        Ok(g) => g,
        Err(e) => return Ok(vec![Check::failed("a_p", e)]),
    };
    out.push(Check::info("a_p", g.a_p));
    if g.quadric.is_circle_type(1e-12) {
        let q = g.quadric.normalized();
        let center = g.quadric.center().unwrap_or(emch::Point::ORIGIN);
        let r2 = center.norm_sq() - q.c / q.a11;
        out.push(
            Check::info("gamma_radius", r2.max(0.0).sqrt())
                .with(format!("center ({:.12}, {:.12})", center.x, center.y)),
        );
    }
    let chords = series_chords(&s).map_err(|e| CliError::Input(e.to_string()))?;
    let worst = chords
        .iter()
        .map(|l| g.quadric.line_tangency_residual(l).map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max);
    out.push(Check::bounded("chord_tangency", worst, CHORD_BOUND).with(format!("{} chords", chords.len())));
    match series(r, 6, 1.0).and_then(|o| series_poncelet_quadric(&o).map_err(|e| CliError::Input(e.to_string()))) {
        Ok(other) => out.push(Check::bounded(
            "seed_independence",
            other.quadric.distance_up_to_scale(&g.quadric),
            CHORD_BOUND,
        )),
        Err(e) => out.push(Check::failed("seed_independence", e)),
    }
    if scene.is_nested() {
        match quadric_to_circle_pair(&g.quadric, &scene.delta) {
            Ok(fit) => out.push(Check::bounded("round_trip", fit.round_trip, CHORD_BOUND)),
            Err(Error::NoRealPair) => out.push(Check::skipped("round_trip", "no real circle pair found")),
            Err(e) => out.push(Check::failed("round_trip", e)),
        }
    }
    Ok(out)
}

fn cyclic(r: &Resolved) -> Result<Vec<Check>, CliError> {
    let scene = r.scene;
    let cyc = Cyclic::from_circles(&scene.alpha0, &scene.alpha1);
    let mut out = Vec::new();
    let worst = (0..50)
        .map(|k| -20.0 + 40.0 * k as f64 / 49.0)
        .map(|a_p| equivalence_witness(&cyc, &scene.delta, a_p, 256).spread)
        .fold(0.0, f64::max);
    out.push(Check::bounded("equivalence_spread", worst, EQUIVALENCE_BOUND).with("50 members"));
    match equivalent_pencil(&cyc, &scene.delta) {
        Ok(p) => {
            let at_infinity = p.b.sub_scaled(1.0, &p.a);
            out.push(Check::bounded(
                "member_at_infinity",
                at_infinity.distance_up_to_scale(&scene.delta.to_quadric()),
                EQUIVALENCE_BOUND,
            ));
        }
        Err(e) => out.push(Check::failed("member_at_infinity", e)),
    }
    let s = series(r, 8, 0.0)?;
    let mut worst = 0.0f64;
    let mut dl = 0.0f64;
    for st in &s.steps {
        let (t0, t1) = (st.omega.touch0, st.omega.touch1);
        match verify_prop1_prime(&cyc, &st.omega.circle, t0, t1, 256) {
            Ok(rep) => worst = worst.max(rep.max_relative_deviation),
            Err(e) => {
                out.push(Check::failed("prop1_prime_spread", e));
                return Ok(out);
            }
        }
        if let Ok(m) = double_line_member(&cyc, &st.omega.circle, t0, t1) {
            dl = dl.max(m.residual);
        }
    }
    out.push(Check::bounded("prop1_prime_spread", worst, PROP1_PRIME_BOUND).with(format!("{} circles", s.steps.len())));
    out.push(Check::info("double_line_residual", dl));
    Ok(out)
}

/// Plain-text table, one check per line.
pub fn table(report: &SuiteReport) -> String {
    let mut s = format!(
        "{:<24} {:>24} {:>24} {:<6} detail\n",
        "check", "value", "bound", "status"
    );
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Info => "info",
            Status::Skip => "skip",
        };
        s.push_str(&format!(
            "{:<24} {:>24} {:>24} {:<6} {}\n",
            c.check,
            c.value.map(crate::format::num).unwrap_or_else(|| "-".into()),
            c.bound.map(crate::format::num).unwrap_or_else(|| "-".into()),
            status,
            c.detail
        ));
    }
    s.push_str(&format!(
        "suite {}: {}\n",
        report.suite,
        if report.passed { "pass" } else { "FAIL" }
    ));
    s
}
