//! Per-step run reports and their CSV form.

use std::io::{BufRead, Write};
use std::time::Instant;

use super::HarnessError;
use crate::integrate::{
    closed_form_const, propagate, step_quat_rk4, AngularRate, AttitudeState, QuatState, Scheme,
    StepperConfig, Trajectory,
};
use crate::linalg::norm4;
use crate::projective::argmax_abs;
use crate::rotation::{geodesic_distance, orthogonality_defect, UnitQuaternion};

use super::profile::RateProfile;

pub const REPORT_HEADER: &str = "t,rep,i,c0,c1,c2,c3,geo_err,ortho_defect,norm_drift,switched";

/// Substeps per output interval of the quat-rk4 reference run.
pub const REFERENCE_SUBSTEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Patch,
    Quat,
}

impl Rep {
    fn as_str(self) -> &'static str {
        match self {
            Rep::Patch => "patch",
            Rep::Quat => "quat",
        }
    }
}

/// One report row. Patch rows carry three coordinates, quaternion rows four;
/// for quaternion rows `patch_index` is the best patch of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub t: f64,
    pub rep: Rep,
    pub patch_index: usize,
    pub coords: Vec<f64>,
    pub geo_err: f64,
    pub ortho_defect: f64,
    pub norm_drift: f64,
    pub switched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scheme: Scheme,
    pub steps: usize,
    pub final_geo_err: f64,
    pub total_switches: usize,
    pub rhs_evaluations: u64,
    pub wall_seconds: f64,
}

impl RunSummary {
    pub fn seconds_per_rhs(&self) -> f64 {
        if self.rhs_evaluations == 0 {
            0.0
        } else {
            self.wall_seconds / self.rhs_evaluations as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub summary: RunSummary,
}

fn fmt_f64(v: f64) -> String {
    // 17 significant digits round-trip every f64
    format!("{v:.16e}")
}

impl RunReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write_rows(&self.rows, &mut out)
    }
}

pub fn write_rows<W: Write>(rows: &[ReportRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for row in rows {
        let c = |j: usize| row.coords.get(j).map(|&v| fmt_f64(v)).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(row.t),
            row.rep.as_str(),
            row.patch_index,
            c(0),
            c(1),
            c(2),
            c(3),
            fmt_f64(row.geo_err),
            fmt_f64(row.ortho_defect),
            fmt_f64(row.norm_drift),
            u8::from(row.switched),
        )?;
    }
    Ok(())
}

/// Parse a report written by [`RunReport::write_csv`].
pub fn parse_report<R: BufRead>(input: R) -> Result<Vec<ReportRow>, HarnessError> {
    let mut rows = Vec::new();
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header == REPORT_HEADER => {}
        _ => {
            return Err(HarnessError::Csv {
                line: 1,
                message: "missing report header".into(),
            })
        }
    }
    for (index, line) in lines {
        let line_no = index + 1;
        let line = line.map_err(|e| HarnessError::Io(e.to_string()))?;
        let bad = |message: String| HarnessError::Csv {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(bad(format!("expected 11 fields, found {}", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
        let rep = match fields[1] {
            "patch" => Rep::Patch,
            "quat" => Rep::Quat,
            other => return Err(bad(format!("unknown representation `{other}`"))),
        };
        let mut coords = Vec::with_capacity(4);
        for f in &fields[3..7] {
            if !f.is_empty() {
                coords.push(num(f)?);
            }
        }
        rows.push(ReportRow {
            t: num(fields[0])?,
            rep,
            patch_index: fields[2]
                .parse()
                .map_err(|_| bad(format!("bad patch index `{}`", fields[2])))?,
            coords,
            geo_err: num(fields[7])?,
            ortho_defect: num(fields[8])?,
            norm_drift: num(fields[9])?,
            switched: match fields[10] {
                "0" => false,
                "1" => true,
                other => return Err(bad(format!("bad switched flag `{other}`"))),
            },
        });
    }
    Ok(rows)
}

/// Reference attitudes at `times`: the closed form for constant profiles,
/// otherwise a renormalized quat-rk4 run with [`REFERENCE_SUBSTEPS`]
/// substeps per interval.
pub fn reference_attitudes(
    profile: &RateProfile,
    q0: &UnitQuaternion,
    times: &[f64],
) -> Vec<UnitQuaternion> {
    let Some(&t0) = times.first() else {
        return Vec::new();
    };
    if let Some(w) = profile.is_constant() {
        return times.iter().map(|&t| closed_form_const(q0, &w, t - t0)).collect();
    }
    let mut out = Vec::with_capacity(times.len());
    out.push(*q0);
    let mut state = QuatState {
        q: q0.coords(),
        t: t0,
    };
    for window in times.windows(2) {
        state = refine(profile, state, window[0], window[1], REFERENCE_SUBSTEPS);
        out.push(UnitQuaternion::new(state.q).expect("reference stays finite"));
    }
    out
}

/// Advance a quaternion from `ta` to `tb` with `substeps` renormalized RK4 steps.
pub(crate) fn refine<R: AngularRate + ?Sized>(
    rate: &R,
    mut state: QuatState,
    ta: f64,
    tb: f64,
    substeps: usize,
) -> QuatState {
    let h = (tb - ta) / substeps as f64;
    for k in 0..substeps {
        state.t = ta + k as f64 * h;
        state = step_quat_rk4(&state, rate, h, true);
    }
    state.t = tb;
    state
}

/// Report rows for a trajectory against precomputed reference attitudes.
pub fn report_rows(traj: &Trajectory, reference: &[UnitQuaternion]) -> Vec<ReportRow> {
    assert_eq!(traj.states.len(), reference.len());
    traj.states
        .iter()
        .zip(reference)
        .enumerate()
        .map(|(k, (state, r))| {
            let switched = k > 0 && traj.diagnostics[k - 1].switched;
            let ortho_defect = orthogonality_defect(&state.matrix());
            let geo_err = geodesic_distance(
                &state.unit_quaternion().expect("trajectory states are finite"),
                r,
            );
            match state {
                AttitudeState::Patch(s) => ReportRow {
                    t: s.t,
                    rep: Rep::Patch,
                    patch_index: s.rotation.patch(),
                    coords: s.rotation.x().to_vec(),
                    geo_err,
                    ortho_defect,
                    norm_drift: 0.0,
                    switched,
                },
                AttitudeState::Quaternion(s) => ReportRow {
                    t: s.t,
                    rep: Rep::Quat,
                    patch_index: argmax_abs(&s.q),
                    coords: s.q.to_vec(),
                    geo_err,
                    ortho_defect,
                    norm_drift: norm4(&s.q) - 1.0,
                    switched,
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub profile: RateProfile,
    pub config: StepperConfig,
    pub t0: f64,
    pub t1: f64,
    pub q0: UnitQuaternion,
}

/// Run one integration and assemble its report.
pub fn run_integrate(opts: &IntegrateOptions) -> Result<RunReport, HarnessError> {
    let initial = AttitudeState::quaternion(opts.q0, opts.t0);
    let start = Instant::now();
    let traj = propagate(&initial, &opts.profile, opts.t0, opts.t1, &opts.config)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let times: Vec<f64> = traj.states.iter().map(AttitudeState::t).collect();
    let reference = reference_attitudes(&opts.profile, &opts.q0, &times);
    let rows = report_rows(&traj, &reference);
    let summary = RunSummary {
        scheme: opts.config.scheme,
        steps: traj.step_count(),
        final_geo_err: rows.last().map_or(0.0, |r| r.geo_err),
        total_switches: traj.switch_count(),
        rhs_evaluations: traj.rhs_evaluations,
        wall_seconds,
    };
    Ok(RunReport { rows, summary })
}
