//! Error-versus-step-size studies and log-log slope fits.

use std::io::Write;

use super::profile::RateProfile;
use super::report::{refine, REFERENCE_SUBSTEPS};
use super::HarnessError;
use crate::integrate::{closed_form_const, propagate, AttitudeState, QuatState, Scheme, StepperConfig};
use crate::rotation::{geodesic_distance, UnitQuaternion};

#[derive(Debug, Clone)]
pub struct ConvergenceOptions {
    pub schemes: Vec<Scheme>,
    pub profile: RateProfile,
    pub t0: f64,
    pub t1: f64,
    pub dts: Vec<f64>,
    pub q0: UnitQuaternion,
    pub switch_threshold: f64,
    pub renormalize_every: u32,
}

/// Step sizes `dt, dt·ratio, dt·ratio², …` with `rungs` entries.
pub fn geometric_ladder(dt: f64, ratio: f64, rungs: usize) -> Vec<f64> {
    (0..rungs).map(|k| dt * ratio.powi(k as i32)).collect()
}

fn validate_ladder(dts: &[f64]) -> Result<(), HarnessError> {
    if dts.len() < 3 {
        return Err(HarnessError::Usage(format!(
            "convergence ladder needs at least 3 rungs, got {}",
            dts.len()
        )));
    }
    if dts.iter().any(|&dt| !(dt > 0.0 && dt.is_finite())) {
        return Err(HarnessError::Usage("ladder step sizes must be positive".into()));
    }
    let ratio = dts[1] / dts[0];
    if (ratio - 1.0).abs() < 1e-9
        || dts
            .windows(2)
            .any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9)
    {
        return Err(HarnessError::Usage("step sizes must form a geometric ladder".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    pub scheme: Scheme,
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Final attitude of the problem: closed form for constant rates, otherwise
/// a renormalized quat-rk4 run at the finest step divided by the substep count.
fn reference_final(opts: &ConvergenceOptions) -> UnitQuaternion {
    if let Some(w) = opts.profile.is_constant() {
        return closed_form_const(&opts.q0, &w, opts.t1 - opts.t0);
    }
    let finest = opts.dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let steps = (((opts.t1 - opts.t0) / finest).ceil() as usize).max(1) * REFERENCE_SUBSTEPS;
    let start = QuatState {
        q: opts.q0.coords(),
        t: opts.t0,
    };
    let end = refine(&opts.profile, start, opts.t0, opts.t1, steps);
    UnitQuaternion::new(end.q).expect("reference stays finite")
}

pub fn run_convergence(opts: &ConvergenceOptions) -> Result<Vec<ConvergenceSeries>, HarnessError> {
    validate_ladder(&opts.dts)?;
    if !(opts.t1 > opts.t0) {
        return Err(HarnessError::Usage("convergence study needs t1 > t0".into()));
    }
    let reference = reference_final(opts);
    let initial = AttitudeState::quaternion(opts.q0, opts.t0);
    let mut out = Vec::with_capacity(opts.schemes.len());
    for &scheme in &opts.schemes {
        let mut errors = Vec::with_capacity(opts.dts.len());
        for &dt in &opts.dts {
            let config = StepperConfig::new(scheme, dt)
                .with_switch_threshold(opts.switch_threshold)
                .with_renormalize_every(opts.renormalize_every);
            let traj = propagate(&initial, &opts.profile, opts.t0, opts.t1, &config)?;
            let q = traj.final_state().unit_quaternion()?;
            errors.push(geodesic_distance(&q, &reference));
        }
        out.push(ConvergenceSeries {
            scheme,
            slope: fit_loglog_slope(&opts.dts, &errors),
            dts: opts.dts.clone(),
            errors,
        });
    }
    Ok(out)
}

pub const CONVERGENCE_HEADER: &str = "scheme,dt,error,slope";

/// One row per (scheme, dt); the fitted slope is repeated on each row of its scheme.
pub fn write_convergence<W: Write>(series: &[ConvergenceSeries], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    for s in series {
        for (dt, err) in s.dts.iter().zip(&s.errors) {
            writeln!(out, "{},{:.16e},{:.16e},{:.6}", s.scheme, dt, err, s.slope)?;
        }
    }
    Ok(())
}
