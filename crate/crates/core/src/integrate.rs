//! Fixed-step attitude propagation in patch coordinates and, as a baseline,
//! in quaternions.
//!
//! Patch schemes keep the chart coordinates bounded with the switching rule:
//! after every step, if some coordinate exceeds the switch threshold the
//! point is re-expressed in the patch of its largest homogeneous component,
//! which brings every coordinate back to magnitude at most 1. Nothing in the
//! patch pipeline ever normalizes the state.
//!
//! Quaternion schemes integrate `q̇ = ½ H q` directly and renormalize on a
//! configurable cadence.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kinematics::{patch_delta, patch_rhs, quat_rhs, AngularVelocity};
use crate::linalg::{add4, norm4, scale4, Mat3, Vec3, Vec4};
use crate::projective::{argmax_abs, max_abs, needs_switch, switch_patch_into};
use crate::rotation::{
    hamilton, patch_to_matrix, quat_exp_body, quat_formula_matrix, PatchRotation,
    UnitQuaternion,
};

/// A body-frame angular rate as a function of time.
pub trait AngularRate {
    fn rate_at(&self, t: f64) -> AngularVelocity;
}

impl AngularRate for AngularVelocity {
    fn rate_at(&self, _t: f64) -> AngularVelocity {
        *self
    }
}

impl<F: Fn(f64) -> AngularVelocity> AngularRate for F {
    fn rate_at(&self, t: f64) -> AngularVelocity {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    PatchEuler,
    PatchRk4,
    QuatEuler,
    QuatRk4,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::PatchEuler,
        Scheme::PatchRk4,
        Scheme::QuatEuler,
        Scheme::QuatRk4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::PatchEuler => "patch-euler",
            Scheme::PatchRk4 => "patch-rk4",
            Scheme::QuatEuler => "quat-euler",
            Scheme::QuatRk4 => "quat-rk4",
        }
    }

    pub fn is_patch(self) -> bool {
        matches!(self, Scheme::PatchEuler | Scheme::PatchRk4)
    }

    /// Right-hand-side evaluations per step.
    pub fn stages(self) -> u64 {
        match self {
            Scheme::PatchEuler | Scheme::QuatEuler => 1,
            Scheme::PatchRk4 | Scheme::QuatRk4 => 4,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub switch_threshold: f64,
    /// Renormalize the quaternion after every this many steps; 0 never does.
    pub renormalize_every: u32,
}

impl StepperConfig {
    pub fn new(scheme: Scheme, dt: f64) -> Self {
        Self {
            scheme,
            dt,
            switch_threshold: crate::projective::DEFAULT_SWITCH_THRESHOLD,
            renormalize_every: 1,
        }
    }

    pub fn with_switch_threshold(mut self, threshold: f64) -> Self {
        self.switch_threshold = threshold;
        self
    }

    pub fn with_renormalize_every(mut self, every: u32) -> Self {
        self.renormalize_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.switch_threshold >= 1.0) {
            return Err(Error::Config(format!(
                "switch threshold must be >= 1, got {}",
                self.switch_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchState {
    pub rotation: PatchRotation,
    pub t: f64,
}

/// Quaternion state. `q` is kept raw so that drift from unit norm is visible
/// when renormalization is turned off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatState {
    pub q: Vec4,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttitudeState {
    Patch(PatchState),
    Quaternion(QuatState),
}

impl AttitudeState {
    pub fn patch(rotation: PatchRotation, t: f64) -> Self {
        AttitudeState::Patch(PatchState { rotation, t })
    }

    pub fn quaternion(q: UnitQuaternion, t: f64) -> Self {
        AttitudeState::Quaternion(QuatState { q: q.coords(), t })
    }

    pub fn t(&self) -> f64 {
        match self {
            AttitudeState::Patch(s) => s.t,
            AttitudeState::Quaternion(s) => s.t,
        }
    }

    /// The represented rotation as a unit quaternion.
    pub fn unit_quaternion(&self) -> Result<UnitQuaternion> {
        match self {
            AttitudeState::Patch(s) => Ok(s.rotation.to_quat()),
            AttitudeState::Quaternion(s) => UnitQuaternion::new(s.q),
        }
    }

    /// Rational patch matrix, or the quaternion formula on the raw `q`.
    pub fn matrix(&self) -> Mat3 {
        match self {
            AttitudeState::Patch(s) => *patch_to_matrix(&s.rotation).rows(),
            AttitudeState::Quaternion(s) => quat_formula_matrix(&s.q),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            AttitudeState::Patch(s) => s.rotation.x().iter().all(|c| c.is_finite()),
            AttitudeState::Quaternion(s) => s.q.iter().all(|c| c.is_finite()),
        }
    }

    fn to_patch_state(self) -> Result<PatchState> {
        match self {
            AttitudeState::Patch(s) => Ok(s),
            AttitudeState::Quaternion(s) => Ok(PatchState {
                rotation: PatchRotation::from_homogeneous(&s.q)?,
                t: s.t,
            }),
        }
    }

    fn to_quat_state(self) -> Result<QuatState> {
        match self {
            AttitudeState::Patch(s) => Ok(QuatState {
                q: s.rotation.to_quat().coords(),
                t: s.t,
            }),
            AttitudeState::Quaternion(s) => Ok(QuatState {
                q: UnitQuaternion::new(s.q)?.coords(),
                t: s.t,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub switched: bool,
    pub patch_index_after: usize,
    /// Largest coordinate magnitude of the state after the step (and switch).
    pub max_abs_coordinate: f64,
    /// `‖q‖ − 1` for quaternion schemes, 0 for patch schemes.
    pub quat_norm_drift: f64,
}

fn finish_patch_step(patch: usize, x: Vec3, t: f64, threshold: f64) -> (PatchState, StepDiagnostics) {
    let (patch, x, switched) = if needs_switch(&x, threshold) {
        let mut scratch = [0.0; 4];
        let mut out = [0.0; 3];
        let k = switch_patch_into(&x, patch, &mut scratch, &mut out);
        (k, out, true)
    } else {
        (patch, x, false)
    };
    let diag = StepDiagnostics {
        switched,
        patch_index_after: patch,
        max_abs_coordinate: max_abs(&x),
        quat_norm_drift: 0.0,
    };
    (
        PatchState {
            rotation: PatchRotation::from_parts(patch, x),
            t,
        },
        diag,
    )
}

/// One exact patch Euler step followed by the switch check.
pub fn step_patch_euler(
    state: &PatchState,
    omega: &AngularVelocity,
    dt: f64,
    threshold: f64,
) -> Result<(PatchState, StepDiagnostics)> {
    let delta = patch_delta(&state.rotation, omega, dt)?;
    let x = state.rotation.x();
    let next = [x[0] + delta[0], x[1] + delta[1], x[2] + delta[2]];
    Ok(finish_patch_step(state.rotation.patch(), next, state.t + dt, threshold))
}

/// Classical RK4 on the patch equation; the patch is held fixed over the
/// four stages and checked once afterwards.
pub fn step_patch_rk4<R: AngularRate + ?Sized>(
    state: &PatchState,
    rate: &R,
    dt: f64,
    threshold: f64,
) -> (PatchState, StepDiagnostics) {
    let i = state.rotation.patch();
    let x = state.rotation.x();
    let t = state.t;
    let at = |offset: &Vec3, h: f64| {
        PatchRotation::from_parts(
            i,
            [x[0] + h * offset[0], x[1] + h * offset[1], x[2] + h * offset[2]],
        )
    };
    let half = 0.5 * dt;
    let w_mid = rate.rate_at(t + half);
    let k1 = patch_rhs(&state.rotation, &rate.rate_at(t));
    let k2 = patch_rhs(&at(&k1, half), &w_mid);
    let k3 = patch_rhs(&at(&k2, half), &w_mid);
    let k4 = patch_rhs(&at(&k3, dt), &rate.rate_at(t + dt));
    let sixth = dt / 6.0;
    let mut next = [0.0; 3];
    for j in 0..3 {
        next[j] = x[j] + sixth * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
    }
    finish_patch_step(i, next, t + dt, threshold)
}

fn normalized(q: Vec4) -> Vec4 {
    scale4(&q, 1.0 / norm4(&q))
}

/// `q + ½ H q Δt`, optionally renormalized.
pub fn step_quat_euler(
    state: &QuatState,
    omega: &AngularVelocity,
    dt: f64,
    renormalize: bool,
) -> QuatState {
    let q = add4(&state.q, &scale4(&quat_rhs(&state.q, omega), dt));
    QuatState {
        q: if renormalize { normalized(q) } else { q },
        t: state.t + dt,
    }
}

/// Classical RK4 on `q̇ = ½ H q`, optionally renormalized after the step.
pub fn step_quat_rk4<R: AngularRate + ?Sized>(
    state: &QuatState,
    rate: &R,
    dt: f64,
    renormalize: bool,
) -> QuatState {
    let q = state.q;
    let t = state.t;
    let half = 0.5 * dt;
    let w_mid = rate.rate_at(t + half);
    let k1 = quat_rhs(&q, &rate.rate_at(t));
    let k2 = quat_rhs(&add4(&q, &scale4(&k1, half)), &w_mid);
    let k3 = quat_rhs(&add4(&q, &scale4(&k2, half)), &w_mid);
    let k4 = quat_rhs(&add4(&q, &scale4(&k3, dt)), &rate.rate_at(t + dt));
    let sixth = dt / 6.0;
    let mut next = [0.0; 4];
    for j in 0..4 {
        next[j] = q[j] + sixth * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
    }
    QuatState {
        q: if renormalize { normalized(next) } else { next },
        t: t + dt,
    }
}

/// Exact attitude after `t` seconds at constant body rate: `q0 ⊗ exp(ω t / 2)`.
pub fn closed_form_const(q0: &UnitQuaternion, omega: &AngularVelocity, t: f64) -> UnitQuaternion {
    UnitQuaternion::new(hamilton(&q0.coords(), &quat_exp_body(omega, t).coords()))
        .expect("product of unit quaternions is nonzero")
}

/// States at every step boundary, initial state included.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub states: Vec<AttitudeState>,
    /// One entry per step; `diagnostics[k]` describes the step ending at `states[k + 1]`.
    pub diagnostics: Vec<StepDiagnostics>,
    pub rhs_evaluations: u64,
}

impl Trajectory {
    pub fn final_state(&self) -> &AttitudeState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn step_count(&self) -> usize {
        self.diagnostics.len()
    }

    pub fn switch_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.switched).count()
    }
}

/// Step boundaries of `[t0, t1]` with step `dt`, ending with a partial step
/// when `dt` does not divide the interval.
pub fn step_times(t0: f64, t1: f64, dt: f64) -> Vec<f64> {
    let span = t1 - t0;
    let ratio = span / dt;
    let nearest = ratio.round();
    let full = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    } as usize;
    let mut times = Vec::with_capacity(full + 2);
    times.extend((0..=full).map(|k| t0 + k as f64 * dt));
    if let Some(last) = times.last_mut() {
        if full > 0 && (*last - t1).abs() <= 1e-9 * dt {
            *last = t1;
        }
    }
    if *times.last().unwrap() < t1 {
        times.push(t1);
    }
    times
}

/// Integrate from `t0` to `t1` with the configured scheme.
///
/// The initial attitude is converted to the scheme's representation first;
/// for patch schemes that means the best patch of the initial rotation.
pub fn propagate<R: AngularRate + ?Sized>(
    initial: &AttitudeState,
    profile: &R,
    t0: f64,
    t1: f64,
    config: &StepperConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::Config(format!(
            "integration interval [{t0}, {t1}] is empty or not finite"
        )));
    }
    let times = step_times(t0, t1, config.dt);
    let steps = times.len() - 1;
    let mut states = Vec::with_capacity(times.len());
    let mut diagnostics = Vec::with_capacity(steps);

    let fail = |t: f64, source: Error| Error::StepFailed {
        t,
        source: Box::new(source),
    };

    if config.scheme.is_patch() {
        let mut state = initial.to_patch_state()?;
        state.t = t0;
        // start from the best patch of the initial point
        let z = state.rotation.homogeneous();
        if needs_switch(&state.rotation.x(), config.switch_threshold) || argmax_abs(&z) != state.rotation.patch() {
            state.rotation = PatchRotation::from_homogeneous(&z)?;
        }
        states.push(AttitudeState::Patch(state));
        for window in times.windows(2) {
            let (ta, tb) = (window[0], window[1]);
            let h = tb - ta;
            let (mut next, diag) = match config.scheme {
                Scheme::PatchEuler => {
                    step_patch_euler(&state, &profile.rate_at(ta), h, config.switch_threshold)
                        .map_err(|e| fail(ta, e))?
                }
                _ => step_patch_rk4(&state, profile, h, config.switch_threshold),
            };
            next.t = tb;
            let wrapped = AttitudeState::Patch(next);
            if !wrapped.is_finite() {
                return Err(fail(ta, Error::NonFinite { what: "patch state" }));
            }
            states.push(wrapped);
            diagnostics.push(diag);
            state = next;
        }
    } else {
        let mut state = initial.to_quat_state()?;
        state.t = t0;
        states.push(AttitudeState::Quaternion(state));
        for (k, window) in times.windows(2).enumerate() {
            let (ta, tb) = (window[0], window[1]);
            let h = tb - ta;
            let renormalize =
                config.renormalize_every > 0 && (k + 1) % config.renormalize_every as usize == 0;
            let mut next = match config.scheme {
                Scheme::QuatEuler => step_quat_euler(&state, &profile.rate_at(ta), h, renormalize),
                _ => step_quat_rk4(&state, profile, h, renormalize),
            };
            next.t = tb;
            let wrapped = AttitudeState::Quaternion(next);
            if !wrapped.is_finite() {
                return Err(fail(ta, Error::NonFinite { what: "quaternion state" }));
            }
            let norm = norm4(&next.q);
            diagnostics.push(StepDiagnostics {
                switched: false,
                patch_index_after: argmax_abs(&next.q),
                max_abs_coordinate: max_abs(&next.q),
                quat_norm_drift: norm - 1.0,
            });
            states.push(wrapped);
            state = next;
        }
    }

    Ok(Trajectory {
        scheme: config.scheme,
        states,
        diagnostics,
        rhs_evaluations: steps as u64 * config.scheme.stages(),
    })
}
