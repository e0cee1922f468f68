mod common;

use std::f64::consts::{FRAC_PI_4, PI};

use common::{lift, mat4_vec, max_abs_diff, project, rate_matrix_oracle};
use projrot::harness::RateProfile;
use projrot::{
    closed_form_const, geodesic_distance, patch_to_matrix, propagate, step_patch_euler,
    step_quat_euler, AngularVelocity, AttitudeState, PatchRotation, PatchState, QuatState, Scheme,
    StepperConfig, UnitQuaternion,
};
use proptest::prelude::*;

fn omega(w: [f64; 3]) -> AngularVelocity {
    AngularVelocity::new(w).unwrap()
}

fn unit_quat() -> impl Strategy<Value = UnitQuaternion> {
    [-1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64]
        .prop_filter("away from zero", |q| q.iter().map(|c| c * c).sum::<f64>() > 1e-2)
        .prop_map(|q| UnitQuaternion::new(q).unwrap())
}

fn rate(bound: f64) -> impl Strategy<Value = AngularVelocity> {
    [-bound..=bound, -bound..=bound, -bound..=bound].prop_map(omega)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn short_rotations_from_the_patch_origin_never_switch(
        dir in [-1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64],
        frac in 0.0..0.999f64,
        t1 in 0.1..=5.0f64,
        scheme in prop::sample::select(vec![Scheme::PatchEuler, Scheme::PatchRk4]),
    ) {
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        prop_assume!(n > 1e-3);
        // ‖ω‖ t1 < π/4
        let speed = frac * FRAC_PI_4 / t1;
        let w = omega(dir.map(|c| c / n * speed));
        let start = AttitudeState::patch(PatchRotation::IDENTITY, 0.0);
        let traj = propagate(&start, &w, 0.0, t1, &StepperConfig::new(scheme, 1e-2)).unwrap();
        prop_assert_eq!(traj.switch_count(), 0);
        let bound = (PI / 8.0).tan() + 1e-9;
        for d in &traj.diagnostics {
            prop_assert!(d.max_abs_coordinate <= bound);
        }
    }

    #[test]
    fn controller_keeps_coordinates_bounded(
        seed in 0u64..1000,
        bandwidth in 0.2..=2.0f64,
        rms in 1.0..=6.0f64,
        threshold in 1.0..=4.0f64,
        q0 in unit_quat(),
        scheme in prop::sample::select(vec![Scheme::PatchEuler, Scheme::PatchRk4]),
    ) {
        let profile = RateProfile::parse(&format!("tumble:{seed}:{bandwidth}:{rms}"), 0).unwrap();
        let config = StepperConfig::new(scheme, 1e-2).with_switch_threshold(threshold);
        let start = AttitudeState::quaternion(q0, 0.0);
        let traj = propagate(&start, &profile, 0.0, 5.0, &config).unwrap();
        for state in &traj.states {
            let AttitudeState::Patch(s) = state else { panic!("patch scheme yields patch states") };
            prop_assert!(s.rotation.x().iter().all(|c| c.abs() <= threshold));
        }
        for d in traj.diagnostics.iter().filter(|d| d.switched) {
            prop_assert!(d.max_abs_coordinate <= 1.0);
        }
    }

    #[test]
    fn patch_trajectories_stay_orthogonal_without_renormalization(
        seed in 0u64..1000,
        q0 in unit_quat(),
        scheme in prop::sample::select(vec![Scheme::PatchEuler, Scheme::PatchRk4]),
    ) {
        let profile = RateProfile::parse(&format!("tumble:{seed}:1:4"), 0).unwrap();
        let start = AttitudeState::quaternion(q0, 0.0);
        let traj = propagate(&start, &profile, 0.0, 5.0, &StepperConfig::new(scheme, 1e-2)).unwrap();
        for state in &traj.states {
            let AttitudeState::Patch(s) = state else { panic!("patch scheme yields patch states") };
            let r = patch_to_matrix(&s.rotation);
            prop_assert!(r.orthogonality_defect() < 1e-12);
            prop_assert!(r.determinant() > 0.0);
        }
    }

    #[test]
    fn patch_euler_step_is_the_projected_quaternion_step(
        q in unit_quat(),
        w in rate(10.0),
        dt in 1e-4..=0.1f64,
    ) {
        let p = q.to_patch();
        let i = p.patch();
        // a threshold the step cannot exceed keeps the pre-switch value
        let state = PatchState { rotation: p, t: 0.0 };
        let (next, diag) = step_patch_euler(&state, &w, dt, f64::MAX).unwrap();
        prop_assert!(!diag.switched);
        let quat = step_quat_euler(&QuatState { q: q.coords(), t: 0.0 }, &w, dt, false);
        let expected = project(&quat.q, i);
        let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_abs_diff(&next.rotation.x(), &expected) <= 1e-13 * scale);
    }

    #[test]
    fn closed_form_solves_the_rate_equation(
        q0 in unit_quat(),
        w in rate(5.0),
        t in 0.0..=10.0f64,
    ) {
        let h = 1e-5;
        let plus = closed_form_const(&q0, &w, t + h).coords();
        let minus = closed_form_const(&q0, &w, t - h).coords();
        let here = closed_form_const(&q0, &w, t).coords();
        let fd: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let exact = mat4_vec(&rate_matrix_oracle(&w.components()), &here).map(|c| 0.5 * c);
        prop_assert!(max_abs_diff(&fd, &exact) < 1e-8);
    }
}

#[test]
fn patch_euler_matches_renormalized_quaternion_euler_along_a_run() {
    // The Euler map is linear in q, so projecting commutes with stepping.
    let profile = RateProfile::parse("tumble:3:0.5:3", 0).unwrap();
    let start = AttitudeState::quaternion(UnitQuaternion::IDENTITY, 0.0);
    let patch = propagate(&start, &profile, 0.0, 20.0, &StepperConfig::new(Scheme::PatchEuler, 1e-3)).unwrap();
    let quat = propagate(&start, &profile, 0.0, 20.0, &StepperConfig::new(Scheme::QuatEuler, 1e-3)).unwrap();
    assert!(patch.switch_count() > 0);
    for (a, b) in patch.states.iter().zip(&quat.states) {
        let d = geodesic_distance(&a.unit_quaternion().unwrap(), &b.unit_quaternion().unwrap());
        assert!(d < 1e-9, "t = {}: {d}", a.t());
    }
}

#[test]
fn full_turn_with_patch_euler_stays_within_first_order_error() {
    let w = omega([0.0, 0.0, 1.0]);
    let start = AttitudeState::quaternion(UnitQuaternion::IDENTITY, 0.0);
    let t1 = 2.0 * PI;
    let traj = propagate(&start, &w, 0.0, t1, &StepperConfig::new(Scheme::PatchEuler, 1e-3)).unwrap();
    let exact = closed_form_const(&UnitQuaternion::IDENTITY, &w, t1);
    let err = geodesic_distance(&traj.final_state().unit_quaternion().unwrap(), &exact);
    assert!(err < 5e-3, "{err}");
    // a full turn passes through the antipode of the start, so patches change
    assert!(traj.switch_count() > 0);
}

#[test]
fn rk4_error_over_a_span_drops_sixteenfold_when_dt_halves() {
    let w = omega([0.3, -0.2, 0.5]);
    let q0 = UnitQuaternion::new([0.9, 0.1, -0.3, 0.2]).unwrap();
    let span = 1.0;
    let exact = closed_form_const(&q0, &w, span);
    let error = |dt: f64| {
        let start = AttitudeState::quaternion(q0, 0.0);
        let traj = propagate(&start, &w, 0.0, span, &StepperConfig::new(Scheme::PatchRk4, dt)).unwrap();
        geodesic_distance(&traj.final_state().unit_quaternion().unwrap(), &exact)
    };
    let ratio = error(0.05) / error(0.025);
    assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn zero_rate_leaves_the_attitude_unchanged() {
    let q0 = UnitQuaternion::new([0.5, -0.5, 0.5, 0.5]).unwrap();
    for scheme in Scheme::ALL {
        let traj = propagate(
            &AttitudeState::quaternion(q0, 0.0),
            &AngularVelocity::ZERO,
            0.0,
            1.0,
            &StepperConfig::new(scheme, 0.1),
        )
        .unwrap();
        assert_eq!(traj.switch_count(), 0);
        for s in &traj.states {
            assert_eq!(geodesic_distance(&s.unit_quaternion().unwrap(), &q0), 0.0);
        }
    }
}

#[test]
fn trailing_partial_step_lands_on_the_end_time() {
    let w = omega([0.0, 0.4, 0.0]);
    let start = AttitudeState::quaternion(UnitQuaternion::IDENTITY, 0.0);
    let traj = propagate(&start, &w, 0.0, 1.05, &StepperConfig::new(Scheme::QuatRk4, 0.1)).unwrap();
    assert_eq!(traj.step_count(), 11);
    assert_eq!(traj.final_state().t(), 1.05);
    let err = geodesic_distance(
        &traj.final_state().unit_quaternion().unwrap(),
        &closed_form_const(&UnitQuaternion::IDENTITY, &w, 1.05),
    );
    assert!(err < 1e-9);
}

#[test]
fn unnormalized_quaternion_euler_drifts_outward_every_step() {
    let w = omega([0.2, 0.1, -0.4]);
    let start = AttitudeState::quaternion(UnitQuaternion::IDENTITY, 0.0);
    let config = StepperConfig::new(Scheme::QuatEuler, 1e-2).with_renormalize_every(0);
    let traj = propagate(&start, &w, 0.0, 5.0, &config).unwrap();
    let drift: Vec<f64> = traj.diagnostics.iter().map(|d| d.quat_norm_drift).collect();
    assert!(drift[0] > 0.0);
    assert!(drift.windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn lift_and_project_invert_each_other() {
    let x = [0.25, -1.5, 0.75];
    for i in 0..4 {
        assert_eq!(project(&lift(&x, i), i), x);
    }
}
