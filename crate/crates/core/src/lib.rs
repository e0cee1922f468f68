//! Rotations of 3-space as points of real projective 3-space.
//!
//! Unit quaternions double-cover the rotation group, so the rotations are the
//! lines through the origin of R⁴, i.e. RP³. Its four affine patches give
//! rotation coordinates with three components, no singularities, and
//! conversions built only from ratios of polynomials. This crate provides:
//!
//! - [`projective`]: homogeneous coordinates, patch charts and the patch
//!   switching rule on RPⁿ.
//! - [`rotation`]: quaternions, rotation matrices and their patch forms.
//! - [`kinematics`]: angular-velocity equations for quaternions and patches.
//! - [`integrate`]: fixed-step propagators with patch switching.
//! - [`harness`]: rate profiles, reports, convergence and timing studies used
//!   by the `projrot` command-line tool.

pub mod error;
pub mod harness;
pub mod integrate;
pub mod kinematics;
pub mod linalg;
pub mod projective;
pub mod rotation;

pub use error::{Error, Result};
pub use integrate::{
    closed_form_const, propagate, step_patch_euler, step_patch_rk4, step_quat_euler, step_quat_rk4,
    AngularRate, AttitudeState, PatchState, QuatState, Scheme, StepDiagnostics, StepperConfig,
    Trajectory,
};
pub use kinematics::{
    beta, h_matrix, patch_delta, patch_rhs, quat_rhs, scale_factor, w_column, AngularVelocity,
};
pub use rotation::{
    geodesic_distance, hamilton, patch_to_matrix, patch_to_quat, quat_exp_body, quat_to_matrix,
    quat_to_patch, skew, PatchRotation, RotationMatrix, UnitQuaternion,
};
