//! Angular-velocity kinematics for quaternions and for patch coordinates.
//!
//! The body-frame rate `ω` drives the quaternion through `q̇ = ½ H(ω) q`,
//! equivalently `Ṙ = R skew(ω)`. On patch `i` the homogeneous coordinates
//! `x̂` are a rescaled quaternion, and eliminating the scale gives the
//! three-dimensional equation
//!
//! ```text
//! ẋ = ½ [ Wᵢ + (Wᵢ·x) x + (−1)^(i+1) Wᵢ × x ]
//! ```
//!
//! where `Wᵢ` is column `i` of `H` with its zero diagonal entry removed.

use crate::error::{Error, Result};
use crate::linalg::{Mat4, Vec3, Vec4};
use crate::rotation::{PatchRotation, PATCH_COUNT};

/// Body-frame angular velocity in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularVelocity([f64; 3]);

impl AngularVelocity {
    pub const ZERO: AngularVelocity = AngularVelocity([0.0; 3]);

    pub fn new(omega: Vec3) -> Result<Self> {
        if omega.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "angular velocity",
            });
        }
        Ok(Self(omega))
    }

    #[inline]
    pub fn components(&self) -> Vec3 {
        self.0
    }
}

/// Denominators of the patch Euler step below this are rejected.
pub const DEGENERATE_STEP_DENOMINATOR: f64 = 1e-12;

const SIGN: u64 = 1 << 63;

// Wᵢ[j] = ±ω[W_PERM[i][j]], sign flipped where W_NEG has the sign bit set.
const W_PERM: [[usize; 3]; 4] = [[0, 1, 2], [0, 2, 1], [1, 2, 0], [2, 1, 0]];
const W_NEG: [[u64; 3]; 4] = [[0, 0, 0], [SIGN, SIGN, 0], [SIGN, 0, SIGN], [SIGN, SIGN, 0]];
// (−1)^(i+1)
const CROSS_NEG: [u64; 4] = [SIGN, 0, SIGN, 0];

// Sign flips act on the bit pattern, so no multiplication is spent on a sign.
#[inline(always)]
fn flip(v: f64, mask: u64) -> f64 {
    f64::from_bits(v.to_bits() ^ mask)
}

#[inline(always)]
fn w_col(w: &Vec3, i: usize) -> Vec3 {
    let i = i & 3;
    let perm = &W_PERM[i];
    let neg = &W_NEG[i];
    [
        flip(w[perm[0]], neg[0]),
        flip(w[perm[1]], neg[1]),
        flip(w[perm[2]], neg[2]),
    ]
}

/// The 4×4 skew-symmetric rate matrix `H(ω)` of `q̇ = ½ H q`.
pub fn h_matrix(omega: &AngularVelocity) -> Mat4 {
    let [w1, w2, w3] = omega.0;
    [
        [0.0, -w1, -w2, -w3],
        [w1, 0.0, w3, -w2],
        [w2, -w3, 0.0, w1],
        [w3, w2, -w1, 0.0],
    ]
}

/// Column `i` of `H(ω)` without its diagonal zero.
pub fn w_column(omega: &AngularVelocity, i: usize) -> Result<Vec3> {
    if i >= PATCH_COUNT {
        return Err(Error::PatchIndex {
            index: i,
            max: PATCH_COUNT - 1,
        });
    }
    Ok(w_col(&omega.0, i))
}

/// `½ H(ω) q`, valid for non-unit `q`. Twelve multiplications before halving.
#[inline]
pub fn quat_rhs(q: &Vec4, omega: &AngularVelocity) -> Vec4 {
    let w = &omega.0;
    let s = q[0];
    let (v1, v2, v3) = (q[1], q[2], q[3]);
    let dot = w[0] * v1 + w[1] * v2 + w[2] * v3;
    // s ω − ω × v
    let d1 = s * w[0] - (w[1] * v3 - w[2] * v2);
    let d2 = s * w[1] - (w[2] * v1 - w[0] * v3);
    let d3 = s * w[2] - (w[0] * v2 - w[1] * v1);
    [-0.5 * dot, 0.5 * d1, 0.5 * d2, 0.5 * d3]
}

/// Logarithmic rate of the homogeneous scale on patch `i`: `½ Wᵢ·x`.
pub fn beta(x: &Vec3, omega: &AngularVelocity, i: usize) -> Result<f64> {
    let wi = w_column(omega, i)?;
    Ok(0.5 * (wi[0] * x[0] + wi[1] * x[1] + wi[2] * x[2]))
}

/// `Wᵢ + (Wᵢ·x) x + (−1)^(i+1) Wᵢ × x` and `Wᵢ·x`: twelve multiplications.
#[inline(always)]
fn numerator<const I: usize>(x: &Vec3, w: &Vec3) -> (Vec3, f64) {
    let wi = w_col(w, I);
    let dot = wi[0] * x[0] + wi[1] * x[1] + wi[2] * x[2];
    // the sign of the cross term is carried by operand order: −(a × b) = b × a
    let (a, b) = if CROSS_NEG[I] == 0 { (&wi, x) } else { (x, &wi) };
    let c0 = a[1] * b[2] - a[2] * b[1];
    let c1 = a[2] * b[0] - a[0] * b[2];
    let c2 = a[0] * b[1] - a[1] * b[0];
    (
        [
            wi[0] + dot * x[0] + c0,
            wi[1] + dot * x[1] + c1,
            wi[2] + dot * x[2] + c2,
        ],
        dot,
    )
}

// One specialization per patch, so the permutation and signs fold into the
// arithmetic. The patch index changes rarely along a trajectory, which keeps
// the dispatch well predicted.
#[inline(always)]
fn patch_numerator(p: &PatchRotation, omega: &AngularVelocity) -> (Vec3, f64) {
    let x = p.x();
    match p.patch() {
        0 => numerator::<0>(&x, &omega.0),
        1 => numerator::<1>(&x, &omega.0),
        2 => numerator::<2>(&x, &omega.0),
        _ => numerator::<3>(&x, &omega.0),
    }
}

/// Time derivative of the patch coordinates under body rate `omega`.
#[inline]
pub fn patch_rhs(p: &PatchRotation, omega: &AngularVelocity) -> Vec3 {
    let (n, _) = patch_numerator(p, omega);
    [0.5 * n[0], 0.5 * n[1], 0.5 * n[2]]
}

/// Increment of the patch coordinates matching one quaternion Euler step
/// `q + ½ H q Δt` projected back onto the same patch:
/// `Δx = Δt [Wᵢ + (−1)^(i+1) Wᵢ × x + (Wᵢ·x) x] / (2 − (Wᵢ·x) Δt)`.
pub fn patch_delta(p: &PatchRotation, omega: &AngularVelocity, dt: f64) -> Result<Vec3> {
    let (n, dot) = patch_numerator(p, omega);
    let denom = 2.0 - dot * dt;
    if !(denom.abs() >= DEGENERATE_STEP_DENOMINATOR) {
        return Err(Error::DegenerateStep);
    }
    let k = dt / denom;
    Ok([n[0] * k, n[1] * k, n[2] * k])
}

/// `1 − (Wᵢ·x) Δt / 2`; `patch_delta / Δt = patch_rhs / scale_factor`.
pub fn scale_factor(p: &PatchRotation, omega: &AngularVelocity, dt: f64) -> f64 {
    let wi = w_col(&omega.0, p.patch());
    let x = p.x();
    1.0 - (wi[0] * x[0] + wi[1] * x[1] + wi[2] * x[2]) * dt / 2.0
}
