//! Unit quaternions, rotation matrices, and rotations as points of RP³.
//!
//! Quaternions are scalar-first, `q = (s, v)`. Multiplication is the Hamilton
//! product, so `quat_to_matrix(q ⊗ p) = quat_to_matrix(q) · quat_to_matrix(p)`.
//!
//! A [`PatchRotation`] stores a rotation as three chart coordinates of one of
//! the four affine patches of RP³. Its homogeneous coordinates are a
//! (non-unit) quaternion, and because the rotation-matrix formula is a ratio
//! of quadratics in those coordinates, [`patch_to_matrix`] needs no square
//! root and produces an exactly orthogonal matrix up to rounding.

use crate::error::{Error, Result};
use crate::kinematics::AngularVelocity;
use crate::linalg::{
    cross3, dot3, dot4, frobenius_distance3, mat3_mul, norm3, norm4, scale4, transpose3, Mat3,
    Vec3, Vec4, IDENTITY3,
};
use crate::projective::{argmax_abs, from_patch_into, to_patch_unchecked};

/// Number of affine patches covering RP³.
pub const PATCH_COUNT: usize = 4;

/// Unit-norm tolerance checked in debug builds on access.
const UNIT_TOLERANCE: f64 = 1e-12;

/// Scalar-first unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion([f64; 4]);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion([1.0, 0.0, 0.0, 0.0]);

    /// Normalizes `q`. Fails on the zero vector or non-finite input.
    pub fn new(q: Vec4) -> Result<Self> {
        if q.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "quaternion" });
        }
        let n = norm4(&q);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self(scale4(&q, 1.0 / n)))
    }

    pub fn coords(&self) -> Vec4 {
        debug_assert!(
            (norm4(&self.0) - 1.0).abs() <= UNIT_TOLERANCE,
            "quaternion norm drifted: {}",
            norm4(&self.0)
        );
        self.0
    }

    pub fn scalar(&self) -> f64 {
        self.0[0]
    }

    pub fn vector(&self) -> Vec3 {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// The antipodal quaternion, which represents the same rotation.
    pub fn neg(&self) -> Self {
        Self(scale4(&self.0, -1.0))
    }

    pub fn to_matrix(&self) -> RotationMatrix {
        quat_to_matrix(self)
    }

    pub fn to_patch(&self) -> PatchRotation {
        quat_to_patch(self)
    }
}

/// A rotation given by chart coordinates `x` in affine patch `patch` of RP³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchRotation {
    patch: usize,
    x: Vec3,
}

impl PatchRotation {
    pub const IDENTITY: PatchRotation = PatchRotation {
        patch: 0,
        x: [0.0; 3],
    };

    pub fn new(patch: usize, x: Vec3) -> Result<Self> {
        if patch >= PATCH_COUNT {
            return Err(Error::PatchIndex {
                index: patch,
                max: PATCH_COUNT - 1,
            });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "patch coordinates",
            });
        }
        Ok(Self { patch, x })
    }

    /// Callers guarantee `patch < 4`.
    #[inline]
    pub(crate) fn from_parts(patch: usize, x: Vec3) -> Self {
        debug_assert!(patch < PATCH_COUNT);
        Self { patch, x }
    }

    #[inline]
    pub fn patch(&self) -> usize {
        self.patch
    }

    #[inline]
    pub fn x(&self) -> Vec3 {
        self.x
    }

    /// Homogeneous coordinates: `x` with a 1 inserted at slot `patch`.
    #[inline]
    pub fn homogeneous(&self) -> Vec4 {
        let mut z = [0.0; 4];
        from_patch_into(&self.x, self.patch, &mut z);
        z
    }

    /// Best-patch representation of the projective point `z`.
    pub fn from_homogeneous(z: &Vec4) -> Result<Self> {
        if z.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "homogeneous coordinates",
            });
        }
        if z.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroVector);
        }
        let patch = argmax_abs(z);
        let mut x = [0.0; 3];
        to_patch_unchecked(z, patch, &mut x);
        Ok(Self { patch, x })
    }

    pub fn to_quat(&self) -> UnitQuaternion {
        patch_to_quat(self)
    }

    pub fn to_matrix(&self) -> RotationMatrix {
        patch_to_matrix(self)
    }
}

/// 3×3 rotation matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix(IDENTITY3);

    pub fn rows(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(transpose3(&self.0))
    }

    pub fn mul(&self, other: &RotationMatrix) -> Self {
        Self(mat3_mul(&self.0, &other.0))
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        crate::linalg::mat3_vec(&self.0, v)
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        dot3(&m[0], &cross3(&m[1], &m[2]))
    }

    /// ‖RᵀR − I‖_F
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.0)
    }

    pub fn frobenius_distance(&self, other: &RotationMatrix) -> f64 {
        frobenius_distance3(&self.0, &other.0)
    }
}

/// ‖MᵀM − I‖_F for an arbitrary 3×3 matrix.
pub fn orthogonality_defect(m: &Mat3) -> f64 {
    frobenius_distance3(&mat3_mul(&transpose3(m), m), &IDENTITY3)
}

/// Cross-product matrix: `skew(a) · b = a × b`.
pub fn skew(a: &Vec3) -> Mat3 {
    [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]]
}

/// `R = (2s² − 1) I + 2 v vᵀ + 2 s skew(v)`.
pub fn quat_to_matrix(q: &UnitQuaternion) -> RotationMatrix {
    RotationMatrix(quat_formula_matrix(&q.coords()))
}

/// The quaternion rotation formula evaluated on a raw 4-vector. Orthogonal
/// only when `q` has unit norm; used to expose norm drift as orthogonality
/// defect.
pub fn quat_formula_matrix(q: &Vec4) -> Mat3 {
    let s = q[0];
    let v = [q[1], q[2], q[3]];
    let diag = 2.0 * s * s - 1.0;
    let mut r = [[0.0; 3]; 3];
    let m = skew(&v);
    for row in 0..3 {
        for col in 0..3 {
            r[row][col] = 2.0 * v[row] * v[col] + 2.0 * s * m[row][col];
        }
        r[row][row] += diag;
    }
    r
}

/// Unit quaternion of a patch point, with positive component at the patch slot.
pub fn patch_to_quat(p: &PatchRotation) -> UnitQuaternion {
    let z = p.homogeneous();
    // |z| >= 1 because of the inserted 1
    UnitQuaternion(scale4(&z, 1.0 / norm4(&z)))
}

/// Best-patch chart coordinates of `q`; `q` and `-q` give the same result.
pub fn quat_to_patch(q: &UnitQuaternion) -> PatchRotation {
    let z = q.coords();
    let patch = argmax_abs(&z);
    let mut x = [0.0; 3];
    // a unit 4-vector has a component of magnitude >= 1/2
    to_patch_unchecked(&z, patch, &mut x);
    PatchRotation { patch, x }
}

/// Rotation matrix of a patch point as a ratio of quadratics in its
/// homogeneous coordinates `(s, v)`:
/// `[(s² − |v|²) I + 2 v vᵀ + 2 s skew(v)] / (s² + |v|²)`.
pub fn patch_to_matrix(p: &PatchRotation) -> RotationMatrix {
    let z = p.homogeneous();
    let s = z[0];
    let v = [z[1], z[2], z[3]];
    let ss = s * s;
    let vv = dot3(&v, &v);
    let inv = 1.0 / (ss + vv);
    let diag = ss - vv;
    let mut r = [[0.0; 3]; 3];
    let m = skew(&v);
    for row in 0..3 {
        for col in 0..3 {
            r[row][col] = (2.0 * v[row] * v[col] + 2.0 * s * m[row][col]) * inv;
        }
        r[row][row] += diag * inv;
    }
    RotationMatrix(r)
}

/// Scalar-first Hamilton product.
pub fn hamilton(q: &Vec4, p: &Vec4) -> Vec4 {
    let (s1, v1) = (q[0], [q[1], q[2], q[3]]);
    let (s2, v2) = (p[0], [p[1], p[2], p[3]]);
    let c = cross3(&v1, &v2);
    [
        s1 * s2 - dot3(&v1, &v2),
        s1 * v2[0] + s2 * v1[0] + c[0],
        s1 * v2[1] + s2 * v1[1] + c[1],
        s1 * v2[2] + s2 * v1[2] + c[2],
    ]
}

/// Rotation accumulated over `t` seconds at constant body rate `omega`:
/// `(cos(θ/2), sin(θ/2) ω̂)` with `θ = ‖ω‖ t`.
pub fn quat_exp_body(omega: &AngularVelocity, t: f64) -> UnitQuaternion {
    let w = omega.components();
    let rate = norm3(&w);
    let theta = rate * t;
    let half = 0.5 * theta;
    // sin(θ/2) / ‖ω‖
    let k = if theta.abs() < 1e-8 {
        0.5 * t * (1.0 - theta * theta / 24.0)
    } else {
        half.sin() / rate
    };
    UnitQuaternion::new([half.cos(), k * w[0], k * w[1], k * w[2]])
        .expect("exponential of a finite rate is a nonzero quaternion")
}

/// Rotation angle between the rotations of `a` and `b`, in `[0, π]`.
///
/// Equal to `2 acos(|a·b|)`, evaluated as `4 atan2(|a − σb|, |a + σb|)` with
/// `σ = sign(a·b)` so that small angles keep full relative precision.
pub fn geodesic_distance(a: &UnitQuaternion, b: &UnitQuaternion) -> f64 {
    geodesic_distance_raw(&a.coords(), &b.coords())
}

/// [`geodesic_distance`] for unit 4-vectors that are not wrapped.
pub(crate) fn geodesic_distance_raw(a: &Vec4, b: &Vec4) -> f64 {
    let sigma = if dot4(a, b) < 0.0 { -1.0 } else { 1.0 };
    let mut diff = 0.0;
    let mut sum = 0.0;
    for j in 0..4 {
        let d = a[j] - sigma * b[j];
        let s = a[j] + sigma * b[j];
        diff += d * d;
        sum += s * s;
    }
    4.0 * diff.sqrt().atan2(sum.sqrt())
}
