//! Seeded samplers and independent oracles shared by the integration tests.

#![allow(dead_code)]

use projrot::linalg::{Mat3, Vec3, Vec4};
use projrot::{AngularVelocity, PatchRotation, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SAMPLES: usize = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the unit 3-sphere (normalized Gaussian 4-vector).
pub fn unit_quat(rng: &mut ChaCha8Rng) -> UnitQuaternion {
    loop {
        let g: Vec4 = [gauss(rng), gauss(rng), gauss(rng), gauss(rng)];
        let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            return UnitQuaternion::new(g).unwrap();
        }
    }
}

/// Uniform in the ball of radius `r`.
pub fn omega_in_ball(rng: &mut ChaCha8Rng, r: f64) -> AngularVelocity {
    loop {
        let w: Vec3 = [
            rng.gen_range(-r..=r),
            rng.gen_range(-r..=r),
            rng.gen_range(-r..=r),
        ];
        if w.iter().map(|c| c * c).sum::<f64>() <= r * r {
            return AngularVelocity::new(w).unwrap();
        }
    }
}

pub fn patch_point(rng: &mut ChaCha8Rng, bound: f64) -> PatchRotation {
    let i = rng.gen_range(0..4);
    let x = [
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
    ];
    PatchRotation::new(i, x).unwrap()
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// The rate matrix written out entry by entry from `q̇ = ½ q ⊗ (0, ω)`.
pub fn rate_matrix_oracle(w: &Vec3) -> [[f64; 4]; 4] {
    let [a, b, c] = *w;
    [
        [0.0, -a, -b, -c],
        [a, 0.0, c, -b],
        [b, -c, 0.0, a],
        [c, b, -a, 0.0],
    ]
}

pub fn mat4_vec(m: &[[f64; 4]; 4], v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Insert 1 at slot `i`.
pub fn lift(x: &Vec3, i: usize) -> Vec4 {
    let mut z = Vec::with_capacity(4);
    z.extend_from_slice(&x[..i]);
    z.push(1.0);
    z.extend_from_slice(&x[i..]);
    [z[0], z[1], z[2], z[3]]
}

/// Divide by slot `i` and drop it.
pub fn project(z: &Vec4, i: usize) -> Vec3 {
    let rest: Vec<f64> = (0..4).filter(|&j| j != i).map(|j| z[j] / z[i]).collect();
    [rest[0], rest[1], rest[2]]
}

/// Rotation matrix from the axis-angle form of `q` (Rodrigues), independent
/// of the quadratic quaternion formula.
pub fn rodrigues(q: &UnitQuaternion) -> Mat3 {
    let c = q.coords();
    let (s, v) = (c[0], [c[1], c[2], c[3]]);
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let theta = 2.0 * vn.atan2(s);
    let mut r = [[0.0; 3]; 3];
    for (j, row) in r.iter_mut().enumerate() {
        row[j] = 1.0;
    }
    if vn == 0.0 {
        return r;
    }
    let k = [v[0] / vn, v[1] / vn, v[2] / vn];
    let kx = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]];
    let (st, ct) = (theta.sin(), 1.0 - theta.cos());
    for a in 0..3 {
        for b in 0..3 {
            let kk: f64 = (0..3).map(|m| kx[a][m] * kx[m][b]).sum();
            r[a][b] += st * kx[a][b] + ct * kk;
        }
    }
    r
}

pub fn frobenius(a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            s += (x - y) * (x - y);
        }
    }
    s.sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
