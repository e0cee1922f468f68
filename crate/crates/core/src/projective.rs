//! Homogeneous coordinates on real projective n-space and its affine patch atlas.
//!
//! Patch `k` is the set of points whose `k`-th homogeneous coordinate is
//! nonzero. Its chart divides through by that coordinate and drops the
//! resulting 1, which identifies the patch with all of Rⁿ. Four such charts
//! cover RP³, and through it the rotation group.
//!
//! The slice functions here are the single implementation of the chart maps.
//! [`HomogeneousPoint`] and [`PatchPoint`] wrap them for owned, validated
//! values; the `_into` variants write into caller buffers for fixed-size hot
//! paths.

use crate::error::{Error, Result};

/// Default coordinate bound that triggers a patch switch.
pub const DEFAULT_SWITCH_THRESHOLD: f64 = 2.0;

/// Denominators smaller than this in magnitude are treated as "not in patch".
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-300;

/// A nonzero vector of n+1 homogeneous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoint {
    coords: Vec<f64>,
}

impl HomogeneousPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Config(format!(
                "homogeneous point needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "homogeneous coordinates",
            });
        }
        if coords.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { coords })
    }

    /// Dimension n of the projective space (one less than the coordinate count).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn best_patch(&self) -> usize {
        // nonzero by construction
        argmax_abs(&self.coords)
    }

    pub fn to_patch(&self, k: usize) -> Result<PatchPoint> {
        let coords = to_patch(&self.coords, k)?;
        Ok(PatchPoint { patch: k, coords })
    }

    /// Chart coordinates in the patch of the largest-magnitude coordinate.
    pub fn to_best_patch(&self) -> PatchPoint {
        let k = self.best_patch();
        let mut coords = vec![0.0; self.dim()];
        to_patch_unchecked(&self.coords, k, &mut coords);
        PatchPoint { patch: k, coords }
    }

    /// True when `other` is a nonzero multiple of `self`.
    ///
    /// Compares every 2×2 minor `a_j b_k − a_k b_j` against `tol · ‖a‖ ‖b‖`.
    pub fn same_point(&self, other: &HomogeneousPoint, tol: f64) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        let a = &self.coords;
        let b = &other.coords;
        let scale = norm(a) * norm(b);
        for j in 0..a.len() {
            for k in (j + 1)..a.len() {
                if (a[j] * b[k] - a[k] * b[j]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

/// A point of patch `patch`, given by its n chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchPoint {
    patch: usize,
    coords: Vec<f64>,
}

impl PatchPoint {
    pub fn new(patch: usize, coords: Vec<f64>) -> Result<Self> {
        if patch > coords.len() {
            return Err(Error::PatchIndex {
                index: patch,
                max: coords.len(),
            });
        }
        Ok(Self { patch, coords })
    }

    pub fn patch(&self) -> usize {
        self.patch
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_homogeneous(&self) -> HomogeneousPoint {
        HomogeneousPoint {
            coords: from_patch(&self.coords, self.patch),
        }
    }

    pub fn needs_switch(&self, threshold: f64) -> bool {
        needs_switch(&self.coords, threshold)
    }

    /// Re-express this point in its best patch.
    pub fn switched(&self) -> PatchPoint {
        let (coords, patch) = switch_patch(&self.coords, self.patch);
        PatchPoint { patch, coords }
    }
}

/// Chart map of patch `k`: `z / z[k]` with slot `k` removed.
pub fn to_patch(z: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; z.len().saturating_sub(1)];
    to_patch_into(z, k, DEFAULT_DENOMINATOR_FLOOR, &mut out)?;
    Ok(out)
}

/// [`to_patch`] writing into `out` (length `z.len() - 1`) with an explicit
/// denominator floor.
pub fn to_patch_into(z: &[f64], k: usize, floor: f64, out: &mut [f64]) -> Result<()> {
    if z.is_empty() || k >= z.len() {
        return Err(Error::PatchIndex {
            index: k,
            max: z.len().saturating_sub(1),
        });
    }
    assert_eq!(out.len() + 1, z.len(), "chart output has the wrong length");
    let denom = z[k];
    if denom == 0.0 || denom.abs() < floor {
        return Err(Error::NotInPatch { patch: k });
    }
    to_patch_unchecked(z, k, out);
    Ok(())
}

#[inline]
pub(crate) fn to_patch_unchecked(z: &[f64], k: usize, out: &mut [f64]) {
    let denom = z[k];
    let (head, tail) = z.split_at(k);
    for (o, c) in out.iter_mut().zip(head.iter().chain(&tail[1..])) {
        *o = c / denom;
    }
}

/// Inverse chart of patch `k`: insert a 1 at slot `k`.
pub fn from_patch(x: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + 1];
    from_patch_into(x, k, &mut out);
    out
}

/// [`from_patch`] writing into `out` (length `x.len() + 1`).
///
/// Panics if `k > x.len()`.
#[inline]
pub fn from_patch_into(x: &[f64], k: usize, out: &mut [f64]) {
    assert!(k <= x.len(), "patch index {k} out of range 0..={}", x.len());
    assert_eq!(out.len(), x.len() + 1, "homogeneous output has the wrong length");
    out[..k].copy_from_slice(&x[..k]);
    out[k] = 1.0;
    out[k + 1..].copy_from_slice(&x[k..]);
}

/// Index of the largest-magnitude coordinate; ties go to the lowest index.
pub fn best_patch(z: &[f64]) -> Result<usize> {
    if z.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(argmax_abs(z))
}

#[inline]
pub(crate) fn argmax_abs(z: &[f64]) -> usize {
    let mut best = 0;
    let mut best_abs = z[0].abs();
    for (j, c) in z.iter().enumerate().skip(1) {
        if c.abs() > best_abs {
            best = j;
            best_abs = c.abs();
        }
    }
    best
}

/// True iff some chart coordinate exceeds `threshold` in magnitude.
/// A coordinate exactly at the threshold does not trigger.
#[inline]
pub fn needs_switch(x: &[f64], threshold: f64) -> bool {
    debug_assert!(threshold >= 1.0, "switch threshold must be >= 1");
    x.iter().any(|c| c.abs() > threshold)
}

/// Largest coordinate magnitude, 0 for an empty slice.
#[inline]
pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, c| m.max(c.abs()))
}

/// Move a chart point from patch `k_from` into the best patch of the same
/// projective point. Every output coordinate has magnitude at most 1.
pub fn switch_patch(x: &[f64], k_from: usize) -> (Vec<f64>, usize) {
    let mut scratch = vec![0.0; x.len() + 1];
    let mut out = vec![0.0; x.len()];
    let k = switch_patch_into(x, k_from, &mut scratch, &mut out);
    (out, k)
}

/// [`switch_patch`] using caller buffers; returns the new patch index.
#[inline]
pub fn switch_patch_into(x: &[f64], k_from: usize, scratch: &mut [f64], out: &mut [f64]) -> usize {
    from_patch_into(x, k_from, scratch);
    // the inserted 1 guarantees a component of magnitude >= 1
    let k = argmax_abs(scratch);
    to_patch_unchecked(scratch, k, out);
    k
}

fn norm(z: &[f64]) -> f64 {
    z.iter().map(|c| c * c).sum::<f64>().sqrt()
}
