//! Timing of the patch and quaternion right-hand sides.
//!
//! Both kernels cost twelve multiplications. The benchmark evaluates each
//! over the same number of pre-generated random inputs, storing every result
//! so that no call can be elided. The calls of the two kernels are split
//! into short slices that alternate, and each slice yields one sample of the
//! mean time per call. Medians over the samples discard the slices that a
//! burst of host noise landed on.
//!
//! Patch indices are drawn independently for every call, so the patch
//! timing includes the cost of dispatching on an unpredictable index.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kinematics::{patch_rhs, quat_rhs, AngularVelocity};
use crate::linalg::{Vec3, Vec4};
use crate::rotation::PatchRotation;

/// Inputs per batch; small enough to stay in L1/L2 cache.
const BATCH: usize = 1024;

/// Interleaved slices per repeat.
const SLICES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub calls: u64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            calls: 10_000_000,
            repeats: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Evaluations of each kernel over all repeats.
    pub calls: u64,
    /// Mean time per call in each slice, in nanoseconds.
    pub patch_ns: Vec<f64>,
    pub quat_ns: Vec<f64>,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

impl BenchReport {
    pub fn patch_ns_per_call(&self) -> f64 {
        median(&self.patch_ns)
    }

    pub fn quat_ns_per_call(&self) -> f64 {
        median(&self.quat_ns)
    }

    /// Median over slice pairs of patch time over quaternion time.
    pub fn ratio(&self) -> f64 {
        let ratios: Vec<f64> = self
            .patch_ns
            .iter()
            .zip(&self.quat_ns)
            .map(|(p, q)| p / q)
            .collect();
        median(&ratios)
    }

    pub fn write_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "kernel,calls,ns_per_call")?;
        writeln!(out, "patch_rhs,{},{:.4}", self.calls, self.patch_ns_per_call())?;
        writeln!(out, "quat_rhs,{},{:.4}", self.calls, self.quat_ns_per_call())?;
        writeln!(out, "ratio,,{:.4}", self.ratio())
    }
}

struct Inputs {
    patches: Vec<PatchRotation>,
    quats: Vec<Vec4>,
    rates: Vec<AngularVelocity>,
}

fn inputs(seed: u64) -> Inputs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v3 = |rng: &mut ChaCha8Rng, r: f64| -> Vec3 {
        [rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r)]
    };
    let mut patches = Vec::with_capacity(BATCH);
    let mut quats = Vec::with_capacity(BATCH);
    let mut rates = Vec::with_capacity(BATCH);
    for _ in 0..BATCH {
        let patch = rng.gen_range(0..4);
        patches.push(PatchRotation::new(patch, v3(&mut rng, 2.0)).expect("valid patch"));
        quats.push([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ]);
        rates.push(AngularVelocity::new(v3(&mut rng, 10.0)).expect("finite rate"));
    }
    Inputs {
        patches,
        quats,
        rates,
    }
}

#[inline(always)]
fn patch_loop(patches: &[PatchRotation], rates: &[AngularVelocity], rounds: u64, out: &mut [Vec3]) -> f64 {
    let start = Instant::now();
    for _ in 0..rounds {
        for ((p, w), o) in patches.iter().zip(rates).zip(out.iter_mut()) {
            *o = patch_rhs(black_box(p), black_box(w));
        }
        black_box(&mut *out);
    }
    start.elapsed().as_secs_f64()
}

#[inline(always)]
fn quat_loop(quats: &[Vec4], rates: &[AngularVelocity], rounds: u64, out: &mut [Vec4]) -> f64 {
    let start = Instant::now();
    for _ in 0..rounds {
        for ((q, w), o) in quats.iter().zip(rates).zip(out.iter_mut()) {
            *o = quat_rhs(black_box(q), black_box(w));
        }
        black_box(&mut *out);
    }
    start.elapsed().as_secs_f64()
}

// Both loops are also compiled for AVX2 and picked at run time, so the two
// kernels always share the same instruction set.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn patch_loop_avx2(patches: &[PatchRotation], rates: &[AngularVelocity], rounds: u64, out: &mut [Vec3]) -> f64 {
    patch_loop(patches, rates, rounds, out)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn quat_loop_avx2(quats: &[Vec4], rates: &[AngularVelocity], rounds: u64, out: &mut [Vec4]) -> f64 {
    quat_loop(quats, rates, rounds, out)
}

fn avx2() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::is_x86_feature_detected!("avx2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

fn time_patch(inp: &Inputs, rounds: u64, out: &mut [Vec3]) -> f64 {
    #[cfg(target_arch = "x86_64")]
    if avx2() {
        // SAFETY: the CPU supports AVX2.
        return unsafe { patch_loop_avx2(&inp.patches, &inp.rates, rounds, out) };
    }
    patch_loop(&inp.patches, &inp.rates, rounds, out)
}

fn time_quat(inp: &Inputs, rounds: u64, out: &mut [Vec4]) -> f64 {
    #[cfg(target_arch = "x86_64")]
    if avx2() {
        // SAFETY: the CPU supports AVX2.
        return unsafe { quat_loop_avx2(&inp.quats, &inp.rates, rounds, out) };
    }
    quat_loop(&inp.quats, &inp.rates, rounds, out)
}

/// Time both kernels; `calls` per kernel and repeat is rounded up to a whole
/// number of batches per slice.
pub fn run_bench(opts: &BenchOptions) -> BenchReport {
    let inp = inputs(opts.seed);
    let per_slice = opts.calls.div_ceil((BATCH * SLICES) as u64).max(1);
    let repeats = opts.repeats.max(1);
    let mut patch_out = vec![[0.0; 3]; BATCH];
    let mut quat_out = vec![[0.0; 4]; BATCH];

    // warm up caches and clocks
    let warm = (per_slice * SLICES as u64 / 10).max(1);
    time_patch(&inp, warm, &mut patch_out);
    time_quat(&inp, warm, &mut quat_out);

    let samples = repeats * SLICES;
    let mut patch_ns = Vec::with_capacity(samples);
    let mut quat_ns = Vec::with_capacity(samples);
    let per_call = |secs: f64| secs * 1e9 / (per_slice * BATCH as u64) as f64;
    for slice in 0..samples {
        let (tp, tq) = if slice % 2 == 0 {
            let tp = time_patch(&inp, per_slice, &mut patch_out);
            (tp, time_quat(&inp, per_slice, &mut quat_out))
        } else {
            let tq = time_quat(&inp, per_slice, &mut quat_out);
            (time_patch(&inp, per_slice, &mut patch_out), tq)
        };
        patch_ns.push(per_call(tp));
        quat_ns.push(per_call(tq));
    }
    BenchReport {
        calls: per_slice * (BATCH * samples) as u64,
        patch_ns,
        quat_ns,
    }
}
