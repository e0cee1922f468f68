//! Angular-rate profiles: constant, sinusoidal, seeded random tumbling, and
//! rates sampled from a CSV file.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::integrate::AngularRate;
use crate::kinematics::AngularVelocity;
use crate::linalg::Vec3;

/// Sinusoids per axis in a tumble profile.
pub const TUMBLE_TONES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tone {
    amplitude: f64,
    frequency_hz: f64,
    phase: f64,
}

/// Band-limited pseudo-random rate: a sum of seeded sinusoids on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tumble {
    pub seed: u64,
    pub bandwidth_hz: f64,
    pub rms: f64,
    tones: [[Tone; TUMBLE_TONES]; 3],
}

impl Tumble {
    /// Frequencies are drawn uniformly from `[bandwidth/10, bandwidth]`,
    /// phases uniformly from `[0, 2π)`. Every tone has the same amplitude,
    /// chosen so that the time-averaged `‖ω‖²` equals `rms²`.
    pub fn new(seed: u64, bandwidth_hz: f64, rms: f64) -> Result<Self, HarnessError> {
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(HarnessError::Profile(format!(
                "tumble bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        if !(rms >= 0.0 && rms.is_finite()) {
            return Err(HarnessError::Profile(format!(
                "tumble rms must be non-negative, got {rms}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitude = rms * (2.0 / (3 * TUMBLE_TONES) as f64).sqrt();
        let mut tones = [[Tone {
            amplitude,
            frequency_hz: 0.0,
            phase: 0.0,
        }; TUMBLE_TONES]; 3];
        for axis in tones.iter_mut() {
            for tone in axis.iter_mut() {
                tone.frequency_hz = rng.gen_range(0.1 * bandwidth_hz..=bandwidth_hz);
                tone.phase = rng.gen_range(0.0..TAU);
            }
        }
        Ok(Self {
            seed,
            bandwidth_hz,
            rms,
            tones,
        })
    }

    fn eval(&self, t: f64) -> Vec3 {
        let mut w = [0.0; 3];
        for (axis, tones) in w.iter_mut().zip(&self.tones) {
            *axis = tones
                .iter()
                .map(|tone| tone.amplitude * (TAU * tone.frequency_hz * t + tone.phase).sin())
                .sum();
        }
        w
    }
}

/// Rates held constant between samples and clamped outside the sample range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRate {
    times: Vec<f64>,
    rates: Vec<Vec3>,
}

impl SampledRate {
    pub fn new(times: Vec<f64>, rates: Vec<Vec3>) -> Result<Self, HarnessError> {
        if times.is_empty() || times.len() != rates.len() {
            return Err(HarnessError::Profile(
                "sampled rate profile needs at least one sample".into(),
            ));
        }
        if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(HarnessError::Profile(format!(
                "sample times must be strictly increasing (sample {})",
                k + 1
            )));
        }
        Ok(Self { times, rates })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn eval(&self, t: f64) -> Vec3 {
        let k = self.times.partition_point(|&s| s <= t);
        self.rates[k.saturating_sub(1)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateProfile {
    Constant(AngularVelocity),
    Sinusoid {
        amplitude: Vec3,
        frequency_hz: f64,
        phase: f64,
    },
    Tumble(Tumble),
    Sampled(SampledRate),
}

impl RateProfile {
    /// Parse `constant:X,Y,Z`, `sinusoid:AX,AY,AZ:F:PHASE`,
    /// `tumble:SEED:BW:RMS` (or `tumble:BW:RMS` with `default_seed`) or
    /// `csv:PATH`.
    pub fn parse(spec: &str, default_seed: u64) -> Result<Self, HarnessError> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| HarnessError::Profile(format!("profile `{spec}` has no parameters")))?;
        match kind {
            "constant" => {
                let w = parse_vec3(rest, spec)?;
                Ok(RateProfile::Constant(AngularVelocity::new(w)?))
            }
            "sinusoid" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 3 {
                    return Err(HarnessError::Profile(format!(
                        "sinusoid profile `{spec}` must be sinusoid:AX,AY,AZ:FREQ:PHASE"
                    )));
                }
                Ok(RateProfile::Sinusoid {
                    amplitude: parse_vec3(parts[0], spec)?,
                    frequency_hz: parse_number(parts[1], spec)?,
                    phase: parse_number(parts[2], spec)?,
                })
            }
            "tumble" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let (seed, bw, rms) = match parts.as_slice() {
                    [seed, bw, rms] => (
                        seed.trim().parse::<u64>().map_err(|_| {
                            HarnessError::Profile(format!("bad tumble seed in `{spec}`"))
                        })?,
                        *bw,
                        *rms,
                    ),
                    [bw, rms] => (default_seed, *bw, *rms),
                    _ => {
                        return Err(HarnessError::Profile(format!(
                            "tumble profile `{spec}` must be tumble:SEED:BW:RMS"
                        )))
                    }
                };
                Ok(RateProfile::Tumble(Tumble::new(
                    seed,
                    parse_number(bw, spec)?,
                    parse_number(rms, spec)?,
                )?))
            }
            "csv" => load_rate_csv(rest),
            other => Err(HarnessError::Profile(format!(
                "unknown profile kind `{other}` (expected constant, sinusoid, tumble or csv)"
            ))),
        }
    }

    pub fn is_constant(&self) -> Option<AngularVelocity> {
        match self {
            RateProfile::Constant(w) => Some(*w),
            _ => None,
        }
    }
}

impl FromStr for RateProfile {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RateProfile::parse(s, 0)
    }
}

impl AngularRate for RateProfile {
    fn rate_at(&self, t: f64) -> AngularVelocity {
        let w = match self {
            RateProfile::Constant(w) => return *w,
            RateProfile::Sinusoid {
                amplitude,
                frequency_hz,
                phase,
            } => {
                let s = (TAU * frequency_hz * t + phase).sin();
                [amplitude[0] * s, amplitude[1] * s, amplitude[2] * s]
            }
            RateProfile::Tumble(tumble) => tumble.eval(t),
            RateProfile::Sampled(samples) => samples.eval(t),
        };
        AngularVelocity::new(w).expect("profile parameters are finite")
    }
}

fn parse_number(s: &str, spec: &str) -> Result<f64, HarnessError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| HarnessError::Profile(format!("bad number `{s}` in profile `{spec}`")))?;
    if !v.is_finite() {
        return Err(HarnessError::Profile(format!(
            "non-finite number `{s}` in profile `{spec}`"
        )));
    }
    Ok(v)
}

fn parse_vec3(s: &str, spec: &str) -> Result<Vec3, HarnessError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(HarnessError::Profile(format!(
            "expected three comma-separated numbers in profile `{spec}`"
        )));
    }
    Ok([
        parse_number(parts[0], spec)?,
        parse_number(parts[1], spec)?,
        parse_number(parts[2], spec)?,
    ])
}

/// Load a zero-order-hold rate profile from rows `t,wx,wy,wz`.
///
/// Blank lines and `#` comments are skipped; a leading header row whose first
/// field is `t` is allowed.
pub fn load_rate_csv(path: impl AsRef<Path>) -> Result<RateProfile, HarnessError> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    parse_rate_csv(&text).map(RateProfile::Sampled)
}

pub(crate) fn parse_rate_csv(text: &str) -> Result<SampledRate, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut times = Vec::new();
    let mut rates = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| HarnessError::Csv {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if index == 0 && record.get(0) == Some("t") {
            continue;
        }
        if record.len() != 4 {
            return Err(HarnessError::Csv {
                line,
                message: format!("expected 4 fields t,wx,wy,wz, found {}", record.len()),
            });
        }
        let mut values = [0.0; 4];
        for (v, field) in values.iter_mut().zip(record.iter()) {
            *v = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| HarnessError::Csv {
                    line,
                    message: format!("`{field}` is not a finite number"),
                })?;
        }
        if let Some(&prev) = times.last() {
            if !(values[0] > prev) {
                return Err(HarnessError::Csv {
                    line,
                    message: format!("time {} does not increase past {prev}", values[0]),
                });
            }
        }
        times.push(values[0]);
        rates.push([values[1], values[2], values[3]]);
    }
    if times.is_empty() {
        return Err(HarnessError::Csv {
            line: 0,
            message: "no samples".into(),
        });
    }
    SampledRate::new(times, rates)
}
