//! SINR, round-robin throughput, the log-fair objective and angle-of-arrival
//! measurements. These are the only quantities the agent gets to observe.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::dbm_to_watts;
use crate::error::{Error, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    /// System bandwidth `B`, Hz.
    pub bandwidth: f64,
    /// Number of UEs `U` sharing the bandwidth round-robin.
    pub num_ues: usize,
    /// Thermal noise density, dBm/Hz.
    pub noise_density: f64,
    pub noise_figure: f64,
    /// Upper bound on the effective SINR, linear.
    pub sinr_cap: f64,
    /// Lower bound on a UE rate, bit/s. Keeps `log10` finite in deep fades.
    pub rate_floor: f64,
    /// Standard deviation of the additive AoA estimation error, degrees.
    pub aoa_noise_std: f64,
    /// Circular standard deviation reported when the AoAs carry no direction, degrees.
    pub aoa_std_cap: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            bandwidth: 10.0e6,
            num_ues: 10,
            noise_density: -174.0,
            noise_figure: 9.0,
            sinr_cap: 255.0,
            rate_floor: 1.0e3,
            aoa_noise_std: 0.0,
            aoa_std_cap: 180.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0) {
            return Err(Error::config("radio.bandwidth", "must be > 0"));
        }
        if self.num_ues == 0 {
            return Err(Error::config("radio.num_ues", "must be >= 1"));
        }
        if !(self.sinr_cap > 0.0) {
            return Err(Error::config("radio.sinr_cap", "must be > 0"));
        }
        if !(self.rate_floor > 0.0) {
            return Err(Error::config("radio.rate_floor", "must be > 0"));
        }
        if !(self.aoa_noise_std >= 0.0) || !self.aoa_noise_std.is_finite() {
            return Err(Error::config("radio.aoa_noise_std", "must be finite and >= 0"));
        }
        if !(self.aoa_std_cap > 0.0) {
            return Err(Error::config("radio.aoa_std_cap", "must be > 0"));
        }
        Ok(())
    }

    /// Noise power `sigma^2_k` over one resource of `bandwidth / num_resources` Hz, watts.
    pub fn noise_power_per_resource(&self, num_resources: usize) -> f64 {
        let resource_bw = self.bandwidth / num_resources as f64;
        dbm_to_watts(self.noise_density + self.noise_figure) * resource_bw
    }

    /// Highest achievable UE rate: `(B/U) log2(1 + cap)`.
    pub fn max_rate(&self) -> f64 {
        self.bandwidth / self.num_ues as f64 * (1.0 + self.sinr_cap).log2()
    }
}

/// Everything measured on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMeasurement {
    pub per_ue_effective_sinr: Vec<f64>,
    pub per_ue_rate: Vec<f64>,
    pub per_ue_aoa: Vec<f64>,
    pub fair_rate: f64,
}

/// Per-resource SINR `P_serving / (sum of interferers + noise)`.
pub fn compute_sinr(serving_rx: &[f64], interferer_rx: &[Vec<f64>], noise_power: f64) -> Result<Vec<f64>> {
    if !(noise_power > 0.0) {
        return Err(Error::Domain(format!("noise power must be > 0, got {noise_power}")));
    }
    if let Some(bad) = interferer_rx.iter().find(|i| i.len() != serving_rx.len()) {
        return Err(Error::Shape(format!(
            "interferer has {} resources, serving link has {}",
            bad.len(),
            serving_rx.len()
        )));
    }
    Ok(serving_rx
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let interference: f64 = interferer_rx.iter().map(|i| i[k]).sum();
            s / (interference + noise_power)
        })
        .collect())
}

/// Arithmetic mean of the per-resource SINRs, capped.
pub fn effective_sinr(per_resource_sinr: &[f64], cap: f64) -> Result<f64> {
    if per_resource_sinr.is_empty() {
        return Err(Error::Domain("effective SINR of zero resources".into()));
    }
    let mean = per_resource_sinr.iter().sum::<f64>() / per_resource_sinr.len() as f64;
    Ok(mean.min(cap))
}

/// Round-robin rate `max((B/U) log2(1 + sinr), floor)`.
pub fn ue_rate(effective_sinr: f64, config: &RadioConfig) -> f64 {
    let share = config.bandwidth / config.num_ues as f64;
    (share * (1.0 + effective_sinr.max(0.0)).log2()).max(config.rate_floor)
}

/// `sum_u log10(R_u)`.
pub fn fair_rate(rates: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &r in rates {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("fair rate needs positive rates, got {r}")));
        }
        total += r.log10();
    }
    Ok(total)
}

/// Wrap an angle in degrees to `[-180, 180)`.
pub fn wrap_degrees(angle: f64) -> f64 {
    let w = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoaSample {
    pub degrees: f64,
    /// UE directly below the UAV: azimuth undefined, 0 reported.
    pub degenerate: bool,
}

/// Horizontal azimuth of the UE as seen from the UAV (east = 0, north = 90),
/// plus Gaussian estimation error, wrapped to `[-180, 180)`.
pub fn measure_aoa(ue_pos: [f64; 3], uav_pos: [f64; 3], noise_std: f64, rng: &mut SimRng) -> AoaSample {
    let dx = ue_pos[0] - uav_pos[0];
    let dy = ue_pos[1] - uav_pos[1];
    let degenerate = dx == 0.0 && dy == 0.0;
    let truth = if degenerate { 0.0 } else { dy.atan2(dx).to_degrees() };
    let noise = if noise_std > 0.0 {
        noise_std * rng.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    };
    AoaSample {
        degrees: wrap_degrees(truth + noise),
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularStats {
    pub mean: f64,
    pub std: f64,
    /// Mean resultant length vanished: mean reported as 0 and std as the cap.
    pub degenerate: bool,
}

/// Circular mean `atan2(sum sin, sum cos)` and circular std `sqrt(-2 ln R)`, in degrees.
pub fn aoa_circular_stats(angles: &[f64], std_cap: f64) -> Result<CircularStats> {
    if angles.is_empty() {
        return Err(Error::Domain("circular statistics of zero angles".into()));
    }
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| {
        let r = a.to_radians();
        (s + r.sin(), c + r.cos())
    });
    let n = angles.len() as f64;
    let resultant = (s * s + c * c).sqrt() / n;
    if resultant < 1e-12 {
        return Ok(CircularStats {
            mean: 0.0,
            std: std_cap,
            degenerate: true,
        });
    }
    let mean = wrap_degrees(s.atan2(c).to_degrees());
    // Identical angles can leave R a few ulps below 1.
    let std = if resultant >= 1.0 - 8.0 * f64::EPSILON {
        0.0
    } else {
        (-2.0 * resultant.ln()).sqrt().to_degrees().min(std_cap)
    };
    Ok(CircularStats {
        mean,
        std,
        degenerate: false,
    })
}
