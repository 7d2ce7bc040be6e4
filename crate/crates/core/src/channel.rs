//! UE–UAV link gain: antenna, path, outdoor-to-indoor, shadow and fast-fading
//! components, multiplied per frequency resource.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

/// Propagation parameters of the urban-macro link model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Hz. The path-loss constants below are the 2 GHz fit.
    pub carrier_frequency: f64,
    /// dB at 1 km.
    pub pathloss_intercept: f64,
    /// dB per decade of distance.
    pub pathloss_slope: f64,
    /// Log-normal shadowing standard deviation, dB.
    pub shadow_std: f64,
    /// Metres of relative UE–UAV displacement for the shadow correlation to fall to 1/e.
    pub shadow_decorrelation_distance: f64,
    /// Rician K factor, linear. `f64::INFINITY` gives a pure line-of-sight channel.
    pub rician_k: f64,
    pub o2i_loss: f64,
    pub bs_antenna_gain: f64,
    pub ue_antenna_gain: f64,
    pub num_resources: usize,
    /// Total transmit power of the UAV base station, split evenly over the resources.
    pub tx_power_dbm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            carrier_frequency: 2.0e9,
            pathloss_intercept: 128.1,
            pathloss_slope: 37.6,
            shadow_std: 8.0,
            shadow_decorrelation_distance: 25.0,
            rician_k: 10.0,
            o2i_loss: 0.0,
            bs_antenna_gain: 0.0,
            ue_antenna_gain: 0.0,
            num_resources: 50,
            tx_power_dbm: 6.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency > 0.0) {
            return Err(Error::config("channel.carrier_frequency", "must be > 0"));
        }
        if !(self.pathloss_slope > 0.0) {
            return Err(Error::config("channel.pathloss_slope", "must be > 0"));
        }
        if !(self.shadow_std >= 0.0) || !self.shadow_std.is_finite() {
            return Err(Error::config("channel.shadow_std", "must be finite and >= 0"));
        }
        if !(self.shadow_decorrelation_distance > 0.0) {
            return Err(Error::config("channel.shadow_decorrelation_distance", "must be > 0"));
        }
        if !(self.rician_k >= 0.0) {
            return Err(Error::config("channel.rician_k", "must be >= 0"));
        }
        if self.num_resources == 0 {
            return Err(Error::config("channel.num_resources", "must be >= 1"));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::config("channel.tx_power_dbm", "must be finite"));
        }
        Ok(())
    }

    /// Transmit power per frequency resource, in watts.
    pub fn tx_power_per_resource(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm) / self.num_resources as f64
    }

    /// Position-independent gain: antennas and outdoor-to-indoor, linear.
    pub fn static_gain(&self) -> f64 {
        db_to_linear(self.bs_antenna_gain + self.ue_antenna_gain - self.o2i_loss)
    }
}

/// Path loss in dB at a 3D distance in metres.
pub fn path_loss_db(distance_3d: f64, params: &ChannelParams) -> Result<f64> {
    if !(distance_3d > 0.0) || !distance_3d.is_finite() {
        return Err(Error::Domain(format!(
            "path loss needs a positive finite distance, got {distance_3d}"
        )));
    }
    Ok(params.pathloss_intercept + params.pathloss_slope * (distance_3d / 1000.0).log10())
}

/// Linear path gain `10^(-PL/10)`.
pub fn path_gain(distance_3d: f64, params: &ChannelParams) -> Result<f64> {
    path_loss_db(distance_3d, params).map(|pl| db_to_linear(-pl))
}

/// Per-link channel realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGainState {
    pub shadow_db: f64,
    pub last_ue_position: [f64; 3],
    pub last_uav_position: [f64; 3],
    /// `|G^ff|^2` per resource.
    pub fading_gains: Vec<f64>,
}

impl LinkGainState {
    /// Fresh link: shadow drawn from its stationary distribution, fading drawn per resource.
    pub fn new(params: &ChannelParams, ue: [f64; 3], uav: [f64; 3], rng: &mut SimRng) -> Self {
        let shadow_db = params.shadow_std * rng.sample::<f64, _>(StandardNormal);
        let fading_gains = (0..params.num_resources)
            .map(|_| rician_fading_sample(params.rician_k, rng))
            .collect();
        Self {
            shadow_db,
            last_ue_position: ue,
            last_uav_position: uav,
            fading_gains,
        }
    }

    /// Move both ends: evolve the shadow over the relative displacement and redraw fading.
    pub fn advance(&mut self, params: &ChannelParams, ue: [f64; 3], uav: [f64; 3], rng: &mut SimRng) {
        let displacement = relative_displacement(self.last_ue_position, self.last_uav_position, ue, uav);
        shadow_gain_step(self, displacement, rng, params);
        for g in self.fading_gains.iter_mut() {
            *g = rician_fading_sample(params.rician_k, rng);
        }
        self.last_ue_position = ue;
        self.last_uav_position = uav;
    }
}

/// Change of the UE-minus-UAV vector between two snapshots.
pub fn relative_displacement(ue_old: [f64; 3], uav_old: [f64; 3], ue_new: [f64; 3], uav_new: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let d = (ue_new[i] - uav_new[i]) - (ue_old[i] - uav_old[i]);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Gauss–Markov shadow update over `displacement` metres; returns the new shadow in dB.
///
/// `s' = rho*s + sqrt(1 - rho^2) * N(0, std^2)` with `rho = exp(-displacement / d_corr)`,
/// which keeps the marginal at `N(0, std^2)`.
pub fn shadow_gain_step(state: &mut LinkGainState, displacement: f64, rng: &mut SimRng, params: &ChannelParams) -> f64 {
    let displacement = displacement.max(0.0);
    let rho = (-displacement / params.shadow_decorrelation_distance).exp();
    if rho < 1.0 {
        let innovation: f64 = rng.sample(StandardNormal);
        state.shadow_db = rho * state.shadow_db + (1.0 - rho * rho).sqrt() * params.shadow_std * innovation;
    }
    state.shadow_db
}

/// One draw of `|h|^2` with `h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * CN(0,1)`; unit mean.
pub fn rician_fading_sample(rician_k: f64, rng: &mut SimRng) -> f64 {
    if rician_k.is_infinite() {
        return 1.0;
    }
    let los = (rician_k / (rician_k + 1.0)).sqrt();
    let scatter = (1.0 / (rician_k + 1.0)).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let a = los + scatter * re;
    let b = scatter * im;
    a * a + b * b
}

/// `G_k = G^a * G^p * G^e * G^s * |G^ff_k|^2` for every resource `k`.
pub fn total_gain(link: &LinkGainState, params: &ChannelParams, distance_3d: f64) -> Result<Vec<f64>> {
    let slow = params.static_gain() * path_gain(distance_3d, params)? * db_to_linear(link.shadow_db);
    Ok(link.fading_gains.iter().map(|ff| slow * ff).collect())
}

/// `P^rx = P^tx * G`.
pub fn received_power(tx_power_per_resource: f64, gain: f64) -> f64 {
    tx_power_per_resource * gain
}

pub fn distance_3d(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
