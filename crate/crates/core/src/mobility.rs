//! UE mobility for the six scenario families, with specular boundary reflection.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    NoMove,
    StraightRandom,
    Circular,
    #[serde(rename = "straight_90")]
    Straight90,
    #[serde(rename = "straight_180")]
    Straight180,
    HotspotRandom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::NoMove,
        ScenarioKind::StraightRandom,
        ScenarioKind::Circular,
        ScenarioKind::Straight90,
        ScenarioKind::Straight180,
        ScenarioKind::HotspotRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::NoMove => "no_move",
            ScenarioKind::StraightRandom => "straight_random",
            ScenarioKind::Circular => "circular",
            ScenarioKind::Straight90 => "straight_90",
            ScenarioKind::Straight180 => "straight_180",
            ScenarioKind::HotspotRandom => "hotspot_random",
        }
    }

    /// Arena half-width used by the scenario presets. The circular path has radius 200 m
    /// plus a cluster spread of up to 10*sqrt(2) m, so it gets a wider arena.
    pub fn default_half_width(self) -> f64 {
        match self {
            ScenarioKind::Circular => 215.0,
            _ => 100.0,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "scenario",
                    format!(
                        "unknown scenario `{s}`; expected one of no_move | straight_random | circular | straight_90 | straight_180 | hotspot_random"
                    ),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityScenario {
    pub kind: ScenarioKind,
    pub num_ues: usize,
    /// The arena is `[-w, w] x [-w, w]` metres.
    pub area_half_width: f64,
    /// Group speed for straight and circular motion; the upper bound of the
    /// uniform speed draw for the hotspot scenario. m/s.
    pub ue_speed: f64,
    /// Seconds per frame.
    pub time_step: f64,
    pub ue_height: f64,
    pub circle_radius: f64,
    /// Side of the square a cluster is spawned in, metres.
    pub cluster_side: f64,
}

impl MobilityScenario {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            num_ues: 10,
            area_half_width: kind.default_half_width(),
            ue_speed: 8.0,
            time_step: 1.0,
            ue_height: 1.5,
            circle_radius: 200.0,
            cluster_side: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_ues == 0 {
            return Err(Error::config("env.scenario.num_ues", "must be >= 1"));
        }
        if !(self.area_half_width > 0.0) {
            return Err(Error::config("env.scenario.area_half_width", "must be > 0"));
        }
        if !(self.ue_speed >= 0.0) {
            return Err(Error::config("env.scenario.ue_speed", "must be >= 0"));
        }
        if !(self.time_step > 0.0) {
            return Err(Error::config("env.scenario.time_step", "must be > 0"));
        }
        if !(self.cluster_side >= 0.0) || self.cluster_side > 2.0 * self.area_half_width {
            return Err(Error::config(
                "env.scenario.cluster_side",
                "must lie in [0, 2 * area_half_width]",
            ));
        }
        if self.kind == ScenarioKind::Circular {
            let reach = self.circle_radius + self.cluster_side * std::f64::consts::SQRT_2;
            if reach > self.area_half_width {
                return Err(Error::config(
                    "env.scenario.area_half_width",
                    format!("circular path reaches {reach} m, beyond the arena"),
                ));
            }
        }
        Ok(())
    }

    fn bounds(&self) -> (f64, f64) {
        (-self.area_half_width, self.area_half_width)
    }
}

impl Default for MobilityScenario {
    fn default() -> Self {
        Self::new(ScenarioKind::NoMove)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeKinematics {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub group_id: usize,
    /// Phase of the cluster anchor on the circle (circular scenario only), radians.
    pub circular_phase: f64,
    /// Offset from the moving anchor on the circle (circular scenario only).
    pub circular_offset: [f64; 2],
    /// Independently moving UE that picks a new heading whenever it bounces.
    pub redraw_on_reflect: bool,
}

impl UeKinematics {
    fn at(position: [f64; 2], velocity: [f64; 2], group_id: usize) -> Self {
        Self {
            position,
            velocity,
            group_id,
            circular_phase: 0.0,
            circular_offset: [0.0; 2],
            redraw_on_reflect: false,
        }
    }

    pub fn speed(&self) -> f64 {
        self.velocity[0].hypot(self.velocity[1])
    }

    pub fn position_3d(&self, height: f64) -> [f64; 3] {
        [self.position[0], self.position[1], height]
    }
}

fn heading(speed: f64, angle: f64) -> [f64; 2] {
    [speed * angle.cos(), speed * angle.sin()]
}

fn in_square(rng: &mut SimRng, x0: f64, y0: f64, side: f64) -> [f64; 2] {
    [x0 + side * rng.random::<f64>(), y0 + side * rng.random::<f64>()]
}

/// Spawn the UEs of one episode.
pub fn init_ues(scenario: &MobilityScenario, rng: &mut SimRng) -> Vec<UeKinematics> {
    let n = scenario.num_ues;
    let half_side = scenario.cluster_side / 2.0;
    let centred = |rng: &mut SimRng| in_square(rng, -half_side, -half_side, scenario.cluster_side);
    let v = scenario.ue_speed;

    match scenario.kind {
        ScenarioKind::NoMove => (0..n).map(|_| UeKinematics::at(centred(rng), [0.0; 2], 0)).collect(),
        ScenarioKind::StraightRandom => {
            let vel = heading(v, rng.random::<f64>() * TAU);
            (0..n).map(|_| UeKinematics::at(centred(rng), vel, 0)).collect()
        }
        ScenarioKind::Straight90 | ScenarioKind::Straight180 => {
            let gap = if scenario.kind == ScenarioKind::Straight90 {
                FRAC_PI_2
            } else {
                std::f64::consts::PI
            };
            let base = rng.random::<f64>() * TAU;
            let first = n / 2;
            (0..n)
                .map(|i| {
                    let group = usize::from(i >= first);
                    let vel = heading(v, base + gap * group as f64);
                    UeKinematics::at(centred(rng), vel, group)
                })
                .collect()
        }
        ScenarioKind::Circular => {
            let r = scenario.circle_radius;
            let phase = -FRAC_PI_2;
            (0..n)
                .map(|_| {
                    let p = in_square(rng, 0.0, -r, scenario.cluster_side);
                    let anchor = [r * phase.cos(), r * phase.sin()];
                    UeKinematics {
                        position: p,
                        velocity: [0.0; 2],
                        group_id: 0,
                        circular_phase: phase,
                        circular_offset: [p[0] - anchor[0], p[1] - anchor[1]],
                        redraw_on_reflect: false,
                    }
                })
                .collect()
        }
        ScenarioKind::HotspotRandom => {
            let cluster = n / 2;
            let group_vel = heading(v * rng.random::<f64>(), rng.random::<f64>() * TAU);
            let (lo, hi) = scenario.bounds();
            (0..n)
                .map(|i| {
                    if i < cluster {
                        UeKinematics::at(centred(rng), group_vel, 0)
                    } else {
                        let pos = [rng.random_range(lo..hi), rng.random_range(lo..hi)];
                        let vel = heading(v * rng.random::<f64>(), rng.random::<f64>() * TAU);
                        UeKinematics {
                            redraw_on_reflect: true,
                            ..UeKinematics::at(pos, vel, 1 + i - cluster)
                        }
                    }
                })
                .collect()
        }
    }
}

/// Mirror `coordinate` back into `[low, high]`; `true` when an odd number of
/// mirrorings happened (the velocity component must flip).
pub fn reflect(coordinate: f64, low: f64, high: f64) -> (f64, bool) {
    debug_assert!(high > low);
    let mut x = coordinate;
    let mut flipped = false;
    while x > high || x < low {
        x = if x > high { 2.0 * high - x } else { 2.0 * low - x };
        flipped = !flipped;
    }
    (x, flipped)
}

/// Advance all UEs by `dt` seconds.
pub fn step_ues(ues: &mut [UeKinematics], scenario: &MobilityScenario, dt: f64, rng: &mut SimRng) {
    let (lo, hi) = scenario.bounds();
    match scenario.kind {
        ScenarioKind::NoMove => {}
        ScenarioKind::Circular => {
            let r = scenario.circle_radius;
            let omega = scenario.ue_speed / r;
            for ue in ues.iter_mut() {
                ue.circular_phase = (ue.circular_phase + omega * dt).rem_euclid(TAU);
                let (s, c) = ue.circular_phase.sin_cos();
                ue.position = [r * c + ue.circular_offset[0], r * s + ue.circular_offset[1]];
                ue.velocity = [-scenario.ue_speed * s, scenario.ue_speed * c];
            }
        }
        _ => {
            for ue in ues.iter_mut() {
                let mut flips = [false; 2];
                for (axis, flip) in flips.iter_mut().enumerate() {
                    let (x, flipped) = reflect(ue.position[axis] + ue.velocity[axis] * dt, lo, hi);
                    ue.position[axis] = x;
                    if flipped {
                        ue.velocity[axis] = -ue.velocity[axis];
                    }
                    *flip = flipped;
                }
                if ue.redraw_on_reflect && (flips[0] || flips[1]) {
                    let speed = ue.speed();
                    let mut vel = heading(speed, rng.random::<f64>() * TAU);
                    // Keep pointing away from the wall that was just hit.
                    for axis in 0..2 {
                        if flips[axis] && vel[axis].signum() != ue.velocity[axis].signum() {
                            vel[axis] = -vel[axis];
                        }
                    }
                    ue.velocity = vel;
                }
            }
        }
    }
}
