//! Binary checkpoint of a training run.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic "UAVPPOCK" | version u32 | seed u64 | episodes_done u64 | r_max f64 | return_scale f64
//! actor network | log_std vector | critic network | actor Adam | critic Adam
//! FNV-1a 64 checksum of everything before it
//! ```
//!
//! A network is its layer sizes followed by every parameter slice. An Adam
//! state is its step count and hyperparameters followed by the first and second
//! moment slices. Floats are stored bit-for-bit, so a round trip is exact.

use std::path::Path;

use crate::error::{Error, Result};
use crate::neural::{AdamState, Mlp, Parameters};
use crate::ppo::{GaussianPolicy, PpoAgent};

const MAGIC: &[u8; 8] = b"UAVPPOCK";
const VERSION: u32 = 1;

/// Learner state plus the position in the run. Every per-episode random stream
/// is derived from `(seed, episode)`, so this is enough to resume exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub seed: u64,
    pub episodes_done: u64,
    pub agent: PpoAgent,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn slice(&mut self, s: &[f64]) {
        self.u64(s.len() as u64);
        s.iter().for_each(|&v| self.f64(v));
    }
    fn network(&mut self, net: &Mlp) {
        let sizes = net.sizes();
        self.u64(sizes.len() as u64);
        sizes.iter().for_each(|&s| self.u64(s as u64));
        net.param_slices().iter().for_each(|s| self.slice(s));
    }
    fn adam(&mut self, a: &AdamState) {
        self.u64(a.t);
        self.f64(a.learning_rate);
        self.f64(a.beta1);
        self.f64(a.beta2);
        self.f64(a.epsilon);
        self.u64(a.m.len() as u64);
        a.m.iter().chain(&a.v).for_each(|s| self.slice(s));
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint("truncated checkpoint".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        let remaining = (self.bytes.len() - self.pos) as u64;
        if n > remaining {
            return Err(Error::Checkpoint(format!(
                "length {n} exceeds remaining {remaining} bytes"
            )));
        }
        Ok(n as usize)
    }
    fn fill(&mut self, dst: &mut [f64]) -> Result<()> {
        let n = self.len()?;
        if n != dst.len() {
            return Err(Error::Checkpoint(format!(
                "slice of {n} values where {} expected",
                dst.len()
            )));
        }
        for d in dst {
            *d = self.f64()?;
        }
        Ok(())
    }
    fn network(&mut self) -> Result<Mlp> {
        let n = self.len()?;
        let sizes = (0..n)
            .map(|_| self.u64().map(|s| s as usize))
            .collect::<Result<Vec<_>>>()?;
        let mut net = Mlp::zeros(&sizes).map_err(|e| Error::Checkpoint(e.to_string()))?;
        for s in net.param_slices_mut() {
            self.fill(s)?;
        }
        Ok(net)
    }
    fn adam<P: Parameters>(&mut self, params: &P) -> Result<AdamState> {
        let t = self.u64()?;
        let learning_rate = self.f64()?;
        let mut a = AdamState::new(params, learning_rate);
        a.t = t;
        a.beta1 = self.f64()?;
        a.beta2 = self.f64()?;
        a.epsilon = self.f64()?;
        let n = self.len()?;
        if n != a.m.len() {
            return Err(Error::Checkpoint(format!(
                "optimizer has {n} slices, parameters have {}",
                a.m.len()
            )));
        }
        for s in a.m.iter_mut().chain(a.v.iter_mut()) {
            self.fill(s)?;
        }
        Ok(a)
    }
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION);
        w.u64(self.seed);
        w.u64(self.episodes_done);
        w.f64(self.agent.policy.r_max);
        w.f64(self.agent.return_scale);
        w.network(&self.agent.policy.actor);
        w.slice(&self.agent.policy.log_std);
        w.network(&self.agent.critic);
        w.adam(&self.agent.actor_opt);
        w.adam(&self.agent.critic_opt);
        let sum = fnv1a(&w.0);
        w.u64(sum);
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 12 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        if fnv1a(body) != u64::from_le_bytes(tail.try_into().expect("8 bytes")) {
            return Err(Error::Checkpoint("checksum mismatch".into()));
        }
        let mut r = Reader {
            bytes: body,
            pos: MAGIC.len(),
        };
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let seed = r.u64()?;
        let episodes_done = r.u64()?;
        let r_max = r.f64()?;
        let return_scale = r.f64()?;
        if !(return_scale.is_finite() && return_scale > 0.0) {
            return Err(Error::Checkpoint(format!("invalid return scale {return_scale}")));
        }
        let actor = r.network()?;
        let mut log_std = vec![0.0; crate::ppo::ACTION_DIM];
        r.fill(&mut log_std)?;
        let critic = r.network()?;
        let mut policy = GaussianPolicy::new(actor, 0.0, r_max).map_err(|e| Error::Checkpoint(e.to_string()))?;
        policy.log_std = log_std;
        let actor_opt = r.adam(&policy)?;
        let critic_opt = r.adam(&critic)?;
        if r.pos != body.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", body.len() - r.pos)));
        }
        if critic.input_size() != policy.actor.input_size() || critic.output_size() != 1 {
            return Err(Error::Checkpoint("actor and critic shapes disagree".into()));
        }
        Ok(Self {
            seed,
            episodes_done,
            agent: PpoAgent {
                policy,
                critic,
                return_scale,
                actor_opt,
                critic_opt,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Check that the stored networks fit an environment observation and hidden layout.
    pub fn check_dimensions(&self, obs_dim: usize, hidden: &[usize], r_max: f64) -> Result<()> {
        let mut expected = vec![obs_dim];
        expected.extend_from_slice(hidden);
        let mut actor = expected.clone();
        actor.push(crate::ppo::ACTION_DIM);
        expected.push(1);
        if self.agent.policy.actor.sizes() != actor || self.agent.critic.sizes() != expected {
            return Err(Error::Shape(format!(
                "checkpoint networks {:?}/{:?} do not match config layout {:?}/{:?}",
                self.agent.policy.actor.sizes(),
                self.agent.critic.sizes(),
                actor,
                expected
            )));
        }
        if self.agent.policy.r_max != r_max {
            return Err(Error::Shape(format!(
                "checkpoint r_max {} differs from config r_max {r_max}",
                self.agent.policy.r_max
            )));
        }
        Ok(())
    }
}
