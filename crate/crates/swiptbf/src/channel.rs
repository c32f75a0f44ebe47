//! Rician channel synthesis with a two-slope log-distance path loss model.

use crate::model::{db_to_linear, ChannelRealization, C64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Propagation and geometry configuration for the Monte Carlo channel model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Carrier frequency (Hz).
    pub carrier_hz: f64,
    /// Reference distance (m); path loss is clamped below it.
    pub ref_distance_m: f64,
    /// Maximum service distance (m); receivers are placed in
    /// `[ref_distance_m, max_distance_m]`.
    pub max_distance_m: f64,
    /// Per-side antenna gain (dB); applied once at each end of the link.
    pub antenna_gain_db: f64,
    /// Rician K-factor (dB).
    pub rician_k_db: f64,
    /// Two-slope breakpoint distance (m).
    pub breakpoint_m: f64,
    /// Path loss exponent up to the breakpoint.
    pub exponent_near: f64,
    /// Path loss exponent beyond the breakpoint.
    pub exponent_far: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 470e6,
            ref_distance_m: 2.0,
            max_distance_m: 10.0,
            antenna_gain_db: 10.0,
            rician_k_db: 6.0,
            breakpoint_m: 5.0,
            exponent_near: 2.0,
            exponent_far: 3.5,
        }
    }
}

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

impl ChannelConfig {
    /// Free-space path loss at the reference distance (dB), before antenna
    /// gains.
    pub fn ref_loss_db(&self) -> f64 {
        let lambda = SPEED_OF_LIGHT / self.carrier_hz;
        20.0 * (4.0 * PI * self.ref_distance_m / lambda).log10()
    }

    /// Total path loss at distance `d` (dB), antenna gains included (a gain
    /// per link end). Distances below the reference are clamped to it.
    pub fn path_loss_db(&self, d: f64) -> f64 {
        let d = d.max(self.ref_distance_m);
        let near_end = d.min(self.breakpoint_m);
        let mut loss = self.ref_loss_db()
            + 10.0 * self.exponent_near * (near_end / self.ref_distance_m).log10();
        if d > self.breakpoint_m {
            loss += 10.0 * self.exponent_far * (d / self.breakpoint_m).log10();
        }
        loss - 2.0 * self.antenna_gain_db
    }

    /// Linear average power gain at distance `d`.
    pub fn gain(&self, d: f64) -> f64 {
        db_to_linear(-self.path_loss_db(d))
    }
}

/// Standard normal via Box-Muller; consumes exactly two uniforms.
fn standard_normal<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * PI * u2;
    (r * t.cos(), r * t.sin())
}

/// One CN(0, 1) sample (unit total variance, 1/2 per component).
fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let (a, b) = standard_normal(rng);
    C64::new(a / 2f64.sqrt(), b / 2f64.sqrt())
}

/// Draws one channel vector of length `n_t` at distance `d`: i.i.d. Rician
/// entries, each a uniform-phase specular ray plus a scattered CN(0,1) part
/// mixed by the K-factor, scaled so the average entry power equals the path
/// gain. The specular phases are independent per element; a shared phase
/// would align every receiver with the same spatial direction and couple
/// channels that the fading model treats as independent.
fn draw_vector<R: Rng>(cfg: &ChannelConfig, n_t: usize, d: f64, rng: &mut R) -> DVector<C64> {
    let kappa = db_to_linear(cfg.rician_k_db);
    let los_amp = (kappa / (kappa + 1.0)).sqrt();
    let nlos_amp = (1.0 / (kappa + 1.0)).sqrt();
    let amp = cfg.gain(d).sqrt();
    let mut entries = Vec::with_capacity(n_t);
    for _ in 0..n_t {
        let phase = rng.gen::<f64>() * 2.0 * PI;
        let los = C64::new(phase.cos(), phase.sin()) * los_amp;
        let scatter = complex_normal(rng);
        entries.push((los + scatter * nlos_amp) * amp);
    }
    DVector::from_vec(entries)
}

/// Draws the full downlink: receiver 0 is the desired receiver, receivers
/// `1..k` are idle. Each receiver gets an independent RNG stream keyed by its
/// index, and a distance uniform in `[ref_distance_m, max_distance_m]`.
pub fn draw_channel(
    cfg: &ChannelConfig,
    n_t: usize,
    k_receivers: usize,
    seed: u64,
) -> ChannelRealization {
    let mut vectors = Vec::with_capacity(k_receivers);
    for r in 0..k_receivers {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        let d = rng.gen_range(cfg.ref_distance_m..=cfg.max_distance_m);
        vectors.push(draw_vector(cfg, n_t, d, &mut rng));
    }
    let h = vectors.remove(0);
    ChannelRealization {
        h,
        g: vectors,
        seed,
    }
}
