//! Random instances for the benchmark grid.
//!
//! Instance `k` of a run draws from `ChaCha8Rng::seed_from_u64(seed)` with
//! its stream set to `k`, so any instance can be regenerated on its own and
//! the files do not depend on how many instances were generated before it.
//!
//! Units: volumes in FLOP and bytes, `w` in s/FLOP, `z` in s/byte.

use divload_core::io::Instance;
use divload_core::{Load, Platform, Workload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Communication-to-computation ratios, in bytes per FLOP.
pub const CCR_SET: [f64; 9] = [0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0];

/// Link bandwidths in Mb/s.
pub const BANDWIDTH_MBPS: (f64, f64) = (10.0, 100.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerDist {
    /// Every processor at 100 MFLOP/s.
    Homogeneous,
    /// Uniform in 10..100 MFLOP/s.
    Uniform,
}

impl PowerDist {
    pub const ALL: [PowerDist; 2] = [PowerDist::Homogeneous, PowerDist::Uniform];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeRange {
    /// 6 GFLOP to 4 TFLOP.
    Large,
    /// 6 to 60 GFLOP.
    Small,
}

impl VolumeRange {
    pub const ALL: [VolumeRange; 2] = [VolumeRange::Large, VolumeRange::Small];

    pub fn bounds(self) -> (f64, f64) {
        match self {
            VolumeRange::Large => (6e9, 4e12),
            VolumeRange::Small => (6e9, 60e9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub m: usize,
    pub n_loads: usize,
    pub power_dists: Vec<PowerDist>,
    pub volume_ranges: Vec<VolumeRange>,
    pub ccrs: Vec<f64>,
    pub instances_per_combo: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            m: 10,
            n_loads: 50,
            power_dists: PowerDist::ALL.to_vec(),
            volume_ranges: VolumeRange::ALL.to_vec(),
            ccrs: CCR_SET.to_vec(),
            instances_per_combo: 100,
            seed: 0,
        }
    }
}

impl GenConfig {
    /// The small grid used for quick checks: 5 processors, 10 loads,
    /// 10 instances per combination.
    pub fn desk(seed: u64) -> Self {
        GenConfig {
            m: 5,
            n_loads: 10,
            instances_per_combo: 10,
            seed,
            ..GenConfig::default()
        }
    }

    pub fn combos(&self) -> Vec<Combo> {
        let mut out = Vec::new();
        for &power in &self.power_dists {
            for &volume in &self.volume_ranges {
                for &ccr in &self.ccrs {
                    out.push(Combo { power, volume, ccr });
                }
            }
        }
        out
    }

    pub fn instance_count(&self) -> usize {
        self.combos().len() * self.instances_per_combo
    }

    pub fn check(&self) -> Result<(), String> {
        if self.m == 0 || self.n_loads == 0 || self.instances_per_combo == 0 {
            return Err("m, n_loads and instances_per_combo must be at least 1".into());
        }
        if self.power_dists.is_empty() || self.volume_ranges.is_empty() || self.ccrs.is_empty() {
            return Err("every grid axis needs at least one value".into());
        }
        if let Some(c) = self.ccrs.iter().find(|c| !CCR_SET.contains(c)) {
            return Err(format!("ccr {c} is not one of {CCR_SET:?}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combo {
    pub power: PowerDist,
    pub volume: VolumeRange,
    pub ccr: f64,
}

/// Message latency of a link of the given bandwidth: 1 ms at 10 Mb/s,
/// inversely proportional to bandwidth.
pub fn latency_for_bandwidth(mbps: f64) -> f64 {
    1e-3 * 10.0 / mbps
}

/// Seconds per byte on a link of the given bandwidth.
pub fn byte_time(mbps: f64) -> f64 {
    8.0 / (mbps * 1e6)
}

/// Inverse of [`byte_time`].
pub fn bandwidth_of(z: f64) -> f64 {
    8.0 / (z * 1e6)
}

pub fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws one instance. Draw order: processor speeds (heterogeneous only),
/// link bandwidths, then one computation volume per load.
pub fn generate_one(m: usize, n_loads: usize, combo: Combo, seed: u64, index: usize) -> Instance {
    let mut rng = rng_for(seed, index);
    let w: Vec<f64> = (0..m)
        .map(|_| match combo.power {
            PowerDist::Homogeneous => 1.0 / 100e6,
            PowerDist::Uniform => 1.0 / rng.gen_range(10e6..100e6),
        })
        .collect();
    let bw: Vec<f64> = (0..m.saturating_sub(1))
        .map(|_| rng.gen_range(BANDWIDTH_MBPS.0..BANDWIDTH_MBPS.1))
        .collect();
    let (lo, hi) = combo.volume.bounds();
    let loads: Vec<Load> = (0..n_loads)
        .map(|_| {
            let vcomp = rng.gen_range(lo..hi);
            Load {
                vcomm: combo.ccr * vcomp,
                vcomp,
            }
        })
        .collect();
    let z = bw.iter().map(|&b| byte_time(b)).collect();
    let platform = Platform::idle(w, z).expect("generated platform is valid");
    let workload = Workload::new(loads).expect("generated loads are valid");
    let mut inst = Instance::new(platform, workload);
    inst.latency = Some(bw.iter().map(|&b| latency_for_bandwidth(b)).collect());
    inst.meta = Some(json!({
        "index": index,
        "seed": seed,
        "power": combo.power,
        "volume": combo.volume,
        "ccr": combo.ccr,
    }));
    inst
}

/// Every instance of the grid, combination-major.
pub fn generate_instances(cfg: &GenConfig) -> Vec<Instance> {
    let mut out = Vec::with_capacity(cfg.instance_count());
    for combo in cfg.combos() {
        for _ in 0..cfg.instances_per_combo {
            let index = out.len();
            out.push(generate_one(cfg.m, cfg.n_loads, combo, cfg.seed, index));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_size() {
        assert_eq!(GenConfig::default().instance_count(), 3600);
    }

    #[test]
    fn ranges_hold() {
        let cfg = GenConfig::desk(3);
        for inst in generate_instances(&cfg) {
            for &z in inst.platform.z() {
                let b = bandwidth_of(z);
                assert!((10.0 - 1e-9..=100.0 + 1e-9).contains(&b));
            }
            for &l in inst.latency.as_ref().unwrap() {
                assert!((1e-4 - 1e-12..=1e-3 + 1e-12).contains(&l));
            }
        }
    }
}
