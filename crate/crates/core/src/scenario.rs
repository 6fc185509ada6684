//! Joint load and renewable scenarios.
//!
//! Loads are truncated-at-zero Gaussians, renewables are Beta variables on
//! `[0, w_i]`. Every draw uses inverse-CDF sampling from a fixed sequence of
//! uniforms, so two configurations with the same seed share common random
//! numbers and differ only through their parameters.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{check_index, Error, Result};
use crate::risk::EmpiricalSample;

/// Largest Beta variance allowed, as a fraction of the Bernoulli bound `m(1 − m)`.
const MAX_VARIANCE_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_buses: usize,
    pub horizon: usize,
    pub n_scenarios: usize,
    pub seed: u64,
    /// `[bus][hour]`, MW.
    pub load_mean: Vec<Vec<f64>>,
    /// `[bus][hour]`, MW.
    pub load_std: Vec<Vec<f64>>,
    /// Installed renewable capacity per bus, MW.
    pub renewable_capacity: Vec<f64>,
    /// Mean renewable output as a fraction of mean aggregate load.
    pub penetration: f64,
    /// Renewable standard deviation per MW of installed capacity.
    pub uncertainty_growth: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n_buses == 0 || self.horizon == 0 || self.n_scenarios == 0 {
            return cfg("buses, horizon and scenario count must all be at least 1".into());
        }
        for (name, grid) in [("load_mean", &self.load_mean), ("load_std", &self.load_std)] {
            if grid.len() != self.n_buses || grid.iter().any(|row| row.len() != self.horizon) {
                return cfg(format!(
                    "{name} must be {} buses by {} hours",
                    self.n_buses, self.horizon
                ));
            }
            for (i, row) in grid.iter().enumerate() {
                if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return cfg(format!(
                        "{name} at bus {} must be non-negative, got {v}",
                        i + 1
                    ));
                }
            }
        }
        if self.renewable_capacity.len() != self.n_buses {
            return cfg(format!(
                "renewable_capacity must have {} entries",
                self.n_buses
            ));
        }
        if let Some((i, w)) = self
            .renewable_capacity
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return cfg(format!(
                "renewable capacity at bus {} must be non-negative, got {w}",
                i + 1
            ));
        }
        if !(self.penetration.is_finite() && self.penetration >= 0.0) {
            return cfg(format!(
                "penetration must be non-negative, got {}",
                self.penetration
            ));
        }
        if !(self.uncertainty_growth.is_finite() && self.uncertainty_growth >= 0.0) {
            return cfg(format!(
                "uncertainty growth must be non-negative, got {}",
                self.uncertainty_growth
            ));
        }
        Ok(())
    }
}

/// Immutable scenario set indexed by `(bus, hour, scenario)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    n_buses: usize,
    horizon: usize,
    probabilities: Vec<f64>,
    load: Vec<f64>,
    renewable: Vec<f64>,
}

impl ScenarioSet {
    /// Builds a set from explicit `[bus][hour][scenario]` arrays.
    pub fn from_parts(
        probabilities: Vec<f64>,
        load: Vec<Vec<Vec<f64>>>,
        renewable: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let k = probabilities.len();
        if k == 0 {
            return Err(Error::Domain(
                "scenario set needs at least one scenario".into(),
            ));
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::Domain(
                "scenario probabilities must be positive".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > crate::risk::PROBABILITY_TOL {
            return Err(Error::Domain(format!(
                "scenario probabilities sum to {total}, not 1"
            )));
        }
        let n = load.len();
        let t = load.first().map_or(0, Vec::len);
        if n == 0 || t == 0 || renewable.len() != n {
            return Err(Error::Domain(
                "load and renewable arrays must share a non-empty shape".into(),
            ));
        }
        let mut flat_load = Vec::with_capacity(n * t * k);
        let mut flat_ren = Vec::with_capacity(n * t * k);
        for (lb, rb) in load.iter().zip(&renewable) {
            if lb.len() != t || rb.len() != t {
                return Err(Error::Domain("ragged hour dimension".into()));
            }
            for (lt, rt) in lb.iter().zip(rb) {
                if lt.len() != k || rt.len() != k {
                    return Err(Error::Domain("ragged scenario dimension".into()));
                }
                if lt.iter().chain(rt).any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::Domain(
                        "loads and renewables must be non-negative".into(),
                    ));
                }
                flat_load.extend_from_slice(lt);
                flat_ren.extend_from_slice(rt);
            }
        }
        Ok(Self {
            n_buses: n,
            horizon: t,
            probabilities,
            load: flat_load,
            renewable: flat_ren,
        })
    }

    pub fn n_buses(&self) -> usize {
        self.n_buses
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_scenarios(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn offset(&self, bus: usize, hour: usize) -> usize {
        (bus * self.horizon + hour) * self.n_scenarios()
    }

    /// Loads of every scenario at `(bus, hour)`.
    pub fn loads(&self, bus: usize, hour: usize) -> &[f64] {
        let o = self.offset(bus, hour);
        &self.load[o..o + self.n_scenarios()]
    }

    /// Renewable outputs of every scenario at `(bus, hour)`.
    pub fn renewables(&self, bus: usize, hour: usize) -> &[f64] {
        let o = self.offset(bus, hour);
        &self.renewable[o..o + self.n_scenarios()]
    }

    pub fn load(&self, bus: usize, hour: usize, scenario: usize) -> f64 {
        self.loads(bus, hour)[scenario]
    }

    pub fn renewable(&self, bus: usize, hour: usize, scenario: usize) -> f64 {
        self.renewables(bus, hour)[scenario]
    }

    fn check(&self, bus: usize, hour: usize) -> Result<()> {
        check_index("bus", bus, self.n_buses)?;
        check_index("hour", hour, self.horizon)
    }

    /// Signed net load `load − renewable` of every scenario at `(bus, hour)`.
    pub fn net_loads(&self, bus: usize, hour: usize) -> Result<Vec<f64>> {
        self.check(bus, hour)?;
        Ok(self
            .loads(bus, hour)
            .iter()
            .zip(self.renewables(bus, hour))
            .map(|(l, r)| l - r)
            .collect())
    }

    /// Scenario-wise sum over buses `lo..hi` of the net load at `hour`.
    pub fn net_load_sum(&self, buses: std::ops::Range<usize>, hour: usize) -> Result<Vec<f64>> {
        check_index("hour", hour, self.horizon)?;
        if buses.end > self.n_buses {
            return Err(Error::OutOfRange {
                what: "bus",
                index: buses.end - 1,
                limit: self.n_buses,
            });
        }
        let mut acc = vec![0.0; self.n_scenarios()];
        for bus in buses {
            for ((a, l), r) in acc
                .iter_mut()
                .zip(self.loads(bus, hour))
                .zip(self.renewables(bus, hour))
            {
                *a += l - r;
            }
        }
        Ok(acc)
    }

    fn sample(&self, values: Vec<f64>) -> Result<EmpiricalSample> {
        EmpiricalSample::from_weights(values.into_iter().zip(self.probabilities.iter().copied()))
    }

    /// Writes `scenario,bus,hour,load_mw,renewable_mw,probability` rows, 1-based indices.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "scenario,bus,time,load_mw,renewable_mw,probability")?;
        for (k, p) in self.probabilities.iter().enumerate() {
            for i in 0..self.n_buses {
                for t in 0..self.horizon {
                    writeln!(
                        out,
                        "{},{},{},{:.6},{:.6},{:.6}",
                        k + 1,
                        i + 1,
                        t + 1,
                        self.load(i, t, k),
                        self.renewable(i, t, k),
                        p
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Net load distribution at one bus and hour.
pub fn net_load(set: &ScenarioSet, bus: usize, hour: usize) -> Result<EmpiricalSample> {
    set.sample(set.net_loads(bus, hour)?)
}

/// Distribution of the scenario-wise sum of net loads over all buses.
pub fn aggregate_net_load(set: &ScenarioSet, hour: usize) -> Result<EmpiricalSample> {
    set.sample(set.net_load_sum(0..set.n_buses, hour)?)
}

/// Distribution of the scenario-wise sum of net loads over buses `from..N`.
pub fn suffix_net_load(set: &ScenarioSet, from: usize, hour: usize) -> Result<EmpiricalSample> {
    check_index("bus", from, set.n_buses)?;
    set.sample(set.net_load_sum(from..set.n_buses, hour)?)
}

/// Uniform draw on the open interval (0, 1).
fn open_unit<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn truncated_gaussian(mean: f64, std: f64, u: f64) -> f64 {
    if std == 0.0 {
        return mean.max(0.0);
    }
    let z = Normal::standard();
    let lower = z.cdf(-mean / std);
    let q = lower + u * (1.0 - lower);
    if q >= 1.0 {
        return mean.max(0.0);
    }
    (mean + std * z.inverse_cdf(q)).max(0.0)
}

/// Beta law on `[0, capacity]` with the given mean, or a constant when degenerate.
#[derive(Debug, Clone)]
enum RenewableLaw {
    Constant(f64),
    Beta { capacity: f64, dist: Beta },
}

impl RenewableLaw {
    fn new(bus: usize, capacity: f64, mean: f64, std_per_mw: f64) -> Result<Self> {
        if capacity == 0.0 || mean == 0.0 {
            return Ok(Self::Constant(0.0));
        }
        let m = mean / capacity;
        if m > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "bus {}: renewable mean {mean:.6} MW exceeds capacity {capacity:.6} MW",
                bus + 1
            )));
        }
        let m = m.min(1.0);
        let variance = (std_per_mw * std_per_mw).min(MAX_VARIANCE_FRACTION * m * (1.0 - m));
        if variance <= 0.0 {
            return Ok(Self::Constant(mean.min(capacity)));
        }
        let nu = m * (1.0 - m) / variance - 1.0;
        let dist = Beta::new(m * nu, (1.0 - m) * nu).map_err(|e| {
            Error::Config(format!(
                "bus {}: infeasible renewable Beta parameters: {e}",
                bus + 1
            ))
        })?;
        Ok(Self::Beta { capacity, dist })
    }

    fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Beta { capacity, dist } => (capacity * dist.inverse_cdf(u)).clamp(0.0, *capacity),
        }
    }
}

/// Draws `K` equiprobable scenarios.
///
/// Uniforms are consumed in the order scenario, hour, bus, with one load draw
/// followed by one renewable draw per cell.
pub fn generate_scenarios(config: &ScenarioConfig) -> Result<ScenarioSet> {
    config.validate()?;
    let n = config.n_buses;
    let t_len = config.horizon;
    let k_len = config.n_scenarios;
    let total_capacity: f64 = config.renewable_capacity.iter().sum();

    let mut laws = Vec::with_capacity(n * t_len);
    for i in 0..n {
        for t in 0..t_len {
            let load_total: f64 = (0..n).map(|j| config.load_mean[j][t]).sum();
            let w = config.renewable_capacity[i];
            let mean = if total_capacity > 0.0 {
                config.penetration * load_total * w / total_capacity
            } else {
                0.0
            };
            laws.push(RenewableLaw::new(i, w, mean, config.uncertainty_growth)?);
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut load = vec![0.0; n * t_len * k_len];
    let mut renewable = vec![0.0; n * t_len * k_len];
    for k in 0..k_len {
        for t in 0..t_len {
            for i in 0..n {
                let u_load = open_unit(&mut rng);
                let u_ren = open_unit(&mut rng);
                let idx = (i * t_len + t) * k_len + k;
                load[idx] =
                    truncated_gaussian(config.load_mean[i][t], config.load_std[i][t], u_load);
                renewable[idx] = laws[i * t_len + t].quantile(u_ren);
            }
        }
    }
    Ok(ScenarioSet {
        n_buses: n,
        horizon: t_len,
        probabilities: vec![1.0 / k_len as f64; k_len],
        load,
        renewable,
    })
}
