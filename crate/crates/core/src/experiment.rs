//! End-to-end runs: fleet ingestion, scenario construction, commitment,
//! realized re-dispatch, settlement, and CSV emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::merit::{commit, Fleet, GeneratorSpec};
use crate::radial::{dispatch_radial, RadialGrid};
use crate::risk::{cvar_direct, RiskLevel};
use crate::scenario::{
    aggregate_net_load, generate_scenarios, net_load, suffix_net_load, ScenarioConfig, ScenarioSet,
};
use crate::settlement::{
    settle, CostFunctions, CostRecovery, ProfitMode, SettlementInput, SettlementOptions,
    SettlementReport, StartRule,
};

pub const FLEET_HEADER: &str =
    "name,ask_price,p_min,p_max,rp_max,ramp_max,hot_start,cold_start,no_load_cost";

/// Load shares of the seven-bus reference feeder, bus 1 first.
pub const REFERENCE_BUS_SHARES: [f64; 7] = [0.5, 0.2, 0.1, 0.08, 0.07, 0.03, 0.02];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FleetSource {
    Builtin,
    Path(PathBuf),
}

impl std::str::FromStr for FleetSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(if s == "builtin" {
            Self::Builtin
        } else {
            Self::Path(PathBuf::from(s))
        })
    }
}

pub fn load_fleet(source: &FleetSource) -> Result<Fleet> {
    match source {
        FleetSource::Builtin => Ok(Fleet::reference()),
        FleetSource::Path(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read fleet file {}: {e}", path.display()))
            })?;
            parse_fleet_csv(&text)
        }
    }
}

/// Parses a fleet file. Production cost equals the ask; units are sorted by ask.
pub fn parse_fleet_csv(text: &str) -> Result<Fleet> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty fleet file".into(),
    })?;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();
    if header != FLEET_HEADER.split(',').collect::<Vec<_>>() {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{FLEET_HEADER}`"),
        });
    }
    let mut units = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let mut nums = [0.0; 8];
        for (j, slot) in nums.iter_mut().enumerate() {
            *slot = fields[j + 1].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("{} is not a number: `{}`", header[j + 1], fields[j + 1]),
            })?;
        }
        let [ask_price, p_min, p_max, rp_max, ramp_max, hot, cold, no_load] = nums;
        units.push(GeneratorSpec {
            name: fields[0].to_string(),
            ask_price,
            p_min,
            p_max,
            rp_max,
            ramp_max,
            start_cost_hot: hot,
            start_cost_cold: cold,
            no_load_cost: no_load,
            production_cost_rate: ask_price,
        });
    }
    Fleet::from_unsorted(units, 0.0)
}

/// Parameters of the synthetic system wrapped around a fleet. Unit `i` sits
/// at bus `i` of a radial feeder.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentModel {
    /// Mean aggregate load as a fraction of fleet capacity.
    pub load_fraction: f64,
    /// Per-bus load shares; `None` uses the reference shares for seven buses
    /// and equal shares otherwise.
    pub bus_shares: Option<Vec<f64>>,
    /// Load standard deviation as a fraction of its mean.
    pub load_cv: f64,
    /// Per-bus shares of renewable capacity; `None` puts it all at bus 1.
    pub renewable_shares: Option<Vec<f64>>,
    /// Capacity factor of the first installed renewable MW.
    pub base_capacity_factor: f64,
    /// Capacity factor at penetration `x` is `base / (1 + decline · x)`: later
    /// sites are poorer, so reaching higher penetration takes more capacity.
    pub capacity_factor_decline: f64,
    /// Renewable standard deviation per MW of capacity.
    pub uncertainty_growth: f64,
    /// Reserve cost slope as a multiple of each unit's ask.
    pub reserve_cost_factor: f64,
    /// Ramp cost slope as a multiple of each unit's ask.
    pub ramp_cost_factor: f64,
    pub profit_mode: ProfitMode,
    pub starts: StartRule,
    /// Per-unit susceptance of every feeder line.
    pub susceptance: f64,
}

impl Default for ExperimentModel {
    fn default() -> Self {
        Self {
            load_fraction: 0.625,
            bus_shares: None,
            load_cv: 0.03,
            renewable_shares: None,
            base_capacity_factor: 0.5,
            capacity_factor_decline: 4.0,
            uncertainty_growth: 0.1,
            reserve_cost_factor: 0.5,
            ramp_cost_factor: 0.5,
            profit_mode: ProfitMode::Literal,
            starts: StartRule::default(),
            susceptance: 10.0,
        }
    }
}

impl ExperimentModel {
    fn shares(
        given: &Option<Vec<f64>>,
        n: usize,
        default: impl Fn() -> Vec<f64>,
        what: &str,
    ) -> Result<Vec<f64>> {
        let shares = given.clone().unwrap_or_else(default);
        if shares.len() != n {
            return Err(Error::Config(format!(
                "{what} needs {n} entries, got {}",
                shares.len()
            )));
        }
        let total: f64 = shares.iter().sum();
        if shares.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || total <= 0.0 {
            return Err(Error::Config(format!(
                "{what} must be non-negative and not all zero"
            )));
        }
        Ok(shares.iter().map(|s| s / total).collect())
    }

    pub fn load_shares(&self, n: usize) -> Result<Vec<f64>> {
        Self::shares(
            &self.bus_shares,
            n,
            || {
                if n == REFERENCE_BUS_SHARES.len() {
                    REFERENCE_BUS_SHARES.to_vec()
                } else {
                    vec![1.0; n]
                }
            },
            "bus load shares",
        )
    }

    pub fn capacity_shares(&self, n: usize) -> Result<Vec<f64>> {
        Self::shares(
            &self.renewable_shares,
            n,
            || {
                let mut s = vec![0.0; n];
                s[0] = 1.0;
                s
            },
            "renewable capacity shares",
        )
    }

    /// Installed renewable capacity needed for a penetration level, MW.
    pub fn installed_capacity(&self, penetration: f64, mean_load: f64) -> f64 {
        if penetration <= 0.0 {
            return 0.0;
        }
        let cf = self.base_capacity_factor / (1.0 + self.capacity_factor_decline * penetration);
        penetration * mean_load / cf
    }

    pub fn scenario_config(
        &self,
        fleet: &Fleet,
        penetration: f64,
        n_scenarios: usize,
        seed: u64,
        horizon: usize,
    ) -> Result<ScenarioConfig> {
        let n = fleet.len();
        let mean_load = self.load_fraction * fleet.total_capacity();
        let loads = self.load_shares(n)?;
        let capacity = self.installed_capacity(penetration, mean_load);
        let renewable_capacity = self
            .capacity_shares(n)?
            .iter()
            .map(|s| s * capacity)
            .collect();
        Ok(ScenarioConfig {
            n_buses: n,
            horizon,
            n_scenarios,
            seed,
            load_mean: loads.iter().map(|s| vec![s * mean_load; horizon]).collect(),
            load_std: loads
                .iter()
                .map(|s| vec![self.load_cv * s * mean_load; horizon])
                .collect(),
            renewable_capacity,
            penetration,
            uncertainty_growth: self.uncertainty_growth,
        })
    }

    pub fn costs(&self, fleet: &Fleet) -> Result<Vec<CostFunctions>> {
        fleet
            .units()
            .iter()
            .map(|u| CostFunctions::from_spec(u, self.reserve_cost_factor, self.ramp_cost_factor))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fleet: FleetSource,
    pub alphas: Vec<f64>,
    pub penetrations: Vec<f64>,
    pub n_scenarios: usize,
    pub seed: u64,
    /// `None` clears a single copper-plate bus by merit order.
    pub line_limit: Option<f64>,
    pub cost_recovery: CostRecovery,
    pub horizon: usize,
    pub out_dir: PathBuf,
    pub model: ExperimentModel,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SCENARIOS: usize = 200;
pub const DEFAULT_ALPHAS: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
pub const DEFAULT_ALPHA: f64 = 0.9;
pub const DEFAULT_PENETRATION: f64 = 0.9;

pub fn default_penetrations() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            fleet: FleetSource::Builtin,
            alphas: DEFAULT_ALPHAS.to_vec(),
            penetrations: default_penetrations(),
            n_scenarios: DEFAULT_SCENARIOS,
            seed: DEFAULT_SEED,
            line_limit: None,
            cost_recovery: CostRecovery::Enabled,
            horizon: 1,
            out_dir: PathBuf::from("out"),
            model: ExperimentModel::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Config("alpha grid is empty".into()));
        }
        if self.penetrations.is_empty() {
            return Err(Error::Config("penetration grid is empty".into()));
        }
        for &a in &self.alphas {
            RiskLevel::new(a).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(p) = self
            .penetrations
            .iter()
            .find(|p| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::Config(format!(
                "penetration must be non-negative, got {p}"
            )));
        }
        if self.n_scenarios == 0 {
            return Err(Error::Config("scenario count must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1 hour".into()));
        }
        if let Some(l) = self.line_limit {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Config(format!(
                    "line limit must be positive, got {l}"
                )));
            }
        }
        Ok(())
    }
}

/// Everything computed for one `(α, penetration)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub alpha: f64,
    pub penetration: f64,
    /// CVaR requirement per hour after clamping at zero.
    pub demand: Vec<f64>,
    /// `[hour][unit]`.
    pub committed: Vec<Vec<f64>>,
    /// `[hour][bus]`.
    pub lmp: Vec<Vec<f64>>,
    /// `[hour][scenario][unit]`.
    pub realized: Vec<Vec<Vec<f64>>>,
    /// Mean hourly committed power.
    pub committed_mw: f64,
    /// Mean hourly output-weighted price.
    pub price: f64,
    pub settlement: SettlementReport,
}

/// Output-weighted price, taken relative to the lowest price so that a
/// uniform price comes back exactly.
fn weighted_price(committed: &[f64], lmp: &[f64]) -> f64 {
    let total: f64 = committed.iter().sum();
    if total > 0.0 {
        let base = lmp.iter().copied().fold(f64::INFINITY, f64::min);
        base + committed
            .iter()
            .zip(lmp)
            .map(|(p, l)| p * (l - base))
            .sum::<f64>()
            / total
    } else {
        lmp[0]
    }
}

fn radial_requirements(
    set: &ScenarioSet,
    hour: usize,
    alpha: RiskLevel,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = set.n_buses();
    let mut per_bus = Vec::with_capacity(n);
    let mut suffix = Vec::with_capacity(n);
    for i in 0..n {
        per_bus.push(cvar_direct(&net_load(set, i, hour)?, alpha));
        suffix.push(cvar_direct(&suffix_net_load(set, i, hour)?, alpha));
    }
    Ok((per_bus, suffix))
}

/// Commits, re-dispatches every scenario at the committed prices, and settles.
pub fn evaluate_point(
    fleet: &Fleet,
    set: &ScenarioSet,
    config: &RunConfig,
    alpha: f64,
    penetration: f64,
) -> Result<PointOutcome> {
    let level = RiskLevel::new(alpha)?;
    let n = fleet.len();
    if set.n_buses() != n {
        return Err(Error::Config(format!(
            "scenario set has {} buses for {n} units",
            set.n_buses()
        )));
    }
    let capacity = fleet.total_capacity();
    let grid = match config.line_limit {
        Some(limit) => Some(RadialGrid::uniform(n, limit, config.model.susceptance)?),
        None => None,
    };
    let units = fleet.units();
    let horizon = set.horizon();
    let k_len = set.n_scenarios();

    let mut demand = Vec::with_capacity(horizon);
    let mut committed = Vec::with_capacity(horizon);
    let mut lmp = Vec::with_capacity(horizon);
    let mut realized = Vec::with_capacity(horizon);
    let mut scenario_loads = Vec::with_capacity(horizon);
    let mut scenario_renewables = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let requirement = cvar_direct(&aggregate_net_load(set, t)?, level);
        if requirement > capacity + crate::merit::POWER_TOL {
            return Err(Error::Infeasible(format!(
                "hour {}: requirement {requirement:.6} MW exceeds capacity {capacity} MW at alpha {alpha}",
                t + 1
            )));
        }
        let d = requirement.clamp(0.0, capacity);
        demand.push(d);

        let bus_net: Vec<Vec<f64>> = (0..n).map(|i| set.net_loads(i, t)).collect::<Result<_>>()?;
        let scenario_net = |k: usize| -> Vec<f64> { bus_net.iter().map(|b| b[k]).collect() };

        match &grid {
            None => {
                let cleared = commit(fleet, d)?;
                lmp.push(vec![cleared.price; n]);
                committed.push(cleared.committed);
                let mut hour = Vec::with_capacity(k_len);
                for k in 0..k_len {
                    let total: f64 = scenario_net(k).iter().sum();
                    hour.push(commit(fleet, total.clamp(0.0, capacity))?.committed);
                }
                realized.push(hour);
            }
            Some(grid) => {
                let (per_bus, suffix) = radial_requirements(set, t, level)?;
                let cleared = dispatch_radial(grid, units, &per_bus, &suffix)?;
                lmp.push(cleared.lmp);
                committed.push(cleared.committed);
                let mut hour = Vec::with_capacity(k_len);
                for k in 0..k_len {
                    let net = scenario_net(k);
                    let mut tail = net.clone();
                    for i in (0..n.saturating_sub(1)).rev() {
                        tail[i] += tail[i + 1];
                    }
                    hour.push(dispatch_radial(grid, units, &net, &tail)?.committed);
                }
                realized.push(hour);
            }
        }
        scenario_loads.push(
            (0..k_len)
                .map(|k| (0..n).map(|i| set.load(i, t, k)).collect())
                .collect::<Vec<Vec<f64>>>(),
        );
        scenario_renewables.push(
            (0..k_len)
                .map(|k| (0..n).map(|i| set.renewable(i, t, k)).collect())
                .collect::<Vec<Vec<f64>>>(),
        );
    }

    let costs = config.model.costs(fleet)?;
    let settlement = settle(
        SettlementInput {
            specs: units,
            costs: &costs,
            committed: &committed,
            lmp: &lmp,
            realized: &realized,
            probabilities: set.probabilities(),
            scenario_loads: &scenario_loads,
            scenario_renewables: &scenario_renewables,
        },
        SettlementOptions {
            recovery: config.cost_recovery,
            mode: config.model.profit_mode,
            starts: config.model.starts,
        },
    )?;

    let hours = horizon as f64;
    let committed_mw = committed.iter().map(|h| h.iter().sum::<f64>()).sum::<f64>() / hours;
    let price = committed
        .iter()
        .zip(&lmp)
        .map(|(c, l)| weighted_price(c, l))
        .sum::<f64>()
        / hours;
    Ok(PointOutcome {
        alpha,
        penetration,
        demand,
        committed,
        lmp,
        realized,
        committed_mw,
        price,
        settlement,
    })
}

pub fn scenarios_for(fleet: &Fleet, config: &RunConfig, penetration: f64) -> Result<ScenarioSet> {
    let sc = config.model.scenario_config(
        fleet,
        penetration,
        config.n_scenarios,
        config.seed,
        config.horizon,
    )?;
    generate_scenarios(&sc)
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

/// Rows of one CSV schema.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRow {
    pub alpha: f64,
    pub committed_mw: f64,
    pub price: f64,
    pub expected_profit: f64,
    pub realized_profit: f64,
    pub recovery_cost: f64,
    pub recovery_rate: f64,
}

impl CsvRecord for AlphaRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "committed_mw",
        "price",
        "R",
        "R_tilde",
        "H",
        "lambda_w",
    ];

    fn cells(&self) -> Vec<Cell> {
        [
            self.alpha,
            self.committed_mw,
            self.price,
            self.expected_profit,
            self.realized_profit,
            self.recovery_cost,
            self.recovery_rate,
        ]
        .into_iter()
        .map(Cell::Real)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenetrationRow {
    pub penetration: f64,
    pub committed_mw: f64,
    pub price: f64,
    pub deviation_cost: f64,
    pub renewable_profit: f64,
    pub recovery_rate: f64,
}

impl CsvRecord for PenetrationRow {
    const HEADER: &'static [&'static str] = &[
        "penetration",
        "committed_mw",
        "price",
        "deviation_cost",
        "renewable_profit",
        "lambda_w",
    ];

    fn cells(&self) -> Vec<Cell> {
        [
            self.penetration,
            self.committed_mw,
            self.price,
            self.deviation_cost,
            self.renewable_profit,
            self.recovery_rate,
        ]
        .into_iter()
        .map(Cell::Real)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettlementRow {
    pub run_id: usize,
    pub alpha: f64,
    pub penetration: f64,
    pub cost_recovery: CostRecovery,
    pub recovery_cost: f64,
    pub recovery_rate: f64,
    pub expected_profit: f64,
    pub realized_profit: f64,
    pub deviation_cost: f64,
    pub renewable_revenue: f64,
    pub curtailed_mwh: f64,
}

impl CsvRecord for SettlementRow {
    const HEADER: &'static [&'static str] = &[
        "run_id",
        "alpha",
        "penetration",
        "CR",
        "H",
        "lambda_w",
        "R",
        "R_tilde",
        "deviation_cost",
        "renewable_revenue",
        "curtailed_mwh",
    ];

    fn cells(&self) -> Vec<Cell> {
        let mut out = vec![
            Cell::Int(self.run_id as i64),
            Cell::Real(self.alpha),
            Cell::Real(self.penetration),
            Cell::Int(self.cost_recovery.flag() as i64),
        ];
        out.extend(
            [
                self.recovery_cost,
                self.recovery_rate,
                self.expected_profit,
                self.realized_profit,
                self.deviation_cost,
                self.renewable_revenue,
                self.curtailed_mwh,
            ]
            .into_iter()
            .map(Cell::Real),
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchRow {
    pub hour: usize,
    pub bus: usize,
    pub generator: String,
    pub committed_mw: f64,
    pub lmp: f64,
}

impl CsvRecord for DispatchRow {
    const HEADER: &'static [&'static str] = &["time", "bus", "generator", "committed_mw", "lmp"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.hour as i64),
            Cell::Int(self.bus as i64),
            Cell::Text(self.generator.clone()),
            Cell::Real(self.committed_mw),
            Cell::Real(self.lmp),
        ]
    }
}

/// Rows that survived plus one message per aborted grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput<R> {
    pub rows: Vec<R>,
    pub diagnostics: Vec<String>,
}

impl<R> Default for SweepOutput<R> {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            diagnostics: Vec::new(),
        }
    }
}

/// Infeasibility and assumption failures abort only the grid point.
fn absorb<T>(out: &mut Vec<String>, label: String, result: Result<T>) -> Result<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(e @ (Error::Infeasible(_) | Error::Assumption(_))) => {
            out.push(format!("{label}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// One row per α at the first penetration level, all on a single scenario set.
pub fn run_alpha_sweep(config: &RunConfig) -> Result<SweepOutput<AlphaRow>> {
    config.validate()?;
    let fleet = load_fleet(&config.fleet)?;
    let penetration = config.penetrations[0];
    let set = scenarios_for(&fleet, config, penetration)?;
    let mut out = SweepOutput::default();
    for &alpha in &config.alphas {
        let label = format!("alpha {alpha}");
        if let Some(p) = absorb(
            &mut out.diagnostics,
            label,
            evaluate_point(&fleet, &set, config, alpha, penetration),
        )? {
            out.rows.push(AlphaRow {
                alpha,
                committed_mw: p.committed_mw,
                price: p.price,
                expected_profit: p.settlement.expected_profit,
                realized_profit: p.settlement.realized_profit,
                recovery_cost: p.settlement.recovery_cost,
                recovery_rate: p.settlement.recovery_rate,
            });
        }
    }
    Ok(out)
}

/// One row per penetration level at the first α; every level reuses the seed.
pub fn run_penetration_sweep(config: &RunConfig) -> Result<SweepOutput<PenetrationRow>> {
    config.validate()?;
    let fleet = load_fleet(&config.fleet)?;
    let alpha = config.alphas[0];
    let mut out = SweepOutput::default();
    for &penetration in &config.penetrations {
        let set = scenarios_for(&fleet, config, penetration)?;
        let label = format!("penetration {penetration}");
        if let Some(p) = absorb(
            &mut out.diagnostics,
            label,
            evaluate_point(&fleet, &set, config, alpha, penetration),
        )? {
            out.rows.push(PenetrationRow {
                penetration,
                committed_mw: p.committed_mw,
                price: p.price,
                deviation_cost: p.settlement.deviation_cost,
                renewable_profit: p.settlement.renewable_revenue,
                recovery_rate: p.settlement.recovery_rate,
            });
        }
    }
    Ok(out)
}

/// One settlement row per `(α, penetration)` pair, penetration-major.
pub fn run_settlement(config: &RunConfig) -> Result<SweepOutput<SettlementRow>> {
    config.validate()?;
    let fleet = load_fleet(&config.fleet)?;
    let mut out = SweepOutput::default();
    let mut run_id = 0;
    for &penetration in &config.penetrations {
        let set = scenarios_for(&fleet, config, penetration)?;
        for &alpha in &config.alphas {
            run_id += 1;
            let label = format!("alpha {alpha}, penetration {penetration}");
            if let Some(p) = absorb(
                &mut out.diagnostics,
                label,
                evaluate_point(&fleet, &set, config, alpha, penetration),
            )? {
                let s = &p.settlement;
                out.rows.push(SettlementRow {
                    run_id,
                    alpha,
                    penetration,
                    cost_recovery: config.cost_recovery,
                    recovery_cost: s.recovery_cost,
                    recovery_rate: s.recovery_rate,
                    expected_profit: s.expected_profit,
                    realized_profit: s.realized_profit,
                    deviation_cost: s.deviation_cost,
                    renewable_revenue: s.renewable_revenue,
                    curtailed_mwh: s.curtailed_mwh,
                });
            }
        }
    }
    Ok(out)
}

/// Committed dispatch for the first α and penetration, with its scenario set.
pub fn run_dispatch(config: &RunConfig) -> Result<(Vec<DispatchRow>, ScenarioSet)> {
    config.validate()?;
    let fleet = load_fleet(&config.fleet)?;
    let (alpha, penetration) = (config.alphas[0], config.penetrations[0]);
    let set = scenarios_for(&fleet, config, penetration)?;
    let p = evaluate_point(&fleet, &set, config, alpha, penetration)?;
    let mut rows = Vec::new();
    for (t, (hour, prices)) in p.committed.iter().zip(&p.lmp).enumerate() {
        for (i, u) in fleet.units().iter().enumerate() {
            rows.push(DispatchRow {
                hour: t + 1,
                bus: i + 1,
                generator: u.name.clone(),
                committed_mw: hour[i],
                lmp: prices[i],
            });
        }
    }
    Ok((rows, set))
}

fn format_real(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Header line then one line per row; reals with six decimals.
pub fn render_csv<R: CsvRecord>(rows: &[R]) -> String {
    let mut out = R::HEADER.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .cells()
            .into_iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Real(v) => format_real(v),
                Cell::Text(s) => s,
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn emit_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<()> {
    fs::write(path, render_csv(rows))
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}
