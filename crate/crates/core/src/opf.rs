//! Deterministic DC dispatch on a radial feeder and a KKT certificate checker
//! for linearized optimal power flow on an arbitrary network.

use crate::error::{Error, Result};
use crate::merit::{GeneratorSpec, POWER_TOL};
use crate::radial::{dispatch_radial, RadialGrid};

/// Line `from → to` with flow `susceptance · (θ_from − θ_to)` bounded by `limit`
/// in both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub n_buses: usize,
    pub lines: Vec<Line>,
}

impl From<&RadialGrid> for Network {
    fn from(grid: &RadialGrid) -> Self {
        let lines = grid
            .susceptance()
            .iter()
            .enumerate()
            .map(|(i, &b)| Line {
                from: i,
                to: i + 1,
                susceptance: b,
                limit: grid.line_limit(),
            })
            .collect();
        Self {
            n_buses: grid.n_buses(),
            lines,
        }
    }
}

/// Primal-dual point of the linearized dispatch, one generator per bus.
#[derive(Debug, Clone, PartialEq)]
pub struct OpfSolution {
    pub committed: Vec<f64>,
    /// Voltage angles in radians, bus 1 at zero.
    pub angles: Vec<f64>,
    pub lmp: Vec<f64>,
    pub mu_upper: Vec<f64>,
    pub mu_lower: Vec<f64>,
    /// Multiplier of `flow ≤ limit`, per line.
    pub line_mu_forward: Vec<f64>,
    /// Multiplier of `−flow ≤ limit`, per line.
    pub line_mu_reverse: Vec<f64>,
    /// Flow on each line in its `from → to` direction.
    pub flows: Vec<f64>,
    /// Generation cost at ask prices.
    pub objective: f64,
    /// Renewable energy valued at the renewable ask; constant under take-all.
    pub renewable_term: f64,
}

/// Dispatches known net loads along the feeder and constructs a full set of
/// multipliers for the resulting point.
pub fn solve_deterministic(
    grid: &RadialGrid,
    units: &[GeneratorSpec],
    loads: &[f64],
    renewables: &[f64],
    renewable_price: f64,
) -> Result<OpfSolution> {
    let n = grid.n_buses();
    if loads.len() != n || renewables.len() != n || units.len() != n {
        return Err(Error::Config(format!(
            "expected {n} loads, renewables and units, got {}, {}, {}",
            loads.len(),
            renewables.len(),
            units.len()
        )));
    }
    let net: Vec<f64> = loads.iter().zip(renewables).map(|(l, r)| l - r).collect();
    let mut suffix = net.clone();
    for i in (0..n.saturating_sub(1)).rev() {
        suffix[i] += suffix[i + 1];
    }
    let dispatch = dispatch_radial(grid, units, &net, &suffix)?;
    let committed = dispatch.committed;
    let lmp = dispatch.lmp;

    let mut flows = Vec::with_capacity(n.saturating_sub(1));
    let mut cumulative = 0.0;
    for i in 0..n.saturating_sub(1) {
        cumulative += committed[i] - net[i];
        flows.push(cumulative);
    }
    let limit = grid.line_limit();
    if let Some((i, f)) = flows
        .iter()
        .enumerate()
        .find(|(_, f)| f.abs() > limit + POWER_TOL)
    {
        return Err(Error::Infeasible(format!(
            "flow {f:.6} on line {}-{} exceeds limit {limit}",
            i + 1,
            i + 2
        )));
    }
    let imbalance = cumulative + committed[n - 1] - net[n - 1];
    if imbalance.abs() > POWER_TOL * (1.0 + suffix[0].abs()) {
        return Err(Error::Infeasible(format!(
            "net load cannot be served: imbalance {imbalance:.6} MW"
        )));
    }

    let mut angles = vec![0.0; n];
    for (i, (&f, &b)) in flows.iter().zip(grid.susceptance()).enumerate() {
        angles[i + 1] = angles[i] - f / b;
    }

    let mut mu_upper = vec![0.0; n];
    let mut mu_lower = vec![0.0; n];
    for (i, u) in units.iter().enumerate() {
        let p = committed[i];
        let gap = lmp[i] - u.ask_price;
        let at_max = (p - u.p_max).abs() <= POWER_TOL;
        let at_min = (p - u.p_min).abs() <= POWER_TOL;
        if at_max && (gap >= 0.0 || !at_min) {
            mu_upper[i] = gap;
        } else if at_min {
            mu_lower[i] = -gap;
        }
    }

    let mut line_mu_forward = Vec::with_capacity(flows.len());
    let mut line_mu_reverse = Vec::with_capacity(flows.len());
    for i in 0..flows.len() {
        let d = lmp[i + 1] - lmp[i];
        line_mu_forward.push(d.max(0.0));
        line_mu_reverse.push((-d).max(0.0));
    }

    let objective = units
        .iter()
        .zip(&committed)
        .map(|(u, p)| u.ask_price * p)
        .sum();
    let renewable_term = renewable_price * renewables.iter().sum::<f64>();
    Ok(OpfSolution {
        committed,
        angles,
        lmp,
        mu_upper,
        mu_lower,
        line_mu_forward,
        line_mu_reverse,
        flows,
        objective,
        renewable_term,
    })
}

/// Largest absolute residual per group of optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktReportP1 {
    pub generator_stationarity: f64,
    pub angle_stationarity: f64,
    pub balance: f64,
    pub line_feasibility: f64,
    pub box_feasibility: f64,
    pub complementarity: f64,
    pub sign: f64,
    /// Mismatch between reported flows and `b · Δθ`.
    pub flow_consistency: f64,
}

impl KktReportP1 {
    pub fn max(&self) -> f64 {
        [
            self.generator_stationarity,
            self.angle_stationarity,
            self.balance,
            self.line_feasibility,
            self.box_feasibility,
            self.complementarity,
            self.sign,
            self.flow_consistency,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Evaluates every optimality condition at `solution` on `network`.
///
/// Shapes must agree; missing entries are treated as a residual of infinity.
pub fn kkt_verify_p1(
    solution: &OpfSolution,
    network: &Network,
    units: &[GeneratorSpec],
    loads: &[f64],
    renewables: &[f64],
) -> KktReportP1 {
    let n = network.n_buses;
    let m = network.lines.len();
    let shapes_ok = [
        solution.committed.len(),
        solution.angles.len(),
        solution.lmp.len(),
        solution.mu_upper.len(),
        solution.mu_lower.len(),
        units.len(),
        loads.len(),
        renewables.len(),
    ]
    .iter()
    .all(|&l| l == n)
        && [
            solution.line_mu_forward.len(),
            solution.line_mu_reverse.len(),
            solution.flows.len(),
        ]
        .iter()
        .all(|&l| l == m)
        && network.lines.iter().all(|l| l.from < n && l.to < n);
    if !shapes_ok {
        return KktReportP1 {
            balance: f64::INFINITY,
            ..KktReportP1::default()
        };
    }

    let mut r = KktReportP1::default();
    let theta = &solution.angles;
    let lambda = &solution.lmp;

    for (i, u) in units.iter().enumerate() {
        let p = solution.committed[i];
        let (mu, mu_bar) = (solution.mu_upper[i], solution.mu_lower[i]);
        r.generator_stationarity = r
            .generator_stationarity
            .max((u.ask_price - lambda[i] + mu - mu_bar).abs());
        r.box_feasibility = r
            .box_feasibility
            .max((p - u.p_max).max(u.p_min - p).max(0.0));
        r.complementarity = r
            .complementarity
            .max((mu * (p - u.p_max)).abs())
            .max((mu_bar * (u.p_min - p)).abs());
        r.sign = r.sign.max((-mu).max(-mu_bar).max(0.0));
    }

    let mut injection: Vec<f64> = (0..n)
        .map(|i| solution.committed[i] + renewables[i] - loads[i])
        .collect();
    let mut angle_residual = vec![0.0; n];
    for (l, line) in network.lines.iter().enumerate() {
        let (i, j, b) = (line.from, line.to, line.susceptance);
        let flow = b * (theta[i] - theta[j]);
        injection[i] -= flow;
        injection[j] += flow;
        r.flow_consistency = r.flow_consistency.max((flow - solution.flows[l]).abs());
        r.line_feasibility = r.line_feasibility.max((flow.abs() - line.limit).max(0.0));
        let (fwd, rev) = (solution.line_mu_forward[l], solution.line_mu_reverse[l]);
        r.sign = r.sign.max((-fwd).max(-rev).max(0.0));
        if line.limit.is_finite() {
            r.complementarity = r
                .complementarity
                .max((fwd * (flow - line.limit)).abs())
                .max((rev * (-flow - line.limit)).abs());
        } else {
            r.complementarity = r.complementarity.max(fwd.abs()).max(rev.abs());
        }
        angle_residual[i] += b * (fwd - rev + lambda[i] - lambda[j]);
        angle_residual[j] += b * (rev - fwd + lambda[j] - lambda[i]);
    }
    r.balance = injection.iter().fold(0.0, |a, x| a.max(x.abs()));
    r.angle_stationarity = angle_residual.iter().fold(0.0, |a, x| a.max(x.abs()));
    r
}
