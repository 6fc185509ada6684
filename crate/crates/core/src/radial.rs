//! Risk-based dispatch on a radial feeder with one uniform line limit.
//!
//! Bus 1 hosts the cheapest unit and feeds a chain `1 → 2 → … → N`. Each bus
//! is handled once, left to right, with two running requirements: the local
//! requirement still to be met at the bus, and the requirement of the whole
//! remaining feeder. A bus either serves everything that is left or exports
//! exactly the line limit downstream.

use crate::error::{Error, Result};
use crate::merit::{GeneratorSpec, POWER_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n_buses: usize,
    line_limit: f64,
    susceptance: Vec<f64>,
}

impl RadialGrid {
    /// `susceptance[i]` belongs to the line between buses `i` and `i + 1`.
    /// An infinite line limit models an unconstrained feeder.
    pub fn new(n_buses: usize, line_limit: f64, susceptance: Vec<f64>) -> Result<Self> {
        if n_buses == 0 {
            return Err(Error::Config("radial grid needs at least one bus".into()));
        }
        if !(line_limit > 0.0) || line_limit.is_nan() {
            return Err(Error::Config(format!(
                "line limit must be positive, got {line_limit}"
            )));
        }
        if susceptance.len() != n_buses - 1 {
            return Err(Error::Config(format!(
                "{} buses need {} line susceptances, got {}",
                n_buses,
                n_buses - 1,
                susceptance.len()
            )));
        }
        if let Some(b) = susceptance.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::Config(format!(
                "line susceptance must be positive, got {b}"
            )));
        }
        Ok(Self {
            n_buses,
            line_limit,
            susceptance,
        })
    }

    /// Every line shares the same susceptance.
    pub fn uniform(n_buses: usize, line_limit: f64, susceptance: f64) -> Result<Self> {
        Self::new(
            n_buses,
            line_limit,
            vec![susceptance; n_buses.saturating_sub(1)],
        )
    }

    pub fn n_buses(&self) -> usize {
        self.n_buses
    }

    pub fn line_limit(&self) -> f64 {
        self.line_limit
    }

    pub fn susceptance(&self) -> &[f64] {
        &self.susceptance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Assumption3Violation {
    PositiveMinimum { bus: usize, p_min: f64 },
    SuffixAboveCapacity { bus: usize, suffix: f64, p_max: f64 },
    ShapeMismatch { expected: usize, got: usize },
}

/// Empty iff every unit can switch off and every bus could cover the
/// requirement of the feeder from itself onward.
pub fn validate_assumption3(
    grid: &RadialGrid,
    units: &[GeneratorSpec],
    per_bus: &[f64],
    suffix: &[f64],
) -> Vec<Assumption3Violation> {
    let n = grid.n_buses();
    let mut out = Vec::new();
    for got in [units.len(), per_bus.len(), suffix.len()] {
        if got != n {
            out.push(Assumption3Violation::ShapeMismatch { expected: n, got });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (i, u) in units.iter().enumerate() {
        if u.p_min != 0.0 {
            out.push(Assumption3Violation::PositiveMinimum {
                bus: i,
                p_min: u.p_min,
            });
        }
    }
    for (i, (u, &s)) in units.iter().zip(suffix).enumerate() {
        if s > u.p_max + POWER_TOL {
            out.push(Assumption3Violation::SuffixAboveCapacity {
                bus: i,
                suffix: s,
                p_max: u.p_max,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// The bus covers the whole remaining feeder.
    ServesRemainder,
    /// The bus covers its local requirement and exports the line limit.
    ExportsAtLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Congestion {
    /// Bus 1 serves the whole feeder; one price everywhere.
    None,
    /// Zero-based index of the balancing bus beyond which prices stay flat.
    Congested { balancing_bus: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CongestedDispatch {
    pub committed: Vec<f64>,
    pub lmp: Vec<f64>,
    /// Local requirement entering each bus.
    pub local_requirement: Vec<f64>,
    /// Requirement of buses `i..N` entering each bus.
    pub suffix_requirement: Vec<f64>,
    pub stages: Vec<Stage>,
    pub congestion: Congestion,
}

impl CongestedDispatch {
    pub fn total(&self) -> f64 {
        self.committed.iter().sum()
    }
}

/// Walks the feeder once and assigns outputs and locational prices.
///
/// `per_bus[i]` is the requirement of bus `i` alone and `suffix[i]` the
/// requirement of buses `i..N` taken jointly. The running local requirement
/// is deliberately left unclamped: a bus that imports more than it needs must
/// pass the surplus on rather than generate on top of it.
pub fn dispatch_radial(
    grid: &RadialGrid,
    units: &[GeneratorSpec],
    per_bus: &[f64],
    suffix: &[f64],
) -> Result<CongestedDispatch> {
    let n = grid.n_buses();
    let violations = validate_assumption3(grid, units, per_bus, suffix);
    if let Some(v) = violations.iter().find(|v| {
        matches!(
            v,
            Assumption3Violation::ShapeMismatch { .. }
                | Assumption3Violation::PositiveMinimum { .. }
        )
    }) {
        return Err(Error::Infeasible(format!(
            "radial dispatch precondition: {v:?}"
        )));
    }
    let limit = grid.line_limit();

    let mut committed = vec![0.0; n];
    let mut local_requirement = vec![0.0; n];
    let mut suffix_requirement = vec![0.0; n];
    let mut stages = vec![Stage::ServesRemainder; n];
    let mut local = per_bus[0];
    let mut remaining = suffix[0];
    for i in 0..n {
        local_requirement[i] = local;
        suffix_requirement[i] = remaining;
        let p = if i + 1 == n {
            remaining
        } else {
            (local + limit).min(remaining)
        }
        .max(0.0);
        committed[i] = p;
        let served_all = p >= remaining;
        stages[i] = if served_all {
            Stage::ServesRemainder
        } else {
            Stage::ExportsAtLimit
        };
        if i + 1 < n {
            local = if served_all {
                0.0
            } else {
                per_bus[i + 1] - limit
            };
            remaining -= p;
        }
    }

    for (i, (u, &p)) in units.iter().zip(&committed).enumerate() {
        if p > u.p_max + POWER_TOL {
            return Err(Error::Infeasible(format!(
                "bus {} must supply {p:.6} MW above its capacity {}",
                i + 1,
                u.p_max
            )));
        }
    }

    let asks: Vec<f64> = units.iter().map(|u| u.ask_price).collect();
    let congestion = if stages[0] == Stage::ServesRemainder {
        Congestion::None
    } else {
        let downstream = |i: usize| if i < n { suffix[i] } else { 0.0 };
        let k = (0..n)
            .find(|&k| downstream(k + 1) <= limit && limit < suffix[k])
            .unwrap_or(n - 1);
        Congestion::Congested { balancing_bus: k }
    };
    let lmp = match congestion {
        Congestion::None => vec![asks[0]; n],
        Congestion::Congested { balancing_bus: k } => (0..n).map(|i| asks[i.min(k)]).collect(),
    };

    Ok(CongestedDispatch {
        committed,
        lmp,
        local_requirement,
        suffix_requirement,
        stages,
        congestion,
    })
}

/// Sum of per-bus requirements and its excess over the joint requirement.
pub fn committed_upper_bound(per_bus: &[f64], joint: f64) -> (f64, f64) {
    let bound: f64 = per_bus.iter().sum();
    (bound, bound - joint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units(prices: &[f64], p_max: &[f64]) -> Vec<GeneratorSpec> {
        prices
            .iter()
            .zip(p_max)
            .enumerate()
            .map(|(i, (&pi, &pm))| GeneratorSpec::simple(format!("g{i}"), pi, 0.0, pm))
            .collect()
    }

    #[test]
    fn assumption3_examples() {
        let g1 = RadialGrid::uniform(1, 50.0, 1.0).unwrap();
        assert!(
            validate_assumption3(&g1, &units(&[10.0], &[400.0]), &[300.0], &[300.0]).is_empty()
        );

        let g3 = RadialGrid::uniform(3, 50.0, 1.0).unwrap();
        let u = units(&[10.0, 20.0, 30.0], &[200.0, 100.0, 50.0]);
        assert!(
            validate_assumption3(&g3, &u, &[60.0, 40.0, 30.0], &[130.0, 70.0, 30.0]).is_empty()
        );

        let u = units(&[10.0, 20.0, 30.0], &[400.0, 100.0, 50.0]);
        let v = validate_assumption3(&g3, &u, &[400.0, 40.0, 30.0], &[500.0, 70.0, 30.0]);
        assert_eq!(
            v,
            vec![Assumption3Violation::SuffixAboveCapacity {
                bus: 0,
                suffix: 500.0,
                p_max: 400.0
            }]
        );
    }

    #[test]
    fn congested_three_bus() {
        let g = RadialGrid::uniform(3, 50.0, 1.0).unwrap();
        let u = units(&[10.0, 20.0, 30.0], &[200.0, 100.0, 50.0]);
        let d = dispatch_radial(&g, &u, &[60.0, 40.0, 30.0], &[130.0, 70.0, 30.0]).unwrap();
        assert_eq!(d.committed, vec![110.0, 20.0, 0.0]);
        assert_eq!(d.lmp, vec![10.0, 20.0, 20.0]);
        assert_eq!(d.congestion, Congestion::Congested { balancing_bus: 1 });
        assert_eq!(
            d.stages,
            vec![
                Stage::ExportsAtLimit,
                Stage::ServesRemainder,
                Stage::ServesRemainder
            ]
        );
    }

    #[test]
    fn uncongested_three_bus() {
        let g = RadialGrid::uniform(3, 50.0, 1.0).unwrap();
        let u = units(&[10.0, 20.0, 30.0], &[200.0, 100.0, 50.0]);
        let d = dispatch_radial(&g, &u, &[60.0, 20.0, 20.0], &[100.0, 40.0, 20.0]).unwrap();
        assert_eq!(d.committed, vec![100.0, 0.0, 0.0]);
        assert_eq!(d.lmp, vec![10.0, 10.0, 10.0]);
        assert_eq!(d.congestion, Congestion::None);
    }

    #[test]
    fn single_bus_serves_its_suffix() {
        let g = RadialGrid::uniform(1, 50.0, 1.0).unwrap();
        let d = dispatch_radial(&g, &units(&[10.0], &[400.0]), &[300.0], &[300.0]).unwrap();
        assert_eq!(d.committed, vec![300.0]);
        assert_eq!(d.lmp, vec![10.0]);
    }

    #[test]
    fn surplus_import_is_passed_on() {
        // bus 2 needs less than the line delivers; it must not add its own output on top
        let g = RadialGrid::uniform(3, 50.0, 1.0).unwrap();
        let u = units(&[10.0, 20.0, 30.0], &[500.0, 500.0, 500.0]);
        let d = dispatch_radial(&g, &u, &[60.0, 40.0, 100.0], &[200.0, 140.0, 100.0]).unwrap();
        assert_eq!(d.committed, vec![110.0, 40.0, 50.0]);
        let f1 = 110.0 - 60.0;
        let f2 = f1 + 40.0 - 40.0;
        assert!(f1 <= 50.0 && f2 <= 50.0);
    }

    #[test]
    fn capacity_shortfall_is_infeasible() {
        let g = RadialGrid::uniform(2, 10.0, 1.0).unwrap();
        let u = units(&[10.0, 20.0], &[500.0, 5.0]);
        assert!(matches!(
            dispatch_radial(&g, &u, &[0.0, 30.0], &[30.0, 30.0]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(
            committed_upper_bound(&[60.0, 40.0, 30.0], 125.0),
            (130.0, 5.0)
        );
        assert_eq!(committed_upper_bound(&[42.0], 42.0), (42.0, 0.0));
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::uniform(0, 50.0, 1.0).is_err());
        assert!(RadialGrid::uniform(2, 0.0, 1.0).is_err());
        assert!(RadialGrid::uniform(2, 50.0, -1.0).is_err());
        assert!(RadialGrid::uniform(2, f64::INFINITY, 1.0).is_ok());
    }
}
