//! Post-dispatch economics: reserve and ramp envelopes, cost recovery,
//! expected and realized profits, deviation cost, renewable payment.
//!
//! Schedules are indexed `[hour][unit]` for commitments and
//! `[hour][scenario][unit]` for realized dispatch. Unit `i` sits at bus `i`,
//! so locational prices share the unit index.

use crate::error::{Error, Result};
use crate::merit::{GeneratorSpec, POWER_TOL};
use crate::risk::PROBABILITY_TOL;

/// Linear cost slopes of one unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostFunctions {
    /// $/MWh of output.
    pub production: f64,
    /// $/MW of reserve held for one hour.
    pub reserve: f64,
    /// $/(MW/h) of ramp capability held.
    pub ramp: f64,
}

impl CostFunctions {
    pub fn new(production: f64, reserve: f64, ramp: f64) -> Result<Self> {
        for (name, v) in [
            ("production", production),
            ("reserve", reserve),
            ("ramp", ramp),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "{name} cost slope must be non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            production,
            reserve,
            ramp,
        })
    }

    /// Production at the unit's rate; reserve and ramp slopes as multiples of its ask.
    pub fn from_spec(spec: &GeneratorSpec, reserve_factor: f64, ramp_factor: f64) -> Result<Self> {
        Self::new(
            spec.production_cost_rate,
            reserve_factor * spec.ask_price,
            ramp_factor * spec.ask_price,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostRecovery {
    Disabled,
    Enabled,
}

impl CostRecovery {
    pub fn flag(self) -> f64 {
        match self {
            Self::Disabled => 0.0,
            Self::Enabled => 1.0,
        }
    }

    pub fn from_flag(flag: u8) -> Result<Self> {
        match flag {
            0 => Ok(Self::Disabled),
            1 => Ok(Self::Enabled),
            other => Err(Error::Config(format!(
                "cost recovery flag must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// How the recovery rate enters generator profit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfitMode {
    /// Energy is paid `λ − λ^W (1 − CR)`, which leaves the rate unused in both
    /// branches because the rate is zero without recovery.
    #[default]
    Literal,
    /// With recovery enabled, generators additionally collect `λ^W` per MWh.
    RecoveryPaid,
}

/// Hot or cold start selection by the time a unit has been offline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartRule {
    /// A start after at most this many offline hours is hot.
    pub hot_threshold_hours: f64,
    /// Hours each unit has been offline before the first hour.
    pub initial_downtime_hours: f64,
}

impl Default for StartRule {
    fn default() -> Self {
        Self {
            hot_threshold_hours: 1.0,
            initial_downtime_hours: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleViolation {
    /// Realized output above commitment.
    NegativeDeviation {
        unit: usize,
        hour: usize,
        scenario: usize,
        excess: f64,
    },
    ReserveCap {
        unit: usize,
        hour: usize,
        needed: f64,
        cap: f64,
    },
    RampCap {
        unit: usize,
        hour: usize,
        scenario: usize,
        next_scenario: usize,
        needed: f64,
        cap: f64,
    },
}

/// Tight reserve and ramp envelopes with any cap violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelopes {
    /// `[hour][unit]`: largest shortfall of realized output below commitment.
    pub reserve: Vec<Vec<f64>>,
    /// `[hour][unit]`: largest swing into the next hour over all scenario
    /// pairs; zero in the final hour.
    pub ramp: Vec<Vec<f64>>,
    pub violations: Vec<ScheduleViolation>,
}

fn check_shapes(committed: &[Vec<f64>], realized: &[Vec<Vec<f64>>], n_units: usize) -> Result<()> {
    if committed.len() != realized.len() {
        return Err(Error::Domain(format!(
            "{} committed hours but {} realized hours",
            committed.len(),
            realized.len()
        )));
    }
    for (c, r) in committed.iter().zip(realized) {
        if c.len() != n_units || r.iter().any(|s| s.len() != n_units) {
            return Err(Error::Domain(format!(
                "schedules must cover {n_units} units"
            )));
        }
    }
    Ok(())
}

pub fn reserve_and_ramp_check(
    committed: &[Vec<f64>],
    realized: &[Vec<Vec<f64>>],
    specs: &[GeneratorSpec],
) -> Result<Envelopes> {
    let n = specs.len();
    check_shapes(committed, realized, n)?;
    let horizon = committed.len();
    let mut reserve = vec![vec![0.0; n]; horizon];
    let mut ramp = vec![vec![0.0; n]; horizon];
    let mut violations = Vec::new();

    for t in 0..horizon {
        for (k, scenario) in realized[t].iter().enumerate() {
            for i in 0..n {
                let dev = committed[t][i] - scenario[i];
                if dev < -POWER_TOL {
                    violations.push(ScheduleViolation::NegativeDeviation {
                        unit: i,
                        hour: t,
                        scenario: k,
                        excess: -dev,
                    });
                }
                reserve[t][i] = f64::max(reserve[t][i], dev);
            }
        }
        for (i, spec) in specs.iter().enumerate() {
            if reserve[t][i] > spec.rp_max + POWER_TOL {
                violations.push(ScheduleViolation::ReserveCap {
                    unit: i,
                    hour: t,
                    needed: reserve[t][i],
                    cap: spec.rp_max,
                });
            }
        }
    }

    for t in 0..horizon.saturating_sub(1) {
        for (i, spec) in specs.iter().enumerate() {
            let mut worst = (0.0, 0, 0);
            for (k, now) in realized[t].iter().enumerate() {
                for (k2, next) in realized[t + 1].iter().enumerate() {
                    let swing = (now[i] - next[i]).abs();
                    if swing > worst.0 {
                        worst = (swing, k, k2);
                    }
                }
            }
            ramp[t][i] = worst.0;
            if worst.0 > spec.ramp_max + POWER_TOL {
                violations.push(ScheduleViolation::RampCap {
                    unit: i,
                    hour: t,
                    scenario: worst.1,
                    next_scenario: worst.2,
                    needed: worst.0,
                    cap: spec.ramp_max,
                });
            }
        }
    }
    Ok(Envelopes {
        reserve,
        ramp,
        violations,
    })
}

/// `I[t][i] = 1` iff unit `i` produces in hour `t`.
pub fn commitment_indicators(committed: &[Vec<f64>]) -> Vec<Vec<bool>> {
    committed
        .iter()
        .map(|h| h.iter().map(|&p| p > 0.0).collect())
        .collect()
}

/// Total recovery cost `H` and the per-MWh rate `λ^W`.
pub fn recovery_rate(
    committed: &[Vec<f64>],
    envelopes: &Envelopes,
    specs: &[GeneratorSpec],
    costs: &[CostFunctions],
    recovery: CostRecovery,
    starts: StartRule,
) -> Result<(f64, f64)> {
    let n = specs.len();
    if costs.len() != n || committed.iter().any(|h| h.len() != n) {
        return Err(Error::Domain(format!(
            "costs and schedule must cover {n} units"
        )));
    }
    if envelopes.reserve.len() != committed.len() || envelopes.ramp.len() != committed.len() {
        return Err(Error::Domain("envelopes must cover every hour".into()));
    }
    let on = commitment_indicators(committed);
    let mut h = 0.0;
    for (i, (spec, cost)) in specs.iter().zip(costs).enumerate() {
        let mut was_on = false;
        let mut downtime = starts.initial_downtime_hours;
        for t in 0..committed.len() {
            if on[t][i] {
                h += spec.no_load_cost;
                if !was_on {
                    h += if downtime <= starts.hot_threshold_hours {
                        spec.start_cost_hot
                    } else {
                        spec.start_cost_cold
                    };
                }
                downtime = 0.0;
            } else {
                downtime += 1.0;
            }
            was_on = on[t][i];
            h += cost.reserve * envelopes.reserve[t][i] + cost.ramp * envelopes.ramp[t][i];
        }
    }
    let energy: f64 = committed.iter().flatten().sum();
    let rate = match recovery {
        CostRecovery::Disabled => 0.0,
        CostRecovery::Enabled if energy > 0.0 => h / energy,
        CostRecovery::Enabled if h == 0.0 => 0.0,
        CostRecovery::Enabled => {
            return Err(Error::Domain(format!(
                "recovery rate undefined: cost {h} with zero committed energy"
            )))
        }
    };
    Ok((h, rate))
}

fn energy_payment(price: f64, rate: f64, recovery: CostRecovery, mode: ProfitMode) -> f64 {
    let literal = price - rate * (1.0 - recovery.flag());
    match (mode, recovery) {
        (ProfitMode::RecoveryPaid, CostRecovery::Enabled) => literal + rate,
        _ => literal,
    }
}

/// Profit of each unit if the commitment is dispatched as planned.
pub fn expected_profit_by_unit(
    committed: &[Vec<f64>],
    lmp: &[Vec<f64>],
    rate: f64,
    recovery: CostRecovery,
    costs: &[CostFunctions],
    mode: ProfitMode,
) -> Vec<f64> {
    let mut out = vec![0.0; costs.len()];
    for (hour, prices) in committed.iter().zip(lmp) {
        for (i, cost) in costs.iter().enumerate() {
            let p = hour[i];
            out[i] += p * energy_payment(prices[i], rate, recovery, mode) - cost.production * p;
        }
    }
    out
}

pub fn expected_profit(
    committed: &[Vec<f64>],
    lmp: &[Vec<f64>],
    rate: f64,
    recovery: CostRecovery,
    costs: &[CostFunctions],
    mode: ProfitMode,
) -> f64 {
    expected_profit_by_unit(committed, lmp, rate, recovery, costs, mode)
        .iter()
        .sum()
}

fn check_probabilities(probabilities: &[f64]) -> Result<()> {
    let total: f64 = probabilities.iter().sum();
    if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0))
        || (total - 1.0).abs() > PROBABILITY_TOL
    {
        return Err(Error::Domain(format!(
            "scenario probabilities must be non-negative and sum to 1, got sum {total}"
        )));
    }
    Ok(())
}

/// Scenario-weighted profit of each unit from the power it actually sells at
/// the committed prices.
pub fn realized_profit_by_unit(
    realized: &[Vec<Vec<f64>>],
    probabilities: &[f64],
    lmp: &[Vec<f64>],
    rate: f64,
    recovery: CostRecovery,
    costs: &[CostFunctions],
    mode: ProfitMode,
) -> Result<Vec<f64>> {
    check_probabilities(probabilities)?;
    let mut out = vec![0.0; costs.len()];
    for (hour, prices) in realized.iter().zip(lmp) {
        if hour.len() != probabilities.len() {
            return Err(Error::Domain(format!(
                "{} realized scenarios but {} probabilities",
                hour.len(),
                probabilities.len()
            )));
        }
        for (scenario, &psi) in hour.iter().zip(probabilities) {
            for (i, cost) in costs.iter().enumerate() {
                let p = scenario[i];
                out[i] += psi
                    * (p * energy_payment(prices[i], rate, recovery, mode) - cost.production * p);
            }
        }
    }
    Ok(out)
}

pub fn realized_profit(
    realized: &[Vec<Vec<f64>>],
    probabilities: &[f64],
    lmp: &[Vec<f64>],
    rate: f64,
    recovery: CostRecovery,
    costs: &[CostFunctions],
    mode: ProfitMode,
) -> Result<f64> {
    Ok(
        realized_profit_by_unit(realized, probabilities, lmp, rate, recovery, costs, mode)?
            .iter()
            .sum(),
    )
}

/// Signed loss of profit from dispatching realizations instead of commitments.
pub fn deviation_cost(expected: f64, realized: f64) -> f64 {
    expected - realized
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewablePayment {
    pub revenue: f64,
    pub curtailed: f64,
    /// Payment per bus.
    pub per_bus: Vec<f64>,
}

/// Pays renewable output at committed prices for one hour. When output exceeds
/// total load, only the load is paid for, shared in proportion to output, and
/// the excess is curtailed.
pub fn curtail_and_pay_renewables(
    loads: &[f64],
    renewables: &[f64],
    lmp: &[f64],
) -> Result<RenewablePayment> {
    if loads.len() != renewables.len() || loads.len() != lmp.len() {
        return Err(Error::Domain(
            "loads, renewables and prices must share one length".into(),
        ));
    }
    let load: f64 = loads.iter().sum();
    let output: f64 = renewables.iter().sum();
    let (scale, curtailed) = if output > load {
        (load / output, output - load)
    } else {
        (1.0, 0.0)
    };
    let per_bus: Vec<f64> = renewables
        .iter()
        .zip(lmp)
        .map(|(r, price)| price * r * scale)
        .collect();
    Ok(RenewablePayment {
        revenue: per_bus.iter().sum(),
        curtailed,
        per_bus,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettlementReport {
    pub recovery_cost: f64,
    pub recovery_rate: f64,
    pub expected_profit: f64,
    pub realized_profit: f64,
    pub deviation_cost: f64,
    pub renewable_revenue: f64,
    pub curtailed_mwh: f64,
    pub expected_by_unit: Vec<f64>,
    pub realized_by_unit: Vec<f64>,
    /// `[hour][unit]`.
    pub indicators: Vec<Vec<bool>>,
    pub envelopes: Envelopes,
}

/// Inputs describing one cleared horizon.
#[derive(Debug, Clone, Copy)]
pub struct SettlementInput<'a> {
    pub specs: &'a [GeneratorSpec],
    pub costs: &'a [CostFunctions],
    /// `[hour][unit]`.
    pub committed: &'a [Vec<f64>],
    /// `[hour][bus]`.
    pub lmp: &'a [Vec<f64>],
    /// `[hour][scenario][unit]`.
    pub realized: &'a [Vec<Vec<f64>>],
    pub probabilities: &'a [f64],
    /// `[hour][scenario][bus]`.
    pub scenario_loads: &'a [Vec<Vec<f64>>],
    /// `[hour][scenario][bus]`.
    pub scenario_renewables: &'a [Vec<Vec<f64>>],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettlementOptions {
    pub recovery: CostRecovery,
    pub mode: ProfitMode,
    pub starts: StartRule,
}

impl Default for SettlementOptions {
    fn default() -> Self {
        Self {
            recovery: CostRecovery::Enabled,
            mode: ProfitMode::Literal,
            starts: StartRule::default(),
        }
    }
}

pub fn settle(input: SettlementInput<'_>, options: SettlementOptions) -> Result<SettlementReport> {
    let SettlementOptions {
        recovery,
        mode,
        starts,
    } = options;
    let envelopes = reserve_and_ramp_check(input.committed, input.realized, input.specs)?;
    let (h, rate) = recovery_rate(
        input.committed,
        &envelopes,
        input.specs,
        input.costs,
        recovery,
        starts,
    )?;
    let expected_by_unit = expected_profit_by_unit(
        input.committed,
        input.lmp,
        rate,
        recovery,
        input.costs,
        mode,
    );
    let realized_by_unit = realized_profit_by_unit(
        input.realized,
        input.probabilities,
        input.lmp,
        rate,
        recovery,
        input.costs,
        mode,
    )?;
    let expected: f64 = expected_by_unit.iter().sum();
    let realized: f64 = realized_by_unit.iter().sum();

    let mut renewable_revenue = 0.0;
    let mut curtailed = 0.0;
    for (t, prices) in input.lmp.iter().enumerate() {
        for (k, &psi) in input.probabilities.iter().enumerate() {
            let pay = curtail_and_pay_renewables(
                &input.scenario_loads[t][k],
                &input.scenario_renewables[t][k],
                prices,
            )?;
            renewable_revenue += psi * pay.revenue;
            curtailed += psi * pay.curtailed;
        }
    }

    Ok(SettlementReport {
        recovery_cost: h,
        recovery_rate: rate,
        expected_profit: expected,
        realized_profit: realized,
        deviation_cost: deviation_cost(expected, realized),
        renewable_revenue,
        curtailed_mwh: curtailed,
        expected_by_unit,
        realized_by_unit,
        indicators: commitment_indicators(input.committed),
        envelopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(rp_max: f64, ramp_max: f64) -> GeneratorSpec {
        GeneratorSpec {
            rp_max,
            ramp_max,
            ..GeneratorSpec::simple("g", 10.0, 0.0, 200.0)
        }
    }

    fn free() -> CostFunctions {
        CostFunctions::new(0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn exact_realization_needs_no_reserve() {
        let committed = vec![vec![100.0], vec![130.0]];
        let realized = vec![vec![vec![100.0]; 3], vec![vec![130.0]; 3]];
        let env = reserve_and_ramp_check(&committed, &realized, &[unit(50.0, 50.0)]).unwrap();
        assert_eq!(env.reserve, vec![vec![0.0], vec![0.0]]);
        assert_eq!(env.ramp, vec![vec![30.0], vec![0.0]]);
        assert!(env.violations.is_empty());
    }

    #[test]
    fn reserve_cap_violation() {
        let committed = vec![vec![100.0]];
        let realized = vec![vec![vec![90.0], vec![100.0]]];
        let env = reserve_and_ramp_check(&committed, &realized, &[unit(5.0, 500.0)]).unwrap();
        assert_eq!(env.reserve, vec![vec![10.0]]);
        assert_eq!(
            env.violations,
            vec![ScheduleViolation::ReserveCap {
                unit: 0,
                hour: 0,
                needed: 10.0,
                cap: 5.0
            }]
        );
    }

    #[test]
    fn ramp_violation_names_worst_pair() {
        let committed = vec![vec![100.0], vec![100.0]];
        let realized = vec![
            vec![vec![100.0], vec![90.0]],
            vec![vec![100.0], vec![120.0]],
        ];
        let env = reserve_and_ramp_check(&committed, &realized, &[unit(500.0, 20.0)]).unwrap();
        assert_eq!(env.ramp[0], vec![30.0]);
        assert!(env.violations.contains(&ScheduleViolation::RampCap {
            unit: 0,
            hour: 0,
            scenario: 1,
            next_scenario: 1,
            needed: 30.0,
            cap: 20.0
        }));
    }

    #[test]
    fn recovery_example() {
        let spec = GeneratorSpec {
            no_load_cost: 10.0,
            start_cost_hot: 100.0,
            start_cost_cold: 100.0,
            ..GeneratorSpec::simple("g", 10.0, 0.0, 200.0)
        };
        let committed = vec![vec![100.0], vec![100.0]];
        let realized = vec![vec![committed[0].clone()], vec![committed[1].clone()]];
        let env =
            reserve_and_ramp_check(&committed, &realized, std::slice::from_ref(&spec)).unwrap();
        let starts = StartRule::default();
        let (h, rate) = recovery_rate(
            &committed,
            &env,
            std::slice::from_ref(&spec),
            &[free()],
            CostRecovery::Enabled,
            starts,
        )
        .unwrap();
        assert_eq!(h, 120.0);
        assert_eq!(rate, 0.6);
        let (_, rate) = recovery_rate(
            &committed,
            &env,
            &[spec],
            &[free()],
            CostRecovery::Disabled,
            starts,
        )
        .unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn hot_start_after_short_outage() {
        let spec = GeneratorSpec {
            start_cost_hot: 5.0,
            start_cost_cold: 50.0,
            ..GeneratorSpec::simple("g", 10.0, 0.0, 200.0)
        };
        let committed = vec![
            vec![10.0],
            vec![0.0],
            vec![10.0],
            vec![0.0],
            vec![0.0],
            vec![10.0],
        ];
        let realized: Vec<_> = committed.iter().map(|h| vec![h.clone()]).collect();
        let env =
            reserve_and_ramp_check(&committed, &realized, std::slice::from_ref(&spec)).unwrap();
        let free_ramp = [free()];
        let (h, _) = recovery_rate(
            &committed,
            &env,
            &[spec],
            &free_ramp,
            CostRecovery::Disabled,
            StartRule::default(),
        )
        .unwrap();
        assert_eq!(h, 50.0 + 5.0 + 50.0);
    }

    #[test]
    fn never_started_unit_costs_nothing() {
        let spec = GeneratorSpec {
            no_load_cost: 10.0,
            start_cost_cold: 100.0,
            ..GeneratorSpec::simple("g", 10.0, 0.0, 200.0)
        };
        let committed = vec![vec![0.0], vec![0.0]];
        let realized = vec![vec![vec![0.0]], vec![vec![0.0]]];
        let env =
            reserve_and_ramp_check(&committed, &realized, std::slice::from_ref(&spec)).unwrap();
        let (h, rate) = recovery_rate(
            &committed,
            &env,
            &[spec],
            &[free()],
            CostRecovery::Enabled,
            StartRule::default(),
        )
        .unwrap();
        assert_eq!((h, rate), (0.0, 0.0));
    }

    #[test]
    fn undefined_rate_is_an_error() {
        let spec = GeneratorSpec::simple("g", 10.0, 0.0, 200.0);
        let committed = vec![vec![0.0]];
        let env = Envelopes {
            reserve: vec![vec![4.0]],
            ramp: vec![vec![0.0]],
            violations: vec![],
        };
        let costs = [CostFunctions::new(0.0, 1.0, 0.0).unwrap()];
        assert!(recovery_rate(
            &committed,
            &env,
            &[spec],
            &costs,
            CostRecovery::Enabled,
            StartRule::default()
        )
        .is_err());
    }

    #[test]
    fn expected_profit_examples() {
        let costs = [CostFunctions::new(7.37, 0.0, 0.0).unwrap()];
        let r = expected_profit(
            &[vec![100.0]],
            &[vec![20.0]],
            0.6,
            CostRecovery::Enabled,
            &costs,
            ProfitMode::Literal,
        );
        assert!((r - 1263.0).abs() < 1e-9);
        let zero = expected_profit(
            &[vec![0.0]],
            &[vec![20.0]],
            0.0,
            CostRecovery::Disabled,
            &costs,
            ProfitMode::Literal,
        );
        assert_eq!(zero, 0.0);
        let paid = expected_profit(
            &[vec![100.0]],
            &[vec![20.0]],
            0.6,
            CostRecovery::Enabled,
            &costs,
            ProfitMode::RecoveryPaid,
        );
        assert!((paid - 1323.0).abs() < 1e-9);
    }

    #[test]
    fn realized_profit_examples() {
        let costs = [CostFunctions::new(10.0, 0.0, 0.0).unwrap()];
        let realized = vec![vec![vec![100.0], vec![80.0]]];
        let r = realized_profit(
            &realized,
            &[0.5, 0.5],
            &[vec![20.0]],
            0.0,
            CostRecovery::Disabled,
            &costs,
            ProfitMode::Literal,
        )
        .unwrap();
        assert!((r - 900.0).abs() < 1e-12);
        assert!(realized_profit(
            &realized,
            &[0.5, 0.4],
            &[vec![20.0]],
            0.0,
            CostRecovery::Disabled,
            &costs,
            ProfitMode::Literal,
        )
        .is_err());
        let single = realized_profit(
            &realized,
            &[1.0, 0.0],
            &[vec![20.0]],
            0.0,
            CostRecovery::Disabled,
            &costs,
            ProfitMode::Literal,
        )
        .unwrap();
        assert_eq!(single, 1000.0);
    }

    #[test]
    fn deviation_is_signed() {
        assert_eq!(deviation_cost(1263.0, 1263.0), 0.0);
        assert_eq!(deviation_cost(1000.0, 900.0), 100.0);
        assert_eq!(deviation_cost(900.0, 1000.0), -100.0);
    }

    #[test]
    fn renewable_payment_examples() {
        let p = curtail_and_pay_renewables(&[100.0], &[120.0], &[20.0]).unwrap();
        assert!((p.revenue - 2000.0).abs() < 1e-9);
        assert!((p.curtailed - 20.0).abs() < 1e-12);

        let p = curtail_and_pay_renewables(&[100.0], &[80.0], &[20.0]).unwrap();
        assert_eq!((p.revenue, p.curtailed), (1600.0, 0.0));

        let p = curtail_and_pay_renewables(&[50.0, 50.0], &[30.0, 90.0], &[1.0, 1.0]).unwrap();
        assert!((p.per_bus[0] - 25.0).abs() < 1e-12);
        assert!((p.per_bus[1] - 75.0).abs() < 1e-12);
    }
}
