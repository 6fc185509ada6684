//! Single-bus merit-order commitment with a closed-form clearing price.
//!
//! Units are sorted by strictly increasing ask price. The cheapest units
//! saturate first; the unit that absorbs the residual demand sets the price.
//! When the residual falls below the marginal unit's minimum output, the
//! previous unit backs down to make room and becomes price-setting.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance, in MW, for bound and balance comparisons.
pub const POWER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub name: String,
    /// $/MWh offered to the market.
    pub ask_price: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Upper bound on the down-reserve a unit may be asked to hold, MW.
    pub rp_max: f64,
    /// Ramp limit, MW/h.
    pub ramp_max: f64,
    pub start_cost_hot: f64,
    pub start_cost_cold: f64,
    /// $/h while online.
    pub no_load_cost: f64,
    /// Slope of the linear production cost, $/MWh.
    pub production_cost_rate: f64,
}

impl GeneratorSpec {
    /// Unit with the given price and bounds; reserve and ramp caps default to
    /// `p_max`, start and no-load costs to zero, production cost to the ask.
    pub fn simple(name: impl Into<String>, ask_price: f64, p_min: f64, p_max: f64) -> Self {
        Self {
            name: name.into(),
            ask_price,
            p_min,
            p_max,
            rp_max: p_max,
            ramp_max: p_max,
            start_cost_hot: 0.0,
            start_cost_cold: 0.0,
            no_load_cost: 0.0,
            production_cost_rate: ask_price,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("ask_price", self.ask_price),
            ("p_min", self.p_min),
            ("p_max", self.p_max),
            ("rp_max", self.rp_max),
            ("ramp_max", self.ramp_max),
            ("hot_start", self.start_cost_hot),
            ("cold_start", self.start_cost_cold),
            ("no_load_cost", self.no_load_cost),
            ("production_cost_rate", self.production_cost_rate),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "generator {}: {field} must be a non-negative number, got {v}",
                    self.name
                )));
            }
        }
        if self.p_min > self.p_max {
            return Err(Error::Config(format!(
                "generator {}: p_min {} exceeds p_max {}",
                self.name, self.p_min, self.p_max
            )));
        }
        Ok(())
    }
}

/// Non-renewable units in merit order plus the renewable ask price.
#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    units: Vec<GeneratorSpec>,
    renewable_price: f64,
}

impl Fleet {
    /// Rejects empty fleets, invalid units, and prices that are not strictly
    /// increasing above the renewable price.
    pub fn new(units: Vec<GeneratorSpec>, renewable_price: f64) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::Config("fleet has no generators".into()));
        }
        for u in &units {
            u.validate()?;
        }
        if !(renewable_price.is_finite() && renewable_price >= 0.0) {
            return Err(Error::Config(format!(
                "renewable price must be non-negative, got {renewable_price}"
            )));
        }
        if renewable_price >= units[0].ask_price {
            return Err(Error::Assumption(format!(
                "renewable price {renewable_price} must be below the cheapest ask {}",
                units[0].ask_price
            )));
        }
        for w in units.windows(2) {
            if w[1].ask_price <= w[0].ask_price {
                return Err(Error::Assumption(format!(
                    "ask prices must be strictly increasing: {} ({}) then {} ({})",
                    w[0].name, w[0].ask_price, w[1].name, w[1].ask_price
                )));
            }
        }
        Ok(Self {
            units,
            renewable_price,
        })
    }

    /// Sorts units by ask price before validating.
    pub fn from_unsorted(mut units: Vec<GeneratorSpec>, renewable_price: f64) -> Result<Self> {
        units.sort_by(|a, b| a.ask_price.total_cmp(&b.ask_price));
        Self::new(units, renewable_price)
    }

    /// The seven-unit reference fleet.
    pub fn reference() -> Self {
        const PRICES: [f64; 7] = [7.37, 22.23, 31.55, 176.05, 180.75, 241.91, 315.81];
        const P_MAX: [f64; 7] = [400.0, 155.0, 76.0, 197.0, 100.0, 12.0, 20.0];
        const HOT: [f64; 7] = [0.0, 2258.6, 1412.5, 14182.5, 10357.8, 1244.4, 109.5];
        const COLD: [f64; 7] = [0.0, 616.2, 1412.5, 8106.9, 4575.0, 695.4, 109.5];
        let units = (0..7)
            .map(|i| GeneratorSpec {
                name: format!("G{}", i + 1),
                ask_price: PRICES[i],
                p_min: 0.0,
                p_max: P_MAX[i],
                rp_max: P_MAX[i],
                ramp_max: P_MAX[i],
                start_cost_hot: HOT[i],
                start_cost_cold: COLD[i],
                no_load_cost: 0.0,
                production_cost_rate: PRICES[i],
            })
            .collect();
        Self::new(units, 0.0).expect("reference fleet is valid")
    }

    pub fn units(&self) -> &[GeneratorSpec] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn renewable_price(&self) -> f64 {
        self.renewable_price
    }

    pub fn total_capacity(&self) -> f64 {
        self.units.iter().map(|u| u.p_max).sum()
    }

    pub fn asks(&self) -> Vec<f64> {
        self.units.iter().map(|u| u.ask_price).collect()
    }

    /// Cost `Σ π_i p_i` of an allocation at ask prices.
    pub fn offer_cost(&self, allocation: &[f64]) -> f64 {
        self.units
            .iter()
            .zip(allocation)
            .map(|(u, p)| u.ask_price * p)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionViolation {
    DemandBelowMinimum {
        demand: f64,
        smallest_p_min: f64,
    },
    DemandAboveCapacity {
        demand: f64,
        capacity: f64,
    },
    /// The largest minimum output must stay below every unit's operating range.
    MinimumTooLarge {
        unit: usize,
        p_min: f64,
        narrowest_unit: usize,
        range: f64,
    },
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DemandBelowMinimum {
                demand,
                smallest_p_min,
            } => write!(
                f,
                "demand {demand} is below the smallest p_min {smallest_p_min}"
            ),
            Self::DemandAboveCapacity { demand, capacity } => {
                write!(f, "demand {demand} exceeds total capacity {capacity}")
            }
            Self::MinimumTooLarge {
                unit,
                p_min,
                narrowest_unit,
                range,
            } => write!(
                f,
                "p_min {p_min} of unit {} is not below the range {range} of unit {}",
                unit + 1,
                narrowest_unit + 1
            ),
        }
    }
}

/// Checks demand against fleet bounds and the minimum-output spacing condition.
pub fn validate_assumptions(fleet: &Fleet, demand: f64) -> Vec<AssumptionViolation> {
    let mut out = Vec::new();
    let units = fleet.units();
    let smallest_p_min = units.iter().map(|u| u.p_min).fold(f64::INFINITY, f64::min);
    let capacity = fleet.total_capacity();
    if demand < smallest_p_min {
        out.push(AssumptionViolation::DemandBelowMinimum {
            demand,
            smallest_p_min,
        });
    }
    if demand > capacity + POWER_TOL {
        out.push(AssumptionViolation::DemandAboveCapacity { demand, capacity });
    }
    let (unit, p_min) = units
        .iter()
        .enumerate()
        .map(|(i, u)| (i, u.p_min))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let (narrowest_unit, range) = units
        .iter()
        .enumerate()
        .map(|(i, u)| (i, u.p_max - u.p_min))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if p_min >= range {
        out.push(AssumptionViolation::MinimumTooLarge {
            unit,
            p_min,
            narrowest_unit,
            range,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Residual demand fits inside the marginal unit's range.
    Interior,
    /// Residual is below the marginal unit's minimum; the previous unit backs down.
    BelowPmin,
    /// Demand is below the first unit's minimum; one unit serves alone.
    SmallDemand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchResult {
    pub committed: Vec<f64>,
    pub price: f64,
    /// Multiplier of the upper output bound, per unit.
    pub mu_upper: Vec<f64>,
    /// Multiplier of the lower output bound, per unit.
    pub mu_lower: Vec<f64>,
    /// Whether the unit participates in the dispatch. Units at zero with a
    /// positive minimum are decommitted and carry no bound constraints.
    pub online: Vec<bool>,
    pub regime: Regime,
    /// Zero-based index of the price-setting unit.
    pub marginal: usize,
}

impl DispatchResult {
    pub fn total(&self) -> f64 {
        self.committed.iter().sum()
    }
}

/// Closed-form commitment of `demand` MW and its clearing price.
pub fn commit(fleet: &Fleet, demand: f64) -> Result<DispatchResult> {
    if !demand.is_finite() {
        return Err(Error::Domain(format!(
            "demand must be finite, got {demand}"
        )));
    }
    let violations = validate_assumptions(fleet, demand);
    if let Some(v) = violations.iter().find(|v| {
        matches!(
            v,
            AssumptionViolation::DemandBelowMinimum { .. }
                | AssumptionViolation::DemandAboveCapacity { .. }
        )
    }) {
        return Err(Error::Infeasible(format!(
            "{v}; fleet bounds [{}, {}]",
            fleet
                .units()
                .iter()
                .map(|u| u.p_min)
                .fold(f64::INFINITY, f64::min),
            fleet.total_capacity()
        )));
    }
    let units = fleet.units();
    let n = units.len();
    let demand = demand.min(fleet.total_capacity());

    // first unit whose cumulative capacity covers the demand
    let mut before = 0.0;
    let mut k = n - 1;
    for (i, u) in units.iter().enumerate() {
        if demand <= before + u.p_max {
            k = i;
            break;
        }
        before += u.p_max;
    }
    let residual = demand - before;

    let mut committed = vec![0.0; n];
    let (regime, marginal) = if residual >= units[k].p_min {
        for (c, u) in committed.iter_mut().zip(units).take(k) {
            *c = u.p_max;
        }
        committed[k] = residual;
        (Regime::Interior, k)
    } else if k >= 1 {
        for (c, u) in committed.iter_mut().zip(units).take(k - 1) {
            *c = u.p_max;
        }
        let head: f64 = units[..k - 1].iter().map(|u| u.p_max).sum();
        committed[k - 1] = demand - head - units[k].p_min;
        committed[k] = units[k].p_min;
        (Regime::BelowPmin, k - 1)
    } else {
        let alone = units
            .iter()
            .position(|u| u.p_min <= demand && demand < u.p_max)
            .or_else(|| {
                units
                    .iter()
                    .position(|u| u.p_min <= demand && demand <= u.p_max)
            })
            .ok_or_else(|| {
                Error::Infeasible(format!("no single unit can serve demand {demand}"))
            })?;
        committed[alone] = demand;
        (Regime::SmallDemand, alone)
    };

    for (i, (u, &p)) in units.iter().zip(&committed).enumerate() {
        if p < u.p_min - POWER_TOL && p != 0.0 || p > u.p_max + POWER_TOL {
            return Err(Error::Infeasible(format!(
                "unit {} would run at {p} outside [{}, {}]",
                i + 1,
                u.p_min,
                u.p_max
            )));
        }
    }

    let price = units[marginal].ask_price;
    let online: Vec<bool> = units
        .iter()
        .zip(&committed)
        .map(|(u, &p)| p > 0.0 || u.p_min == 0.0)
        .collect();
    let (mu_upper, mu_lower) = bound_multipliers(fleet, &committed, &online, price);
    Ok(DispatchResult {
        committed,
        price,
        mu_upper,
        mu_lower,
        online,
        regime,
        marginal,
    })
}

/// Multipliers making `π − λ + μ − μ̄ = 0` hold with the active bound.
fn bound_multipliers(
    fleet: &Fleet,
    committed: &[f64],
    online: &[bool],
    price: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = committed.len();
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    for (i, u) in fleet.units().iter().enumerate() {
        if !online[i] {
            continue;
        }
        let p = committed[i];
        let at_max = (p - u.p_max).abs() <= POWER_TOL;
        let at_min = (p - u.p_min).abs() <= POWER_TOL;
        let gap = price - u.ask_price;
        match (at_min, at_max) {
            (false, true) => upper[i] = gap,
            (true, false) => lower[i] = -gap,
            (true, true) if gap >= 0.0 => upper[i] = gap,
            (true, true) => lower[i] = -gap,
            (false, false) => {}
        }
    }
    (upper, lower)
}

/// Whether backing down unit `k − 1` (zero-based `k`) to make room for unit `k`
/// at its minimum keeps unit `k − 1` strictly inside its range.
///
/// Requires `k ≥ 1` and `0 < demand − Σ_{i<k} p_max < p_min_k`.
pub fn lemma1_feasibility(fleet: &Fleet, demand: f64, k: usize) -> Result<bool> {
    let units = fleet.units();
    if k == 0 || k >= units.len() {
        return Err(Error::Domain(format!(
            "marginal index must be in 1..{}, got {k}",
            units.len()
        )));
    }
    let before: f64 = units[..k].iter().map(|u| u.p_max).sum();
    let residual = demand - before;
    if !(residual > 0.0 && residual < units[k].p_min) {
        return Err(Error::Domain(format!(
            "residual {residual} must lie strictly between 0 and p_min {} of unit {}",
            units[k].p_min,
            k + 1
        )));
    }
    let head: f64 = units[..k - 1].iter().map(|u| u.p_max).sum();
    let backed_down = demand - head - units[k].p_min;
    let prev = &units[k - 1];
    Ok(prev.p_min < backed_down && backed_down < prev.p_max)
}

/// Largest absolute residual per group of optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktReport {
    pub stationarity: f64,
    pub balance: f64,
    pub feasibility: f64,
    pub complementarity: f64,
    pub sign: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        [
            self.stationarity,
            self.balance,
            self.feasibility,
            self.complementarity,
            self.sign,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Residuals of the single-bus dispatch optimality conditions. Offline units
/// only need to sit at zero.
pub fn kkt_residuals_p2(fleet: &Fleet, result: &DispatchResult, demand: f64) -> KktReport {
    let mut r = KktReport {
        balance: (result.total() - demand).abs(),
        ..KktReport::default()
    };
    let lambda = result.price;
    for (i, u) in fleet.units().iter().enumerate() {
        let p = result.committed[i];
        let (mu, mu_bar) = (result.mu_upper[i], result.mu_lower[i]);
        if !result.online[i] {
            r.feasibility = r.feasibility.max(p.abs());
            continue;
        }
        r.stationarity = r
            .stationarity
            .max((u.ask_price - lambda + mu - mu_bar).abs());
        r.feasibility = r.feasibility.max((p - u.p_max).max(u.p_min - p).max(0.0));
        r.complementarity = r
            .complementarity
            .max((mu * (p - u.p_max)).abs())
            .max((mu_bar * (u.p_min - p)).abs());
        r.sign = r.sign.max((-mu).max(-mu_bar).max(0.0));
    }
    r
}
