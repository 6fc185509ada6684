//! Empirical Value-at-Risk and Conditional Value-at-Risk on finite weighted samples.
//!
//! For a discrete random variable X with CDF F and confidence level α ∈ (0,1):
//!
//! ```text
//! VaR_α(X)  = min { z : F(z) ≥ α }
//! CVaR_α(X) = ∫ z dF^α(z),   F^α(z) = (F(z) − α) / (1 − α)  for z ≥ VaR_α(X), 0 below
//! ```
//!
//! On a finite sample the rescaled tail CDF puts weight `(F(VaR) − α)/(1 − α)` on the
//! atom at the VaR and `p/(1 − α)` on every atom above it. The same number is obtained
//! from the minimization form
//!
//! ```text
//! CVaR_α(X) = min_η { η + E[(X − η)^+] / (1 − α) }
//! ```
//!
//! whose objective is convex and piecewise linear with kinks at the sample values.
//! Both routes are exposed so they can be checked against each other.

use crate::error::{Error, Result};

/// Tolerance used when comparing cumulative probabilities against α, and when
/// validating that probabilities sum to one.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Confidence level α, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RiskLevel(f64);

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!(
                "risk level must lie in the open interval (0, 1), got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability mass of the upper tail, `1 − α`.
    pub fn tail_mass(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for RiskLevel {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

/// A finite distribution: distinct values in ascending order with strictly
/// positive probabilities that sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl EmpiricalSample {
    /// Builds a sample from `(value, probability)` pairs.
    ///
    /// Probabilities must be strictly positive and sum to one within
    /// [`PROBABILITY_TOL`]. Equal values are merged and the result is sorted.
    pub fn new<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let points: Vec<(f64, f64)> = points.into_iter().collect();
        let total = validate_points(&points)?;
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::Domain(format!(
                "probabilities must sum to 1 within {PROBABILITY_TOL:e}, got {total}"
            )));
        }
        Ok(Self::normalized(points, total))
    }

    /// Builds a sample from positive weights, rescaling them to sum to one.
    pub fn from_weights<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let points: Vec<(f64, f64)> = points.into_iter().collect();
        let total = validate_points(&points)?;
        Ok(Self::normalized(points, total))
    }

    /// Equally weighted sample over `values`.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sample needs at least one point".into()));
        }
        let p = 1.0 / values.len() as f64;
        Self::from_weights(values.iter().map(|&v| (v, p)))
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    fn normalized(mut points: Vec<(f64, f64)>, total: f64) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(points.len());
        let mut probs: Vec<f64> = Vec::with_capacity(points.len());
        for (v, p) in points {
            match values.last() {
                Some(&last) if last == v => *probs.last_mut().unwrap() += p,
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        for p in &mut probs {
            *p /= total;
        }
        Self { values, probs }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.points().map(|(v, p)| v * p).sum()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// The sample of `X + shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + shift).collect(),
            probs: self.probs.clone(),
        }
    }

    /// The sample of `factor · X` for `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            probs: self.probs.clone(),
        })
    }
}

fn validate_points(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Domain("sample needs at least one point".into()));
    }
    let mut total = 0.0;
    for &(v, p) in points {
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "sample value must be finite, got {v}"
            )));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Domain(format!(
                "sample probability must be strictly positive, got {p}"
            )));
        }
        total += p;
    }
    Ok(total)
}

/// Index of the smallest atom whose cumulative probability reaches α.
fn var_index(sample: &EmpiricalSample, alpha: RiskLevel) -> usize {
    let a = alpha.value();
    let mut cum = 0.0;
    for (j, &p) in sample.probs.iter().enumerate() {
        cum += p;
        if cum >= a - PROBABILITY_TOL {
            return j;
        }
    }
    sample.len() - 1
}

/// `min { z : F(z) ≥ α }`, exact on the sample atoms.
pub fn var(sample: &EmpiricalSample, alpha: RiskLevel) -> f64 {
    sample.values[var_index(sample, alpha)]
}

/// Tail expectation under the rescaled CDF `(F(z) − α)/(1 − α)`.
pub fn cvar_direct(sample: &EmpiricalSample, alpha: RiskLevel) -> f64 {
    let a = alpha.value();
    let base = var(sample, alpha);
    let mut below = 0.0;
    let mut mass = 0.0;
    let mut excess = 0.0;
    for (v, p) in sample.points() {
        let above = below + p;
        // portion of this atom lying above the α level
        let w = (above - below.max(a)).max(0.0);
        mass += w;
        excess += w * (v - base);
        below = above;
    }
    if mass <= 0.0 {
        // α within rounding of 1: the tail collapses onto the top atom
        return sample.max();
    }
    // measured from the VaR so that a constant is reproduced exactly
    base + excess / mass
}

/// Rockafellar–Uryasev objective `η + E[(X − η)^+]/(1 − α)`.
pub fn rockafellar_objective(sample: &EmpiricalSample, alpha: RiskLevel, eta: f64) -> f64 {
    let excess: f64 = sample.points().map(|(v, p)| p * (v - eta).max(0.0)).sum();
    eta + excess / alpha.tail_mass()
}

/// Minimizer and minimum of [`rockafellar_objective`].
///
/// The objective is convex and piecewise linear with kinks at the sample values,
/// so the minimum is attained at one of them. Every kink is scanned with suffix
/// sums; the smallest minimizing value is returned together with the objective
/// re-evaluated directly at it.
pub fn rockafellar_minimizer(sample: &EmpiricalSample, alpha: RiskLevel) -> (f64, f64) {
    let n = sample.len();
    let tail = alpha.tail_mass();
    let mut suffix_mass = 0.0;
    let mut suffix_moment = 0.0;
    let mut best = (f64::INFINITY, sample.max());
    for j in (0..n).rev() {
        let eta = sample.values[j];
        let obj = eta + (suffix_moment - eta * suffix_mass) / tail;
        if obj <= best.0 {
            best = (obj, eta);
        }
        suffix_mass += sample.probs[j];
        suffix_moment += sample.probs[j] * eta;
    }
    let eta = best.1;
    (eta, rockafellar_objective(sample, alpha, eta))
}

pub fn cvar_rockafellar(sample: &EmpiricalSample, alpha: RiskLevel) -> f64 {
    rockafellar_minimizer(sample, alpha).1
}

/// Residual shortfall risk left after committing `total_committed` MW:
/// `max(0, CVaR_α(net load) − committed)`. Zero exactly when the commitment
/// meets the CVaR requirement.
pub fn committed_requirement(
    aggregate_net_load: &EmpiricalSample,
    alpha: RiskLevel,
    total_committed: f64,
) -> Result<f64> {
    if !(total_committed.is_finite() && total_committed >= 0.0) {
        return Err(Error::Domain(format!(
            "committed power must be non-negative, got {total_committed}"
        )));
    }
    Ok((cvar_direct(aggregate_net_load, alpha) - total_committed).max(0.0))
}

/// `Σ_i CVaR(X_i) − CVaR(Σ_i X_i)`, non-negative by subadditivity when `joint`
/// is the distribution of the scenario-wise sum of the per-bus variables.
pub fn subadditivity_gap(
    per_bus: &[EmpiricalSample],
    joint: &EmpiricalSample,
    alpha: RiskLevel,
) -> f64 {
    let marginal: f64 = per_bus.iter().map(|s| cvar_direct(s, alpha)).sum();
    marginal - cvar_direct(joint, alpha)
}
