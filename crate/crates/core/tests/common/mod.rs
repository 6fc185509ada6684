//! Independent oracles and random instance generators shared by the
//! integration suites. Nothing here calls the closed forms under test.

#![allow(dead_code)]

use gridclear::merit::{Fleet, GeneratorSpec};
use gridclear::risk::EmpiricalSample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tail expectation by sorting raw points and peeling probability mass from
/// the top until `1 − α` has been collected.
pub fn tail_expectation(points: &[(f64, f64)], alpha: f64) -> f64 {
    let total: f64 = points.iter().map(|p| p.1).sum();
    let mut sorted: Vec<(f64, f64)> = points.iter().map(|&(v, p)| (v, p / total)).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut need = 1.0 - alpha;
    let mut acc = 0.0;
    for (v, p) in sorted {
        if need <= 0.0 {
            break;
        }
        let take = p.min(need);
        acc += take * v;
        need -= take;
    }
    acc / (1.0 - alpha)
}

fn ru_objective(points: &[(f64, f64)], alpha: f64, eta: f64) -> f64 {
    let total: f64 = points.iter().map(|p| p.1).sum();
    eta + points
        .iter()
        .map(|&(v, p)| p / total * (v - eta).max(0.0))
        .sum::<f64>()
        / (1.0 - alpha)
}

/// Minimizes the Rockafellar–Uryasev objective on a uniform grid of step
/// `1e-4 · range`, then refines by ternary search inside the best cell.
/// Returns `(argmin, min)`.
pub fn grid_rockafellar(points: &[(f64, f64)], alpha: f64) -> (f64, f64) {
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return (lo, ru_objective(points, alpha, lo));
    }
    let steps = 10_000usize;
    let step = (hi - lo) / steps as f64;
    let mut best = (lo, f64::INFINITY);
    for s in 0..=steps {
        let eta = lo + step * s as f64;
        let v = ru_objective(points, alpha, eta);
        if v < best.1 {
            best = (eta, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if ru_objective(points, alpha, m1) <= ru_objective(points, alpha, m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let eta = 0.5 * (a + b);
    let v = ru_objective(points, alpha, eta);
    if v < best.1 {
        (eta, v)
    } else {
        best
    }
}

/// Random points with up to `max_atoms` atoms, values drawn from a small
/// integer lattice so ties occur.
pub fn random_points<R: Rng>(rng: &mut R, max_atoms: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(1..=max_atoms);
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let v = if rng.random_bool(0.3) {
                rng.random_range(-20i32..=20) as f64
            } else {
                rng.random_range(-500.0..500.0)
            };
            (v, rng.random_range(0.01..1.0))
        })
        .collect();
    let total: f64 = raw.iter().map(|p| p.1).sum();
    raw.into_iter().map(|(v, p)| (v, p / total)).collect()
}

pub fn sample_of(points: &[(f64, f64)]) -> EmpiricalSample {
    EmpiricalSample::from_weights(points.iter().copied()).unwrap()
}

/// Cheapest dispatch with every unit off, at its minimum, at its maximum, or
/// (for at most one unit) anywhere in between. Returns `(cost, allocation)`.
pub fn commitment_oracle(fleet: &Fleet, demand: f64) -> Option<(f64, Vec<f64>)> {
    let units = fleet.units();
    let n = units.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let patterns = 4usize.pow(n as u32);
    'pattern: for code in 0..patterns {
        let mut alloc = vec![0.0; n];
        let mut free = None;
        let mut c = code;
        for (i, u) in units.iter().enumerate() {
            match c % 4 {
                0 => alloc[i] = 0.0,
                1 => alloc[i] = u.p_min,
                2 => alloc[i] = u.p_max,
                _ => {
                    if free.is_some() {
                        continue 'pattern;
                    }
                    free = Some(i);
                }
            }
            c /= 4;
        }
        let fixed: f64 = alloc.iter().sum();
        match free {
            Some(i) => {
                let r = demand - fixed;
                if r < units[i].p_min - 1e-9 || r > units[i].p_max + 1e-9 {
                    continue;
                }
                alloc[i] = r.clamp(units[i].p_min, units[i].p_max);
            }
            None => {
                if (fixed - demand).abs() > 1e-9 {
                    continue;
                }
            }
        }
        let cost = fleet.offer_cost(&alloc);
        if best.as_ref().is_none_or(|b| cost < b.0 - 1e-12) {
            best = Some((cost, alloc));
        }
    }
    best
}

/// Random fleet of 1..=4 units with strictly increasing asks whose largest
/// minimum output stays below every operating range.
pub fn random_fleet<R: Rng>(rng: &mut R) -> Fleet {
    let n = rng.random_range(1..=4);
    let p_max: Vec<f64> = (0..n).map(|_| rng.random_range(20.0..200.0)).collect();
    let smallest = p_max.iter().copied().fold(f64::INFINITY, f64::min);
    let mut price = rng.random_range(1.0..20.0);
    let units = (0..n)
        .map(|i| {
            let p_min = if rng.random_bool(0.4) {
                0.0
            } else {
                rng.random_range(0.0..0.3 * smallest)
            };
            price += rng.random_range(0.5..50.0);
            GeneratorSpec::simple(format!("u{i}"), price, p_min, p_max[i])
        })
        .collect();
    Fleet::new(units, 0.0).unwrap()
}

/// Demand drawn between the smallest minimum output and total capacity.
pub fn random_demand<R: Rng>(rng: &mut R, fleet: &Fleet) -> f64 {
    let lo = fleet
        .units()
        .iter()
        .map(|u| u.p_min)
        .fold(f64::INFINITY, f64::min);
    rng.random_range(lo..=fleet.total_capacity())
}

/// A radial instance with non-negative net loads and enough capacity at
/// every bus for the feeder beyond it.
#[derive(Debug, Clone)]
pub struct RadialInstance {
    pub loads: Vec<f64>,
    pub renewables: Vec<f64>,
    pub units: Vec<GeneratorSpec>,
    pub line_limit: f64,
}

pub fn random_radial<R: Rng>(rng: &mut R, max_buses: usize, integer: bool) -> RadialInstance {
    let n = rng.random_range(1..=max_buses);
    let draw = |rng: &mut R, lo: f64, hi: f64| {
        let v = rng.random_range(lo..hi);
        if integer {
            v.round()
        } else {
            v
        }
    };
    let loads: Vec<f64> = (0..n).map(|_| draw(rng, 0.0, 70.0)).collect();
    let renewables: Vec<f64> = loads
        .iter()
        .map(|&l| {
            if rng.random_bool(0.5) {
                draw(rng, 0.0, l.max(1.0)).min(l)
            } else {
                0.0
            }
        })
        .collect();
    let mut suffix: Vec<f64> = loads.iter().zip(&renewables).map(|(l, r)| l - r).collect();
    for i in (0..n.saturating_sub(1)).rev() {
        suffix[i] += suffix[i + 1];
    }
    let mut price = rng.random_range(1.0..20.0);
    let units = (0..n)
        .map(|i| {
            price += rng.random_range(1.0..40.0);
            let p_max = suffix[i] + draw(rng, 0.0, 40.0);
            GeneratorSpec::simple(format!("b{i}"), price, 0.0, p_max)
        })
        .collect();
    let line_limit = if rng.random_bool(0.2) {
        f64::INFINITY
    } else {
        draw(rng, 1.0, 120.0).max(1.0)
    };
    RadialInstance {
        loads,
        renewables,
        units,
        line_limit,
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Some strictly interior value lies below both endpoints.
pub fn has_interior_minimum(v: &[f64]) -> bool {
    v.len() >= 3 && {
        let ends = v[0].min(v[v.len() - 1]);
        v[1..v.len() - 1].iter().any(|&x| x < ends)
    }
}

pub fn non_decreasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - tol)
}
