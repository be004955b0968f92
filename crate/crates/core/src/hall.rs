//! Generalized Hall conditions.
//!
//! On inclusion-free convex instances it is enough to test intervals: item
//! intervals for Max-Min (value of the interval against the demand of the
//! agents living entirely inside it) and machine intervals for Min-Max (work
//! of the jobs whose machine set lies inside the interval against the
//! allowable load of those machines). A subset-enumeration oracle is provided
//! for cross-checking at small sizes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{ConvexInstance, Mode};
use crate::value::{self, Value};

/// A violated interval inequality. Indices are 0-based and inclusive.
///
/// Max-Min: `[first, last]` is an item interval, `lhs` its value and `rhs`
/// the enclosed demand, with `lhs < rhs`. Min-Max: `[first, last]` is an
/// interval of machines in lexicographic order, `lhs` the enclosed work and
/// `rhs` the allowable load, with `lhs > rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallWitness {
    pub first: usize,
    pub last: usize,
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallVerdict {
    Ok,
    Violated(HallWitness),
}

impl HallVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, HallVerdict::Ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetVerdict {
    Ok,
    /// A violating set of minimum cardinality: agent indices (Max-Min) or job
    /// indices (Min-Max), in input order.
    Violated(BTreeSet<usize>),
}

impl SubsetVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, SubsetVerdict::Ok)
    }
}

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Every violating item interval, ordered by `(first, last)`.
pub fn maxmin_violations(inst: &ConvexInstance, demands: &[Value]) -> Vec<HallWitness> {
    assert_eq!(demands.len(), inst.n());
    let m = inst.m();
    let mut prefix = vec![value::zero(); m + 1];
    for (i, it) in inst.items.iter().enumerate() {
        prefix[i + 1] = &prefix[i] + &it.value;
    }
    let mut out = Vec::new();
    for first in 0..m {
        // demand of agents starting at or after `first`, bucketed by last item
        let mut ending = vec![value::zero(); m];
        for (a, d) in inst.agents.iter().zip(demands) {
            if a.first >= first && a.last < m {
                ending[a.last] += d;
            }
        }
        let mut demand = value::zero();
        for (last, add) in ending.iter().enumerate().skip(first) {
            demand += add;
            let val = &prefix[last + 1] - &prefix[first];
            if val < demand {
                out.push(HallWitness {
                    first,
                    last,
                    lhs: val,
                    rhs: demand.clone(),
                });
            }
        }
    }
    out
}

pub fn check_hall_maxmin(inst: &ConvexInstance, demands: &[Value]) -> HallVerdict {
    match maxmin_violations(inst, demands).into_iter().next() {
        Some(w) => HallVerdict::Violated(w),
        None => HallVerdict::Ok,
    }
}

/// Lexicographic machine order and, per job, its machine range in that order.
pub type JobRanges = (Vec<usize>, Vec<(usize, usize)>);

/// Machine ranges `(lo, hi)` (positions in lexicographic machine order) of
/// every job, or an error if some job's machine set has a hole or is empty.
pub fn job_machine_ranges(inst: &ConvexInstance) -> Result<JobRanges> {
    let order = inst.lexicographic_order();
    let mut ranges = Vec::with_capacity(inst.m());
    for (i, job) in inst.items.iter().enumerate() {
        let positions: Vec<usize> = order
            .iter()
            .enumerate()
            .filter(|(_, &a)| inst.agents[a].covers(i))
            .map(|(p, _)| p)
            .collect();
        let contiguous = positions.windows(2).all(|w| w[1] == w[0] + 1);
        match (positions.first(), positions.last()) {
            (Some(&lo), Some(&hi)) if contiguous => ranges.push((lo, hi)),
            _ => {
                return Err(Error::NonIntervalJob {
                    job: job.id.clone(),
                })
            }
        }
    }
    Ok((order, ranges))
}

/// Every violating machine interval, ordered by `(first, last)`. `loads` is
/// indexed like `inst.agents`.
pub fn minmax_violations(inst: &ConvexInstance, loads: &[Value]) -> Result<Vec<HallWitness>> {
    assert_eq!(loads.len(), inst.n());
    let (order, ranges) = job_machine_ranges(inst)?;
    let machines = order.len();
    let mut cap_prefix = vec![value::zero(); machines + 1];
    for (p, &a) in order.iter().enumerate() {
        cap_prefix[p + 1] = &cap_prefix[p] + &loads[a];
    }
    let mut out = Vec::new();
    for first in 0..machines {
        let mut ending = vec![value::zero(); machines];
        for (job, &(lo, hi)) in inst.items.iter().zip(&ranges) {
            if lo >= first {
                ending[hi] += &job.value;
            }
        }
        let mut work = value::zero();
        for (last, add) in ending.iter().enumerate().skip(first) {
            work += add;
            let cap = &cap_prefix[last + 1] - &cap_prefix[first];
            if work > cap {
                out.push(HallWitness {
                    first,
                    last,
                    lhs: work.clone(),
                    rhs: cap,
                });
            }
        }
    }
    Ok(out)
}

pub fn check_hall_minmax(inst: &ConvexInstance, loads: &[Value]) -> Result<HallVerdict> {
    Ok(match minmax_violations(inst, loads)?.into_iter().next() {
        Some(w) => HallVerdict::Violated(w),
        None => HallVerdict::Ok,
    })
}

/// Hall check in the instance's own mode, using the per-agent demand field.
pub fn check_hall(inst: &ConvexInstance) -> Result<HallVerdict> {
    let demands: Vec<Value> = inst.agents.iter().map(|a| a.demand.clone()).collect();
    match inst.mode {
        Mode::MaxMin => Ok(check_hall_maxmin(inst, &demands)),
        Mode::MinMax => check_hall_minmax(inst, &demands),
    }
}

/// Checks Hall's inequality over every nonempty subset of agents (Max-Min) or
/// jobs (Min-Max).
pub fn check_hall_bruteforce(
    inst: &ConvexInstance,
    demands: &[Value],
    mode: Mode,
) -> Result<SubsetVerdict> {
    assert_eq!(demands.len(), inst.n());
    let size = match mode {
        Mode::MaxMin => inst.n(),
        Mode::MinMax => inst.m(),
    };
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "{size} elements, subset oracle limit is {BRUTE_FORCE_LIMIT}"
        )));
    }
    let mut best: Option<(u32, u32)> = None;
    for mask in 1u32..(1u32 << size) {
        let violated = match mode {
            Mode::MaxMin => {
                let mut covered = vec![false; inst.m()];
                let mut demand = value::zero();
                for (j, a) in inst.agents.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        demand += &demands[j];
                        for c in covered.iter_mut().take(a.last + 1).skip(a.first) {
                            *c = true;
                        }
                    }
                }
                let val = value::sum(
                    inst.items
                        .iter()
                        .zip(&covered)
                        .filter(|(_, c)| **c)
                        .map(|(it, _)| &it.value),
                );
                val < demand
            }
            Mode::MinMax => {
                let mut work = value::zero();
                let mut machines = vec![false; inst.n()];
                for (i, job) in inst.items.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        work += &job.value;
                        for (a, agent) in inst.agents.iter().enumerate() {
                            if agent.covers(i) {
                                machines[a] = true;
                            }
                        }
                    }
                }
                let cap = value::sum(
                    demands
                        .iter()
                        .zip(&machines)
                        .filter(|(_, on)| **on)
                        .map(|(d, _)| d),
                );
                work > cap
            }
        };
        if violated {
            let key = (mask.count_ones(), mask);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    Ok(match best {
        None => SubsetVerdict::Ok,
        Some((_, mask)) => {
            SubsetVerdict::Violated((0..size).filter(|&e| mask & (1 << e) != 0).collect())
        }
    })
}

/// Agents (input indices) whose whole interval lies in `[first, last]`.
pub fn agents_within(inst: &ConvexInstance, first: usize, last: usize) -> BTreeSet<usize> {
    inst.agents
        .iter()
        .enumerate()
        .filter(|(_, a)| first <= a.first && a.last <= last)
        .map(|(j, _)| j)
        .collect()
}

/// Jobs whose machine range lies in the lexicographic machine interval `[first, last]`.
pub fn jobs_within(inst: &ConvexInstance, first: usize, last: usize) -> Result<BTreeSet<usize>> {
    let (_, ranges) = job_machine_ranges(inst)?;
    Ok(ranges
        .iter()
        .enumerate()
        .filter(|(_, &(lo, hi))| first <= lo && hi <= last)
        .map(|(i, _)| i)
        .collect())
}
