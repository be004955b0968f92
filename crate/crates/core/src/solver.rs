//! Scaling by a guess `t`, the decision procedure, and binary search over `t`.

use std::collections::BTreeSet;

use crate::assignment::Assignment;
use crate::dp::{self, DPTable};
use crate::error::{Error, Result};
use crate::instance::{Canonical, ConvexInstance, Mode};
use crate::rounding::{round_instance, RoundingScheme};
use crate::value::{self, Value};

/// Hard cap on decision calls per binary search.
pub const MAX_PROBES: usize = 128;

/// Divides every value by `t`. Max-Min clamps values above `t` first;
/// Min-Max returns `None` when some job alone exceeds `t`.
pub fn scale(inst: &ConvexInstance, t: &Value) -> Result<Option<ConvexInstance>> {
    if !value::is_positive(t) {
        return Err(Error::NonPositiveGuess);
    }
    match inst.mode {
        Mode::MaxMin => Ok(Some(inst.map_values(|v| v.min(t).clone() / t))),
        Mode::MinMax => {
            if inst.items.iter().any(|it| it.value > *t) {
                Ok(None)
            } else {
                Ok(Some(inst.map_values(|v| v / t)))
            }
        }
    }
}

/// Factor certified by a single successful decision at `t`:
/// `1 - 4/(k+1)` for Max-Min, `1 + 4/k + 3/k^2` for Min-Max.
pub fn decision_factor(mode: Mode, k: u32) -> Value {
    let k = k as i64;
    match mode {
        Mode::MaxMin => value::one() - value::ratio(4, k + 1),
        Mode::MinMax => value::one() + value::ratio(4, k) + value::ratio(3, k * k),
    }
}

/// Factor reported by a binary search with precision `delta`.
pub fn guarantee(mode: Mode, k: u32, delta: &Value) -> Value {
    let f = decision_factor(mode, k);
    match mode {
        Mode::MaxMin => f * (value::one() - delta),
        Mode::MinMax => f * (value::one() + delta),
    }
}

pub fn default_delta(k: u32) -> Value {
    value::ratio(1, 4 * k as i64)
}

/// Outcome of one decision, with the table when the DP ran.
#[derive(Clone, Debug)]
pub struct Decision {
    pub assignment: Option<Assignment>,
    pub table: Option<DPTable>,
}

pub fn decide_with_table(inst: &ConvexInstance, t: &Value, k: u32) -> Result<Decision> {
    let scheme = RoundingScheme::for_mode(k, inst.mode)?;
    let Some(scaled) = scale(inst, t)? else {
        return Ok(Decision {
            assignment: None,
            table: None,
        });
    };
    let canon = Canonical::new(&scaled)?;
    let rounded = round_instance(&canon, &scheme)?;
    let table = dp::forward(&rounded);
    let assignment = dp::backward(&table, &rounded)
        .ok()
        .map(|a| a.reindexed(canon.order()));
    Ok(Decision {
        assignment,
        table: Some(table),
    })
}

/// Runs the rounded DP at guess `t`. A returned assignment is indexed like
/// `inst.agents`; `None` means failure.
pub fn decide(inst: &ConvexInstance, t: &Value, k: u32) -> Result<Option<Assignment>> {
    Ok(decide_with_table(inst, t, k)?.assignment)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// Best guess for which the decision procedure succeeded.
    pub t_star: Value,
    pub assignment: Assignment,
    /// Minimum bundle value (Max-Min) or makespan (Min-Max) in original values.
    pub objective: Value,
    pub guarantee: Value,
    pub probes: usize,
}

fn check_params(k: u32, delta: &Value) -> Result<()> {
    if k < 4 {
        return Err(Error::BadK(k));
    }
    if !value::is_positive(delta) || *delta >= value::one() {
        return Err(Error::BadDelta);
    }
    Ok(())
}

fn finish(
    inst: &ConvexInstance,
    k: u32,
    delta: &Value,
    t_star: Value,
    assignment: Assignment,
    probes: usize,
) -> Result<SolveResult> {
    let verdict = verify(inst, &assignment);
    if !verdict.feasible {
        return Err(Error::InfeasibleAssignment(verdict.violations.join("; ")));
    }
    Ok(SolveResult {
        t_star,
        assignment,
        objective: verdict
            .objective
            .expect("feasible verdicts carry an objective"),
        guarantee: guarantee(inst.mode, k, delta),
        probes,
    })
}

/// Binary search over `[0, total/n]`, keeping the largest successful guess.
pub fn solve_maxmin(inst: &ConvexInstance, k: u32, delta: &Value) -> Result<SolveResult> {
    check_params(k, delta)?;
    Canonical::new(inst)?;
    if inst.n() > inst.m() {
        return Err(Error::NoSolution);
    }
    let two = value::int(2);
    let mut hi = inst.total_value() / value::int(inst.n() as i64);
    let mut probes = 1;
    if let Some(a) = decide(inst, &hi, k)? {
        return finish(inst, k, delta, hi, a, probes);
    }
    let mut lo = value::zero();
    let mut best = None;
    while probes < MAX_PROBES {
        if best.is_some() && &hi - &lo <= delta * &lo {
            break;
        }
        let mid = (&lo + &hi) / &two;
        probes += 1;
        match decide(inst, &mid, k)? {
            Some(a) => {
                lo = mid;
                best = Some(a);
            }
            None => hi = mid,
        }
    }
    let a = best.ok_or(Error::NoSolution)?;
    finish(inst, k, delta, lo, a, probes)
}

/// Binary search over `[total/n, total]`, keeping the smallest successful guess.
pub fn solve_minmax(inst: &ConvexInstance, k: u32, delta: &Value) -> Result<SolveResult> {
    check_params(k, delta)?;
    Canonical::new(inst)?;
    let two = value::int(2);
    let total = inst.total_value();
    let mut lo = &total / value::int(inst.n() as i64);
    let mut probes = 1;
    if let Some(a) = decide(inst, &lo, k)? {
        return finish(inst, k, delta, lo, a, probes);
    }
    let mut hi = total;
    probes += 1;
    let mut best = decide(inst, &hi, k)?.ok_or(Error::NoSolution)?;
    while probes < MAX_PROBES && &hi - &lo > delta * &lo {
        let mid = (&lo + &hi) / &two;
        probes += 1;
        match decide(inst, &mid, k)? {
            Some(a) => {
                hi = mid;
                best = a;
            }
            None => lo = mid,
        }
    }
    finish(inst, k, delta, hi, best, probes)
}

pub fn solve(inst: &ConvexInstance, k: u32, delta: &Value) -> Result<SolveResult> {
    match inst.mode {
        Mode::MaxMin => solve_maxmin(inst, k, delta),
        Mode::MinMax => solve_minmax(inst, k, delta),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub feasible: bool,
    pub violations: Vec<String>,
    /// Bundle value or machine load per agent, in original values.
    pub values: Vec<Value>,
    /// Minimum value (Max-Min) or maximum load (Min-Max) over agents.
    pub objective: Option<Value>,
}

/// Checks that `a` partitions the items along agent intervals and reports
/// per-agent values. Bundles are indexed like `inst.agents`.
pub fn verify(inst: &ConvexInstance, a: &Assignment) -> Verdict {
    let mut violations = Vec::new();
    if a.n() != inst.n() {
        violations.push(format!("{} bundles for {} agents", a.n(), inst.n()));
    }
    let mut seen = BTreeSet::new();
    for (j, bundle) in a.bundles().iter().enumerate() {
        let agent = inst.agents.get(j);
        for &i in bundle {
            let Some(item) = inst.items.get(i) else {
                violations.push(format!("unknown item index {i}"));
                continue;
            };
            if !seen.insert(i) {
                violations.push(format!("item {} assigned twice", item.id));
            }
            if let Some(agent) = agent {
                if !agent.covers(i) {
                    violations.push(format!(
                        "item {} outside the interval of {}",
                        item.id, agent.id
                    ));
                }
            }
        }
    }
    for (i, item) in inst.items.iter().enumerate() {
        if !seen.contains(&i) {
            violations.push(format!("item {} unassigned", item.id));
        }
    }
    let values: Vec<Value> = a
        .bundles()
        .iter()
        .map(|b| {
            value::sum(
                b.iter()
                    .filter_map(|&i| inst.items.get(i).map(|it| &it.value)),
            )
        })
        .collect();
    let objective = match inst.mode {
        Mode::MaxMin => values.iter().min().cloned(),
        Mode::MinMax => values.iter().max().cloned(),
    };
    Verdict {
        feasible: violations.is_empty(),
        violations,
        values,
        objective,
    }
}
