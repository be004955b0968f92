//! Exact optima for small instances.
//!
//! Items are placed left to right. Because covering agents form a sliding
//! window in the canonical order, the only state that matters after placing
//! a prefix of items is the value held by each agent still in the window.
//! Agents sharing their last item are interchangeable from then on, so their
//! values are sorted inside the memo key.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::{Canonical, ConvexInstance, Mode};
use crate::value::Value;

pub const MAX_ITEMS: usize = 24;
pub const MAX_AGENTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub value: Value,
    /// Optimal partition, bundles indexed like the input agents.
    pub witness: Assignment,
}

pub fn opt_maxmin(inst: &ConvexInstance) -> Result<Optimum> {
    expect_mode(inst, Mode::MaxMin)?;
    optimum(inst)
}

pub fn opt_minmax(inst: &ConvexInstance) -> Result<Optimum> {
    expect_mode(inst, Mode::MinMax)?;
    optimum(inst)
}

/// Optimum in the instance's own mode.
pub fn optimum(inst: &ConvexInstance) -> Result<Optimum> {
    if inst.m() > MAX_ITEMS || inst.n() > MAX_AGENTS {
        return Err(Error::TooLarge(format!(
            "{} items and {} agents (limits {MAX_ITEMS} and {MAX_AGENTS})",
            inst.m(),
            inst.n()
        )));
    }
    let canon = Canonical::new(inst)?;
    let mut search = Search::new(&canon)?;
    let best = search.solve(0);
    let witness = search.reconstruct(best);
    let value = Value::new(BigInt::from(best), search.den.clone());
    Ok(Optimum {
        value,
        witness: witness.reindexed(canon.order()),
    })
}

fn expect_mode(inst: &ConvexInstance, mode: Mode) -> Result<()> {
    if inst.mode != mode {
        return Err(Error::InvalidInstance(format!(
            "expected a {mode} instance, got {}",
            inst.mode
        )));
    }
    Ok(())
}

struct Search<'c> {
    canon: &'c Canonical,
    maxmin: bool,
    den: BigInt,
    values: Vec<i128>,
    /// `window[i]`: agents covering item `i`.
    window: Vec<(usize, usize)>,
    /// Values are capped here (Max-Min) or loads beyond it are dead ends (Min-Max).
    bound: i128,
    held: Vec<i128>,
    memo: HashMap<(usize, Vec<i128>), i128>,
}

impl<'c> Search<'c> {
    fn new(canon: &'c Canonical) -> Result<Self> {
        let items = canon.items();
        let mut den = BigInt::from(1);
        for it in items {
            den = den.lcm(it.value.denom());
        }
        let too_large = || Error::TooLarge("values do not fit a common integer scale".into());
        let mut values = Vec::with_capacity(items.len());
        for it in items {
            let v = (it.value.numer() * &den / it.value.denom())
                .to_i128()
                .ok_or_else(too_large)?;
            values.push(v);
        }
        let total: i128 = values
            .iter()
            .try_fold(0i128, |a, &v| a.checked_add(v))
            .filter(|t| *t < i128::MAX / 4)
            .ok_or_else(too_large)?;
        let window: Vec<(usize, usize)> = (0..canon.m())
            .map(|i| {
                let r = canon.covering_agents(i);
                (r.start, r.end)
            })
            .collect();
        let maxmin = canon.mode() == Mode::MaxMin;
        let n = canon.n() as i128;
        let bound = if maxmin {
            // no agent can beat the average or the value adjacent to it
            let adjacent = canon
                .agents()
                .iter()
                .map(|a| values[a.first..=a.last].iter().sum::<i128>())
                .min()
                .unwrap_or(0);
            (total / n).min(adjacent)
        } else {
            greedy_makespan(&values, &window, canon.n())
        };
        Ok(Search {
            canon,
            maxmin,
            den,
            values,
            window,
            bound,
            held: vec![0; canon.n()],
            memo: HashMap::new(),
        })
    }

    /// Agents in the window before item `i` is placed.
    fn live(&self, i: usize) -> (usize, usize) {
        let start = self.window[i].0;
        let end = if i == 0 { 0 } else { self.window[i - 1].1 };
        (start, end.max(start))
    }

    fn key(&self, i: usize) -> (usize, Vec<i128>) {
        let (start, end) = self.live(i);
        let agents = self.canon.agents();
        let mut key = self.held[start..end].to_vec();
        let mut a = 0;
        while a < key.len() {
            let mut b = a + 1;
            while b < key.len() && agents[start + b].last == agents[start + a].last {
                b += 1;
            }
            key[a..b].sort_unstable();
            a = b;
        }
        (i, key)
    }

    /// Agents leaving the window once item `i` is placed.
    fn closing(&self, i: usize) -> std::ops::Range<usize> {
        let next = if i + 1 < self.window.len() {
            self.window[i + 1].0
        } else {
            self.canon.n()
        };
        self.window[i].0..next
    }

    fn worst(&self) -> i128 {
        if self.maxmin {
            i128::MIN
        } else {
            i128::MAX
        }
    }

    fn better(&self, a: i128, b: i128) -> bool {
        if self.maxmin {
            a > b
        } else {
            a < b
        }
    }

    /// Outcome of giving item `i` to agent `x` in the current state.
    fn place(&mut self, i: usize, x: usize) -> i128 {
        let before = self.held[x];
        let raised = before + self.values[i];
        if !self.maxmin && raised > self.bound {
            return self.worst();
        }
        self.held[x] = if self.maxmin {
            raised.min(self.bound)
        } else {
            raised
        };
        let closed = self.closing(i);
        let done = &self.held[closed];
        let out = if self.maxmin {
            done.iter().copied().min().unwrap_or(i128::MAX)
        } else {
            done.iter().copied().max().unwrap_or(0)
        };
        let rest = self.solve(i + 1);
        let out = if self.maxmin {
            out.min(rest)
        } else {
            out.max(rest)
        };
        self.held[x] = before;
        out
    }

    fn solve(&mut self, i: usize) -> i128 {
        if i == self.values.len() {
            return if self.maxmin { i128::MAX } else { 0 };
        }
        let key = self.key(i);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (start, end) = self.window[i];
        let mut best = self.worst();
        for x in start..end {
            let v = self.place(i, x);
            if self.better(v, best) {
                best = v;
            }
        }
        self.memo.insert(key, best);
        best
    }

    fn reconstruct(&mut self, target: i128) -> Assignment {
        let n = self.canon.n();
        let mut bundles = vec![Vec::new(); n];
        let mut closed_best = if self.maxmin { i128::MAX } else { 0 };
        self.held = vec![0; n];
        for i in 0..self.values.len() {
            let (start, end) = self.window[i];
            let mut chosen = None;
            for x in start..end {
                let v = self.place(i, x);
                let combined = if self.maxmin {
                    v.min(closed_best)
                } else {
                    v.max(closed_best)
                };
                if combined == target {
                    chosen = Some(x);
                    break;
                }
            }
            let x = chosen.expect("memo value is reachable");
            bundles[x].push(i);
            let raised = self.held[x] + self.values[i];
            self.held[x] = if self.maxmin {
                raised.min(self.bound)
            } else {
                raised
            };
            for a in self.closing(i) {
                closed_best = if self.maxmin {
                    closed_best.min(self.held[a])
                } else {
                    closed_best.max(self.held[a])
                };
            }
        }
        Assignment::from_bundles(bundles)
    }
}

fn greedy_makespan(values: &[i128], window: &[(usize, usize)], n: usize) -> i128 {
    let mut load = vec![0i128; n];
    for (i, &(start, end)) in window.iter().enumerate() {
        let x = (start..end)
            .min_by_key(|&a| load[a])
            .expect("item is covered");
        load[x] += values[i];
    }
    load.into_iter().max().unwrap_or(0)
}
