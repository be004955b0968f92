//! Seeded random instances.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, so a seed and
//! parameter set always produce the same instance.
//!
//! Intervals: draw `n` left endpoints and `n` right endpoints uniformly from
//! `1..=m`, sort both sequences and pair them index-wise; a right endpoint
//! below its left endpoint is raised to it. The first interval is then
//! stretched to start at item 1, the last to end at item `m`, and any gap
//! between consecutive intervals is closed by moving the later left endpoint
//! down. Both endpoint sequences stay non-decreasing, so the system is
//! inclusion-free.
//!
//! Values: uniform over the distinct rationals in the range whose reduced
//! denominator is at most 12.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::{ConvexInstance, Mode};
use crate::value::{self, Value};

pub const MAX_DENOMINATOR: i64 = 12;

/// Half-open value range `(lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueRange {
    pub lo: Value,
    pub hi: Value,
}

impl ValueRange {
    pub fn unit() -> Self {
        ValueRange {
            lo: value::zero(),
            hi: value::one(),
        }
    }

    /// All rationals in the range with denominator at most 12, ascending.
    pub fn support(&self) -> Vec<Value> {
        let mut out = BTreeSet::new();
        for d in 1..=MAX_DENOMINATOR {
            let dv = value::int(d);
            let start = (&self.lo * &dv).floor().to_integer();
            let end = (&self.hi * &dv).floor().to_integer();
            let mut num = start;
            while num <= end {
                let v = Value::new(num.clone(), dv.to_integer());
                if v > self.lo && v <= self.hi {
                    out.insert(v);
                }
                num += 1;
            }
        }
        out.into_iter().collect()
    }
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m < n {
        return Err(Error::BadGeneratorParams(format!(
            "need 1 <= n <= m, got n={n}, m={m}"
        )));
    }
    Ok(())
}

/// 0-based inclusive intervals as described in the module docs.
fn intervals(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut ls: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let mut rs: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    ls.sort_unstable();
    rs.sort_unstable();
    let mut out: Vec<(usize, usize)> = ls.into_iter().zip(rs).map(|(l, r)| (l, r.max(l))).collect();
    out[0].0 = 0;
    out[n - 1].1 = m - 1;
    for i in 1..n {
        let reach = out[i - 1].1;
        if out[i].0 > reach + 1 {
            out[i].0 = reach + 1;
        }
    }
    out
}

fn build(mode: Mode, values: Vec<Value>, ivs: &[(usize, usize)]) -> ConvexInstance {
    let (agent, item) = match mode {
        Mode::MaxMin => ("p", "x"),
        Mode::MinMax => ("m", "j"),
    };
    ConvexInstance::from_parts(
        mode,
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("{item}{}", i + 1), v)),
        ivs.iter()
            .enumerate()
            .map(|(a, &(l, r))| (format!("{agent}{}", a + 1), l, r)),
    )
}

pub fn gen_inclusion_free(
    seed: u64,
    n: usize,
    m: usize,
    mode: Mode,
    range: &ValueRange,
) -> Result<ConvexInstance> {
    check_sizes(n, m)?;
    let support = range.support();
    if support.is_empty() {
        return Err(Error::BadGeneratorParams("empty value range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ivs = intervals(&mut rng, n, m);
    let values = (0..m)
        .map(|_| support.choose(&mut rng).expect("non-empty").clone())
        .collect();
    Ok(build(mode, values, &ivs))
}

/// Gives every agent a distinct item of its own, scanning agents by right
/// endpoint and taking the leftmost free item.
fn saturate(ivs: &[(usize, usize)], m: usize) -> Option<Vec<usize>> {
    let mut agents: Vec<usize> = (0..ivs.len()).collect();
    agents.sort_by_key(|&a| (ivs[a].1, ivs[a].0));
    let mut taken = vec![false; m];
    let mut pick = vec![0; ivs.len()];
    for a in agents {
        let (l, r) = ivs[a];
        let i = (l..=r).find(|&i| !taken[i])?;
        taken[i] = true;
        pick[a] = i;
    }
    Some(pick)
}

/// An instance with a planted `t`-assignment, which is returned alongside.
/// Max-Min bundles are worth at least `t`; Min-Max loads are at most `t`.
pub fn gen_planted(
    seed: u64,
    n: usize,
    m: usize,
    mode: Mode,
    t: &Value,
) -> Result<(ConvexInstance, Assignment)> {
    check_sizes(n, m)?;
    if !value::is_positive(t) {
        return Err(Error::NonPositiveGuess);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ivs, pick) = loop {
        let ivs = intervals(&mut rng, n, m);
        if let Some(pick) = saturate(&ivs, m) {
            break (ivs, pick);
        }
    };
    let mut bundles: Vec<Vec<usize>> = pick.iter().map(|&i| vec![i]).collect();
    let picked: BTreeSet<usize> = pick.iter().copied().collect();
    for i in (0..m).filter(|i| !picked.contains(i)) {
        let owners: Vec<usize> = (0..n).filter(|&a| ivs[a].0 <= i && i <= ivs[a].1).collect();
        let a = *owners.choose(&mut rng).expect("intervals cover every item");
        bundles[a].push(i);
    }
    let support = ValueRange::unit().support();
    let mut values: Vec<Value> = (0..m)
        .map(|_| support.choose(&mut rng).expect("non-empty").clone() * t)
        .collect();
    for bundle in &mut bundles {
        bundle.sort_unstable();
        let total = value::sum(bundle.iter().map(|&i| &values[i]));
        match mode {
            Mode::MaxMin => {
                if total < *t {
                    let last = *bundle.last().expect("bundles are non-empty");
                    values[last] += t - &total;
                }
            }
            Mode::MinMax => {
                if total > *t {
                    let shrink = t / &total;
                    for &i in bundle.iter() {
                        values[i] *= &shrink;
                    }
                }
            }
        }
    }
    Ok((build(mode, values, &ivs), Assignment::from_bundles(bundles)))
}
