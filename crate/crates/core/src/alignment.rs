//! Right-aligned, non-wasteful normal form of a 1-assignment.
//!
//! Agents are peeled from `p_n` down to `p_1`. In the normal form each agent
//! takes, for every class, the rightmost items of that class still available,
//! so every remainder graph `H^j` holds a leftmost prefix of each class.
//!
//! [`align`] keeps the assignment vector of its input. Big items are forced
//! by the vector: agent `p_j` receives the category-`c` items of rank
//! `alpha^{j-1}_c .. alpha^j_c`. Small items are only pinned down up to the
//! `1/k` bucket of each `alpha^j_0`, so the prefix lengths are picked by a
//! small layered search that stays inside those buckets and optimizes the
//! worst bundle.

use std::collections::BTreeSet;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::Mode;
use crate::rounding::{InputVector, RoundedInstance};
use crate::value::{self, Value};

/// `alpha[j-1]` is the input vector of the remainder graph `H^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentVector(pub Vec<InputVector>);

impl AssignmentVector {
    /// `alpha^j`, 1-based.
    pub fn get(&self, j: usize) -> &InputVector {
        &self.0[j - 1]
    }
}

fn remainder_items(a: &Assignment, m: usize, j: usize) -> BTreeSet<usize> {
    let removed: BTreeSet<usize> = a.bundles()[j..].iter().flatten().copied().collect();
    (0..m).filter(|i| !removed.contains(i)).collect()
}

/// Input vectors of `H^1..H^n`. Bundles are indexed by canonical agent.
pub fn assignment_vector(rounded: &RoundedInstance, a: &Assignment) -> Result<AssignmentVector> {
    a.check_structure(rounded.canonical())?;
    Ok(AssignmentVector(
        (1..=a.n())
            .map(|j| rounded.vector_of(remainder_items(a, rounded.m(), j)))
            .collect(),
    ))
}

pub fn is_right_aligned(rounded: &RoundedInstance, a: &Assignment) -> bool {
    if a.check_structure(rounded.canonical()).is_err() {
        return false;
    }
    let mut available: BTreeSet<usize> = (0..rounded.m()).collect();
    for j in (0..a.n()).rev() {
        let agent = rounded.canonical().agent(j);
        let bundle = a.bundle(j);
        for c in 0..rounded.full_vector().len() {
            let mine: Vec<usize> = bundle
                .iter()
                .copied()
                .filter(|&i| rounded.class(i).coordinate() == c)
                .collect();
            let rightmost: Vec<usize> = rounded
                .class_items(c)
                .iter()
                .rev()
                .copied()
                .filter(|i| available.contains(i) && agent.covers(*i))
                .take(mine.len())
                .collect();
            if rightmost.into_iter().rev().ne(mine) {
                return false;
            }
        }
        for i in bundle {
            available.remove(i);
        }
    }
    true
}

pub fn is_non_wasteful(rounded: &RoundedInstance, a: &Assignment) -> bool {
    (1..a.n()).all(|j| {
        !rounded
            .canonical()
            .subgraph(remainder_items(a, rounded.m(), j), j)
            .has_stranded()
    })
}

fn is_one_assignment(rounded: &RoundedInstance, a: &Assignment) -> bool {
    a.is_partition_of(rounded.m())
        && (0..a.n()).all(|j| {
            let v = rounded.value_of(a.bundle(j));
            match rounded.mode() {
                Mode::MaxMin => v >= value::one(),
                Mode::MinMax => v <= value::one(),
            }
        })
}

/// Whether a small total lies in the bucket of `units`.
fn in_bucket(rounded: &RoundedInstance, total: &Value, units: u32) -> bool {
    rounded.scheme().small_units(total) == units
}

/// Rewrites a 1-assignment (bundles by canonical agent) into right-aligned,
/// non-wasteful form with the same assignment vector.
pub fn align(rounded: &RoundedInstance, a: &Assignment) -> Result<Assignment> {
    a.check_structure(rounded.canonical())?;
    if !is_one_assignment(rounded, a) {
        return Err(Error::InfeasibleAssignment(
            "alignment needs a partition with every bundle meeting the unit bound".into(),
        ));
    }
    let alpha = assignment_vector(rounded, a)?;
    let n = a.n();
    let classes = rounded.full_vector().len();
    let canon = rounded.canonical();
    let zero = InputVector::zero(classes - 1);
    let prev = |j: usize| if j == 1 { &zero } else { alpha.get(j - 1) };

    let mut bundles: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut big_value = vec![value::zero(); n];
    for j in 1..=n {
        for c in 1..classes {
            let lo = prev(j).big(c) as usize;
            let hi = alpha.get(j).big(c) as usize;
            for &i in &rounded.class_items(c)[lo..hi] {
                bundles[j - 1].insert(i);
                big_value[j - 1] += rounded.value(i);
            }
        }
        let agent = canon.agent(j - 1);
        if !bundles[j - 1].iter().all(|&i| agent.covers(i)) {
            return Err(Error::InfeasibleAssignment(format!(
                "big items of {} cannot be right-aligned",
                agent.id
            )));
        }
    }

    // small prefix lengths L_0 = 0 <= L_1 <= ... <= L_n = S
    let smalls = rounded.class_items(0);
    let s = smalls.len();
    let before: Vec<usize> = canon
        .agents()
        .iter()
        .map(|ag| smalls.partition_point(|&i| i < ag.first))
        .collect();
    let upto: Vec<usize> = canon
        .agents()
        .iter()
        .map(|ag| smalls.partition_point(|&i| i <= ag.last))
        .collect();
    let candidates = |j: usize| -> Vec<usize> {
        if j == 0 {
            return vec![0];
        }
        if j == n {
            return vec![s];
        }
        (before[j]..=upto[j - 1].min(s))
            .filter(|&l| in_bucket(rounded, rounded.small_prefix(l), alpha.get(j).small()))
            .collect()
    };
    let maxmin = rounded.mode() == Mode::MaxMin;
    let improves = |new: &Value, old: &Value| if maxmin { new > old } else { new < old };
    // layer j: (L_j, worst bundle so far, back pointer into layer j-1)
    let mut layers: Vec<Vec<(usize, Value, usize)>> = vec![vec![(0, value::zero(), 0)]];
    for j in 1..=n {
        let mut layer = Vec::new();
        for l in candidates(j) {
            let mut best: Option<(Value, usize)> = None;
            for (p, (lp, worst, _)) in layers[j - 1].iter().enumerate() {
                if *lp > l || (*lp < l && (*lp < before[j - 1] || l > upto[j - 1])) {
                    continue;
                }
                let v = &big_value[j - 1] + rounded.small_prefix(l) - rounded.small_prefix(*lp);
                let combined = if j == 1 {
                    v
                } else if maxmin {
                    v.min(worst.clone())
                } else {
                    v.max(worst.clone())
                };
                if best.as_ref().is_none_or(|(b, _)| improves(&combined, b)) {
                    best = Some((combined, p));
                }
            }
            if let Some((worst, p)) = best {
                layer.push((l, worst, p));
            }
        }
        if layer.is_empty() {
            return Err(Error::InfeasibleAssignment(
                "no small repacking keeps the assignment vector".into(),
            ));
        }
        layers.push(layer);
    }
    let mut idx = 0;
    for j in (1..=n).rev() {
        let (l, _, p) = layers[j][idx];
        let lp = layers[j - 1][p].0;
        bundles[j - 1].extend(smalls[lp..l].iter().copied());
        idx = p;
    }
    Ok(Assignment::from_bundles(bundles))
}
