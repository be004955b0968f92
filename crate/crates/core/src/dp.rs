//! The dynamic program over input vectors.
//!
//! Row `j` of the table describes agent `p_j` (1-based, canonical order). A
//! vector `nu` is marked in row `j` when some marked `nu'` of row `j+1` (or
//! the full instance, for row `n`) leaves a feasible bundle for `p_j`:
//! `retrieve(nu', j) \ retrieve(nu, j-1)`. The instance is solved when row 1
//! is marked at the zero vector.
//!
//! `retrieve` rebuilds a remainder graph from its vector alone: the leftmost
//! `nu_c` big items of every category plus a leftmost prefix of small items
//! whose size is fixed by `nu_0`. The small prefix is clamped to the window
//! the remainder can occupy: it never reaches past the last item of `p_j`,
//! and in Min-Max it always contains the small jobs left of `p_{j+1}`, which
//! no later machine could take. Every item set it returns is therefore
//! described by a prefix length per class, which is what [`Shape`] stores.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::{Mode, Subgraph};
use crate::rounding::{InputVector, RoundedInstance};
use crate::value::{self, Value};

/// Per-agent lower (Max-Min) or upper (Min-Max) bundle bound: `1 -+ 3/k`.
pub fn bundle_bound(rounded: &RoundedInstance) -> Value {
    let slack = value::ratio(3, rounded.scheme().k() as i64);
    match rounded.mode() {
        Mode::MaxMin => value::one() - slack,
        Mode::MinMax => value::one() + slack,
    }
}

/// Number of leftmost small items kept by `retrieve` for small units `units`.
pub fn small_prefix_len(rounded: &RoundedInstance, units: u32) -> usize {
    let smalls = rounded.class_items(0).len();
    let k = rounded.scheme().k() as i64;
    match rounded.mode() {
        Mode::MaxMin => {
            // maximal prefix with total < (units+1)/k
            let cap = value::ratio(units as i64 + 1, k);
            (0..=smalls)
                .take_while(|&l| *rounded.small_prefix(l) < cap)
                .last()
                .unwrap_or(0)
        }
        Mode::MinMax => {
            // minimal prefix with total > (units-1)/k
            let floor = value::ratio(units as i64 - 1, k);
            (0..=smalls)
                .find(|&l| *rounded.small_prefix(l) > floor)
                .unwrap_or(smalls)
        }
    }
}

/// Prefix lengths per class: `counts[0]` small items, `counts[c]` items of category `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub counts: Vec<usize>,
}

impl Shape {
    fn items(&self, rounded: &RoundedInstance) -> BTreeSet<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(c, &len)| rounded.class_items(c)[..len].iter().copied())
            .collect()
    }

    /// Items of `self` not in `inner`; `inner` must be componentwise smaller.
    fn minus(&self, inner: &Shape, rounded: &RoundedInstance) -> BTreeSet<usize> {
        self.counts
            .iter()
            .zip(&inner.counts)
            .enumerate()
            .flat_map(|(c, (&hi, &lo))| rounded.class_items(c)[lo..hi].iter().copied())
            .collect()
    }
}

/// Item prefix described by `nu` when the first `j` agents survive, or `None`
/// when that graph would contain a stranded item.
fn shape_of(rounded: &RoundedInstance, nu: &InputVector, j: usize) -> Option<Shape> {
    if j == 0 {
        return nu.is_zero().then(|| Shape {
            counts: vec![0; nu.len()],
        });
    }
    if j == rounded.n() && nu == rounded.full_vector() {
        return Some(full_shape(rounded));
    }
    let mut counts = Vec::with_capacity(nu.len());
    counts.push(clamped_small_len(rounded, nu.small(), j));
    counts.extend(nu.0[1..].iter().map(|&x| x as usize));
    let last = rounded.canonical().agent(j - 1).last;
    let stranded = counts
        .iter()
        .enumerate()
        .any(|(c, &len)| len > 0 && rounded.class_items(c)[len - 1] > last);
    (!stranded).then_some(Shape { counts })
}

/// [`small_prefix_len`] clamped to the window of a remainder with agents `p_1..p_j`.
fn clamped_small_len(rounded: &RoundedInstance, units: u32, j: usize) -> usize {
    let smalls = rounded.class_items(0);
    let canon = rounded.canonical();
    let mut len = small_prefix_len(rounded, units);
    if rounded.mode() == Mode::MinMax && j < rounded.n() {
        let first = canon.agent(j).first;
        len = len.max(smalls.partition_point(|&i| i < first));
    }
    let last = canon.agent(j - 1).last;
    len.min(smalls.partition_point(|&i| i <= last))
}

fn full_shape(rounded: &RoundedInstance) -> Shape {
    Shape {
        counts: (0..rounded.full_vector().len())
            .map(|c| rounded.class_items(c).len())
            .collect(),
    }
}

/// Reconstructs the remainder graph with agents `p_1..p_j` from its input vector.
pub fn retrieve<'r>(
    rounded: &'r RoundedInstance,
    nu: &InputVector,
    j: usize,
) -> Result<Option<Subgraph<'r>>> {
    if !nu.le(rounded.full_vector()) || j > rounded.n() {
        return Err(Error::VectorOutOfRange);
    }
    Ok(shape_of(rounded, nu, j).map(|s| rounded.canonical().subgraph(s.items(rounded), j)))
}

/// Whether `bundle` may go to `agent` (0-based canonical index).
pub fn feasible(
    rounded: &RoundedInstance,
    before: Option<&Subgraph<'_>>,
    bundle: &BTreeSet<usize>,
    agent: usize,
) -> bool {
    if before.is_none() {
        return false;
    }
    let a = rounded.canonical().agent(agent);
    if !bundle.iter().all(|&i| a.covers(i)) {
        return false;
    }
    within_bound(rounded, &rounded.value_of(bundle))
}

/// Whether a rounded bundle value meets the per-agent bound.
pub fn within_bound(rounded: &RoundedInstance, total: &Value) -> bool {
    match rounded.mode() {
        Mode::MaxMin => *total >= bundle_bound(rounded),
        Mode::MinMax => *total <= bundle_bound(rounded),
    }
}

/// Marked entries per row; `rows[j-1]` maps each marked vector of row `j` to its pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DPTable {
    rows: Vec<BTreeMap<InputVector, InputVector>>,
    full: InputVector,
}

impl DPTable {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Marked entries of row `j` (1-based) with their pointers.
    pub fn row(&self, j: usize) -> &BTreeMap<InputVector, InputVector> {
        &self.rows[j - 1]
    }

    pub fn is_marked(&self, j: usize, nu: &InputVector) -> bool {
        self.row(j).contains_key(nu)
    }

    pub fn ptr(&self, j: usize, nu: &InputVector) -> Option<&InputVector> {
        self.row(j).get(nu)
    }

    pub fn full_vector(&self) -> &InputVector {
        &self.full
    }

    pub fn marked_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn success(&self) -> bool {
        let zero = InputVector::zero(self.full.len() - 1);
        self.n() > 0 && self.is_marked(1, &zero)
    }

    /// One line per marked entry, rows `n` down to 1, vectors ascending.
    pub fn trace_lines(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.marked_count());
        for j in (1..=self.n()).rev() {
            for (nu, ptr) in self.row(j) {
                out.push(format!("row={j} nu={nu} ptr={ptr}"));
            }
        }
        out
    }
}

/// Exact arithmetic on prefix values over a common denominator.
struct Ledger {
    /// `num[c][len]`: value of the first `len` items of class `c`, times the denominator.
    num: Vec<Vec<BigInt>>,
    bound: BigInt,
    maxmin: bool,
}

impl Ledger {
    fn new(rounded: &RoundedInstance) -> Self {
        let mut den = BigInt::from(rounded.scheme().k());
        for i in 0..rounded.m() {
            den = den.lcm(rounded.value(i).denom());
        }
        let scaled = |v: &Value| -> BigInt { (v.numer() * &den) / v.denom() };
        let classes = rounded.full_vector().len();
        let mut num = Vec::with_capacity(classes);
        for c in 0..classes {
            let mut acc = BigInt::zero();
            let mut col = vec![acc.clone()];
            for &i in rounded.class_items(c) {
                acc += scaled(rounded.value(i));
                col.push(acc.clone());
            }
            num.push(col);
        }
        Ledger {
            num,
            bound: scaled(&bundle_bound(rounded)),
            maxmin: rounded.mode() == Mode::MaxMin,
        }
    }

    fn value(&self, counts: &[usize]) -> BigInt {
        counts
            .iter()
            .enumerate()
            .map(|(c, &len)| &self.num[c][len])
            .sum()
    }

    fn accepts(&self, bundle: &BigInt) -> bool {
        if self.maxmin {
            *bundle >= self.bound
        } else {
            *bundle <= self.bound
        }
    }
}

/// Per-agent prefix limits: how many items of each class lie left of the
/// agent's interval, and how many lie at or before its end.
struct Limits {
    before: Vec<Vec<usize>>,
    upto: Vec<Vec<usize>>,
}

impl Limits {
    fn new(rounded: &RoundedInstance) -> Self {
        let classes = rounded.full_vector().len();
        let agents = rounded.canonical().agents();
        let count = |c: usize, pred: &dyn Fn(usize) -> bool| {
            rounded.class_items(c).partition_point(|&i| pred(i))
        };
        let before = agents
            .iter()
            .map(|a| (0..classes).map(|c| count(c, &|i| i < a.first)).collect())
            .collect();
        let upto = agents
            .iter()
            .map(|a| (0..classes).map(|c| count(c, &|i| i <= a.last)).collect())
            .collect();
        Limits { before, upto }
    }
}

/// Marks every row of the table, from agent `p_n` down to `p_1`.
pub fn forward(rounded: &RoundedInstance) -> DPTable {
    let n = rounded.n();
    let full = rounded.full_vector().clone();
    let classes = full.len();
    let ledger = Ledger::new(rounded);
    let limits = Limits::new(rounded);

    let mut rows: Vec<BTreeMap<InputVector, InputVector>> = vec![BTreeMap::new(); n];
    for j in (1..=n).rev() {
        let agent = j - 1;
        let mut row = BTreeMap::new();
        let small_len: Vec<usize> = if j > 1 {
            (0..=full.small())
                .map(|u| clamped_small_len(rounded, u, j - 1))
                .collect()
        } else {
            Vec::new()
        };
        let parents: Vec<(InputVector, Shape)> = if j == n {
            vec![(full.clone(), full_shape(rounded))]
        } else {
            rows[j]
                .keys()
                .map(|p| {
                    let shape = shape_of(rounded, p, j).expect("marked entries are retrievable");
                    (p.clone(), shape)
                })
                .collect()
        };
        for (parent, before) in parents {
            let before_value = ledger.value(&before.counts);
            // admissible range per coordinate
            let mut lo = vec![0u32; classes];
            let mut hi = vec![0u32; classes];
            let mut empty = false;
            for c in 0..classes {
                if j == 1 {
                    // only the zero vector survives once no agents are left
                    continue;
                }
                let left = limits.before[agent][c];
                let reach = limits.upto[agent - 1][c];
                if c == 0 {
                    let cap = before.counts[0].min(reach);
                    let need = before.counts[0].min(left);
                    let units: Vec<u32> = (0..=parent.small())
                        .filter(|&u| {
                            let l = small_len[u as usize];
                            l >= need && l <= cap
                        })
                        .collect();
                    match (units.first(), units.last()) {
                        (Some(&a), Some(&b)) => {
                            lo[0] = a;
                            hi[0] = b;
                        }
                        _ => empty = true,
                    }
                } else {
                    let top = parent.0[c] as usize;
                    lo[c] = top.min(left) as u32;
                    hi[c] = top.min(reach) as u32;
                    if lo[c] > hi[c] {
                        empty = true;
                    }
                }
            }
            if empty {
                continue;
            }
            let first = rounded.canonical().agent(agent).first;
            let mut nu = lo.clone();
            'odometer: loop {
                let candidate = InputVector(nu.clone());
                if let Entry::Vacant(slot) = row.entry(candidate) {
                    if let Some(after) = shape_of(rounded, slot.key(), j - 1) {
                        let inside = after.counts.iter().zip(&before.counts).enumerate().all(
                            |(c, (&a, &b))| {
                                a <= b && (a == b || rounded.class_items(c)[a] >= first)
                            },
                        );
                        let bundle = &before_value - ledger.value(&after.counts);
                        if inside && ledger.accepts(&bundle) {
                            slot.insert(parent.clone());
                        }
                    }
                }
                // last coordinate fastest: lexicographic ascending
                let mut c = classes;
                loop {
                    if c == 0 {
                        break 'odometer;
                    }
                    c -= 1;
                    if nu[c] < hi[c] {
                        nu[c] += 1;
                        nu[c + 1..].copy_from_slice(&lo[c + 1..]);
                        continue 'odometer;
                    }
                }
            }
        }
        rows[agent] = row;
    }
    DPTable { rows, full }
}

/// Follows the pointers from row 1's zero vector and collects the bundles,
/// indexed by canonical agent.
pub fn backward(table: &DPTable, rounded: &RoundedInstance) -> Result<Assignment> {
    if !table.success() {
        return Err(Error::NoSolution);
    }
    let n = table.n();
    let mut bundles = Vec::with_capacity(n);
    let mut nu = InputVector::zero(table.full.len() - 1);
    for j in 1..=n {
        let ptr = table.ptr(j, &nu).ok_or(Error::NoSolution)?.clone();
        let before = shape_of(rounded, &ptr, j).ok_or(Error::NoSolution)?;
        let after = shape_of(rounded, &nu, j - 1).ok_or(Error::NoSolution)?;
        bundles.push(before.minus(&after, rounded));
        nu = ptr;
    }
    Ok(Assignment::from_bundles(bundles))
}

/// Runs both phases; `None` signals failure.
pub fn solve_rounded(rounded: &RoundedInstance) -> Option<Assignment> {
    let table = forward(rounded);
    backward(&table, rounded).ok()
}
