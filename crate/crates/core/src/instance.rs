//! Instances, validation, lexicographic agent order and remainder graphs.
//!
//! Items (or jobs) are kept in their given order. Each agent (player or
//! machine) is adjacent to a contiguous interval of items. Indices are
//! 0-based throughout the library; the file format is 1-based.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{self, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Maximize the minimum bundle value (Santa Claus).
    MaxMin,
    /// Minimize the maximum machine load (makespan).
    MinMax,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::MaxMin => f.write_str("maxmin"),
            Mode::MinMax => f.write_str("minmax"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub id: String,
    /// First adjacent item, inclusive.
    pub first: usize,
    /// Last adjacent item, inclusive.
    pub last: usize,
    /// Demand (Max-Min) or allowable load (Min-Max) used by the Hall checks.
    pub demand: Value,
}

impl Agent {
    pub fn new(id: impl Into<String>, first: usize, last: usize) -> Self {
        Agent {
            id: id.into(),
            first,
            last,
            demand: value::one(),
        }
    }

    pub fn covers(&self, item: usize) -> bool {
        self.first <= item && item <= self.last
    }

    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        self.last < self.first
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexInstance {
    pub mode: Mode,
    pub items: Vec<Item>,
    pub agents: Vec<Agent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoAgents,
    NoItems,
    /// Interval endpoints out of order or beyond the item range.
    BadInterval {
        agent: String,
    },
    NonPositiveValue {
        item: String,
    },
    NonPositiveDemand {
        agent: String,
    },
    /// Item adjacent to no agent.
    UncoveredItem {
        item: String,
    },
    /// `inner` is strictly nested inside `outer` on both sides.
    MarginedInclusion {
        outer: String,
        inner: String,
    },
    DuplicateId {
        id: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAgents => f.write_str("no agents"),
            Violation::NoItems => f.write_str("no items"),
            Violation::BadInterval { agent } => write!(f, "bad interval for agent {agent}"),
            Violation::NonPositiveValue { item } => write!(f, "non-positive value for item {item}"),
            Violation::NonPositiveDemand { agent } => {
                write!(f, "non-positive demand for agent {agent}")
            }
            Violation::UncoveredItem { item } => write!(f, "item {item} has degree zero"),
            Violation::MarginedInclusion { outer, inner } => {
                write!(f, "margined inclusion ({outer},{inner})")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate id {id}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl ConvexInstance {
    pub fn new(mode: Mode, items: Vec<Item>, agents: Vec<Agent>) -> Self {
        ConvexInstance {
            mode,
            items,
            agents,
        }
    }

    /// Builds an instance from `(id, value)` pairs and 0-based `(id, first, last)` intervals.
    pub fn from_parts(
        mode: Mode,
        items: impl IntoIterator<Item = (String, Value)>,
        agents: impl IntoIterator<Item = (String, usize, usize)>,
    ) -> Self {
        ConvexInstance {
            mode,
            items: items
                .into_iter()
                .map(|(id, value)| Item { id, value })
                .collect(),
            agents: agents
                .into_iter()
                .map(|(id, first, last)| Agent::new(id, first, last))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn total_value(&self) -> Value {
        value::sum(self.items.iter().map(|it| &it.value))
    }

    /// Returns a copy with every item value replaced by `f(value)`.
    pub fn map_values(&self, mut f: impl FnMut(&Value) -> Value) -> ConvexInstance {
        let mut out = self.clone();
        for it in &mut out.items {
            it.value = f(&it.value);
        }
        out
    }

    pub fn with_mode(&self, mode: Mode) -> ConvexInstance {
        ConvexInstance {
            mode,
            ..self.clone()
        }
    }

    pub fn with_demands(&self, demands: &[Value]) -> ConvexInstance {
        assert_eq!(demands.len(), self.n());
        let mut out = self.clone();
        for (a, d) in out.agents.iter_mut().zip(demands) {
            a.demand = d.clone();
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.agents.is_empty() {
            violations.push(Violation::NoAgents);
        }
        if self.items.is_empty() {
            violations.push(Violation::NoItems);
        }
        let m = self.m();

        let mut seen = BTreeSet::new();
        for id in self.items.iter().map(|i| &i.id) {
            if !seen.insert(id.as_str()) {
                violations.push(Violation::DuplicateId { id: id.clone() });
            }
        }
        let mut seen = BTreeSet::new();
        for id in self.agents.iter().map(|a| &a.id) {
            if !seen.insert(id.as_str()) {
                violations.push(Violation::DuplicateId { id: id.clone() });
            }
        }

        for it in &self.items {
            if !value::is_positive(&it.value) {
                violations.push(Violation::NonPositiveValue {
                    item: it.id.clone(),
                });
            }
        }
        let mut well_formed = Vec::new();
        for a in &self.agents {
            if a.first > a.last || a.last >= m {
                violations.push(Violation::BadInterval {
                    agent: a.id.clone(),
                });
            } else {
                well_formed.push(a);
            }
            if !value::is_positive(&a.demand) {
                violations.push(Violation::NonPositiveDemand {
                    agent: a.id.clone(),
                });
            }
        }

        for (i, it) in self.items.iter().enumerate() {
            if !well_formed.iter().any(|a| a.covers(i)) {
                violations.push(Violation::UncoveredItem {
                    item: it.id.clone(),
                });
            }
        }

        for p in &well_formed {
            for q in &well_formed {
                if p.first < q.first && q.last < p.last {
                    violations.push(Violation::MarginedInclusion {
                        outer: p.id.clone(),
                        inner: q.id.clone(),
                    });
                }
            }
        }

        ValidationReport { violations }
    }

    /// Stable sort of the agents by `(first, last)`.
    pub fn lexicographic_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by_key(|&a| (self.agents[a].first, self.agents[a].last));
        order
    }
}

/// Monotone-endpoint characterisation: after sorting by `(first, last)` the
/// right endpoints never decrease.
pub fn is_inclusion_free(intervals: &[(usize, usize)]) -> bool {
    let mut sorted = intervals.to_vec();
    sorted.sort();
    sorted.windows(2).all(|w| w[0].1 <= w[1].1)
}

/// A validated instance whose agents are stored in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    inst: ConvexInstance,
    /// `order[j]` is the index in the input instance of canonical agent `j`.
    order: Vec<usize>,
}

impl Canonical {
    pub fn new(instance: &ConvexInstance) -> Result<Self> {
        let report = instance.validate();
        if !report.is_valid() {
            return Err(Error::InvalidInstance(report.to_string()));
        }
        let order = instance.lexicographic_order();
        let mut inst = instance.clone();
        inst.agents = order.iter().map(|&a| instance.agents[a].clone()).collect();
        Ok(Canonical { inst, order })
    }

    pub fn instance(&self) -> &ConvexInstance {
        &self.inst
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn mode(&self) -> Mode {
        self.inst.mode
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn m(&self) -> usize {
        self.inst.m()
    }

    pub fn agent(&self, j: usize) -> &Agent {
        &self.inst.agents[j]
    }

    pub fn agents(&self) -> &[Agent] {
        &self.inst.agents
    }

    pub fn items(&self) -> &[Item] {
        &self.inst.items
    }

    pub fn value(&self, i: usize) -> &Value {
        &self.inst.items[i].value
    }

    /// Canonical agents adjacent to item `i`, as a contiguous range.
    pub fn covering_agents(&self, i: usize) -> std::ops::Range<usize> {
        let lo = self.inst.agents.partition_point(|a| a.last < i);
        let hi = self.inst.agents.partition_point(|a| a.first <= i);
        lo..hi.max(lo)
    }

    /// Rightmost item adjacent to one of the first `j` agents, if any.
    pub fn reach(&self, j: usize) -> Option<usize> {
        self.inst.agents[..j].iter().map(|a| a.last).max()
    }

    /// Same structure, new item values.
    pub fn with_values(&self, values: Vec<Value>) -> Canonical {
        assert_eq!(values.len(), self.m());
        let mut c = self.clone();
        for (it, v) in c.inst.items.iter_mut().zip(values) {
            it.value = v;
        }
        c
    }

    pub fn full(&self) -> Subgraph<'_> {
        Subgraph {
            parent: self,
            items: (0..self.m()).collect(),
            agents: self.n(),
        }
    }

    /// Remainder graph after deleting `removed` items, keeping agents `0..j`.
    pub fn remainder<I>(&self, removed: I, j: usize) -> Subgraph<'_>
    where
        I: IntoIterator,
        I::Item: Borrow<usize>,
    {
        assert!(j <= self.n());
        let removed: BTreeSet<usize> = removed.into_iter().map(|i| *i.borrow()).collect();
        Subgraph {
            parent: self,
            items: (0..self.m()).filter(|i| !removed.contains(i)).collect(),
            agents: j,
        }
    }

    pub fn subgraph(&self, items: BTreeSet<usize>, agents: usize) -> Subgraph<'_> {
        assert!(agents <= self.n());
        Subgraph {
            parent: self,
            items,
            agents,
        }
    }
}

/// Induced subgraph on a set of surviving items and the agent prefix `0..agents`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph<'a> {
    parent: &'a Canonical,
    items: BTreeSet<usize>,
    agents: usize,
}

impl<'a> Subgraph<'a> {
    pub fn parent(&self) -> &'a Canonical {
        self.parent
    }

    pub fn items(&self) -> &BTreeSet<usize> {
        &self.items
    }

    pub fn into_items(self) -> BTreeSet<usize> {
        self.items
    }

    pub fn agent_count(&self) -> usize {
        self.agents
    }

    fn degree(&self, i: usize) -> usize {
        self.parent.agents()[..self.agents]
            .iter()
            .filter(|a| a.covers(i))
            .count()
    }

    /// Surviving items adjacent to no surviving agent.
    pub fn stranded_items(&self) -> BTreeSet<usize> {
        self.items
            .iter()
            .copied()
            .filter(|&i| self.degree(i) == 0)
            .collect()
    }

    pub fn has_stranded(&self) -> bool {
        self.items.iter().any(|&i| self.degree(i) == 0)
    }

    /// Items of degree one, mapped to their owner.
    pub fn private_items(&self) -> BTreeMap<usize, usize> {
        let agents = &self.parent.agents()[..self.agents];
        self.items
            .iter()
            .filter_map(|&i| {
                let mut owners = agents.iter().enumerate().filter(|(_, a)| a.covers(i));
                match (owners.next(), owners.next()) {
                    (Some((j, _)), None) => Some((i, j)),
                    _ => None,
                }
            })
            .collect()
    }

    pub fn value(&self) -> Value {
        value::sum(self.items.iter().map(|&i| self.parent.value(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn ids(c: &Canonical, set: impl IntoIterator<Item = usize>) -> Vec<String> {
        set.into_iter().map(|i| c.items()[i].id.clone()).collect()
    }

    #[test]
    fn fixtures_validate() {
        for inst in [
            fixtures::t0(),
            fixtures::t1(),
            fixtures::e1(),
            fixtures::m1(),
        ] {
            let r = inst.validate();
            assert!(r.is_valid(), "{r}");
        }
    }

    #[test]
    fn margined_inclusion_is_reported() {
        let inst = ConvexInstance::from_parts(
            Mode::MaxMin,
            (1..=5).map(|i| (format!("x{i}"), value::one())),
            [("p".to_string(), 0, 4), ("q".to_string(), 1, 3)],
        );
        let r = inst.validate();
        assert_eq!(
            r.violations,
            vec![Violation::MarginedInclusion {
                outer: "p".into(),
                inner: "q".into()
            }]
        );
        assert_eq!(r.to_string(), "margined inclusion (p,q)");
    }

    #[test]
    fn shared_endpoint_is_not_margined() {
        let inst = ConvexInstance::from_parts(
            Mode::MaxMin,
            (1..=5).map(|i| (format!("x{i}"), value::one())),
            [("p".to_string(), 0, 4), ("q".to_string(), 0, 3)],
        );
        assert!(inst.validate().is_valid());
    }

    #[test]
    fn degree_zero_and_bad_interval() {
        let inst = ConvexInstance::from_parts(
            Mode::MaxMin,
            (1..=3).map(|i| (format!("x{i}"), value::one())),
            [("p".to_string(), 0, 0), ("q".to_string(), 2, 5)],
        );
        let r = inst.validate();
        assert!(r
            .violations
            .contains(&Violation::BadInterval { agent: "q".into() }));
        assert!(r
            .violations
            .contains(&Violation::UncoveredItem { item: "x2".into() }));
        assert!(Canonical::new(&inst).is_err());
    }

    #[test]
    fn lexicographic_order_of_shuffled_e1() {
        let mut inst = fixtures::e1();
        // input order p3, p1, p2
        inst.agents = vec![
            inst.agents[2].clone(),
            inst.agents[0].clone(),
            inst.agents[1].clone(),
        ];
        let order = inst.lexicographic_order();
        let names: Vec<&str> = order.iter().map(|&a| inst.agents[a].id.as_str()).collect();
        assert_eq!(names, ["p1", "p2", "p3"]);
    }

    #[test]
    fn lexicographic_order_ties_keep_input_order() {
        let inst = ConvexInstance::from_parts(
            Mode::MaxMin,
            (1..=2).map(|i| (format!("x{i}"), value::one())),
            [("b".to_string(), 0, 1), ("a".to_string(), 0, 1)],
        );
        assert_eq!(inst.lexicographic_order(), vec![0, 1]);
        let t1 = fixtures::t1();
        assert_eq!(t1.lexicographic_order(), vec![0, 1]);
    }

    #[test]
    fn remainder_examples() {
        let e1 = Canonical::new(&fixtures::e1()).unwrap();
        assert_eq!(e1.remainder([].iter(), 3), e1.full());

        let a1 = fixtures::e1_assignment_1();
        let h = e1.remainder(a1.bundle(2), 2);
        let (circles, squares): (Vec<_>, Vec<_>) = ids(&e1, h.items().iter().copied())
            .into_iter()
            .partition(|id| id.starts_with('c'));
        assert_eq!((circles.len(), squares.len()), (10, 4));

        let t1 = Canonical::new(&fixtures::t1()).unwrap();
        let h = t1.remainder([3].iter(), 1);
        assert_eq!(ids(&t1, h.items().iter().copied()), ["x1", "x2", "x3"]);
        assert_eq!(h.agent_count(), 1);
    }

    #[test]
    fn stranded_examples() {
        let e1 = Canonical::new(&fixtures::e1()).unwrap();
        assert!(e1.full().stranded_items().is_empty());

        let a2 = fixtures::e1_assignment_2_partial();
        let removed: Vec<usize> = a2.bundle(1).iter().chain(a2.bundle(2)).copied().collect();
        let h = e1.remainder(removed.iter(), 1);
        assert_eq!(
            ids(&e1, h.stranded_items()),
            ["c11", "c12", "c13", "c14", "c15"]
        );

        let t1 = Canonical::new(&fixtures::t1()).unwrap();
        let h = t1.remainder([1, 2, 3].iter(), 1);
        assert!(h.stranded_items().is_empty());
    }

    #[test]
    fn private_examples() {
        let e1 = Canonical::new(&fixtures::e1()).unwrap();
        let private = e1.full().private_items();
        let idx = |id: &str| e1.items().iter().position(|it| it.id == id).unwrap();
        assert_eq!(private.get(&idx("s1")), Some(&0));
        assert_eq!(private.get(&idx("s2")), Some(&0));
        assert_eq!(private.get(&idx("c15")), Some(&2));
        assert_eq!(private.get(&idx("c1")), None);

        let t1 = Canonical::new(&fixtures::t1()).unwrap();
        let private = t1.full().private_items();
        assert_eq!(private, BTreeMap::from([(0, 0), (3, 1)]));

        let complete = ConvexInstance::from_parts(
            Mode::MaxMin,
            (1..=4).map(|i| (format!("x{i}"), value::one())),
            [("a".to_string(), 0, 3), ("b".to_string(), 0, 3)],
        );
        let c = Canonical::new(&complete).unwrap();
        assert!(c.full().private_items().is_empty());
    }

    fn arb_intervals() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..10).prop_flat_map(|m| {
            (
                Just(m),
                prop::collection::vec((0..m, 0..m), 1..7)
                    .prop_map(|v| v.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect()),
            )
        })
    }

    proptest! {
        #[test]
        fn monotone_endpoints_match_pairwise((m, ivs) in arb_intervals()) {
            let inst = ConvexInstance::from_parts(
                Mode::MaxMin,
                (0..m).map(|i| (format!("x{i}"), value::one())),
                ivs.iter().enumerate().map(|(j, &(a, b))| (format!("p{j}"), a, b)),
            );
            let pairwise = !inst
                .validate()
                .violations
                .iter()
                .any(|v| matches!(v, Violation::MarginedInclusion { .. }));
            prop_assert_eq!(is_inclusion_free(&ivs), pairwise);
        }

        #[test]
        fn covering_agents_form_a_range((m, ivs) in arb_intervals()) {
            let inst = ConvexInstance::from_parts(
                Mode::MaxMin,
                (0..m).map(|i| (format!("x{i}"), value::one())),
                ivs.iter().enumerate().map(|(j, &(a, b))| (format!("p{j}"), a, b)),
            );
            if let Ok(c) = Canonical::new(&inst) {
                for i in 0..m {
                    let covering: Vec<usize> =
                        (0..c.n()).filter(|&j| c.agent(j).covers(i)).collect();
                    let range: Vec<usize> = c.covering_agents(i).collect();
                    prop_assert_eq!(covering, range);
                }
            }
        }

        #[test]
        fn remainder_keeps_right_aligned_intervals(
            (m, ivs) in arb_intervals(),
            cut in prop::collection::vec(0usize..4, 7),
        ) {
            let inst = ConvexInstance::from_parts(
                Mode::MaxMin,
                (0..m).map(|i| (format!("x{i}"), value::one())),
                ivs.iter().enumerate().map(|(j, &(a, b))| (format!("p{j}"), a, b)),
            );
            if let Ok(c) = Canonical::new(&inst) {
                // remove a right-aligned block from each agent's interval
                let mut removed = BTreeSet::new();
                for (j, a) in c.agents().iter().enumerate() {
                    let take = cut[j].min(a.len());
                    removed.extend(a.last + 1 - take..=a.last);
                }
                let h = c.remainder(removed.iter(), c.n());
                for a in c.agents() {
                    let surviving: Vec<usize> =
                        h.items().iter().copied().filter(|&i| a.covers(i)).collect();
                    let expected: Vec<usize> =
                        (a.first..=a.last).filter(|i| !removed.contains(i)).collect();
                    prop_assert_eq!(&surviving, &expected);
                    let pos: Vec<usize> = h
                        .items()
                        .iter()
                        .enumerate()
                        .filter(|(_, i)| a.covers(**i))
                        .map(|(p, _)| p)
                        .collect();
                    prop_assert!(pos.windows(2).all(|w| w[1] == w[0] + 1));
                }
            }
        }
    }
}
