use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::Canonical;
use crate::value::{self, Value};

/// Per-agent bundles of item indices. Bundles are disjoint; items may be left
/// unassigned while an assignment is partial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    bundles: Vec<BTreeSet<usize>>,
}

impl Assignment {
    pub fn empty(n: usize) -> Self {
        Assignment {
            bundles: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_bundles<B, I>(bundles: B) -> Self
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        Assignment {
            bundles: bundles
                .into_iter()
                .map(|b| b.into_iter().collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, j: usize) -> &BTreeSet<usize> {
        &self.bundles[j]
    }

    pub fn bundle_mut(&mut self, j: usize) -> &mut BTreeSet<usize> {
        &mut self.bundles[j]
    }

    pub fn bundles(&self) -> &[BTreeSet<usize>] {
        &self.bundles
    }

    pub fn owner(&self, item: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(&item))
    }

    pub fn assigned(&self) -> BTreeSet<usize> {
        self.bundles.iter().flatten().copied().collect()
    }

    pub fn is_partition_of(&self, m: usize) -> bool {
        let total: usize = self.bundles.iter().map(|b| b.len()).sum();
        let all = self.assigned();
        total == all.len() && all.len() == m && all.iter().all(|&i| i < m)
    }

    /// Bundle value under the given per-item values.
    pub fn bundle_value(&self, j: usize, values: &[Value]) -> Value {
        value::sum(self.bundles[j].iter().map(|&i| &values[i]))
    }

    /// Reorders bundles: `order[j]` is the destination index of bundle `j`.
    pub fn reindexed(&self, order: &[usize]) -> Assignment {
        let mut out = Assignment::empty(self.n());
        for (j, &dst) in order.iter().enumerate() {
            out.bundles[dst] = self.bundles[j].clone();
        }
        out
    }

    /// Checks disjointness and interval membership against a canonical
    /// instance (bundles indexed by canonical agent).
    pub fn check_structure(&self, c: &Canonical) -> Result<()> {
        if self.n() != c.n() {
            return Err(Error::InfeasibleAssignment(format!(
                "{} bundles for {} agents",
                self.n(),
                c.n()
            )));
        }
        let mut seen = BTreeSet::new();
        for (j, b) in self.bundles.iter().enumerate() {
            let agent = c.agent(j);
            for &i in b {
                if i >= c.m() {
                    return Err(Error::InfeasibleAssignment(format!("unknown item {i}")));
                }
                if !agent.covers(i) {
                    return Err(Error::InfeasibleAssignment(format!(
                        "item {} outside the interval of agent {}",
                        c.items()[i].id,
                        agent.id
                    )));
                }
                if !seen.insert(i) {
                    return Err(Error::InfeasibleAssignment(format!(
                        "item {} assigned twice",
                        c.items()[i].id
                    )));
                }
            }
        }
        Ok(())
    }
}
