//! JSON formats for instances and solver results.
//!
//! Instance:
//! `{"mode": "maxmin", "items": [{"id": "x1", "value": "3/5"}], "agents": [{"id": "p1", "l": 1, "r": 3, "demand": "1/1"}]}`
//! with 1-based inclusive intervals; `demand` is optional and defaults to 1.
//!
//! Result: `{"t_star": .., "objective": .., "guarantee": .., "assignment": {agent: [item ids]}}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::{Agent, ConvexInstance, Item, Mode};
use crate::solver::SolveResult;
use crate::value::{self, serde_str, Value};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    id: String,
    #[serde(with = "serde_str")]
    value: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentRecord {
    id: String,
    l: usize,
    r: usize,
    #[serde(
        default,
        with = "serde_str::option",
        skip_serializing_if = "Option::is_none"
    )]
    demand: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    mode: Mode,
    items: Vec<ItemRecord>,
    agents: Vec<AgentRecord>,
}

pub fn instance_from_json(text: &str) -> Result<ConvexInstance> {
    let rec: InstanceRecord = serde_json::from_str(text)?;
    let items = rec
        .items
        .into_iter()
        .map(|it| Item {
            id: it.id,
            value: it.value,
        })
        .collect();
    let mut agents = Vec::with_capacity(rec.agents.len());
    for a in rec.agents {
        if a.l == 0 || a.r == 0 {
            return Err(Error::InvalidInstance(format!(
                "agent {}: interval endpoints are 1-based",
                a.id
            )));
        }
        agents.push(Agent {
            id: a.id,
            first: a.l - 1,
            last: a.r - 1,
            demand: a.demand.unwrap_or_else(value::one),
        });
    }
    Ok(ConvexInstance::new(rec.mode, items, agents))
}

pub fn instance_to_json(inst: &ConvexInstance) -> String {
    let rec = InstanceRecord {
        mode: inst.mode,
        items: inst
            .items
            .iter()
            .map(|it| ItemRecord {
                id: it.id.clone(),
                value: it.value.clone(),
            })
            .collect(),
        agents: inst
            .agents
            .iter()
            .map(|a| AgentRecord {
                id: a.id.clone(),
                l: a.first + 1,
                r: a.last + 1,
                demand: (a.demand != value::one()).then(|| a.demand.clone()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&rec).expect("instances serialize") + "\n"
}

pub fn read_instance(path: &Path) -> Result<ConvexInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Json(format!("{}: {e}", path.display())))?;
    instance_from_json(&text).map_err(|e| match e {
        Error::Json(msg) => Error::Json(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_instance(path: &Path, inst: &ConvexInstance) -> Result<()> {
    std::fs::write(path, instance_to_json(inst))
        .map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct ResultRecord {
    #[serde(with = "serde_str")]
    pub t_star: Value,
    #[serde(with = "serde_str")]
    pub objective: Value,
    #[serde(with = "serde_str")]
    pub guarantee: Value,
    pub assignment: BTreeMap<String, Vec<String>>,
}

/// Bundles keyed by agent id, items in instance order.
pub fn named_bundles(inst: &ConvexInstance, a: &Assignment) -> BTreeMap<String, Vec<String>> {
    inst.agents
        .iter()
        .zip(a.bundles())
        .map(|(agent, b)| {
            let ids = b.iter().map(|&i| inst.items[i].id.clone()).collect();
            (agent.id.clone(), ids)
        })
        .collect()
}

/// Inverse of [`named_bundles`].
pub fn assignment_from_names(
    inst: &ConvexInstance,
    names: &BTreeMap<String, Vec<String>>,
) -> Result<Assignment> {
    let item_index: BTreeMap<&str, usize> = inst
        .items
        .iter()
        .enumerate()
        .map(|(i, it)| (it.id.as_str(), i))
        .collect();
    let mut a = Assignment::empty(inst.n());
    for (name, ids) in names {
        let j = inst
            .agents
            .iter()
            .position(|ag| &ag.id == name)
            .ok_or_else(|| Error::InfeasibleAssignment(format!("unknown agent {name}")))?;
        for id in ids {
            let i = *item_index
                .get(id.as_str())
                .ok_or_else(|| Error::InfeasibleAssignment(format!("unknown item {id}")))?;
            a.bundle_mut(j).insert(i);
        }
    }
    Ok(a)
}

pub fn result_record(inst: &ConvexInstance, r: &SolveResult) -> ResultRecord {
    ResultRecord {
        t_star: r.t_star.clone(),
        objective: r.objective.clone(),
        guarantee: r.guarantee.clone(),
        assignment: named_bundles(inst, &r.assignment),
    }
}

pub fn result_to_json(inst: &ConvexInstance, r: &SolveResult) -> String {
    serde_json::to_string_pretty(&result_record(inst, r)).expect("results serialize") + "\n"
}
