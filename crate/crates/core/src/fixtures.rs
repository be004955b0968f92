//! Small named instances shared by tests, examples and the CLI.
//!
//! * `t0`: one agent, one item of value 1.
//! * `t1`: items 3/5, 1/2, 1/2, 3/5; agents `[1,3]` and `[2,4]`. Optimum 11/10 in both modes.
//! * `e1`: 21 items, 15 circles of value 1/10 and 6 squares of value 1/4; agents
//!   `[1,7]`, `[3,14]`, `[8,21]`. Two different 1-assignments leave the first
//!   agent remainders with the same input vector but different reachability.
//! * `m1`: `t1` read as a Min-Max instance (jobs j1..j4, machines m1, m2).

use crate::assignment::Assignment;
use crate::instance::{ConvexInstance, Mode};
use crate::value::{ratio, Value};

fn build(mode: Mode, items: &[(&str, Value)], agents: &[(&str, usize, usize)]) -> ConvexInstance {
    ConvexInstance::from_parts(
        mode,
        items.iter().map(|(id, v)| (id.to_string(), v.clone())),
        agents
            .iter()
            .map(|&(id, l, r)| (id.to_string(), l - 1, r - 1)),
    )
}

pub fn t0() -> ConvexInstance {
    build(Mode::MaxMin, &[("x1", ratio(1, 1))], &[("p1", 1, 1)])
}

pub fn t1() -> ConvexInstance {
    build(
        Mode::MaxMin,
        &[
            ("x1", ratio(3, 5)),
            ("x2", ratio(1, 2)),
            ("x3", ratio(1, 2)),
            ("x4", ratio(3, 5)),
        ],
        &[("p1", 1, 3), ("p2", 2, 4)],
    )
}

/// Item order of `e1`.
pub const E1_ORDER: [&str; 21] = [
    "s1", "s2", "c1", "c2", "c3", "c4", "c5", "c6", "s3", "c7", "c8", "s4", "c9", "c10", "s5",
    "c11", "s6", "c12", "c13", "c14", "c15",
];

pub fn e1() -> ConvexInstance {
    let items: Vec<(&str, Value)> = E1_ORDER
        .iter()
        .map(|&id| {
            let v = if id.starts_with('s') {
                ratio(1, 4)
            } else {
                ratio(1, 10)
            };
            (id, v)
        })
        .collect();
    build(
        Mode::MaxMin,
        &items,
        &[("p1", 1, 7), ("p2", 3, 14), ("p3", 8, 21)],
    )
}

pub fn e1_index(id: &str) -> usize {
    E1_ORDER
        .iter()
        .position(|&x| x == id)
        .unwrap_or_else(|| panic!("no item {id} in e1"))
}

fn e1_bundle(ids: &[&str]) -> Vec<usize> {
    ids.iter().map(|id| e1_index(id)).collect()
}

/// Every agent takes its rightmost five circles and two squares.
pub fn e1_assignment_1() -> Assignment {
    Assignment::from_bundles([
        e1_bundle(&["s1", "s2", "c1", "c2", "c3", "c4", "c5"]),
        e1_bundle(&["s3", "s4", "c6", "c7", "c8", "c9", "c10"]),
        e1_bundle(&["s5", "s6", "c11", "c12", "c13", "c14", "c15"]),
    ])
}

/// The third agent takes all four of its squares, the second all ten of its
/// circles; c11..c15 are left unassigned and out of reach of the first agent.
pub fn e1_assignment_2_partial() -> Assignment {
    Assignment::from_bundles([
        e1_bundle(&["s1", "s2"]),
        e1_bundle(&["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10"]),
        e1_bundle(&["s3", "s4", "s5", "s6"]),
    ])
}

/// `e1_assignment_2_partial` completed to a partition: the third agent also
/// receives c11..c15.
pub fn e1_assignment_2() -> Assignment {
    let mut a = e1_assignment_2_partial();
    a.bundle_mut(2)
        .extend(e1_bundle(&["c11", "c12", "c13", "c14", "c15"]));
    a
}

pub fn m1() -> ConvexInstance {
    build(
        Mode::MinMax,
        &[
            ("j1", ratio(3, 5)),
            ("j2", ratio(1, 2)),
            ("j3", ratio(1, 2)),
            ("j4", ratio(3, 5)),
        ],
        &[("m1", 1, 3), ("m2", 2, 4)],
    )
}

/// `m1` with every job runnable on both machines.
pub fn m1_complete() -> ConvexInstance {
    let mut m = m1();
    for a in &mut m.agents {
        a.first = 0;
        a.last = 3;
    }
    m
}

/// `m1` with j4 also runnable on the first machine.
pub fn m1_widened() -> ConvexInstance {
    let mut m = m1();
    m.agents[0].last = 3;
    m
}
