use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Event kinds in the order simultaneous events are processed. `Arrival` is only logged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EventKind {
    ZeroCrossing,
    Covering,
    Uncovering,
    ActiveEnd,
    IdleEnd,
    TransitEnd,
    NoiseShock,
    Arrival,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ZeroCrossing => "zeroCrossing",
            EventKind::Covering => "covering",
            EventKind::Uncovering => "uncovering",
            EventKind::ActiveEnd => "activeEnd",
            EventKind::IdleEnd => "idleEnd",
            EventKind::TransitEnd => "transitEnd",
            EventKind::NoiseShock => "noiseShock",
            EventKind::Arrival => "arrival",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One processed event with the true uncertainty of every target right after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    /// Agent id, if the event belongs to an agent.
    pub agent: Option<u32>,
    /// Target id.
    pub target: u32,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Pending {
    pub time: f64,
    pub kind: EventKind,
    pub agent: Option<usize>,
    pub target: usize,
    pub generation: u64,
    seq: u64,
}

impl Pending {
    fn key(&self) -> (EventKind, Option<usize>, usize, u64) {
        (self.kind, self.agent, self.target, self.seq)
    }
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // Reversed so the max-heap pops the earliest event first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.key().cmp(&self.key()))
    }
}

/// Time-ordered queue; ties broken by kind, agent, target, then insertion order.
#[derive(Debug, Default)]
pub(crate) struct EventQueue {
    heap: BinaryHeap<Pending>,
    seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, time: f64, kind: EventKind, agent: Option<usize>, target: usize, generation: u64) {
        self.seq += 1;
        self.heap.push(Pending { time, kind, agent, target, generation, seq: self.seq });
    }

    pub fn pop(&mut self) -> Option<Pending> {
        self.heap.pop()
    }
}
