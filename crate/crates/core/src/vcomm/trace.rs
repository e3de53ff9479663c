use serde::{Deserialize, Serialize};

/// Kinds of communication operations counted by [`TraceStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollectiveKind {
    Bcast,
    Allreduce,
    Alltoall,
    Alltoallv,
    Exchange,
    Split,
}

impl CollectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            CollectiveKind::Bcast => "bcast",
            CollectiveKind::Allreduce => "allreduce",
            CollectiveKind::Alltoall => "alltoall",
            CollectiveKind::Alltoallv => "alltoallv",
            CollectiveKind::Exchange => "exchange",
            CollectiveKind::Split => "split",
        }
    }
}

/// Invocation counts per collective kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectiveCounts {
    pub bcast: u64,
    pub allreduce: u64,
    pub alltoall: u64,
    pub alltoallv: u64,
    pub exchange: u64,
    pub split: u64,
}

impl CollectiveCounts {
    pub fn get(&self, kind: CollectiveKind) -> u64 {
        match kind {
            CollectiveKind::Bcast => self.bcast,
            CollectiveKind::Allreduce => self.allreduce,
            CollectiveKind::Alltoall => self.alltoall,
            CollectiveKind::Alltoallv => self.alltoallv,
            CollectiveKind::Exchange => self.exchange,
            CollectiveKind::Split => self.split,
        }
    }

    fn slot(&mut self, kind: CollectiveKind) -> &mut u64 {
        match kind {
            CollectiveKind::Bcast => &mut self.bcast,
            CollectiveKind::Allreduce => &mut self.allreduce,
            CollectiveKind::Alltoall => &mut self.alltoall,
            CollectiveKind::Alltoallv => &mut self.alltoallv,
            CollectiveKind::Exchange => &mut self.exchange,
            CollectiveKind::Split => &mut self.split,
        }
    }

    pub fn total(&self) -> u64 {
        self.bcast + self.allreduce + self.alltoall + self.alltoallv + self.exchange + self.split
    }
}

/// Per-rank transfer counters.
///
/// Element counters count elements, not bytes; pivot units count one logical
/// value per receiving rank per collective round. A rank never counts data it
/// delivers to itself. All counters only grow during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceStats {
    /// Elements this rank sent through pairwise exchanges.
    pub element_units_sent: u64,
    pub element_units_received: u64,
    /// Elements this rank sent to other ranks in the final redistribution.
    pub element_units_alltoallv: u64,
    pub element_units_alltoallv_received: u64,
    pub pivot_units: u64,
    pub collectives: CollectiveCounts,
    /// Slot count of every allreduce this rank took part in, in call order.
    pub allreduce_slots: Vec<usize>,
}

impl TraceStats {
    pub(crate) fn count_call(&mut self, kind: CollectiveKind) {
        *self.collectives.slot(kind) += 1;
    }

    /// Sums a set of per-rank traces. `allreduce_slots` is taken from the
    /// first trace since every member of a collective records the same rounds.
    pub fn total<'a>(traces: impl IntoIterator<Item = &'a TraceStats>) -> TraceStats {
        let mut acc = TraceStats::default();
        let mut first = true;
        for t in traces {
            acc.element_units_sent += t.element_units_sent;
            acc.element_units_received += t.element_units_received;
            acc.element_units_alltoallv += t.element_units_alltoallv;
            acc.element_units_alltoallv_received += t.element_units_alltoallv_received;
            acc.pivot_units += t.pivot_units;
            acc.collectives.bcast += t.collectives.bcast;
            acc.collectives.allreduce += t.collectives.allreduce;
            acc.collectives.alltoall += t.collectives.alltoall;
            acc.collectives.alltoallv += t.collectives.alltoallv;
            acc.collectives.exchange += t.collectives.exchange;
            acc.collectives.split += t.collectives.split;
            if first {
                acc.allreduce_slots = t.allreduce_slots.clone();
                first = false;
            }
        }
        acc
    }
}

/// One rank's entry in the exported trace document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTraceRecord {
    pub element_units_sent: u64,
    pub element_units_alltoallv: u64,
    pub pivot_units: u64,
    pub collectives: CollectiveCounts,
}

impl From<&TraceStats> for RankTraceRecord {
    fn from(t: &TraceStats) -> Self {
        RankTraceRecord {
            element_units_sent: t.element_units_sent,
            element_units_alltoallv: t.element_units_alltoallv,
            pivot_units: t.pivot_units,
            collectives: t.collectives,
        }
    }
}

/// Trace export: `{variant, p, n, per_rank: [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub variant: String,
    pub p: usize,
    pub n: usize,
    pub per_rank: Vec<RankTraceRecord>,
}

impl TraceDocument {
    pub fn new(variant: impl Into<String>, n: usize, traces: &[TraceStats]) -> Self {
        TraceDocument {
            variant: variant.into(),
            p: traces.len(),
            n,
            per_rank: traces.iter().map(RankTraceRecord::from).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace document serializes")
    }
}
