//! Virtual SPMD runtime.
//!
//! [`spawn_spmd`] runs one program per logical process ("rank") over an
//! in-process fabric. Ranks talk only through a [`Comm`]: broadcast,
//! min/max allreduce, all-to-all of counts, irregular all-to-all of
//! elements, pairwise exchange and group splitting. Every operation is
//! traced per rank in a [`TraceStats`].
//!
//! Collectives are implemented semantically: all contributions of one call
//! are gathered at a rendezvous point, the result is computed once and handed
//! back to each member. Calls are matched by a per-communicator sequence
//! number, so members of a group must issue their collectives in the same
//! order, as with MPI.

mod exec;
mod trace;

use std::collections::{HashMap, VecDeque};
use std::future::Future;
use std::pin::Pin;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::task::{Context, Poll, Waker};
use std::time::Duration;

pub use trace::{CollectiveCounts, CollectiveKind, RankTraceRecord, TraceDocument, TraceStats};

use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::localcore::SegmentTable;

/// Returns `true` when `p` is a power of two (`p >= 1`).
pub fn is_power_of_two(p: usize) -> bool {
    p != 0 && p & (p - 1) == 0
}

/// State shared by all ranks of one run.
struct Fabric<K> {
    aborted: AtomicBool,
    next_group: AtomicU64,
    /// Point-to-point queues keyed by (source world rank, destination world rank).
    mailboxes: Mutex<HashMap<(usize, usize), Mailbox<K>>>,
}

struct Mailbox<K> {
    queue: VecDeque<Vec<K>>,
    receiver: Option<Waker>,
}

impl<K> Default for Mailbox<K> {
    fn default() -> Self {
        Mailbox {
            queue: VecDeque::new(),
            receiver: None,
        }
    }
}

/// A set of ranks that can run collectives together.
struct Group<K> {
    id: u64,
    /// World ranks of the members, indexed by group rank.
    members: Vec<usize>,
    rounds: Mutex<HashMap<u64, Round<K>>>,
}

impl<K> Group<K> {
    fn new(id: u64, members: Vec<usize>) -> Self {
        Group {
            id,
            members,
            rounds: Mutex::new(HashMap::new()),
        }
    }
}

struct Round<K> {
    contributions: Vec<Option<Contribution<K>>>,
    arrived: usize,
    outcome: Option<Result<Vec<Option<Delivery<K>>>>>,
    wakers: Vec<Option<Waker>>,
    pending_pickups: usize,
}

impl<K> Round<K> {
    fn new(size: usize) -> Self {
        Round {
            contributions: (0..size).map(|_| None).collect(),
            arrived: 0,
            outcome: None,
            wakers: (0..size).map(|_| None).collect(),
            pending_pickups: size,
        }
    }
}

enum Contribution<K> {
    Bcast { root: usize, value: Vec<K> },
    MinMax(Vec<Option<(K, K)>>),
    MeanOfValid(Vec<Option<K>>),
    MaxCount(usize),
    Counts(Vec<usize>),
    Alltoallv(Vec<Vec<K>>),
    Split { lower: bool },
}

impl<K> Contribution<K> {
    fn describe(&self) -> String {
        match self {
            Contribution::Bcast { root, value } => format!("bcast(root={root}, len={})", value.len()),
            Contribution::MinMax(v) => format!("allreduce_minmax(len={})", v.len()),
            Contribution::MeanOfValid(v) => format!("allreduce_mean(len={})", v.len()),
            Contribution::MaxCount(_) => "allreduce_max_count".to_string(),
            Contribution::Counts(v) => format!("alltoall_counts(len={})", v.len()),
            Contribution::Alltoallv(v) => format!("alltoallv(parts={})", v.len()),
            Contribution::Split { .. } => "split_group".to_string(),
        }
    }
}

enum Delivery<K> {
    Keys(Vec<K>),
    MinMax(Vec<Option<(K, K)>>),
    Means(Vec<Option<K>>),
    Count(usize),
    Counts(Vec<usize>),
    Alltoallv { data: Vec<K>, lengths: Vec<usize> },
    Group { group: Arc<Group<K>>, rank: usize },
}

/// A rank's handle on a group of ranks.
///
/// Cloning a `Comm` yields another handle for the same rank in the same
/// group; clones share the collective sequence counter.
pub struct Comm<K> {
    group: Arc<Group<K>>,
    rank: usize,
    seq: Arc<AtomicU64>,
    fabric: Arc<Fabric<K>>,
    trace: Arc<Mutex<TraceStats>>,
}

impl<K> Clone for Comm<K> {
    fn clone(&self) -> Self {
        Comm {
            group: Arc::clone(&self.group),
            rank: self.rank,
            seq: Arc::clone(&self.seq),
            fabric: Arc::clone(&self.fabric),
            trace: Arc::clone(&self.trace),
        }
    }
}

impl<K> std::fmt::Debug for Comm<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Comm")
            .field("group", &self.group.id)
            .field("size", &self.size())
            .field("rank", &self.rank)
            .field("world_rank", &self.world_rank())
            .finish()
    }
}

impl<K> Comm<K> {
    pub fn size(&self) -> usize {
        self.group.members.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn world_rank(&self) -> usize {
        self.group.members[self.rank]
    }
}

impl<K: SortKey> Comm<K> {
    /// Snapshot of this rank's counters so far.
    pub fn trace(&self) -> TraceStats {
        self.trace.lock().unwrap().clone()
    }

    fn record(&self, f: impl FnOnce(&mut TraceStats)) {
        f(&mut self.trace.lock().unwrap());
    }

    fn check_abort(&self) -> Result<()> {
        if self.fabric.aborted.load(Ordering::Acquire) {
            Err(Error::Aborted)
        } else {
            Ok(())
        }
    }

    fn collective(&self, contribution: Contribution<K>) -> CollectiveFuture<'_, K> {
        let seq = self.seq.fetch_add(1, Ordering::Relaxed);
        CollectiveFuture {
            comm: self,
            seq,
            contribution: Some(contribution),
        }
    }

    /// Broadcasts `value` from `root` to every member. Non-root values are ignored.
    pub async fn bcast(&self, root: usize, value: Vec<K>) -> Result<Vec<K>> {
        if root >= self.size() {
            return Err(Error::Contract(format!(
                "bcast root {root} outside group of {}",
                self.size()
            )));
        }
        let is_root = root == self.rank;
        let value = if is_root { value } else { Vec::new() };
        match self.collective(Contribution::Bcast { root, value }).await? {
            Delivery::Keys(v) => {
                self.record(|t| {
                    t.count_call(CollectiveKind::Bcast);
                    if !is_root {
                        t.pivot_units += v.len() as u64;
                    }
                });
                Ok(v)
            }
            _ => unreachable!("bcast delivers keys"),
        }
    }

    /// Elementwise global (min, max) over the valid entries of every member.
    ///
    /// `None` marks an entry the caller does not contribute to (an empty
    /// segment). A position where no member contributed comes back `None`
    /// on every rank.
    pub async fn allreduce_minmax(&self, local: Vec<Option<(K, K)>>) -> Result<Vec<Option<(K, K)>>> {
        let slots = local.len();
        match self.collective(Contribution::MinMax(local)).await? {
            Delivery::MinMax(v) => {
                self.record_allreduce(slots);
                Ok(v)
            }
            _ => unreachable!("allreduce_minmax delivers pairs"),
        }
    }

    /// Elementwise arithmetic mean of the valid entries of every member.
    pub async fn allreduce_mean(&self, local: Vec<Option<K>>) -> Result<Vec<Option<K>>> {
        let slots = local.len();
        match self.collective(Contribution::MeanOfValid(local)).await? {
            Delivery::Means(v) => {
                self.record_allreduce(slots);
                Ok(v)
            }
            _ => unreachable!("allreduce_mean delivers means"),
        }
    }

    /// Maximum of one count over all members.
    pub async fn allreduce_max_count(&self, local: usize) -> Result<usize> {
        match self.collective(Contribution::MaxCount(local)).await? {
            Delivery::Count(v) => {
                self.record_allreduce(1);
                Ok(v)
            }
            _ => unreachable!("allreduce_max_count delivers a count"),
        }
    }

    fn record_allreduce(&self, slots: usize) {
        let receives = self.size() > 1;
        self.record(|t| {
            t.count_call(CollectiveKind::Allreduce);
            t.allreduce_slots.push(slots);
            if receives {
                t.pivot_units += slots as u64;
            }
        });
    }

    /// Transposes the count matrix: entry `s` of the result is what rank `s`
    /// put in entry `self.rank()` of its `send_counts`.
    pub async fn alltoall_counts(&self, send_counts: Vec<usize>) -> Result<Vec<usize>> {
        if send_counts.len() != self.size() {
            return Err(Error::Contract(format!(
                "alltoall_counts expects {} entries, got {}",
                self.size(),
                send_counts.len()
            )));
        }
        match self.collective(Contribution::Counts(send_counts)).await? {
            Delivery::Counts(v) => {
                self.record(|t| t.count_call(CollectiveKind::Alltoall));
                Ok(v)
            }
            _ => unreachable!("alltoall_counts delivers counts"),
        }
    }

    /// Sends segment `j` of `buffer` to rank `j` and returns the concatenation,
    /// in source rank order, of every rank's segment for this rank, together
    /// with the per-source lengths.
    pub async fn alltoallv(&self, buffer: &[K], segments: &SegmentTable) -> Result<(Vec<K>, Vec<usize>)> {
        if segments.active_count() != self.size() {
            return Err(Error::Contract(format!(
                "alltoallv expects {} segments, got {}",
                self.size(),
                segments.active_count()
            )));
        }
        segments.validate(buffer.len())?;
        let parts: Vec<Vec<K>> = segments.ranges().map(|r| buffer[r].to_vec()).collect();
        let sent_out: usize = parts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.rank)
            .map(|(_, v)| v.len())
            .sum();
        match self.collective(Contribution::Alltoallv(parts)).await? {
            Delivery::Alltoallv { data, lengths } => {
                let received_in = data.len() - lengths[self.rank];
                self.record(|t| {
                    t.count_call(CollectiveKind::Alltoallv);
                    t.element_units_alltoallv += sent_out as u64;
                    t.element_units_alltoallv_received += received_in as u64;
                });
                Ok((data, lengths))
            }
            _ => unreachable!("alltoallv delivers a buffer"),
        }
    }

    /// Pairwise exchange with `partner`, which must be `rank ^ size/2`.
    pub async fn exchange(&self, partner: usize, send: Vec<K>) -> Result<Vec<K>> {
        let size = self.size();
        if size < 2 || partner != self.rank ^ (size / 2) {
            return Err(Error::Contract(format!(
                "rank {} of {size} may only exchange with rank {}, not {partner}",
                self.rank,
                self.rank ^ (size / 2)
            )));
        }
        let sent = send.len();
        let received = ExchangeFuture {
            comm: self,
            me: self.world_rank(),
            partner: self.group.members[partner],
            send: Some(send),
        }
        .await?;
        self.record(|t| {
            t.count_call(CollectiveKind::Exchange);
            t.element_units_sent += sent as u64;
            t.element_units_received += received.len() as u64;
        });
        Ok(received)
    }

    /// Splits the group into its lower and upper halves and returns the
    /// caller's half. `lower_half` must equal `rank < size / 2`.
    pub async fn split_group(&self, lower_half: bool) -> Result<Comm<K>> {
        if self.size() < 2 {
            return Err(Error::Contract("cannot split a group of size 1".into()));
        }
        match self.collective(Contribution::Split { lower: lower_half }).await? {
            Delivery::Group { group, rank } => {
                self.record(|t| t.count_call(CollectiveKind::Split));
                Ok(Comm {
                    group,
                    rank,
                    seq: Arc::new(AtomicU64::new(0)),
                    fabric: Arc::clone(&self.fabric),
                    trace: Arc::clone(&self.trace),
                })
            }
            _ => unreachable!("split delivers a group"),
        }
    }
}

struct CollectiveFuture<'a, K> {
    comm: &'a Comm<K>,
    seq: u64,
    contribution: Option<Contribution<K>>,
}

impl<K> Unpin for CollectiveFuture<'_, K> {}

impl<K: SortKey> Future for CollectiveFuture<'_, K> {
    type Output = Result<Delivery<K>>;

    fn poll(mut self: Pin<&mut Self>, cx: &mut Context<'_>) -> Poll<Self::Output> {
        self.comm.check_abort()?;
        let comm = self.comm;
        let size = comm.size();
        let rank = comm.rank;
        let mut to_wake = Vec::new();
        let ready = {
            let mut rounds = comm.group.rounds.lock().unwrap();
            let round = rounds.entry(self.seq).or_insert_with(|| Round::new(size));
            if let Some(c) = self.contribution.take() {
                round.contributions[rank] = Some(c);
                round.arrived += 1;
                if round.arrived == size {
                    let contributions = round.contributions.iter_mut().map(|c| c.take().unwrap()).collect();
                    round.outcome = Some(combine(&comm.fabric, &comm.group, contributions));
                    to_wake.extend(round.wakers.iter_mut().filter_map(Option::take));
                }
            }
            match &mut round.outcome {
                Some(outcome) => {
                    let mine = match outcome {
                        Ok(deliveries) => Ok(deliveries[rank].take().expect("delivery picked up once")),
                        Err(e) => Err(e.clone()),
                    };
                    round.pending_pickups -= 1;
                    if round.pending_pickups == 0 {
                        rounds.remove(&self.seq);
                    }
                    Some(mine)
                }
                None => {
                    round.wakers[rank] = Some(cx.waker().clone());
                    None
                }
            }
        };
        for w in to_wake {
            w.wake();
        }
        match ready {
            Some(r) => Poll::Ready(r),
            None => Poll::Pending,
        }
    }
}

fn mismatch<K>(contributions: &[Contribution<K>]) -> Error {
    let shapes: Vec<String> = contributions.iter().map(Contribution::describe).collect();
    Error::CollectiveMismatch(shapes.join(", "))
}

/// Computes every member's delivery from the full set of contributions.
fn combine<K: SortKey>(
    fabric: &Fabric<K>,
    group: &Group<K>,
    contributions: Vec<Contribution<K>>,
) -> Result<Vec<Option<Delivery<K>>>> {
    let size = contributions.len();
    match &contributions[0] {
        Contribution::Bcast { root, .. } => {
            let root = *root;
            if contributions
                .iter()
                .any(|c| !matches!(c, Contribution::Bcast { root: r, .. } if *r == root))
            {
                return Err(mismatch(&contributions));
            }
            let value = match &contributions[root] {
                Contribution::Bcast { value, .. } => value.clone(),
                _ => unreachable!(),
            };
            Ok((0..size).map(|_| Some(Delivery::Keys(value.clone()))).collect())
        }
        Contribution::MinMax(first) => {
            let len = first.len();
            let mut acc: Vec<Option<(K, K)>> = vec![None; len];
            for c in &contributions {
                let Contribution::MinMax(v) = c else {
                    return Err(mismatch(&contributions));
                };
                if v.len() != len {
                    return Err(mismatch(&contributions));
                }
                for (slot, entry) in acc.iter_mut().zip(v) {
                    if let Some((lo, hi)) = entry {
                        *slot = Some(match *slot {
                            None => (*lo, *hi),
                            Some((a, b)) => (a.min(*lo), b.max(*hi)),
                        });
                    }
                }
            }
            Ok((0..size).map(|_| Some(Delivery::MinMax(acc.clone()))).collect())
        }
        Contribution::MeanOfValid(first) => {
            let len = first.len();
            let mut valid: Vec<Vec<K>> = vec![Vec::new(); len];
            for c in &contributions {
                let Contribution::MeanOfValid(v) = c else {
                    return Err(mismatch(&contributions));
                };
                if v.len() != len {
                    return Err(mismatch(&contributions));
                }
                for (bucket, entry) in valid.iter_mut().zip(v) {
                    if let Some(x) = entry {
                        bucket.push(*x);
                    }
                }
            }
            let means = mean_slots::<K>(valid);
            Ok((0..size).map(|_| Some(Delivery::Means(means.clone()))).collect())
        }
        Contribution::MaxCount(_) => {
            let mut max = 0;
            for c in &contributions {
                let Contribution::MaxCount(v) = c else {
                    return Err(mismatch(&contributions));
                };
                max = max.max(*v);
            }
            Ok((0..size).map(|_| Some(Delivery::Count(max))).collect())
        }
        Contribution::Counts(_) => {
            let mut matrix = Vec::with_capacity(size);
            for c in &contributions {
                match c {
                    Contribution::Counts(v) if v.len() == size => matrix.push(v),
                    _ => return Err(mismatch(&contributions)),
                }
            }
            Ok((0..size)
                .map(|r| Some(Delivery::Counts((0..size).map(|s| matrix[s][r]).collect())))
                .collect())
        }
        Contribution::Alltoallv(_) => {
            let mut parts = Vec::with_capacity(size);
            for c in contributions {
                match c {
                    Contribution::Alltoallv(v) if v.len() == size => parts.push(v),
                    other => {
                        return Err(Error::CollectiveMismatch(format!(
                            "alltoallv mixed with {}",
                            other.describe()
                        )))
                    }
                }
            }
            let mut deliveries: Vec<(Vec<K>, Vec<usize>)> = (0..size).map(|_| (Vec::new(), Vec::new())).collect();
            for source in parts {
                for (dest, seg) in source.into_iter().enumerate() {
                    deliveries[dest].1.push(seg.len());
                    deliveries[dest].0.extend(seg);
                }
            }
            Ok(deliveries
                .into_iter()
                .map(|(data, lengths)| Some(Delivery::Alltoallv { data, lengths }))
                .collect())
        }
        Contribution::Split { .. } => {
            let half = size / 2;
            for (r, c) in contributions.iter().enumerate() {
                match c {
                    Contribution::Split { lower } if *lower == (r < half) => {}
                    Contribution::Split { lower } => {
                        return Err(Error::Contract(format!(
                            "rank {r} of {size} asked for the {} half",
                            if *lower { "lower" } else { "upper" }
                        )))
                    }
                    _ => return Err(mismatch(&contributions)),
                }
            }
            let lower_id = fabric.next_group.fetch_add(2, Ordering::Relaxed);
            let lower = Arc::new(Group::new(lower_id, group.members[..half].to_vec()));
            let upper = Arc::new(Group::new(lower_id + 1, group.members[half..].to_vec()));
            Ok((0..size)
                .map(|r| {
                    Some(if r < half {
                        Delivery::Group {
                            group: Arc::clone(&lower),
                            rank: r,
                        }
                    } else {
                        Delivery::Group {
                            group: Arc::clone(&upper),
                            rank: r - half,
                        }
                    })
                })
                .collect())
        }
    }
}

fn mean_slots<K: SortKey>(valid: Vec<Vec<K>>) -> Vec<Option<K>> {
    valid
        .into_iter()
        .map(|v| if v.is_empty() { None } else { Some(K::mean(&v)) })
        .collect()
}

struct ExchangeFuture<'a, K> {
    comm: &'a Comm<K>,
    me: usize,
    partner: usize,
    send: Option<Vec<K>>,
}

impl<K> Unpin for ExchangeFuture<'_, K> {}

impl<K: SortKey> Future for ExchangeFuture<'_, K> {
    type Output = Result<Vec<K>>;

    fn poll(mut self: Pin<&mut Self>, cx: &mut Context<'_>) -> Poll<Self::Output> {
        self.comm.check_abort()?;
        let (me, partner) = (self.me, self.partner);
        let mut wake = None;
        let received = {
            let mut boxes = self.comm.fabric.mailboxes.lock().unwrap();
            if let Some(data) = self.send.take() {
                let outgoing = boxes.entry((me, partner)).or_default();
                outgoing.queue.push_back(data);
                wake = outgoing.receiver.take();
            }
            let incoming = boxes.entry((partner, me)).or_default();
            match incoming.queue.pop_front() {
                Some(data) => Some(data),
                None => {
                    incoming.receiver = Some(cx.waker().clone());
                    None
                }
            }
        };
        if let Some(w) = wake {
            w.wake();
        }
        match received {
            Some(data) => Poll::Ready(Ok(data)),
            None => Poll::Pending,
        }
    }
}

/// Result of an SPMD run: one output per rank plus the per-rank traces.
#[derive(Debug)]
pub struct SpmdRun<O> {
    pub outputs: Vec<O>,
    pub traces: Vec<TraceStats>,
    /// Time from the start of the run until each rank finished. Absent on
    /// targets without a monotonic clock.
    pub finish_times: Option<Vec<Duration>>,
}

impl<O> SpmdRun<O> {
    /// Completion time of the slowest rank.
    pub fn slowest(&self) -> Option<Duration> {
        self.finish_times.as_ref().and_then(|t| t.iter().max().copied())
    }

    pub fn total_trace(&self) -> TraceStats {
        TraceStats::total(&self.traces)
    }
}

/// Runtime settings for [`Spmd`].
#[derive(Debug, Clone)]
pub struct Spmd {
    p: usize,
    workers: usize,
}

impl Spmd {
    /// A runtime for `p` ranks, multiplexed over as many worker threads as
    /// the machine offers (at most `p`).
    pub fn new(p: usize) -> Self {
        let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        Spmd {
            p,
            workers: cores.min(p.max(1)),
        }
    }

    /// Overrides the number of worker threads. One worker runs every rank on
    /// the calling thread.
    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Runs `program` on every rank. `program` is called once per rank, in
    /// rank order, with that rank's world communicator and input buffer.
    ///
    /// Outputs do not depend on the number of workers or on scheduling order.
    /// If any rank fails, the surviving ranks are aborted and the error of
    /// the lowest failing rank is returned.
    pub fn run<'a, K, O, F, Fut>(&self, inputs: Vec<Vec<K>>, program: F) -> Result<SpmdRun<O>>
    where
        K: SortKey,
        O: Send + 'a,
        F: Fn(Comm<K>, Vec<K>) -> Fut,
        Fut: Future<Output = Result<O>> + Send + 'a,
    {
        let p = self.p;
        if !is_power_of_two(p) {
            return Err(Error::Config(format!("rank count {p} is not a power of two")));
        }
        if inputs.len() != p {
            return Err(Error::Config(format!(
                "expected {p} input buffers, got {}",
                inputs.len()
            )));
        }
        let fabric = Arc::new(Fabric {
            aborted: AtomicBool::new(false),
            next_group: AtomicU64::new(1),
            mailboxes: Mutex::new(HashMap::new()),
        });
        let world = Arc::new(Group::new(0, (0..p).collect()));
        let traces: Vec<Arc<Mutex<TraceStats>>> = (0..p).map(|_| Arc::default()).collect();

        let futures: Vec<exec::RankFuture<'a, O>> = inputs
            .into_iter()
            .enumerate()
            .map(|(rank, input)| {
                let comm = Comm {
                    group: Arc::clone(&world),
                    rank,
                    seq: Arc::new(AtomicU64::new(0)),
                    fabric: Arc::clone(&fabric),
                    trace: Arc::clone(&traces[rank]),
                };
                Box::pin(program(comm, input)) as exec::RankFuture<'a, O>
            })
            .collect();

        let abort = || fabric.aborted.store(true, Ordering::Release);
        let done = exec::run(futures, self.workers, &abort);

        let mut failure: Option<Error> = None;
        for res in done.results.iter().flatten() {
            if let Err(e) = res {
                if *e != Error::Aborted {
                    failure = Some(e.clone());
                    break;
                }
            }
        }
        if let Some(e) = failure {
            return Err(e);
        }
        if done.deadlock {
            let waiting = done
                .results
                .iter()
                .enumerate()
                .filter(|(_, r)| r.is_none())
                .map(|(rank, _)| rank)
                .collect();
            return Err(Error::Deadlock { waiting });
        }
        let mut outputs = Vec::with_capacity(p);
        for res in done.results {
            outputs.push(res.expect("every rank finished")?);
        }
        let finish_times = done.elapsed.into_iter().collect::<Option<Vec<_>>>();
        let traces = traces.iter().map(|t| t.lock().unwrap().clone()).collect();
        Ok(SpmdRun {
            outputs,
            traces,
            finish_times,
        })
    }
}

/// Runs `program` on `p` ranks with default runtime settings.
pub fn spawn_spmd<'a, K, O, F, Fut>(p: usize, inputs: Vec<Vec<K>>, program: F) -> Result<SpmdRun<O>>
where
    K: SortKey,
    O: Send + 'a,
    F: Fn(Comm<K>, Vec<K>) -> Fut,
    Fut: Future<Output = Result<O>> + Send + 'a,
{
    Spmd::new(p).run(inputs, program)
}
