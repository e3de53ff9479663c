//! A small executor that multiplexes rank programs over a few worker threads.
//!
//! Ranks are futures; they only suspend inside communication calls. A rank is
//! re-polled when its waker fires. Deadlock detection is exact: when every
//! worker is idle, the run queue is empty and some rank has not finished,
//! nothing can ever wake those ranks again.

use std::collections::VecDeque;
use std::future::Future;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::pin::Pin;
use std::sync::{Arc, Condvar, Mutex};
use std::task::{Context, Poll, Wake, Waker};
use std::time::Duration;

use crate::error::{Error, Result};

pub(crate) type RankFuture<'a, O> = Pin<Box<dyn Future<Output = Result<O>> + Send + 'a>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TaskState {
    Idle,
    Queued,
    Running,
    /// Woken while being polled; must be polled again.
    Notified,
    Done,
}

struct Sched {
    queue: VecDeque<usize>,
    state: Vec<TaskState>,
    done: usize,
    idle_workers: usize,
    deadlock: bool,
    aborted: bool,
}

struct Shared {
    sched: Mutex<Sched>,
    cv: Condvar,
}

impl Shared {
    fn wake_rank(&self, rank: usize) {
        let mut s = self.sched.lock().unwrap();
        match s.state[rank] {
            TaskState::Idle => {
                s.state[rank] = TaskState::Queued;
                s.queue.push_back(rank);
                drop(s);
                self.cv.notify_one();
            }
            TaskState::Running => s.state[rank] = TaskState::Notified,
            _ => {}
        }
    }
}

struct RankWaker {
    rank: usize,
    shared: Arc<Shared>,
}

impl Wake for RankWaker {
    fn wake(self: Arc<Self>) {
        self.shared.wake_rank(self.rank);
    }

    fn wake_by_ref(self: &Arc<Self>) {
        self.shared.wake_rank(self.rank);
    }
}

struct Slot<'a, O> {
    future: Mutex<Option<RankFuture<'a, O>>>,
    result: Mutex<Option<Result<O>>>,
    elapsed: Mutex<Option<Duration>>,
}

pub(crate) struct Completed<O> {
    pub results: Vec<Option<Result<O>>>,
    pub elapsed: Vec<Option<Duration>>,
    pub deadlock: bool,
}

/// Runs all rank futures to completion (or deadlock) on `workers` threads.
///
/// `on_failure` is invoked once, under the scheduler lock, the first time a
/// rank finishes with an error. Every unfinished rank is then re-polled so
/// that it can observe the abort.
pub(crate) fn run<'a, O: Send>(
    futures: Vec<RankFuture<'a, O>>,
    workers: usize,
    on_failure: &(dyn Fn() + Sync),
) -> Completed<O> {
    let p = futures.len();
    let shared = Arc::new(Shared {
        sched: Mutex::new(Sched {
            queue: (0..p).collect(),
            state: vec![TaskState::Queued; p],
            done: 0,
            idle_workers: 0,
            deadlock: false,
            aborted: false,
        }),
        cv: Condvar::new(),
    });
    let slots: Vec<Slot<'a, O>> = futures
        .into_iter()
        .map(|f| Slot {
            future: Mutex::new(Some(f)),
            result: Mutex::new(None),
            elapsed: Mutex::new(None),
        })
        .collect();
    let wakers: Vec<Waker> = (0..p)
        .map(|rank| {
            Waker::from(Arc::new(RankWaker {
                rank,
                shared: Arc::clone(&shared),
            }))
        })
        .collect();

    let workers = workers.clamp(1, p.max(1));
    let clock = Clock::start();
    if p > 0 {
        if workers == 1 {
            worker_loop(&shared, &slots, &wakers, 1, on_failure, &clock);
        } else {
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| worker_loop(&shared, &slots, &wakers, workers, on_failure, &clock));
                }
            });
        }
    }

    let deadlock = shared.sched.lock().unwrap().deadlock;
    let mut results = Vec::with_capacity(p);
    let mut elapsed = Vec::with_capacity(p);
    for slot in slots {
        results.push(slot.result.into_inner().unwrap());
        elapsed.push(slot.elapsed.into_inner().unwrap());
    }
    Completed {
        results,
        elapsed,
        deadlock,
    }
}

fn worker_loop<O>(
    shared: &Shared,
    slots: &[Slot<'_, O>],
    wakers: &[Waker],
    workers: usize,
    on_failure: &(dyn Fn() + Sync),
    clock: &Clock,
) {
    let p = slots.len();
    loop {
        let rank = {
            let mut s = shared.sched.lock().unwrap();
            loop {
                if let Some(r) = s.queue.pop_front() {
                    s.state[r] = TaskState::Running;
                    break r;
                }
                if s.done == p || s.deadlock {
                    return;
                }
                s.idle_workers += 1;
                if s.idle_workers == workers {
                    s.deadlock = true;
                    shared.cv.notify_all();
                    return;
                }
                s = shared.cv.wait(s).unwrap();
                s.idle_workers -= 1;
            }
        };

        let polled = {
            let mut guard = slots[rank].future.lock().unwrap();
            let fut = guard.as_mut().expect("queued rank has a live future");
            let mut cx = Context::from_waker(&wakers[rank]);
            match catch_unwind(AssertUnwindSafe(|| fut.as_mut().poll(&mut cx))) {
                Ok(Poll::Pending) => None,
                Ok(Poll::Ready(res)) => {
                    *guard = None;
                    Some(res)
                }
                Err(payload) => {
                    *guard = None;
                    Some(Err(Error::RankPanic {
                        rank,
                        message: panic_message(payload.as_ref()),
                    }))
                }
            }
        };

        let mut s = shared.sched.lock().unwrap();
        match polled {
            None => {
                if s.state[rank] == TaskState::Notified {
                    s.state[rank] = TaskState::Queued;
                    s.queue.push_back(rank);
                    shared.cv.notify_one();
                } else {
                    s.state[rank] = TaskState::Idle;
                }
            }
            Some(res) => {
                let failed = res.is_err();
                *slots[rank].result.lock().unwrap() = Some(res);
                *slots[rank].elapsed.lock().unwrap() = clock.elapsed();
                s.state[rank] = TaskState::Done;
                s.done += 1;
                if failed && !s.aborted {
                    s.aborted = true;
                    on_failure();
                    for r in 0..p {
                        match s.state[r] {
                            TaskState::Idle => {
                                s.state[r] = TaskState::Queued;
                                s.queue.push_back(r);
                            }
                            TaskState::Running => s.state[r] = TaskState::Notified,
                            _ => {}
                        }
                    }
                }
                shared.cv.notify_all();
            }
        }
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

/// Wall clock for per-rank completion times. `std::time::Instant` is not
/// available on wasm32-unknown-unknown, so timing is simply absent there.
struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Clock {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Option<Duration> {
        #[cfg(not(target_arch = "wasm32"))]
        {
            Some(self.start.elapsed())
        }
        #[cfg(target_arch = "wasm32")]
        {
            None
        }
    }
}
