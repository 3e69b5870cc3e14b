use std::collections::VecDeque;
use std::io::{BufReader, BufWriter};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc::{channel, RecvTimeoutError, Sender};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use log::{info, warn};

use super::wire::{read_message, write_message, WireMessage, PROTOCOL_VERSION};
use super::{DistError, ProtocolError};
use crate::driver::{reconstruct_with, BlackBox, LocalSampler, RunConfig, RunReport, Sampler};
use crate::numtheory::{FieldError, PrimeField};
use crate::ratinterp::RationalFunctionQ;

type Values = Vec<Result<u64, FieldError>>;

/// How long a lone bunch waits for a worker before the master takes it.
const LOCAL_GRACE: Duration = Duration::from_millis(2);

struct Job {
    part: usize,
    prime: usize,
    function: usize,
    points: Vec<Vec<u64>>,
    reply: Sender<(usize, Values)>,
}

struct Shared {
    queue: Mutex<VecDeque<Job>>,
    ready: Condvar,
    stop: AtomicBool,
    workers: AtomicUsize,
    worker_threads: AtomicUsize,
    n_vars: u32,
    n_functions: usize,
    b_max: u32,
    seed: u64,
    window: Option<usize>,
}

impl Shared {
    fn push_front(&self, jobs: impl IntoIterator<Item = Job>) {
        let mut q = self.queue.lock().unwrap();
        for j in jobs {
            q.push_front(j);
        }
        self.ready.notify_all();
    }

    /// Takes the last queued job for local evaluation once more than one is
    /// waiting or `patient` is false, leaving the front for idle workers.
    fn pop_local(&self, patient: bool) -> Option<Job> {
        let mut q = self.queue.lock().unwrap();
        if q.len() > 1 || !patient {
            q.pop_back()
        } else {
            None
        }
    }

    /// Blocks until work is queued or the sampler stops.
    fn take(&self, n: usize) -> Vec<Job> {
        let mut q = self.queue.lock().unwrap();
        loop {
            if self.stop.load(Ordering::SeqCst) {
                return vec![];
            }
            if !q.is_empty() {
                let k = n.min(q.len());
                return q.drain(..k).collect();
            }
            q = self.ready.wait_timeout(q, Duration::from_millis(50)).unwrap().0;
        }
    }
}

#[derive(Clone, Debug)]
pub struct MasterOptions {
    /// Wait for this many workers before starting.
    pub min_workers: usize,
    pub worker_wait: Duration,
    /// Requests in flight per worker; defaults to twice its threads.
    pub window: Option<usize>,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            min_workers: 0,
            worker_wait: Duration::from_secs(30),
            window: None,
        }
    }
}

/// [`Sampler`] that spreads bunches over remote workers and the local pool.
pub struct MasterSampler<'a> {
    local: LocalSampler<'a>,
    shared: Arc<Shared>,
    local_threads: usize,
    threads: Mutex<Vec<JoinHandle<()>>>,
}

impl<'a> MasterSampler<'a> {
    pub fn start(
        bb: &'a dyn BlackBox,
        cfg: &RunConfig,
        listener: TcpListener,
        window: Option<usize>,
    ) -> Result<Self, DistError> {
        listener.set_nonblocking(true)?;
        let shared = Arc::new(Shared {
            queue: Mutex::new(VecDeque::new()),
            ready: Condvar::new(),
            stop: AtomicBool::new(false),
            workers: AtomicUsize::new(0),
            worker_threads: AtomicUsize::new(0),
            n_vars: bb.n_vars() as u32,
            n_functions: bb.n_functions(),
            b_max: cfg.max_bunch_size as u32,
            seed: cfg.seed,
            window,
        });
        let sh = shared.clone();
        let acceptor = thread::spawn(move || accept_loop(listener, sh));
        Ok(Self {
            local: LocalSampler::new(bb, cfg.n_threads, cfg.max_bunch_size),
            shared,
            local_threads: cfg.n_threads.max(1),
            threads: Mutex::new(vec![acceptor]),
        })
    }

    pub fn workers(&self) -> usize {
        self.shared.workers.load(Ordering::SeqCst)
    }

    /// Waits until `n` workers are connected; false on timeout.
    pub fn wait_for_workers(&self, n: usize, timeout: Duration) -> bool {
        let t0 = Instant::now();
        while self.workers() < n {
            if t0.elapsed() > timeout {
                return false;
            }
            thread::sleep(Duration::from_millis(10));
        }
        true
    }

    /// Sends `Shutdown` to every worker and joins the service threads.
    pub fn shutdown(&self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        self.shared.ready.notify_all();
        for h in self.threads.lock().unwrap().drain(..) {
            let _ = h.join();
        }
    }
}

impl Drop for MasterSampler<'_> {
    fn drop(&mut self) {
        self.shutdown();
    }
}

impl Sampler for MasterSampler<'_> {
    fn n_vars(&self) -> usize {
        self.local.n_vars()
    }

    fn n_functions(&self) -> usize {
        self.local.n_functions()
    }

    fn prepare(&self, prime: usize) -> Result<PrimeField, FieldError> {
        self.local.prepare(prime)
    }

    fn sample(&self, prime: usize, function: usize, points: &[Vec<u64>]) -> Values {
        if self.workers() == 0 {
            return self.local.sample(prime, function, points);
        }
        let threads = self.local_threads + self.shared.worker_threads.load(Ordering::SeqCst);
        let parts = crate::driver::bunches(points.len(), threads, self.shared.b_max as usize);
        let (tx, rx) = channel();
        self.shared.push_front(parts.iter().enumerate().rev().map(|(part, &(a, b))| Job {
            part,
            prime,
            function,
            points: points[a..b].to_vec(),
            reply: tx.clone(),
        }));
        drop(tx);
        let t0 = Instant::now();
        let mut got: Vec<Option<Values>> = vec![None; parts.len()];
        let mut remaining = parts.len();
        let mut store = |part: usize, v: Values, remaining: &mut usize| {
            // first answer wins; a requeued bunch may be answered twice
            if got[part].is_none() {
                got[part] = Some(v);
                *remaining -= 1;
            }
        };
        while remaining > 0 {
            while let Ok((part, v)) = rx.try_recv() {
                store(part, v, &mut remaining);
            }
            if remaining == 0 {
                break;
            }
            if let Some(job) = self.shared.pop_local(t0.elapsed() < LOCAL_GRACE) {
                let v = self.local.sample(job.prime, job.function, &job.points);
                store(job.part, v, &mut remaining);
                continue;
            }
            match rx.recv_timeout(Duration::from_millis(1)) {
                Ok((part, v)) => store(part, v, &mut remaining),
                Err(RecvTimeoutError::Timeout) => {}
                // every sender is gone while parts are missing: handlers
                // dropped their jobs without requeueing, which they never do
                Err(RecvTimeoutError::Disconnected) => {
                    if self.shared.queue.lock().unwrap().is_empty() {
                        break;
                    }
                }
            }
        }
        got.into_iter()
            .zip(&parts)
            .flat_map(|(v, &(a, b))| v.unwrap_or_else(|| self.local.sample(prime, function, &points[a..b])))
            .collect()
    }
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>) {
    let mut handlers = vec![];
    while !shared.stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                info!("worker connected from {peer}");
                let sh = shared.clone();
                handlers.push(thread::spawn(move || {
                    if let Err(e) = serve(stream, &sh) {
                        warn!("worker {peer}: {e}");
                    }
                }));
            }
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(10)),
            Err(e) => {
                warn!("accept: {e}");
                thread::sleep(Duration::from_millis(50));
            }
        }
    }
    for h in handlers {
        let _ = h.join();
    }
}

fn serve(stream: TcpStream, shared: &Shared) -> Result<(), ProtocolError> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(Duration::from_secs(10)))?;
    let mut r = BufReader::new(stream.try_clone()?);
    let mut w = BufWriter::new(stream.try_clone()?);
    let threads = match read_message(&mut r)? {
        WireMessage::Hello {
            protocol_version,
            worker_threads,
        } => {
            if protocol_version != PROTOCOL_VERSION {
                return Err(ProtocolError::Version {
                    expected: PROTOCOL_VERSION,
                    got: protocol_version,
                });
            }
            worker_threads.max(1) as usize
        }
        m => return Err(ProtocolError::Unexpected(format!("{m:?} instead of Hello"))),
    };
    write_message(
        &mut w,
        &WireMessage::Config {
            n_vars: shared.n_vars,
            b_max: shared.b_max,
            seed: shared.seed,
        },
    )?;
    stream.set_read_timeout(None)?;
    shared.workers.fetch_add(1, Ordering::SeqCst);
    shared.worker_threads.fetch_add(threads, Ordering::SeqCst);
    let window = shared.window.unwrap_or(2 * threads).max(1);
    let result = pump(&mut r, &mut w, shared, window);
    shared.workers.fetch_sub(1, Ordering::SeqCst);
    shared.worker_threads.fetch_sub(threads, Ordering::SeqCst);
    result
}

/// Feeds queued bunches to one worker until the sampler stops.
fn pump(
    r: &mut BufReader<TcpStream>,
    w: &mut BufWriter<TcpStream>,
    shared: &Shared,
    window: usize,
) -> Result<(), ProtocolError> {
    let nf = shared.n_functions;
    let mut prime = None;
    let mut next_id = 0u64;
    loop {
        let batch = shared.take(window);
        if batch.is_empty() {
            return write_message(w, &WireMessage::Shutdown);
        }
        let mut sent: VecDeque<(u64, Job)> = VecDeque::new();
        let mut pending = batch.into_iter();
        let mut fail = None;
        for job in pending.by_ref() {
            let mut send = || -> Result<(), ProtocolError> {
                if prime != Some(job.prime) {
                    write_message(w, &WireMessage::SetPrime { prime_index: job.prime as u32 })?;
                    prime = Some(job.prime);
                }
                write_message(
                    w,
                    &WireMessage::ProbeRequest {
                        request_id: next_id,
                        points: job.points.clone(),
                    },
                )
            };
            let res = send();
            sent.push_back((next_id, job));
            next_id += 1;
            if let Err(e) = res {
                fail = Some(e);
                break;
            }
        }
        let mut bad = vec![];
        while fail.is_none() {
            let Some((id, job)) = sent.front() else { break };
            match read_message(r) {
                Ok(WireMessage::BadPoint {
                    request_id,
                    point_index,
                }) if request_id == *id => bad.push(point_index as usize),
                Ok(WireMessage::ProbeResult { request_id, values })
                    if request_id == *id && values.len() == job.points.len() * nf =>
                {
                    let k = job.function;
                    let out = (0..job.points.len())
                        .map(|i| {
                            let at = i * nf + k;
                            if bad.contains(&at) {
                                Err(FieldError::ZeroDivisor { dividend: 0 })
                            } else {
                                Ok(values[at])
                            }
                        })
                        .collect();
                    bad.clear();
                    let (_, job) = sent.pop_front().unwrap();
                    let _ = job.reply.send((job.part, out));
                }
                Ok(m) => fail = Some(ProtocolError::Unexpected(format!("{m:?}"))),
                Err(e) => fail = Some(e),
            }
        }
        if let Some(e) = fail {
            // hand everything back to the master's own queue
            shared.push_front(sent.into_iter().map(|(_, j)| j).chain(pending).collect::<Vec<_>>().into_iter().rev());
            return Err(e);
        }
    }
}

/// Runs the driver with probes spread over workers connecting to `listener`.
pub fn run_master(
    bb: &dyn BlackBox,
    cfg: &RunConfig,
    listener: TcpListener,
    opts: &MasterOptions,
) -> Result<(Vec<RationalFunctionQ>, RunReport), DistError> {
    cfg.validate()?;
    let sampler = MasterSampler::start(bb, cfg, listener, opts.window)?;
    if opts.min_workers > 0 && !sampler.wait_for_workers(opts.min_workers, opts.worker_wait) {
        warn!(
            "only {} of {} workers connected, continuing",
            sampler.workers(),
            opts.min_workers
        );
    }
    let out = reconstruct_with(&sampler, bb.fingerprint(), cfg);
    sampler.shutdown();
    Ok(out?)
}
