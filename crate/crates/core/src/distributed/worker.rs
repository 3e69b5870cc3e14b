use std::io::{BufReader, BufWriter};
use std::net::TcpStream;
use std::thread;
use std::time::Duration;

use log::{info, warn};

use super::wire::{read_message, write_message, WireMessage, PROTOCOL_VERSION};
use super::{DistError, ProtocolError};
use crate::driver::{BlackBox, LocalSampler, Sampler};

#[derive(Clone, Debug)]
pub struct WorkerOptions {
    pub threads: usize,
    pub max_bunch_size: usize,
    /// Connection attempts before giving up, also after a lost connection.
    pub connect_attempts: u32,
    pub retry_delay: Duration,
    /// Drop the connection without a word after this many requests.
    /// Only useful for fault-injection tests.
    pub fail_after: Option<usize>,
}

impl Default for WorkerOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            max_bunch_size: 1,
            connect_attempts: 10,
            retry_delay: Duration::from_millis(500),
            fail_after: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WorkerStats {
    pub requests: usize,
    pub points: usize,
}

fn connect(addr: &str, opts: &WorkerOptions) -> Result<TcpStream, DistError> {
    let attempts = opts.connect_attempts.max(1);
    for i in 0..attempts {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) => {
                warn!("connect to {addr} failed ({e}), attempt {}/{attempts}", i + 1);
                if i + 1 < attempts {
                    thread::sleep(opts.retry_delay);
                }
            }
        }
    }
    Err(DistError::Connect {
        addr: addr.to_string(),
        attempts,
    })
}

enum Session {
    Shutdown,
    Lost(ProtocolError),
    Injected,
}

/// Serves probe requests from the master at `addr` until it sends
/// `Shutdown`. A dropped connection is retried with the same bounded number
/// of attempts.
pub fn run_worker(bb: &dyn BlackBox, addr: &str, opts: &WorkerOptions) -> Result<WorkerStats, DistError> {
    let local = LocalSampler::new(bb, opts.threads, opts.max_bunch_size);
    let mut stats = WorkerStats::default();
    loop {
        let stream = connect(addr, opts)?;
        stream.set_nodelay(true)?;
        match session(&local, stream, opts, &mut stats)? {
            Session::Shutdown => return Ok(stats),
            Session::Injected => return Err(DistError::Config("injected failure".into())),
            Session::Lost(e) => warn!("connection to {addr} lost: {e}"),
        }
    }
}

fn session(
    local: &LocalSampler,
    stream: TcpStream,
    opts: &WorkerOptions,
    stats: &mut WorkerStats,
) -> Result<Session, DistError> {
    let mut r = BufReader::new(stream.try_clone()?);
    let mut w = BufWriter::new(stream);
    let hello = WireMessage::Hello {
        protocol_version: PROTOCOL_VERSION,
        worker_threads: opts.threads.max(1) as u32,
    };
    if let Err(e) = write_message(&mut w, &hello) {
        return Ok(Session::Lost(e));
    }
    let n_vars = match read_message(&mut r) {
        Ok(WireMessage::Config { n_vars, .. }) => n_vars as usize,
        Ok(WireMessage::Shutdown) => return Ok(Session::Shutdown),
        Ok(m) => return Err(ProtocolError::Unexpected(format!("{m:?} before Config")).into()),
        Err(e) => return Ok(Session::Lost(e)),
    };
    if n_vars != local.n_vars() {
        return Err(DistError::Config(format!(
            "master has {n_vars} variables, this black box {}",
            local.n_vars()
        )));
    }
    info!("connected, {n_vars} variables");
    let nf = local.n_functions();
    let mut prime = 0usize;
    loop {
        let msg = match read_message(&mut r) {
            Ok(m) => m,
            Err(e) => return Ok(Session::Lost(e)),
        };
        match msg {
            WireMessage::SetPrime { prime_index } => {
                prime = prime_index as usize;
                if let Err(e) = local.prepare(prime) {
                    warn!("prime index {prime}: {e}");
                }
            }
            WireMessage::ProbeRequest { request_id, points } => {
                if opts.fail_after.is_some_and(|n| stats.requests >= n) {
                    return Ok(Session::Injected);
                }
                if points.iter().any(|p| p.len() != n_vars) {
                    return Err(ProtocolError::Malformed("point width".into()).into());
                }
                let columns: Vec<_> = (0..nf).map(|k| local.sample(prime, k, &points)).collect();
                let mut values = vec![0u64; points.len() * nf];
                let mut replies = vec![];
                for (k, col) in columns.iter().enumerate() {
                    for (i, v) in col.iter().enumerate() {
                        match v {
                            Ok(x) => values[i * nf + k] = *x,
                            Err(_) => replies.push(WireMessage::BadPoint {
                                request_id,
                                point_index: (i * nf + k) as u32,
                            }),
                        }
                    }
                }
                replies.push(WireMessage::ProbeResult { request_id, values });
                for m in &replies {
                    if let Err(e) = write_message(&mut w, m) {
                        return Ok(Session::Lost(e));
                    }
                }
                stats.requests += 1;
                stats.points += points.len();
            }
            WireMessage::Shutdown => return Ok(Session::Shutdown),
            m => return Err(ProtocolError::Unexpected(format!("{m:?}")).into()),
        }
    }
}
