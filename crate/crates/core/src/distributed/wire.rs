use std::io::{Read, Write};

use super::ProtocolError;

pub const PROTOCOL_VERSION: u32 = 1;

/// Frames larger than this are treated as corrupted.
pub const MAX_FRAME: u32 = 1 << 28;

const TAG_HELLO: u8 = 1;
const TAG_CONFIG: u8 = 2;
const TAG_SET_PRIME: u8 = 3;
const TAG_PROBE_REQUEST: u8 = 4;
const TAG_PROBE_RESULT: u8 = 5;
const TAG_BAD_POINT: u8 = 6;
const TAG_SHUTDOWN: u8 = 7;

/// Messages between master and workers.
///
/// Frame: 4-byte big-endian length of the rest, 1-byte tag, then the fields
/// as big-endian fixed-width integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WireMessage {
    Hello { protocol_version: u32, worker_threads: u32 },
    Config { n_vars: u32, b_max: u32, seed: u64 },
    SetPrime { prime_index: u32 },
    /// Points of equal length; the worker answers with every function's value.
    ProbeRequest { request_id: u64, points: Vec<Vec<u64>> },
    /// `values[point * n_functions + function]`; entries named by a preceding
    /// `BadPoint` are placeholders.
    ProbeResult { request_id: u64, values: Vec<u64> },
    /// `point_index` is an index into the flattened `values` of the result.
    BadPoint { request_id: u64, point_index: u32 },
    Shutdown,
}

impl WireMessage {
    pub fn encode(&self) -> Vec<u8> {
        let mut b = vec![0; 4];
        let u32s = |b: &mut Vec<u8>, x: u32| b.extend_from_slice(&x.to_be_bytes());
        let u64s = |b: &mut Vec<u8>, x: u64| b.extend_from_slice(&x.to_be_bytes());
        match self {
            Self::Hello {
                protocol_version,
                worker_threads,
            } => {
                b.push(TAG_HELLO);
                u32s(&mut b, *protocol_version);
                u32s(&mut b, *worker_threads);
            }
            Self::Config { n_vars, b_max, seed } => {
                b.push(TAG_CONFIG);
                u32s(&mut b, *n_vars);
                u32s(&mut b, *b_max);
                u64s(&mut b, *seed);
            }
            Self::SetPrime { prime_index } => {
                b.push(TAG_SET_PRIME);
                u32s(&mut b, *prime_index);
            }
            Self::ProbeRequest { request_id, points } => {
                b.push(TAG_PROBE_REQUEST);
                u64s(&mut b, *request_id);
                u32s(&mut b, points.len() as u32);
                u32s(&mut b, points.first().map_or(0, |p| p.len()) as u32);
                for x in points.iter().flatten() {
                    u64s(&mut b, *x);
                }
            }
            Self::ProbeResult { request_id, values } => {
                b.push(TAG_PROBE_RESULT);
                u64s(&mut b, *request_id);
                u32s(&mut b, values.len() as u32);
                for x in values {
                    u64s(&mut b, *x);
                }
            }
            Self::BadPoint {
                request_id,
                point_index,
            } => {
                b.push(TAG_BAD_POINT);
                u64s(&mut b, *request_id);
                u32s(&mut b, *point_index);
            }
            Self::Shutdown => b.push(TAG_SHUTDOWN),
        }
        let len = (b.len() - 4) as u32;
        b[..4].copy_from_slice(&len.to_be_bytes());
        b
    }

    /// Decodes one complete frame; trailing or missing bytes are errors.
    pub fn decode(frame: &[u8]) -> Result<Self, ProtocolError> {
        if frame.len() < 5 {
            return Err(ProtocolError::Truncated);
        }
        let len = u32::from_be_bytes(frame[..4].try_into().unwrap());
        if len > MAX_FRAME || len as usize != frame.len() - 4 {
            return Err(ProtocolError::BadLength(len));
        }
        let mut c = Cursor { buf: &frame[5..] };
        let msg = match frame[4] {
            TAG_HELLO => Self::Hello {
                protocol_version: c.u32()?,
                worker_threads: c.u32()?,
            },
            TAG_CONFIG => Self::Config {
                n_vars: c.u32()?,
                b_max: c.u32()?,
                seed: c.u64()?,
            },
            TAG_SET_PRIME => Self::SetPrime { prime_index: c.u32()? },
            TAG_PROBE_REQUEST => {
                let request_id = c.u64()?;
                let (n, w) = (c.u32()? as usize, c.u32()? as usize);
                if n.checked_mul(w).and_then(|k| k.checked_mul(8)) != Some(c.buf.len()) {
                    return Err(ProtocolError::Malformed("point block size".into()));
                }
                let mut points = Vec::with_capacity(n);
                for _ in 0..n {
                    points.push((0..w).map(|_| c.u64()).collect::<Result<_, _>>()?);
                }
                Self::ProbeRequest { request_id, points }
            }
            TAG_PROBE_RESULT => {
                let request_id = c.u64()?;
                let n = c.u32()? as usize;
                if n.checked_mul(8) != Some(c.buf.len()) {
                    return Err(ProtocolError::Malformed("value block size".into()));
                }
                let values = (0..n).map(|_| c.u64()).collect::<Result<_, _>>()?;
                Self::ProbeResult { request_id, values }
            }
            TAG_BAD_POINT => Self::BadPoint {
                request_id: c.u64()?,
                point_index: c.u32()?,
            },
            TAG_SHUTDOWN => Self::Shutdown,
            t => return Err(ProtocolError::UnknownTag(t)),
        };
        if !c.buf.is_empty() {
            return Err(ProtocolError::Malformed("trailing bytes".into()));
        }
        Ok(msg)
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], ProtocolError> {
        if self.buf.len() < N {
            return Err(ProtocolError::Truncated);
        }
        let (a, rest) = self.buf.split_at(N);
        self.buf = rest;
        Ok(a.try_into().unwrap())
    }

    fn u32(&mut self) -> Result<u32, ProtocolError> {
        self.take::<4>().map(u32::from_be_bytes)
    }

    fn u64(&mut self) -> Result<u64, ProtocolError> {
        self.take::<8>().map(u64::from_be_bytes)
    }
}

pub fn write_message<W: Write>(w: &mut W, msg: &WireMessage) -> Result<(), ProtocolError> {
    w.write_all(&msg.encode())?;
    w.flush()?;
    Ok(())
}

pub fn read_message<R: Read>(r: &mut R) -> Result<WireMessage, ProtocolError> {
    let mut head = [0u8; 4];
    r.read_exact(&mut head)?;
    let len = u32::from_be_bytes(head);
    if len == 0 || len > MAX_FRAME {
        return Err(ProtocolError::BadLength(len));
    }
    let mut frame = vec![0u8; 4 + len as usize];
    frame[..4].copy_from_slice(&head);
    r.read_exact(&mut frame[4..])?;
    WireMessage::decode(&frame)
}
