use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{line_point, thiele_interpolate, Probe, RatError, ThieleResult};
use crate::numtheory::{FieldError, PrimeField};
use crate::polyinterp::{gauss_solve, DensePolyFF};

/// Additive variable shift with small integer components, so the same shift
/// is valid in every prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub s: Vec<u64>,
}

impl Shift {
    pub fn zero(n: usize) -> Self {
        Self { s: vec![0; n] }
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|&x| x == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.s.len()).filter(|&i| self.s[i] != 0).collect()
    }

    pub fn in_field(&self, field: PrimeField) -> Vec<u64> {
        self.s.iter().map(|&x| field.reduce(x)).collect()
    }

    fn masked(values: &[u64], vars: &[usize]) -> Self {
        let mut s = vec![0; values.len()];
        for &i in vars {
            s[i] = values[i];
        }
        Self { s }
    }
}

/// Chosen shift plus the univariate interpolation along `t z + s`, when the
/// scan already paid for it.
#[derive(Clone, Debug)]
pub struct ShiftScan {
    pub shift: Shift,
    pub line: Option<ThieleResult>,
}

/// Candidate supports: none, single variables from the last one backward,
/// pairs favouring late variables, then all variables.
fn candidates(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in (0..n).rev() {
        out.push(vec![i]);
    }
    for j in (1..n).rev() {
        for i in (0..j).rev() {
            out.push(vec![i, j]);
        }
    }
    out.push((0..n).collect());
    out.dedup();
    out
}

/// Finds a shift giving the numerator or denominator a constant term.
///
/// A candidate `s` is accepted at once if the black box is defined at `s`.
/// Otherwise the degrees `(N, D)` along a line shifting every variable serve
/// as reference: the line `t z + s` lost a common power of `t` exactly when
/// it fits a fraction of degrees `(N - 1, D - 1)`, which is a singular square
/// linear system of size `N + D`. An accepted candidate's line is then solved
/// for directly with one more point.
pub fn scan_for_shift<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    z: &[u64],
    rng: &mut R,
    eta: usize,
    max_retries: usize,
) -> Result<ShiftScan, RatError> {
    let f = probe.field();
    let n = probe.n_vars();
    let values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..1u64 << 16)).collect();
    let mut reference: Option<ThieleResult> = None;
    let cands = candidates(n);
    let last = cands.len() - 1;
    for (k, vars) in cands.into_iter().enumerate() {
        let shift = Shift::masked(&values, &vars);
        let s = shift.in_field(f);
        match probe.probe_one(s.clone()) {
            Ok(_) => return Ok(ShiftScan { shift, line: None }),
            Err(FieldError::ZeroDivisor { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        if k == last {
            // the reference line is this candidate's line
            let line = match reference {
                Some(r) => r,
                None => interpolate_line(probe, z, &s, rng, eta, max_retries)?,
            };
            return Ok(ShiftScan { shift, line: Some(line) });
        }
        if reference.is_none() {
            let all = Shift::masked(&values, &(0..n).collect::<Vec<_>>()).in_field(f);
            reference = Some(interpolate_line(probe, z, &all, rng, eta, max_retries)?);
        }
        let r = reference.as_ref().unwrap();
        let degrees = (r.num.degree().unwrap_or(0), r.den.degree().unwrap_or(0));
        if let Some(line) = test_candidate(probe, z, &s, degrees, rng, max_retries)? {
            log::debug!("shift {:?} accepted", shift.s);
            return Ok(ShiftScan { shift, line: Some(line) });
        }
        log::debug!("shift {:?} rejected", shift.s);
    }
    unreachable!("the all-variable candidate is always accepted")
}

/// Samples `count` good points `(t, f(t z + s))` at fresh random `t`.
fn sample_line<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    z: &[u64],
    s: &[u64],
    count: usize,
    taken: &mut Vec<(u64, u64)>,
    rng: &mut R,
    max_retries: usize,
) -> Result<(), RatError> {
    let f = probe.field();
    let mut bad = 0;
    while taken.len() < count {
        let t = rng.gen_range(1..f.p());
        if taken.iter().any(|&(u, _)| u == t) {
            continue;
        }
        match probe.probe_one(line_point(f, t, z, s)) {
            Ok(v) => taken.push((t, v)),
            Err(FieldError::ZeroDivisor { .. }) => {
                bad += 1;
                if bad > max_retries {
                    return Err(RatError::TooManyBadPoints(bad));
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

/// Row `t^0..t^a, -v t^0..-v t^(b-1)` of the fitting system `p - v q = 0`.
fn fit_row(f: PrimeField, t: u64, v: u64, a: usize, b: usize) -> Vec<u64> {
    let mut row = Vec::with_capacity(a + b + 1);
    let mut w = 1;
    for _ in 0..=a {
        row.push(w);
        w = f.mul(w, t);
    }
    let mut w = f.neg(v);
    for _ in 0..b {
        row.push(w);
        w = f.mul(w, t);
    }
    row
}

/// `None` if the line through `s` lost a power of `t`; otherwise the line.
fn test_candidate<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    z: &[u64],
    s: &[u64],
    (dn, dd): (usize, usize),
    rng: &mut R,
    max_retries: usize,
) -> Result<Option<ThieleResult>, RatError> {
    let f = probe.field();
    let start = probe.count();
    let mut pts = vec![];
    if dn > 0 && dd > 0 {
        // homogeneous fit of degrees (dn - 1, dd - 1): dn + dd unknowns
        sample_line(probe, z, s, dn + dd, &mut pts, rng, max_retries)?;
        let a = fit_rows(f, &pts, dn - 1, dd);
        if gauss_solve(f, a, vec![0; dn + dd]).is_none() {
            return Ok(None);
        }
    }
    // degrees (dn, dd) with a monic denominator: dn + dd + 1 unknowns
    sample_line(probe, z, s, dn + dd + 1, &mut pts, rng, max_retries)?;
    let a = fit_rows(f, &pts, dn, dd);
    let b: Vec<u64> = pts.iter().map(|&(t, v)| f.mul(v, f.pow(t, dd as u64))).collect();
    let x = gauss_solve(f, a, b).ok_or(RatError::InvalidShift)?;
    let num = DensePolyFF::new(f, x[..=dn].to_vec());
    let mut den = x[dn + 1..].to_vec();
    den.push(1);
    Ok(Some(ThieleResult {
        num,
        den: DensePolyFF::new(f, den),
        probes: probe.count() - start,
    }))
}

fn fit_rows(f: PrimeField, pts: &[(u64, u64)], a: usize, b: usize) -> Vec<Vec<u64>> {
    pts.iter().map(|&(t, v)| fit_row(f, t, v, a, b)).collect()
}

/// Interpolates `t -> f(t z + s)`.
pub(crate) fn interpolate_line<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    z: &[u64],
    s: &[u64],
    rng: &mut R,
    eta: usize,
    max_retries: usize,
) -> Result<ThieleResult, RatError> {
    let f = probe.field();
    thiele_interpolate(f, |t| probe.probe_one(line_point(f, t, z, s)), rng, eta, max_retries)
}
