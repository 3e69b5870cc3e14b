//! The hybrid racer.
//!
//! Along `x = t z + s` with `z = (1, z_2, .., z_n)` the black box is
//! `sum n_d(z) t^d / sum d_d(z) t^d`, normalized by one constant coefficient.
//! Every coefficient is a homogeneous polynomial in `z`, interpolated in
//! `z_2..z_n` by its own Zippel state. The univariate structure in `t` is
//! found once with Thiele; afterwards each new `z` costs one probe per
//! coefficient that is still unknown, since solved coefficients can simply be
//! evaluated.
//!
//! The shift makes lower coefficients dense. Once the top degrees of a side
//! are known, the monomials they generate through the shift are subtracted
//! and the next degree is restarted as a sparse interpolation, replaying the
//! probes collected so far.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::shift::interpolate_line;
use super::{
    dehomogenize, homogeneous_parts, homogenize, line_point, shift_expand, Probe, RatError, RationalFunctionFF, Shift,
    ThieleResult, MAX_RETRIES,
};
use crate::numtheory::{FieldError, PrimeField};
use crate::polyinterp::{
    gauss_solve, solve_transposed_vandermonde, DegreeBounds, Monomial, RaceMode, SparsePoly, ZippelState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Num,
    Den,
}

impl Side {
    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub eta: usize,
    pub mode: RaceMode,
    pub max_retries: usize,
    /// Per-variable degree bounds in internal variable order.
    pub num_bounds: Option<Vec<u32>>,
    pub den_bounds: Option<Vec<u32>>,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            eta: 1,
            mode: RaceMode::Race,
            max_retries: MAX_RETRIES,
            num_bounds: None,
            den_bounds: None,
        }
    }
}

/// Support of one `t`-coefficient in `z_2..z_n`: `dense` is the support of the
/// shifted coefficient, `sparse` the support of the unshifted homogeneous part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefSupport {
    pub side: Side,
    pub degree: u32,
    pub dense: Vec<Monomial>,
    pub sparse: Vec<Monomial>,
}

/// What later primes need to skip structure discovery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub n_vars: usize,
    pub shift: Shift,
    /// Whether the constant `t`-coefficient of the denominator is fixed to 1
    /// (otherwise the numerator's is).
    pub normalize_den: bool,
    /// Empty for the zero function.
    pub coefs: Vec<CoefSupport>,
}

impl Structure {
    fn is_fixed(&self, c: &CoefSupport) -> bool {
        c.degree == 0 && (c.side == Side::Den) == self.normalize_den
    }

    /// Probes a run with this structure will spend.
    pub fn planned_probes(&self) -> usize {
        plan(self).iter().map(|p| p.level).sum()
    }
}

#[derive(Clone, Debug)]
pub struct HybridOutcome {
    pub function: RationalFunctionFF,
    pub structure: Structure,
    pub probes: usize,
}

/// Solves the `t`-system at `z` for every coefficient whose value is `None`
/// in `known`. One probe per unknown.
#[allow(clippy::too_many_arguments)]
fn solve_t_system<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    z: &[u64],
    s: &[u64],
    meta: &[(Side, u32)],
    known: &[Option<u64>],
    rng: &mut R,
    max_retries: usize,
) -> Result<Vec<u64>, RatError> {
    let f = probe.field();
    let unknown: Vec<usize> = (0..meta.len()).filter(|&i| known[i].is_none()).collect();
    let u = unknown.len();
    if u == 0 {
        return Ok(known.iter().map(|v| v.unwrap()).collect());
    }
    let mut bad = 0;
    loop {
        let mut seen = HashSet::new();
        let mut ts = Vec::with_capacity(u);
        while ts.len() < u {
            let t = rng.gen_range(1..f.p());
            if seen.insert(t) {
                ts.push(t);
            }
        }
        let points: Vec<Vec<u64>> = ts.iter().map(|&t| line_point(f, t, z, s)).collect();
        let mut vals = probe.probe(&points);
        for k in 0..u {
            while let Err(e) = &vals[k] {
                if !matches!(e, FieldError::ZeroDivisor { .. }) {
                    return Err(e.clone().into());
                }
                bad += 1;
                if bad > max_retries {
                    return Err(RatError::TooManyBadPoints(bad));
                }
                let t = loop {
                    let t = rng.gen_range(1..f.p());
                    if seen.insert(t) {
                        break t;
                    }
                };
                ts[k] = t;
                vals[k] = probe.probe_one(line_point(f, t, z, s));
            }
        }
        let mut rows = Vec::with_capacity(u);
        let mut rhs = Vec::with_capacity(u);
        for (k, &t) in ts.iter().enumerate() {
            let fv = *vals[k].as_ref().unwrap();
            let tp = |d: u32| f.pow(t, d as u64);
            rows.push(
                unknown
                    .iter()
                    .map(|&i| match meta[i] {
                        (Side::Num, d) => tp(d),
                        (Side::Den, d) => f.neg(f.mul(fv, tp(d))),
                    })
                    .collect::<Vec<_>>(),
            );
            let mut r = 0;
            for (i, v) in known.iter().enumerate() {
                if let Some(v) = *v {
                    let term = f.mul(v, tp(meta[i].1));
                    r = match meta[i].0 {
                        Side::Num => f.sub(r, term),
                        Side::Den => f.mul_add(fv, term, r),
                    };
                }
            }
            rhs.push(r);
        }
        if let Some(sol) = gauss_solve(f, rows, rhs) {
            let mut out: Vec<u64> = known.iter().map(|v| v.unwrap_or(0)).collect();
            for (j, &i) in unknown.iter().enumerate() {
                out[i] = sol[j];
            }
            return Ok(out);
        }
        bad += 1;
        if bad > max_retries {
            return Err(RatError::Unlucky("singular t-system".into()));
        }
    }
}

fn with_one(z: &[u64]) -> Vec<u64> {
    let mut v = Vec::with_capacity(z.len() + 1);
    v.push(1);
    v.extend_from_slice(z);
    v
}

/// Top-down bookkeeping of one side: unshifted homogeneous parts found so far
/// and the shift contributions they induce in lower degrees.
#[derive(Clone, Debug)]
struct Chain {
    coef: Vec<usize>,
    next: Option<usize>,
    acc: Vec<SparsePoly>,
    truth: Vec<Option<SparsePoly>>,
}

impl Chain {
    fn new(field: PrimeField, n: usize, coef: Vec<usize>) -> Self {
        let k = coef.len();
        Self {
            next: k.checked_sub(1),
            acc: vec![SparsePoly::zero(field, n); k],
            truth: vec![None; k],
            coef,
        }
    }

    /// Records the true part of the current degree and moves down.
    fn push(&mut self, truth: SparsePoly, s: &[u64]) {
        let d = self.next.unwrap();
        for (deg, part) in homogeneous_parts(&shift_expand(&truth, s)) {
            if (deg as usize) < d {
                self.acc[deg as usize] = self.acc[deg as usize].add(&part);
            }
        }
        self.truth[d] = Some(truth);
        self.next = d.checked_sub(1);
    }

    fn total(&self, field: PrimeField, n: usize) -> SparsePoly {
        self.truth
            .iter()
            .flatten()
            .fold(SparsePoly::zero(field, n), |a, p| a.add(p))
    }
}

#[allow(clippy::large_enum_variant)]
enum Interp {
    Fixed,
    Running { zippel: ZippelState, restarted: bool },
    Done { poly: SparsePoly, restarted: bool },
}

struct Coef {
    side: Side,
    degree: u32,
    interp: Interp,
    /// The shifted coefficient as a polynomial in `z_2..z_n`, once known.
    value: Option<SparsePoly>,
}

struct HybridState<'c> {
    field: PrimeField,
    n: usize,
    anchors: Vec<u64>,
    s: Vec<u64>,
    cfg: &'c HybridConfig,
    coefs: Vec<Coef>,
    meta: Vec<(Side, u32)>,
    chains: [Chain; 2],
    cache: HashMap<Vec<u64>, Vec<u64>>,
}

impl HybridState<'_> {
    fn zippel(&self, side: Side, degree: u32) -> ZippelState {
        let bounds = match side {
            Side::Num => &self.cfg.num_bounds,
            Side::Den => &self.cfg.den_bounds,
        };
        let mut b = DegreeBounds::total(self.n - 1, degree);
        if let Some(v) = bounds {
            b.per_var = v[1..].iter().map(|&x| Some(x)).collect();
        }
        ZippelState::new(self.field, self.anchors.clone(), b, self.cfg.eta, self.cfg.mode)
    }

    fn shift_value(&self, ci: usize, zp: &[u64]) -> u64 {
        let c = &self.coefs[ci];
        self.chains[c.side.idx()].acc[c.degree as usize].eval(&with_one(zp))
    }

    fn advance(&mut self, side: Side) -> Result<(), RatError> {
        loop {
            let ch = &self.chains[side.idx()];
            let Some(d) = ch.next else { return Ok(()) };
            let ci = ch.coef[d];
            let acc = ch.acc[d].clone();
            let truth = match &mut self.coefs[ci].interp {
                Interp::Fixed => homogenize(self.coefs[ci].value.as_ref().unwrap(), d as u32)?.sub(&acc),
                Interp::Done { poly, restarted: false } => homogenize(poly, d as u32)?.sub(&acc),
                Interp::Done { poly, restarted: true } => homogenize(poly, d as u32)?,
                Interp::Running { restarted: true, .. } => return Ok(()),
                Interp::Running { restarted, .. } => {
                    *restarted = true;
                    if !acc.is_zero() {
                        log::trace!("sparse restart of {side:?} degree {d}");
                        let zippel = self.zippel(side, d as u32);
                        self.coefs[ci].interp = Interp::Running { zippel, restarted: true };
                    }
                    return Ok(());
                }
            };
            if let Interp::Done { poly, restarted: true } = &self.coefs[ci].interp {
                self.coefs[ci].value = Some(poly.add(&dehomogenize(&acc)));
            }
            self.chains[side.idx()].push(truth, &self.s);
        }
    }

    /// Feeds cached values to every interpolator that can use them.
    fn drain(&mut self) -> Result<(), RatError> {
        loop {
            let mut progressed = false;
            for ci in 0..self.coefs.len() {
                while let Interp::Running { zippel, restarted } = &self.coefs[ci].interp {
                    let Some(pt) = zippel.next_point() else { break };
                    let restarted = *restarted;
                    let Some(vals) = self.cache.get(&pt) else { break };
                    let mut v = vals[ci];
                    if restarted {
                        v = self.field.sub(v, self.shift_value(ci, &pt));
                    }
                    let Interp::Running { zippel, restarted } = &mut self.coefs[ci].interp else {
                        unreachable!()
                    };
                    zippel.feed(v)?;
                    progressed = true;
                    if zippel.is_done() {
                        let poly = zippel.result().unwrap().clone();
                        let restarted = *restarted;
                        if !restarted {
                            self.coefs[ci].value = Some(poly.clone());
                        }
                        self.coefs[ci].interp = Interp::Done { poly, restarted };
                        let side = self.coefs[ci].side;
                        self.advance(side)?;
                    }
                }
            }
            if !progressed {
                return Ok(());
            }
        }
    }

    /// The running interpolator to serve next: furthest stage first, then the
    /// highest degree.
    fn pick(&self) -> Option<Vec<u64>> {
        self.coefs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match &c.interp {
                Interp::Running { zippel, .. } => Some(((zippel.stage(), c.degree, std::cmp::Reverse(i)), zippel)),
                _ => None,
            })
            .max_by_key(|(k, _)| *k)
            .and_then(|(_, z)| z.next_point())
    }

    fn known_at(&self, zp: &[u64]) -> Vec<Option<u64>> {
        self.coefs.iter().map(|c| c.value.as_ref().map(|p| p.eval(zp))).collect()
    }

    fn structure(&self, shift: &Shift, normalize_den: bool) -> Structure {
        let coefs = self
            .coefs
            .iter()
            .map(|c| {
                let ch = &self.chains[c.side.idx()];
                let truth = ch.truth[c.degree as usize].as_ref().unwrap();
                CoefSupport {
                    side: c.side,
                    degree: c.degree,
                    dense: c.value.as_ref().unwrap().terms().keys().cloned().collect(),
                    sparse: dehomogenize(truth).terms().keys().cloned().collect(),
                }
            })
            .collect();
        Structure {
            n_vars: self.n,
            shift: shift.clone(),
            normalize_den,
            coefs,
        }
    }
}

fn zero_outcome(f: PrimeField, n: usize, shift: &Shift, probes: usize) -> HybridOutcome {
    HybridOutcome {
        function: RationalFunctionFF::zero(f, n),
        structure: Structure {
            n_vars: n,
            shift: shift.clone(),
            normalize_den: true,
            coefs: vec![],
        },
        probes,
    }
}

/// Interpolates the black box over the probe's field.
///
/// `anchors` holds the Zippel anchors for variables `2..n`; `line` may carry
/// the univariate interpolation along `t (1, anchors) + s` if the shift scan
/// already computed it.
pub fn hybrid_racer<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    shift: &Shift,
    anchors: &[u64],
    line: Option<ThieleResult>,
    cfg: &HybridConfig,
    rng: &mut R,
) -> Result<HybridOutcome, RatError> {
    let f = probe.field();
    let n = probe.n_vars();
    assert_eq!(anchors.len() + 1, n, "one anchor per variable after the first");
    let start = probe.count();
    let s = shift.in_field(f);
    let z0 = with_one(anchors);
    let line = match line {
        Some(l) => l,
        None => interpolate_line(probe, &z0, &s, rng, cfg.eta, cfg.max_retries)?,
    };
    if line.num.is_zero() {
        return Ok(zero_outcome(f, n, shift, probe.count() - start));
    }
    let (num0, den0) = (line.num.coeff(0).value(), line.den.coeff(0).value());
    let normalize_den = den0 != 0;
    let norm = if normalize_den { den0 } else { num0 };
    if norm == 0 {
        return Err(RatError::InvalidShift);
    }
    let inv = f.inv(norm)?;

    let mut st = HybridState {
        field: f,
        n,
        anchors: anchors.to_vec(),
        s,
        cfg,
        coefs: vec![],
        meta: vec![],
        chains: [Chain::new(f, n, vec![]), Chain::new(f, n, vec![])],
        cache: HashMap::new(),
    };
    let mut first = vec![];
    for (side, poly) in [(Side::Num, &line.num), (Side::Den, &line.den)] {
        let mut idx = vec![];
        for d in 0..=poly.degree().unwrap() as u32 {
            let v = f.mul(poly.coeff(d as usize).value(), inv);
            let (interp, value) = if d == 0 {
                (Interp::Fixed, Some(SparsePoly::constant(f, n - 1, v)))
            } else {
                let zippel = st.zippel(side, d);
                (Interp::Running { zippel, restarted: false }, None)
            };
            idx.push(st.coefs.len());
            st.coefs.push(Coef { side, degree: d, interp, value });
            st.meta.push((side, d));
            first.push(v);
        }
        st.chains[side.idx()] = Chain::new(f, n, idx);
    }
    st.cache.insert(anchors.to_vec(), first);
    st.advance(Side::Num)?;
    st.advance(Side::Den)?;
    st.drain()?;
    while let Some(zp) = st.pick() {
        let known = st.known_at(&zp);
        let vals = solve_t_system(probe, &with_one(&zp), &st.s, &st.meta, &known, rng, cfg.max_retries)?;
        st.cache.insert(zp, vals);
        st.drain()?;
    }
    debug_assert!(st.chains.iter().all(|c| c.next.is_none()));
    let num = st.chains[0].total(f, n);
    let den = st.chains[1].total(f, n);
    let function = RationalFunctionFF::new(num, den)?.canonical();
    Ok(HybridOutcome {
        function,
        structure: st.structure(shift, normalize_den),
        probes: probe.count() - start,
    })
}

#[derive(Clone, Copy, Debug)]
struct Plan {
    level: usize,
    sparse: bool,
}

/// Number of `z` points after which each coefficient is known, choosing per
/// coefficient between its dense support and the sparse chain.
fn plan(st: &Structure) -> Vec<Plan> {
    let mut out = vec![Plan { level: 0, sparse: false }; st.coefs.len()];
    for side in [Side::Num, Side::Den] {
        let mut idx: Vec<usize> = (0..st.coefs.len()).filter(|&i| st.coefs[i].side == side).collect();
        idx.sort_by_key(|&i| std::cmp::Reverse(st.coefs[i].degree));
        let mut above = 0;
        for i in idx {
            let c = &st.coefs[i];
            let p = if st.is_fixed(c) {
                Plan { level: 0, sparse: false }
            } else {
                let sparse = c.sparse.len().max(above);
                if sparse < c.dense.len() {
                    Plan { level: sparse, sparse: true }
                } else {
                    Plan { level: c.dense.len(), sparse: false }
                }
            };
            above = above.max(p.level);
            out[i] = p;
        }
    }
    out
}

fn from_support(f: PrimeField, n: usize, monos: &[Monomial], coeffs: &[u64]) -> SparsePoly {
    SparsePoly::from_terms(f, n, monos.iter().cloned().zip(coeffs.iter().copied()))
}

/// Interpolates over a new prime with the structure found on an earlier one.
/// Returns the canonical result and the probes spent.
pub fn solve_with_structure<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    st: &Structure,
    cfg: &HybridConfig,
    rng: &mut R,
) -> Result<(RationalFunctionFF, usize), RatError> {
    let f = probe.field();
    let n = st.n_vars;
    let start = probe.count();
    if st.coefs.is_empty() {
        return Ok((RationalFunctionFF::zero(f, n), 0));
    }
    let s = st.shift.in_field(f);
    let plans = plan(st);
    let meta: Vec<(Side, u32)> = st.coefs.iter().map(|c| (c.side, c.degree)).collect();

    // anchors with distinct nonzero monomial images
    let anchors = 'pick: loop {
        let a: Vec<u64> = (1..n).map(|_| rng.gen_range(2..f.p())).collect();
        for c in &st.coefs {
            for monos in [&c.dense, &c.sparse] {
                let mut seen = HashSet::new();
                for m in monos {
                    let v = (0..n - 1).fold(1, |acc, j| f.mul(acc, f.pow(a[j], m[j] as u64)));
                    if v == 0 || !seen.insert(v) {
                        continue 'pick;
                    }
                }
            }
        }
        break a;
    };
    let nodes = |monos: &[Monomial]| -> Vec<u64> {
        monos
            .iter()
            .map(|m| (0..n - 1).fold(1, |acc, j| f.mul(acc, f.pow(anchors[j], m[j] as u64))))
            .collect()
    };

    let mut value: Vec<Option<SparsePoly>> = st
        .coefs
        .iter()
        .map(|c| {
            if st.is_fixed(c) {
                Some(SparsePoly::constant(f, n - 1, 1))
            } else if c.dense.is_empty() {
                Some(SparsePoly::zero(f, n - 1))
            } else {
                None
            }
        })
        .collect();
    let mut samples: Vec<Vec<u64>> = vec![vec![]; st.coefs.len()];
    let mut zs: Vec<Vec<u64>> = vec![];
    let mut chains = [Side::Num, Side::Den].map(|side| {
        let mut idx: Vec<usize> = (0..st.coefs.len()).filter(|&i| st.coefs[i].side == side).collect();
        idx.sort_by_key(|&i| st.coefs[i].degree);
        Chain::new(f, n, idx)
    });
    let max_level = plans.iter().map(|p| p.level).max().unwrap_or(0);
    for level in 0..=max_level {
        if level > 0 {
            let zp: Vec<u64> = anchors.iter().map(|&a| f.pow(a, level as u64)).collect();
            let known: Vec<Option<u64>> = value.iter().map(|v| v.as_ref().map(|p| p.eval(&zp))).collect();
            debug_assert_eq!(
                known.iter().filter(|k| k.is_none()).count(),
                plans.iter().filter(|p| p.level >= level).count()
            );
            let vals = solve_t_system(probe, &with_one(&zp), &s, &meta, &known, rng, cfg.max_retries)?;
            for (i, v) in vals.into_iter().enumerate() {
                if known[i].is_none() {
                    samples[i].push(v);
                }
            }
            zs.push(zp);
        }
        for (i, c) in st.coefs.iter().enumerate() {
            if value[i].is_none() && !plans[i].sparse && plans[i].level == level {
                let sol = solve_transposed_vandermonde(f, &nodes(&c.dense), &samples[i][..c.dense.len()])?;
                value[i] = Some(from_support(f, n - 1, &c.dense, &sol));
            }
        }
        for ch in chains.iter_mut() {
            while let Some(d) = ch.next {
                let i = ch.coef[d];
                let c = &st.coefs[i];
                let acc = ch.acc[d].clone();
                let truth = if plans[i].sparse {
                    if plans[i].level > level {
                        break;
                    }
                    let t = c.sparse.len();
                    let vals: Vec<u64> = (0..t)
                        .map(|k| f.sub(samples[i][k], acc.eval(&with_one(&zs[k]))))
                        .collect();
                    let sol = solve_transposed_vandermonde(f, &nodes(&c.sparse), &vals)?;
                    let truth = homogenize(&from_support(f, n - 1, &c.sparse, &sol), d as u32)?;
                    value[i] = Some(dehomogenize(&truth.add(&acc)));
                    truth
                } else {
                    match &value[i] {
                        Some(v) => homogenize(v, d as u32)?.sub(&acc),
                        None => break,
                    }
                };
                ch.push(truth, &s);
            }
        }
    }
    let num = chains[0].total(f, n);
    let den = chains[1].total(f, n);
    let function = RationalFunctionFF::new(num, den)?.canonical();
    Ok((function, probe.count() - start))
}

/// Convenience wrapper drawing anchors from `rng`.
pub fn hybrid_racer_auto<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    shift: &Shift,
    cfg: &HybridConfig,
    rng: &mut R,
) -> Result<HybridOutcome, RatError> {
    let f = probe.field();
    let anchors: Vec<u64> = (1..probe.n_vars()).map(|_| rng.gen_range(2..f.p())).collect();
    hybrid_racer(probe, shift, &anchors, None, cfg, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::prime_sequence;
    use crate::ratinterp::FnProbe;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type BoxFn = Box<dyn Fn(PrimeField, &[u64]) -> Result<u64, FieldError>>;

    fn eq14() -> BoxFn {
        Box::new(|f, x| {
            let (a, b) = (x[0], x[1]);
            let n = [
                f.mul(a, f.pow(b, 3)),
                f.mul(f.pow(a, 2), f.pow(b, 2)),
                f.mul(f.pow(a, 3), b),
                f.pow(a, 4),
                f.pow(b, 5),
            ]
            .into_iter()
            .fold(0, |acc, v| f.add(acc, v));
            f.div(n, b)
        })
    }

    fn run(bb: &BoxFn, n: usize, shift: Vec<u64>, seed: u64) -> (HybridOutcome, PrimeField) {
        let f = prime_sequence(0).unwrap();
        let mut p = FnProbe::new(f, n, |x: &[u64]| bb(f, x));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = hybrid_racer_auto(&mut p, &Shift { s: shift }, &HybridConfig::default(), &mut rng).unwrap();
        assert_eq!(out.probes, p.count());
        (out, f)
    }

    fn check_sound(bb: &BoxFn, r: &RationalFunctionFF, f: PrimeField, n: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut hit = 0;
        while hit < 50 {
            let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..f.p())).collect();
            if let (Ok(a), Ok(b)) = (bb(f, &x), r.eval(&x)) {
                assert_eq!(a, b);
                hit += 1;
            }
        }
    }

    #[test]
    fn worked_example_within_budget() {
        let bb = eq14();
        let (out, f) = run(&bb, 2, vec![0, 2], 1);
        assert!(out.probes <= 30, "{} probes", out.probes);
        let num = &out.function.num;
        assert_eq!(num.len(), 5);
        for m in [[1, 3], [2, 2], [3, 1], [4, 0], [0, 5]] {
            assert_eq!(num.coeff(&m).value(), 1);
        }
        assert_eq!(out.function.den.terms().len(), 1);
        assert_eq!(out.function.den.coeff(&[0, 1]).value(), 1);
        check_sound(&bb, &out.function, f, 2);
    }

    #[test]
    fn shifting_both_variables_agrees() {
        let bb = eq14();
        let (one, _) = run(&bb, 2, vec![0, 2], 3);
        let (both, _) = run(&bb, 2, vec![3, 2], 3);
        assert_eq!(one.function, both.function);
        assert!(both.probes.abs_diff(one.probes) <= 2, "{} vs {}", both.probes, one.probes);
    }

    #[test]
    fn constant_costs_only_the_line() {
        let bb: BoxFn = Box::new(|_, _| Ok(7));
        let (out, _) = run(&bb, 3, vec![0, 0, 0], 2);
        assert_eq!(out.probes, 2);
        assert_eq!(out.function.num.coeff(&[0, 0, 0]).value(), 7);
    }

    #[test]
    fn zero_short_circuits() {
        let bb: BoxFn = Box::new(|_, _| Ok(0));
        let (out, _) = run(&bb, 2, vec![0, 0], 2);
        assert!(out.function.num.is_zero());
        assert!(out.structure.coefs.is_empty());
    }

    #[test]
    fn reciprocal_sum() {
        let bb: BoxFn = Box::new(|f, x| f.inv(f.add(x[0], x[1])));
        let (out, f) = run(&bb, 2, vec![0, 1], 4);
        assert_eq!(out.function.num.len(), 1);
        assert_eq!(out.function.den.len(), 2);
        check_sound(&bb, &out.function, f, 2);
    }

    fn sparse3() -> BoxFn {
        // (3 x y^2 z^4 + x^5 - 2) / (x^2 z + 5 y^3 + 1)
        Box::new(|f, v| {
            let (x, y, z) = (v[0], v[1], v[2]);
            let n = f.add(
                f.mul(3, f.mul(x, f.mul(f.pow(y, 2), f.pow(z, 4)))),
                f.sub(f.pow(x, 5), 2),
            );
            let d = f.add(f.add(f.mul(f.pow(x, 2), z), f.mul(5, f.pow(y, 3))), 1);
            f.div(n, d)
        })
    }

    #[test]
    fn three_variables_with_constant_term() {
        let bb = sparse3();
        let (out, f) = run(&bb, 3, vec![0, 0, 0], 5);
        assert_eq!(out.function.num.len(), 3);
        assert_eq!(out.function.den.len(), 3);
        check_sound(&bb, &out.function, f, 3);
    }

    #[test]
    fn structure_reuse_on_next_prime() {
        for (bb, n, shift) in [(eq14(), 2, vec![0, 2]), (sparse3(), 3, vec![0, 0, 1])] {
            let (out, _) = run(&bb, n, shift, 6);
            let g = prime_sequence(1).unwrap();
            let mut p = FnProbe::new(g, n, |x: &[u64]| bb(g, x));
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let (r, probes) = solve_with_structure(&mut p, &out.structure, &HybridConfig::default(), &mut rng).unwrap();
            assert_eq!(probes, out.structure.planned_probes());
            assert!(probes <= out.probes);
            let keys = |p: &SparsePoly| p.terms().keys().cloned().collect::<Vec<_>>();
            assert_eq!(keys(&r.num), keys(&out.function.num));
            assert_eq!(keys(&r.den), keys(&out.function.den));
            check_sound(&bb, &r, g, n);
        }
    }

    #[test]
    fn numerator_normalization_when_denominator_vanishes() {
        // no constant term in the denominator, so the numerator's is fixed
        let bb: BoxFn = Box::new(|f, x| f.div(f.add(f.mul(x[0], x[1]), 1), f.add(x[0], x[1])));
        let (out, f) = run(&bb, 2, vec![0, 0], 9);
        assert!(!out.structure.normalize_den);
        check_sound(&bb, &out.function, f, 2);
    }
}
