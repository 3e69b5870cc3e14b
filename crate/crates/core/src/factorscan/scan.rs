use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{common_factors, factorize_univariate_ff, FFFactorization, FactorError};
use crate::numtheory::{crt_combine, prime_sequence, rational_reconstruct, BigRational, FieldError, PrimeField};
use crate::polyinterp::{gauss_solve, DensePolyFF};
use crate::ratinterp::{thiele_interpolate, MultiPrimeProbe, Probe, QPoly, RatError, MAX_RETRIES};

/// Univariate integer polynomial, ascending coefficients.
pub type UniPolyZ = Vec<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorScanConfig {
    /// Samples per prime; a factor must show up in all of them.
    pub samples: usize,
    pub max_primes: usize,
    pub eta: usize,
    pub max_retries: usize,
    /// Index of the first prime of [`prime_sequence`] used.
    pub first_prime: usize,
}

impl Default for FactorScanConfig {
    fn default() -> Self {
        Self {
            samples: 2,
            max_primes: 20,
            eta: 1,
            max_retries: MAX_RETRIES,
            first_prime: 0,
        }
    }
}

/// Result of scanning one variable over one prime.
#[derive(Clone, Debug)]
pub struct FieldScan {
    pub field: PrimeField,
    /// Numerator and denominator factorizations of every sample.
    pub samples: Vec<(FFFactorization, FFFactorization)>,
    pub num_common: Vec<(DensePolyFF, u32)>,
    pub den_common: Vec<(DensePolyFF, u32)>,
    pub num_degree: u32,
    pub den_degree: u32,
    pub probes: usize,
}

fn product(field: PrimeField, fs: &[(DensePolyFF, u32)]) -> DensePolyFF {
    fs.iter()
        .fold(DensePolyFF::one(field), |acc, (p, m)| acc.mul(&p.pow(*m as u64)))
}

impl FieldScan {
    pub fn num_product(&self) -> DensePolyFF {
        product(self.field, &self.num_common)
    }

    pub fn den_product(&self) -> DensePolyFF {
        product(self.field, &self.den_common)
    }
}

fn point_with(fixings: &[u64], i: usize, t: u64) -> Vec<u64> {
    let mut p = Vec::with_capacity(fixings.len() + 1);
    p.extend_from_slice(&fixings[..i]);
    p.push(t);
    p.extend_from_slice(&fixings[i..]);
    p
}

/// Solves for `num / den` with known degrees and monic `den`.
fn sample_with_degrees<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    i: usize,
    fixings: &[u64],
    a: usize,
    b: usize,
    rng: &mut R,
    max_retries: usize,
) -> Result<(DensePolyFF, DensePolyFF), FactorError> {
    let f = probe.field();
    let u = a + 1 + b;
    let mut bad = 0;
    loop {
        let mut seen = HashSet::new();
        let mut rows = Vec::with_capacity(u);
        let mut rhs = Vec::with_capacity(u);
        while rows.len() < u {
            let t = rng.gen_range(0..f.p());
            if !seen.insert(t) {
                continue;
            }
            match probe.probe_one(point_with(fixings, i, t)) {
                Ok(v) => {
                    let mut row: Vec<u64> = (0..=a).map(|d| f.pow(t, d as u64)).collect();
                    row.extend((0..b).map(|d| f.neg(f.mul(v, f.pow(t, d as u64)))));
                    rows.push(row);
                    rhs.push(f.mul(v, f.pow(t, b as u64)));
                }
                Err(FieldError::ZeroDivisor { .. }) => {
                    bad += 1;
                    if bad > max_retries {
                        return Err(RatError::TooManyBadPoints(bad).into());
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
        if let Some(sol) = gauss_solve(f, rows, rhs) {
            let num = DensePolyFF::new(f, sol[..=a].to_vec());
            let mut den = sol[a + 1..].to_vec();
            den.push(1);
            return Ok((num, DensePolyFF::new(f, den)));
        }
        bad += 1;
        if bad > max_retries {
            return Err(FactorError::Singular);
        }
    }
}

/// Steps of the scan within one prime field: interpolate the black box in
/// variable `i` at each set of fixings (values of the other variables, in
/// order), factor numerator and denominator, and keep the factors common to
/// all samples.
pub fn scan_variable_in_field<P: Probe + ?Sized, R: Rng>(
    probe: &mut P,
    i: usize,
    fixings: &[Vec<u64>],
    eta: usize,
    max_retries: usize,
    rng: &mut R,
) -> Result<FieldScan, FactorError> {
    let f = probe.field();
    let start = probe.count();
    let first = thiele_interpolate(f, |t| probe.probe_one(point_with(&fixings[0], i, t)), rng, eta, max_retries)?;
    if first.num.is_zero() {
        return Ok(FieldScan {
            field: f,
            samples: vec![],
            num_common: vec![],
            den_common: vec![],
            num_degree: 0,
            den_degree: 0,
            probes: probe.count() - start,
        });
    }
    let a = first.num.degree().unwrap();
    let b = first.den.degree().unwrap();
    let mut fracs = vec![(first.num, first.den)];
    for fx in &fixings[1..] {
        fracs.push(sample_with_degrees(probe, i, fx, a, b, rng, max_retries)?);
    }
    let mut samples = Vec::with_capacity(fracs.len());
    for (n, d) in &fracs {
        samples.push((factorize_univariate_ff(n, rng)?, factorize_univariate_ff(d, rng)?));
    }
    let mut num_common = samples[0].0.factors.clone();
    let mut den_common = samples[0].1.factors.clone();
    for (n, d) in &samples[1..] {
        num_common = common_factors(&num_common, &n.factors);
        den_common = common_factors(&den_common, &d.factors);
    }
    Ok(FieldScan {
        field: f,
        samples,
        num_common,
        den_common,
        num_degree: a as u32,
        den_degree: b as u32,
        probes: probe.count() - start,
    })
}

/// Monic rational polynomial to a primitive integer one with positive
/// leading coefficient.
fn primitive(c: &[BigRational]) -> UniPolyZ {
    let lcm = c.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let mut z: Vec<BigInt> = c.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = z.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() {
        for v in &mut z {
            *v /= &g;
        }
    }
    if z.last().is_some_and(|l| l.is_negative()) {
        for v in &mut z {
            *v = -v.clone();
        }
    }
    z
}

/// Combines per-prime common factor products by CRT and rational
/// reconstruction.
#[derive(Clone, Debug, Default)]
pub struct FactorLift {
    images: Vec<(Vec<u64>, Vec<u64>, u64)>,
}

impl FactorLift {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn primes(&self) -> usize {
        self.images.len()
    }

    /// Adds a prime's products; a change of degree discards earlier images.
    pub fn push(&mut self, scan: &FieldScan) {
        let n = scan.num_product().into_coeffs();
        let d = scan.den_product().into_coeffs();
        if let Some((n0, d0, _)) = self.images.first() {
            if n0.len() != n.len() || d0.len() != d.len() {
                log::warn!("factor degrees changed between primes, dropping earlier images");
                self.images.clear();
            }
        }
        self.images.push((n, d, scan.field.p()));
    }

    fn lift_side(&self, pick: impl Fn(&(Vec<u64>, Vec<u64>, u64)) -> &Vec<u64>) -> Result<Option<UniPolyZ>, FactorError> {
        let len = pick(&self.images[0]).len();
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let parts: Vec<(u64, u64)> = self.images.iter().map(|im| (pick(im)[k], im.2)).collect();
            let sys = crt_combine(&parts)?;
            match rational_reconstruct(sys.residue(), sys.modulus()) {
                Some(q) => out.push(q),
                None => return Ok(None),
            }
        }
        Ok(Some(primitive(&out)))
    }

    /// Numerator and denominator factors over the integers, once every
    /// coefficient reconstructs.
    pub fn result(&self) -> Result<Option<(UniPolyZ, UniPolyZ)>, FactorError> {
        if self.images.is_empty() {
            return Ok(None);
        }
        match (self.lift_side(|im| &im.0)?, self.lift_side(|im| &im.1)?) {
            (Some(n), Some(d)) => Ok(Some((n, d))),
            _ => Ok(None),
        }
    }
}

/// Factors and degrees found for one variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableScan {
    pub var: usize,
    pub num_factor: UniPolyZ,
    pub den_factor: UniPolyZ,
    /// Degrees of the full black box in this variable.
    pub num_degree: u32,
    pub den_degree: u32,
    pub probes: usize,
}

impl VariableScan {
    fn factor_degree(p: &UniPolyZ) -> u32 {
        p.len().saturating_sub(1) as u32
    }

    /// Degrees left once the factors are divided out.
    pub fn reduced_degrees(&self) -> (u32, u32) {
        (
            self.num_degree.saturating_sub(Self::factor_degree(&self.num_factor)),
            self.den_degree.saturating_sub(Self::factor_degree(&self.den_factor)),
        )
    }

    pub fn has_factors(&self) -> bool {
        self.num_factor.len() > 1 || self.den_factor.len() > 1
    }
}

fn random_fixings<R: Rng>(field: PrimeField, n: usize, rng: &mut R) -> Vec<u64> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = rng.gen_range(2..field.p() - 1);
        if seen.insert(v) {
            out.push(v);
        }
    }
    out
}

/// Scans variable `i` over successive primes until its factors lift to the
/// integers.
pub fn scan_variable<P: MultiPrimeProbe + ?Sized, R: Rng>(
    probe: &mut P,
    i: usize,
    cfg: &FactorScanConfig,
    rng: &mut R,
) -> Result<VariableScan, FactorError> {
    let n = probe.n_vars();
    let start = probe.count();
    let samples = if n == 1 { 1 } else { cfg.samples.max(1) };
    let mut lift = FactorLift::new();
    let mut degrees = None;
    for k in 0..cfg.max_primes {
        let field = prime_sequence(cfg.first_prime + k)?;
        probe.set_field(field)?;
        let fixings: Vec<Vec<u64>> = (0..samples).map(|_| random_fixings(field, n - 1, rng)).collect();
        let scan = scan_variable_in_field(probe, i, &fixings, cfg.eta, cfg.max_retries, rng)?;
        degrees.get_or_insert((scan.num_degree, scan.den_degree));
        lift.push(&scan);
        if let Some((num_factor, den_factor)) = lift.result()? {
            let (num_degree, den_degree) = degrees.unwrap();
            return Ok(VariableScan {
                var: i,
                num_factor,
                den_factor,
                num_degree,
                den_degree,
                probes: probe.count() - start,
            });
        }
    }
    Err(FactorError::Exhausted(i))
}

/// Factors of every variable plus the internal ordering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorScanResult {
    pub n_vars: usize,
    pub vars: Vec<VariableScan>,
    /// `ordering[internal] = user variable`; descending reduced degree.
    pub ordering: Vec<usize>,
    pub probes: usize,
}

fn eval_z(field: PrimeField, p: &UniPolyZ, x: u64) -> u64 {
    p.iter()
        .rev()
        .fold(0, |acc, c| field.mul_add(acc, x, field.from_bigint(c)))
}

impl FactorScanResult {
    /// No factors and no reordering.
    pub fn trivial(n_vars: usize) -> Self {
        Self {
            n_vars,
            vars: (0..n_vars)
                .map(|i| VariableScan {
                    var: i,
                    num_factor: vec![BigInt::one()],
                    den_factor: vec![BigInt::one()],
                    num_degree: 0,
                    den_degree: 0,
                    probes: 0,
                })
                .collect(),
            ordering: (0..n_vars).collect(),
            probes: 0,
        }
    }

    pub fn has_factors(&self) -> bool {
        self.vars.iter().any(|v| v.has_factors())
    }

    /// Values of the numerator and denominator factor products at a point
    /// given in user variable order.
    pub fn eval_factors(&self, field: PrimeField, point: &[u64]) -> (u64, u64) {
        self.vars.iter().fold((1, 1), |(n, d), v| {
            let x = point[v.var];
            (
                field.mul(n, eval_z(field, &v.num_factor, x)),
                field.mul(d, eval_z(field, &v.den_factor, x)),
            )
        })
    }

    fn product(&self, pick: impl Fn(&VariableScan) -> &UniPolyZ) -> QPoly {
        let mut acc: QPoly = [(vec![0; self.n_vars], BigRational::one())].into();
        for v in &self.vars {
            let mut next = QPoly::new();
            for (m, c) in &acc {
                for (e, k) in pick(v).iter().enumerate() {
                    if k.is_zero() {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2[v.var] += e as u32;
                    let val = c * BigRational::from_integer(k.clone());
                    *next.entry(m2).or_insert_with(BigRational::zero) += val;
                }
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
        acc
    }

    /// Product of numerator factors as a polynomial in user variables.
    pub fn q_num(&self) -> QPoly {
        self.product(|v| &v.num_factor)
    }

    pub fn q_den(&self) -> QPoly {
        self.product(|v| &v.den_factor)
    }

    /// Reduced degree bounds in internal variable order.
    pub fn num_bounds(&self) -> Vec<u32> {
        self.ordering.iter().map(|&u| self.vars[u].reduced_degrees().0).collect()
    }

    pub fn den_bounds(&self) -> Vec<u32> {
        self.ordering.iter().map(|&u| self.vars[u].reduced_degrees().1).collect()
    }
}

/// Scans every variable and orders them by descending maximal reduced degree
/// (stable, so ties keep the user order).
pub fn full_scan<P: MultiPrimeProbe + ?Sized, R: Rng>(
    probe: &mut P,
    cfg: &FactorScanConfig,
    rng: &mut R,
) -> Result<FactorScanResult, FactorError> {
    let n = probe.n_vars();
    let start = probe.count();
    let mut vars = Vec::with_capacity(n);
    for i in 0..n {
        let v = scan_variable(probe, i, cfg, rng)?;
        log::debug!(
            "variable {i}: degrees {}/{}, factors {:?} / {:?}",
            v.num_degree,
            v.den_degree,
            v.num_factor,
            v.den_factor
        );
        vars.push(v);
    }
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by_key(|&i| {
        let (a, b) = vars[i].reduced_degrees();
        std::cmp::Reverse(a.max(b))
    });
    Ok(FactorScanResult {
        n_vars: n,
        vars,
        ordering,
        probes: probe.count() - start,
    })
}
