use rayon::prelude::*;

use super::{compute_bunch_size, BlackBox};
use crate::factorscan::FactorScanResult;
use crate::numtheory::{prime_sequence, FieldError, PrimeField, PRIMES};
use crate::ratinterp::{MultiPrimeProbe, Probe};

/// Where probe values come from: a local pool or remote workers.
///
/// Primes are addressed by their index in the built-in sequence so every
/// process agrees on them.
pub trait Sampler: Sync {
    fn n_vars(&self) -> usize;
    fn n_functions(&self) -> usize;
    fn prepare(&self, prime: usize) -> Result<PrimeField, FieldError>;
    /// Values of one function, in point order.
    fn sample(&self, prime: usize, function: usize, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>>;
}

/// Splits a probe queue into bunches with [`compute_bunch_size`].
pub(crate) fn bunches(len: usize, threads: usize, b_max: usize) -> Vec<(usize, usize)> {
    let mut out = vec![];
    let mut at = 0;
    while at < len {
        let b = compute_bunch_size(len - at, threads, b_max).min(len - at);
        out.push((at, at + b));
        at += b;
    }
    out
}

/// Evaluates bunches on a local thread pool.
pub struct LocalSampler<'a> {
    bb: &'a dyn BlackBox,
    threads: usize,
    b_max: usize,
    pool: Option<rayon::ThreadPool>,
}

impl<'a> LocalSampler<'a> {
    pub fn new(bb: &'a dyn BlackBox, threads: usize, b_max: usize) -> Self {
        let threads = threads.max(1);
        let pool = (threads > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool")
        });
        Self {
            bb,
            threads,
            b_max: b_max.max(1),
            pool,
        }
    }

    pub fn black_box(&self) -> &'a dyn BlackBox {
        self.bb
    }
}

impl Sampler for LocalSampler<'_> {
    fn n_vars(&self) -> usize {
        self.bb.n_vars()
    }

    fn n_functions(&self) -> usize {
        self.bb.n_functions()
    }

    fn prepare(&self, prime: usize) -> Result<PrimeField, FieldError> {
        let f = prime_sequence(prime)?;
        self.bb.prepare(f)?;
        Ok(f)
    }

    fn sample(&self, prime: usize, function: usize, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        let f = match prime_sequence(prime) {
            Ok(f) => f,
            Err(e) => return vec![Err(e); points.len()],
        };
        let parts = bunches(points.len(), self.threads, self.b_max);
        let run = |&(a, b): &(usize, usize)| self.bb.evaluate_bunch(f, function, &points[a..b]);
        match &self.pool {
            Some(pool) if parts.len() > 1 => pool.install(|| parts.par_iter().map(run).collect::<Vec<_>>()).concat(),
            _ => parts.iter().flat_map(run).collect(),
        }
    }
}

/// [`Probe`] for one function of a sampler.
///
/// With a factor scan attached, points are taken in internal variable order
/// and the values are divided by the detected factors.
pub struct FunctionProbe<'a> {
    sampler: &'a dyn Sampler,
    function: usize,
    prime: usize,
    field: PrimeField,
    n_vars: usize,
    ordering: Vec<usize>,
    factors: Option<&'a FactorScanResult>,
    count: usize,
}

impl<'a> FunctionProbe<'a> {
    /// Probe in user variable order. A function without variables gets one
    /// dummy variable so the interpolation code has a line to work on.
    pub fn plain(sampler: &'a dyn Sampler, function: usize, prime: usize) -> Result<Self, FieldError> {
        let field = sampler.prepare(prime)?;
        let n = sampler.n_vars();
        Ok(Self {
            sampler,
            function,
            prime,
            field,
            n_vars: n.max(1),
            ordering: (0..n).collect(),
            factors: None,
            count: 0,
        })
    }

    /// Probe of the black box with `scan`'s factors divided out, in the
    /// scan's internal variable order.
    pub fn reduced(
        sampler: &'a dyn Sampler,
        function: usize,
        prime: usize,
        scan: &'a FactorScanResult,
    ) -> Result<Self, FieldError> {
        let mut p = Self::plain(sampler, function, prime)?;
        p.ordering = scan.ordering.clone();
        p.factors = Some(scan).filter(|s| s.has_factors());
        Ok(p)
    }

    pub fn prime(&self) -> usize {
        self.prime
    }

    pub fn set_prime(&mut self, prime: usize) -> Result<(), FieldError> {
        self.field = self.sampler.prepare(prime)?;
        self.prime = prime;
        Ok(())
    }

    fn to_user(&self, x: &[u64]) -> Vec<u64> {
        let mut u = vec![0; self.ordering.len()];
        for (i, &o) in self.ordering.iter().enumerate() {
            u[o] = x[i];
        }
        u
    }
}

impl Probe for FunctionProbe<'_> {
    fn field(&self) -> PrimeField {
        self.field
    }

    fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn probe(&mut self, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        self.count += points.len();
        let user: Vec<Vec<u64>> = points.iter().map(|x| self.to_user(x)).collect();
        let vals = self.sampler.sample(self.prime, self.function, &user);
        let Some(scan) = self.factors else { return vals };
        let f = self.field;
        vals.into_iter()
            .zip(&user)
            .map(|(v, u)| {
                let v = v?;
                let (qn, qd) = scan.eval_factors(f, u);
                f.div(f.mul(v, qd), qn)
            })
            .collect()
    }

    fn count(&self) -> usize {
        self.count
    }
}

impl MultiPrimeProbe for FunctionProbe<'_> {
    fn set_field(&mut self, field: PrimeField) -> Result<(), FieldError> {
        let idx = PRIMES.iter().position(|&p| p == field.p()).ok_or(FieldError::NotPrime(field.p()))?;
        self.set_prime(idx)
    }
}
