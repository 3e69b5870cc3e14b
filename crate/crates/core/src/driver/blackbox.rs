use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use crate::numtheory::{FieldError, PrimeField};
use crate::parser::{PostfixProgram, PreEvaluatedProgram};

/// A vector of rational functions known only through evaluation.
///
/// Implementations must be pure (same field and point, same values) and safe
/// to call from several threads at once.
pub trait BlackBox: Send + Sync {
    fn n_vars(&self) -> usize;
    fn n_functions(&self) -> usize;

    /// Called whenever evaluation moves to a new prime. A `BadPrime` error
    /// makes the driver skip the prime.
    fn prepare(&self, _field: PrimeField) -> Result<(), FieldError> {
        Ok(())
    }

    /// Values of every function at `point`; `Err` marks a pole.
    fn evaluate(&self, field: PrimeField, point: &[u64]) -> Vec<Result<u64, FieldError>>;

    fn evaluate_function(&self, field: PrimeField, function: usize, point: &[u64]) -> Result<u64, FieldError> {
        self.evaluate(field, point).swap_remove(function)
    }

    /// One function over a bunch of points; must equal pointwise evaluation.
    fn evaluate_bunch(&self, field: PrimeField, function: usize, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        points.iter().map(|p| self.evaluate_function(field, function, p)).collect()
    }

    /// Identifies the functions for checkpoint validation.
    fn fingerprint(&self) -> Option<u64> {
        None
    }
}

type Eval = dyn Fn(PrimeField, &[u64]) -> Vec<Result<u64, FieldError>> + Send + Sync;

/// Black box over a closure returning all function values.
pub struct FnBlackBox {
    n_vars: usize,
    n_functions: usize,
    f: Box<Eval>,
}

impl FnBlackBox {
    pub fn new<F>(n_vars: usize, n_functions: usize, f: F) -> Self
    where
        F: Fn(PrimeField, &[u64]) -> Vec<Result<u64, FieldError>> + Send + Sync + 'static,
    {
        Self {
            n_vars,
            n_functions,
            f: Box::new(f),
        }
    }

    pub fn single<F>(n_vars: usize, f: F) -> Self
    where
        F: Fn(PrimeField, &[u64]) -> Result<u64, FieldError> + Send + Sync + 'static,
    {
        Self::new(n_vars, 1, move |field, x| vec![f(field, x)])
    }
}

impl BlackBox for FnBlackBox {
    fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn n_functions(&self) -> usize {
        self.n_functions
    }

    fn evaluate(&self, field: PrimeField, point: &[u64]) -> Vec<Result<u64, FieldError>> {
        (self.f)(field, point)
    }
}

type PreCache = RwLock<HashMap<u64, Arc<Result<Vec<PreEvaluatedProgram>, FieldError>>>>;

/// Parsed expressions, pre-evaluated once per prime.
pub struct ExpressionBlackBox {
    n_vars: usize,
    programs: Vec<PostfixProgram>,
    pre: PreCache,
}

impl ExpressionBlackBox {
    pub fn new(n_vars: usize, programs: Vec<PostfixProgram>) -> Self {
        Self {
            n_vars,
            programs,
            pre: RwLock::new(HashMap::new()),
        }
    }

    pub fn programs(&self) -> &[PostfixProgram] {
        &self.programs
    }

    fn tables(&self, field: PrimeField) -> Arc<Result<Vec<PreEvaluatedProgram>, FieldError>> {
        if let Some(t) = self.pre.read().unwrap().get(&field.p()) {
            return t.clone();
        }
        let built: Result<Vec<_>, _> = self.programs.iter().map(|p| p.precompute(field)).collect();
        let built = Arc::new(built);
        self.pre.write().unwrap().entry(field.p()).or_insert(built).clone()
    }
}

impl BlackBox for ExpressionBlackBox {
    fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn n_functions(&self) -> usize {
        self.programs.len()
    }

    fn prepare(&self, field: PrimeField) -> Result<(), FieldError> {
        self.tables(field).as_ref().as_ref().map(|_| ()).map_err(Clone::clone)
    }

    fn evaluate(&self, field: PrimeField, point: &[u64]) -> Vec<Result<u64, FieldError>> {
        match self.tables(field).as_ref() {
            Ok(t) => crate::parser::evaluate_pre(t, point),
            Err(e) => vec![Err(e.clone()); self.programs.len()],
        }
    }

    fn evaluate_function(&self, field: PrimeField, function: usize, point: &[u64]) -> Result<u64, FieldError> {
        match self.tables(field).as_ref() {
            Ok(t) => t[function].evaluate(point),
            Err(e) => Err(e.clone()),
        }
    }

    fn evaluate_bunch(&self, field: PrimeField, function: usize, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        match self.tables(field).as_ref() {
            Ok(t) if points.len() == 1 => vec![t[function].evaluate(&points[0])],
            Ok(t) => t[function].evaluate_bunch(points),
            Err(e) => vec![Err(e.clone()); points.len()],
        }
    }

    fn fingerprint(&self) -> Option<u64> {
        let mut parts: Vec<u64> = self.programs.iter().map(|p| p.source_hash).collect();
        parts.push(self.n_vars as u64);
        Some(
            parts
                .iter()
                .flat_map(|x| x.to_le_bytes())
                .fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3)),
        )
    }
}

/// Wraps a black box and tallies point evaluations per function.
pub struct CountingBlackBox<B> {
    pub inner: B,
    counts: Vec<AtomicUsize>,
}

impl<B: BlackBox> CountingBlackBox<B> {
    pub fn new(inner: B) -> Self {
        let counts = (0..inner.n_functions()).map(|_| AtomicUsize::new(0)).collect();
        Self { inner, counts }
    }

    pub fn count(&self, function: usize) -> usize {
        self.counts[function].load(Ordering::Relaxed)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|c| c.load(Ordering::Relaxed)).sum()
    }
}

impl<B: BlackBox> BlackBox for CountingBlackBox<B> {
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }

    fn n_functions(&self) -> usize {
        self.inner.n_functions()
    }

    fn prepare(&self, field: PrimeField) -> Result<(), FieldError> {
        self.inner.prepare(field)
    }

    fn evaluate(&self, field: PrimeField, point: &[u64]) -> Vec<Result<u64, FieldError>> {
        for c in &self.counts {
            c.fetch_add(1, Ordering::Relaxed);
        }
        self.inner.evaluate(field, point)
    }

    fn evaluate_function(&self, field: PrimeField, function: usize, point: &[u64]) -> Result<u64, FieldError> {
        self.counts[function].fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate_function(field, function, point)
    }

    fn evaluate_bunch(&self, field: PrimeField, function: usize, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        self.counts[function].fetch_add(points.len(), Ordering::Relaxed);
        self.inner.evaluate_bunch(field, function, points)
    }

    fn fingerprint(&self) -> Option<u64> {
        self.inner.fingerprint()
    }
}
