use super::{InterpError, Monomial, RaceMode, RacerState, SparsePoly};
use crate::numtheory::{FieldError, PrimeField};

/// Degree information available before interpolation starts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeBounds {
    pub total: Option<u32>,
    pub per_var: Vec<Option<u32>>,
}

impl DegreeBounds {
    pub fn total(n_vars: usize, d: u32) -> Self {
        Self {
            total: Some(d),
            per_var: vec![None; n_vars],
        }
    }

    pub fn none(n_vars: usize) -> Self {
        Self {
            total: None,
            per_var: vec![None; n_vars],
        }
    }
}

/// Push-mode Zippel interpolation, one variable per stage.
///
/// At stage `k` the known skeleton in `x_0..x_{k-1}` is used to pull out the
/// univariate coefficient functions of `x_k` through transposed Vandermonde
/// solves; each coefficient function is interpolated by its own racer. The
/// caller asks for [`next_point`](Self::next_point) and answers with
/// [`feed`](Self::feed).
#[derive(Clone, Debug)]
pub struct ZippelState {
    field: PrimeField,
    n_vars: usize,
    anchors: Vec<u64>,
    eta: usize,
    mode: RaceMode,
    bounds: DegreeBounds,
    stage: usize,
    monos: Vec<Monomial>,
    nodes: Vec<u64>,
    racers: Vec<RacerState>,
    active: Vec<usize>,
    step: u64,
    pending: Vec<u64>,
    result: Option<SparsePoly>,
    probes: usize,
}

impl ZippelState {
    pub fn new(field: PrimeField, anchors: Vec<u64>, bounds: DegreeBounds, eta: usize, mode: RaceMode) -> Self {
        let n = anchors.len();
        let mut bounds = bounds;
        bounds.per_var.resize(n, None);
        let mut s = Self {
            field,
            n_vars: n,
            anchors,
            eta,
            mode,
            bounds,
            stage: 0,
            monos: vec![vec![0; n]],
            nodes: vec![1],
            racers: vec![],
            active: vec![0],
            step: 1,
            pending: vec![],
            result: None,
            probes: 0,
        };
        if n > 0 {
            let b = s.racer_bound(0, 0);
            s.racers.push(RacerState::new(field, s.anchors[0], eta, b, mode));
        }
        s
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn probes(&self) -> usize {
        self.probes
    }

    pub fn is_done(&self) -> bool {
        self.result.is_some()
    }

    pub fn result(&self) -> Option<&SparsePoly> {
        self.result.as_ref()
    }

    pub fn into_result(self) -> Option<SparsePoly> {
        self.result
    }

    fn racer_bound(&self, var: usize, used: u32) -> Option<u32> {
        let t = self.bounds.total.map(|d| d.saturating_sub(used));
        match (t, self.bounds.per_var[var]) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// The point whose value is expected by the next [`feed`](Self::feed).
    pub fn next_point(&self) -> Option<Vec<u64>> {
        if self.result.is_some() {
            return None;
        }
        let f = self.field;
        let i = self.pending.len() as u64 + 1;
        let k = self.stage;
        Some(
            self.anchors
                .iter()
                .enumerate()
                .map(|(j, &y)| match j.cmp(&k) {
                    std::cmp::Ordering::Less => f.pow(y, i),
                    std::cmp::Ordering::Equal => f.pow(y, self.step),
                    std::cmp::Ordering::Greater => y,
                })
                .collect(),
        )
    }

    pub fn feed(&mut self, value: u64) -> Result<(), InterpError> {
        if self.result.is_some() {
            return Ok(());
        }
        self.probes += 1;
        if self.n_vars == 0 {
            self.result = Some(SparsePoly::constant(self.field, 0, value));
            return Ok(());
        }
        self.pending.push(self.field.reduce(value));
        if self.pending.len() == self.active.len() {
            self.solve_step()?;
        }
        Ok(())
    }

    fn solve_step(&mut self) -> Result<(), InterpError> {
        let f = self.field;
        let u = self.pending.len();
        let mut rhs = std::mem::take(&mut self.pending);
        let x = f.pow(self.anchors[self.stage], self.step);
        for (idx, racer) in self.racers.iter().enumerate() {
            let Some(terms) = racer.terms() else { continue };
            let c = terms.iter().fold(0, |a, &(d, c)| f.add(a, f.mul(c, f.pow(x, d as u64))));
            if c == 0 {
                continue;
            }
            let node = self.nodes[idx];
            let mut w = f.mul(c, node);
            for v in rhs.iter_mut() {
                *v = f.sub(*v, w);
                w = f.mul(w, node);
            }
        }
        let nodes: Vec<u64> = self.active.iter().map(|&a| self.nodes[a]).collect();
        let coeffs = super::solve_transposed_vandermonde(f, &nodes, &rhs)?;
        debug_assert_eq!(coeffs.len(), u);
        let mut still = Vec::with_capacity(u);
        for (&a, c) in self.active.iter().zip(coeffs) {
            self.racers[a].update(c)?;
            if !self.racers[a].is_done() {
                still.push(a);
            }
        }
        self.active = still;
        self.step += 1;
        if self.active.is_empty() {
            self.finish_stage();
        }
        Ok(())
    }

    fn finish_stage(&mut self) {
        loop {
            let k = self.stage;
            let mut monos = vec![];
            let mut values = vec![];
            for (m, r) in self.monos.iter().zip(&self.racers) {
                for &(d, c) in r.terms().expect("stage finished") {
                    let mut e = m.clone();
                    e[k] = d;
                    monos.push(e);
                    values.push(c);
                }
            }
            if k + 1 == self.n_vars || monos.is_empty() {
                self.result = Some(SparsePoly::from_terms(self.field, self.n_vars, monos.into_iter().zip(values)));
                return;
            }
            let f = self.field;
            self.stage = k + 1;
            self.nodes = monos
                .iter()
                .map(|m| {
                    m.iter()
                        .zip(&self.anchors)
                        .fold(1, |a, (&e, &y)| if e == 0 { a } else { f.mul(a, f.pow(y, e as u64)) })
                })
                .collect();
            // The previous stage already evaluated every coefficient at x_k = y_k.
            self.racers = monos
                .iter()
                .zip(&values)
                .map(|(m, &v)| {
                    let b = self.racer_bound(self.stage, m.iter().sum());
                    let mut r = RacerState::new(f, self.anchors[self.stage], self.eta, b, self.mode);
                    r.update(v).expect("first probe cannot repeat");
                    r
                })
                .collect();
            self.monos = monos;
            self.active = (0..self.racers.len()).filter(|&i| !self.racers[i].is_done()).collect();
            self.step = 2;
            if !self.active.is_empty() {
                return;
            }
        }
    }
}

/// Interpolates a polynomial black box by driving a [`ZippelState`].
pub fn zippel_interpolate<F>(
    field: PrimeField,
    mut oracle: F,
    anchors: Vec<u64>,
    bounds: DegreeBounds,
    eta: usize,
) -> Result<SparsePoly, InterpError>
where
    F: FnMut(&[u64]) -> Result<u64, FieldError>,
{
    let mut z = ZippelState::new(field, anchors, bounds, eta, RaceMode::Race);
    while let Some(p) = z.next_point() {
        let v = oracle(&p)?;
        z.feed(v)?;
    }
    Ok(z.into_result().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn anchors(f: PrimeField, n: usize, seed: u64) -> Vec<u64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(2..f.p() - 1)).collect()
    }

    fn check(p: &SparsePoly, bounds: DegreeBounds) {
        let f = p.field();
        let n = p.n_vars();
        let got = zippel_interpolate(f, |x| Ok(p.eval(x)), anchors(f, n, 7), bounds, 1).unwrap();
        assert_eq!(&got, p);
    }

    #[test]
    fn single_monomial() {
        let f = crate::numtheory::prime_sequence(0).unwrap();
        check(&SparsePoly::from_terms(f, 2, [(vec![1, 1], 1)]), DegreeBounds::none(2));
    }

    #[test]
    fn univariate_embedded() {
        let f = crate::numtheory::prime_sequence(0).unwrap();
        let p = SparsePoly::from_terms(f, 2, [(vec![0, 0], 1), (vec![0, 2], 1), (vec![0, 40], 5)]);
        check(&p, DegreeBounds::none(2));
    }

    #[test]
    fn mixed_terms_with_bound() {
        let f = crate::numtheory::prime_sequence(1).unwrap();
        let p = SparsePoly::from_terms(
            f,
            3,
            [
                (vec![3, 0, 0], 2),
                (vec![1, 1, 1], f.neg(4)),
                (vec![0, 0, 2], 9),
                (vec![0, 2, 0], 1),
                (vec![0, 0, 0], 11),
            ],
        );
        check(&p, DegreeBounds::total(3, 3));
        check(&p, DegreeBounds::none(3));
    }

    #[test]
    fn zero_and_constant() {
        let f = crate::numtheory::prime_sequence(0).unwrap();
        check(&SparsePoly::zero(f, 3), DegreeBounds::none(3));
        check(&SparsePoly::constant(f, 3, 42), DegreeBounds::none(3));
        check(&SparsePoly::constant(f, 0, 42), DegreeBounds::none(0));
    }

    #[test]
    fn random_fresh_points() {
        let f = crate::numtheory::prime_sequence(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut p = SparsePoly::zero(f, 4);
        for _ in 0..30 {
            let m: Vec<u32> = (0..4).map(|_| rng.gen_range(0..5)).collect();
            p.add_term(m, rng.gen_range(1..f.p()));
        }
        let got = zippel_interpolate(f, |x| Ok(p.eval(x)), anchors(f, 4, 11), DegreeBounds::none(4), 1).unwrap();
        for _ in 0..20 {
            let x: Vec<u64> = (0..4).map(|_| rng.gen_range(0..f.p())).collect();
            assert_eq!(got.eval(&x), p.eval(&x));
        }
    }
}
