use super::{DensePolyFF, InterpError};
use crate::numtheory::PrimeField;

/// Berlekamp–Massey state in the variant that starts from `B = 0`.
///
/// `lambda` is stored with `lambda(0) = 1`; the auxiliary polynomial is its
/// reversal of length `length`.
#[derive(Clone, Debug)]
pub struct BMState {
    field: PrimeField,
    lambda: DensePolyFF,
    b: DensePolyFF,
    length: usize,
    last_discrepancy: u64,
    processed: usize,
    zero_run: usize,
    seq: Vec<u64>,
}

impl BMState {
    pub fn new(field: PrimeField) -> Self {
        Self {
            field,
            lambda: DensePolyFF::one(field),
            b: DensePolyFF::zero(field),
            length: 0,
            last_discrepancy: 1,
            processed: 0,
            zero_run: 0,
            seq: vec![],
        }
    }

    pub fn lambda(&self) -> &DensePolyFF {
        &self.lambda
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn processed(&self) -> usize {
        self.processed
    }

    pub fn zero_run(&self) -> usize {
        self.zero_run
    }

    pub fn sequence(&self) -> &[u64] {
        &self.seq
    }

    /// Feeds `a_r` and returns the discrepancy.
    pub fn update(&mut self, a: u64) -> u64 {
        let f = self.field;
        self.seq.push(f.reduce(a));
        self.processed += 1;
        let r = self.processed;
        let mut delta = 0;
        for i in 0..=self.length.min(r - 1) {
            delta = f.mul_add(self.lambda.coeff(i).value(), self.seq[r - 1 - i], delta);
        }
        if delta == 0 {
            self.zero_run += 1;
            self.b = self.b.shift_up(1);
            return 0;
        }
        self.zero_run = 0;
        let q = f.div(delta, self.last_discrepancy).unwrap();
        let next = self.lambda.sub(&self.b.shift_up(1).scale(q));
        if 2 * self.length < r {
            self.b = std::mem::replace(&mut self.lambda, next);
            self.length = r - self.length;
            self.last_discrepancy = delta;
        } else {
            self.lambda = next;
            self.b = self.b.shift_up(1);
        }
        delta
    }

    pub fn terminated(&self, eta: usize) -> bool {
        self.zero_run >= eta && self.processed >= 2 * self.length + eta
    }

    /// Reversed generator `z^L * lambda(1/z)`, monic of degree `L`.
    pub fn aux_poly(&self, eta: usize) -> Result<DensePolyFF, InterpError> {
        if !self.terminated(eta) {
            return Err(InterpError::NotTerminated);
        }
        let c = (0..=self.length)
            .map(|i| self.lambda.coeff(self.length - i).value())
            .collect();
        Ok(DensePolyFF::new(self.field, c))
    }
}

/// Free-function form of [`BMState::update`].
pub fn bm_update(state: &mut BMState, a: u64) -> u64 {
    state.update(a)
}

pub fn bm_to_aux_poly(state: &BMState, eta: usize) -> Result<DensePolyFF, InterpError> {
    state.aux_poly(eta)
}

/// Ascending exponents `i <= bound` with `zeta(y^i) = 0`, or `None` when fewer
/// than `deg zeta` such roots exist.
pub fn bot_find_degrees(zeta: &DensePolyFF, y: u64, bound: u64) -> Option<Vec<u32>> {
    let f = zeta.field();
    let want = zeta.degree()?;
    let mut out = Vec::with_capacity(want);
    if want == 0 {
        return Some(out);
    }
    let mut x = 1;
    for i in 0..=bound {
        if zeta.eval(x) == 0 {
            out.push(i as u32);
            if out.len() == want {
                return Some(out);
            }
        }
        x = f.mul(x, y);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_generator() {
        let f = PrimeField::new(509).unwrap();
        let mut s = BMState::new(f);
        for a in [5, 17, 65, 257] {
            s.update(a);
        }
        assert_eq!(s.length(), 2);
        // The next power sum is consistent, so one more probe terminates.
        s.update((1 + 1024) % 509);
        let z = s.aux_poly(1).unwrap();
        assert_eq!(z.coeffs(), &[4, 504, 1]);
        assert_eq!(bot_find_degrees(&z, 2, 5), Some(vec![0, 2]));
    }

    #[test]
    fn zero_sequence() {
        let f = PrimeField::new(509).unwrap();
        let mut s = BMState::new(f);
        s.update(0);
        assert!(s.terminated(1));
        let z = s.aux_poly(1).unwrap();
        assert!(z.is_one());
        assert_eq!(bot_find_degrees(&z, 2, 10), Some(vec![]));
    }

    #[test]
    fn constant_sequence() {
        let f = PrimeField::new(509).unwrap();
        let mut s = BMState::new(f);
        for _ in 0..3 {
            s.update(7);
        }
        assert_eq!(s.length(), 1);
        assert!(s.terminated(1));
        assert_eq!(s.lambda().coeffs(), &[1, 508]);
        assert_eq!(s.aux_poly(1).unwrap(), DensePolyFF::linear(f, 1));
    }

    #[test]
    fn single_term_gives_linear_aux() {
        let f = PrimeField::new(1_000_003).unwrap();
        let y = 12345u64;
        let v = f.pow(y, 17);
        let mut s = BMState::new(f);
        for i in 1..=3u64 {
            s.update(f.mul(3, f.pow(v, i)));
        }
        assert_eq!(s.aux_poly(1).unwrap(), DensePolyFF::linear(f, v));
    }

    #[test]
    fn early_aux_is_error() {
        let f = PrimeField::new(509).unwrap();
        let mut s = BMState::new(f);
        s.update(5);
        assert!(s.aux_poly(1).is_err());
    }

    #[test]
    fn irreducible_zeta_has_no_degrees() {
        // z^2 + 1 has no roots mod 7
        let f = PrimeField::new(7).unwrap();
        let z = DensePolyFF::new(f, vec![1, 0, 1]);
        assert_eq!(bot_find_degrees(&z, 3, 12), None);
    }

    mod props {
        use super::super::*;
        use crate::polyinterp::gauss_solve;
        use proptest::prelude::*;

        const P: u64 = 1_000_003;

        fn power_sums(f: PrimeField, cs: &[u64], vs: &[u64], n: usize) -> Vec<u64> {
            (1..=n as u64)
                .map(|r| cs.iter().zip(vs).fold(0, |a, (&c, &v)| f.add(a, f.mul(c, f.pow(v, r)))))
                .collect()
        }

        proptest! {
            #[test]
            fn bm_agrees_with_hankel(t in 1usize..=8, raw in proptest::collection::vec((1u64..P, 2u64..P), 8)) {
                let f = PrimeField::new(P).unwrap();
                let mut vs: Vec<u64> = raw[..t].iter().map(|x| x.1).collect();
                vs.sort();
                vs.dedup();
                let t = vs.len();
                let cs: Vec<u64> = raw[..t].iter().map(|x| x.0).collect();
                let a = power_sums(f, &cs, &vs, 2 * t);
                let h: Vec<Vec<u64>> = (0..t).map(|j| (0..t).map(|k| a[j + k]).collect()).collect();
                let rhs: Vec<u64> = (0..t).map(|j| f.neg(a[j + t])).collect();
                let Some(lam) = gauss_solve(f, h, rhs) else { return Ok(()) };
                let mut s = BMState::new(f);
                for &x in &a {
                    s.update(x);
                }
                prop_assert_eq!(s.length(), t);
                let rev: Vec<u64> = (0..t).map(|k| s.lambda().coeff(t - k).value()).collect();
                prop_assert_eq!(rev, lam);
            }

            #[test]
            fn generator_annihilates(t in 1usize..=6, raw in proptest::collection::vec((1u64..P, 2u64..P), 6)) {
                let f = PrimeField::new(P).unwrap();
                let cs: Vec<u64> = raw[..t].iter().map(|x| x.0).collect();
                let vs: Vec<u64> = raw[..t].iter().map(|x| x.1).collect();
                let a = power_sums(f, &cs, &vs, 2 * t + 4);
                let mut s = BMState::new(f);
                for &x in &a[..2 * t] {
                    s.update(x);
                }
                let l = s.length();
                for j in 0..a.len() - l {
                    let acc = (0..=l).fold(0, |acc, i| f.mul_add(s.lambda().coeff(i).value(), a[j + l - i], acc));
                    prop_assert_eq!(acc, 0);
                }
            }
        }
    }
}
