use rand::Rng;

use super::RatError;
use crate::numtheory::{FieldError, PrimeField};
use crate::polyinterp::DensePolyFF;

/// Outcome of feeding one point to a [`ThieleState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThieleFeed {
    /// The point extended the continued fraction.
    Extended,
    /// The point agreed with the current convergent.
    Consistent,
    /// The point hit an intermediate zero difference and was dropped.
    Degenerate,
}

/// Thiele continued-fraction interpolation with early termination.
#[derive(Clone, Debug)]
pub struct ThieleState {
    field: PrimeField,
    ts: Vec<u64>,
    a: Vec<u64>,
    eta: usize,
    consistent: usize,
}

impl ThieleState {
    pub fn new(field: PrimeField, eta: usize) -> Self {
        Self {
            field,
            ts: vec![],
            a: vec![],
            eta: eta.max(1),
            consistent: 0,
        }
    }

    pub fn is_done(&self) -> bool {
        self.consistent >= self.eta
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn feed(&mut self, t: u64, v: u64) -> ThieleFeed {
        let f = self.field;
        if self.ts.contains(&t) {
            return ThieleFeed::Degenerate;
        }
        let k = self.ts.len();
        let mut phi = f.reduce(v);
        for j in 0..k {
            let diff = f.sub(phi, self.a[j]);
            if diff == 0 {
                if j + 1 == k {
                    self.consistent += 1;
                    return ThieleFeed::Consistent;
                }
                return ThieleFeed::Degenerate;
            }
            phi = f.mul(f.sub(t, self.ts[j]), f.inv(diff).unwrap());
        }
        self.ts.push(t);
        self.a.push(phi);
        self.consistent = 0;
        ThieleFeed::Extended
    }

    /// Reduced numerator and denominator of the current convergent,
    /// denominator monic.
    pub fn to_fraction(&self) -> (DensePolyFF, DensePolyFF) {
        let f = self.field;
        let Some(&last) = self.a.last() else {
            return (DensePolyFF::zero(f), DensePolyFF::one(f));
        };
        let mut p = DensePolyFF::constant(f, last);
        let mut q = DensePolyFF::one(f);
        for j in (0..self.a.len() - 1).rev() {
            let np = p.scale(self.a[j]).add(&DensePolyFF::linear(f, self.ts[j]).mul(&q));
            q = p;
            p = np;
        }
        let g = p.gcd(&q);
        if !g.is_one() && !g.is_zero() {
            p = p.divrem(&g).unwrap().0;
            q = q.divrem(&g).unwrap().0;
        }
        if p.is_zero() {
            return (p, DensePolyFF::one(f));
        }
        let inv = f.inv(q.lead()).unwrap();
        (p.scale(inv), q.scale(inv))
    }
}

/// Univariate interpolation result with its probe tally.
#[derive(Clone, Debug)]
pub struct ThieleResult {
    pub num: DensePolyFF,
    pub den: DensePolyFF,
    pub probes: usize,
}

/// Interpolates `oracle` as a rational function of one variable at random
/// points. Oracle errors count as bad points; more than `max_retries` of them
/// (including degenerate points) abort.
pub fn thiele_interpolate<F, R>(
    field: PrimeField,
    mut oracle: F,
    rng: &mut R,
    eta: usize,
    max_retries: usize,
) -> Result<ThieleResult, RatError>
where
    F: FnMut(u64) -> Result<u64, FieldError>,
    R: Rng,
{
    let mut st = ThieleState::new(field, eta);
    let mut probes = 0;
    let mut bad = 0;
    while !st.is_done() {
        let t = rng.gen_range(1..field.p());
        probes += 1;
        let fed = match oracle(t) {
            Ok(v) => st.feed(t, v),
            Err(FieldError::ZeroDivisor { .. }) => ThieleFeed::Degenerate,
            Err(e) => return Err(e.into()),
        };
        if fed == ThieleFeed::Degenerate {
            bad += 1;
            if bad > max_retries {
                return Err(RatError::TooManyBadPoints(bad));
            }
        }
    }
    let (num, den) = st.to_fraction();
    Ok(ThieleResult { num, den, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(5)
    }

    #[test]
    fn square_plus_one_over_t() {
        let f = PrimeField::new(509).unwrap();
        let r = thiele_interpolate(
            f,
            |t| f.div(f.add(f.mul(t, t), 1), t),
            &mut rng(),
            1,
            16,
        )
        .unwrap();
        assert_eq!(r.num.degree(), Some(2));
        assert_eq!(r.den.degree(), Some(1));
        assert_eq!(r.num.coeffs(), &[1, 0, 1]);
        assert_eq!(r.den.coeffs(), &[0, 1]);
    }

    #[test]
    fn constant() {
        let f = PrimeField::new(509).unwrap();
        let r = thiele_interpolate(f, |_| Ok(42), &mut rng(), 1, 16).unwrap();
        assert_eq!(r.num.coeffs(), &[42]);
        assert!(r.den.is_one());
        assert_eq!(r.probes, 2);
    }

    #[test]
    fn zero_function() {
        let f = PrimeField::new(509).unwrap();
        let r = thiele_interpolate(f, |_| Ok(0), &mut rng(), 1, 16).unwrap();
        assert!(r.num.is_zero());
    }

    #[test]
    fn probe_count_is_degree_sum_plus_two() {
        let f = crate::numtheory::prime_sequence(0).unwrap();
        // (t^3 + 2t + 5) / (t^2 + 7)
        let r = thiele_interpolate(
            f,
            |t| {
                let n = f.add(f.add(f.pow(t, 3), f.mul(2, t)), 5);
                f.div(n, f.add(f.mul(t, t), 7))
            },
            &mut rng(),
            1,
            16,
        )
        .unwrap();
        assert_eq!(r.probes, 7);
        assert_eq!(r.num.coeffs(), &[5, 2, 0, 1]);
        assert_eq!(r.den.coeffs(), &[7, 0, 1]);
    }

    #[test]
    fn always_failing_oracle_errors() {
        let f = PrimeField::new(509).unwrap();
        let r = thiele_interpolate(f, |_| Err(FieldError::ZeroDivisor { dividend: 1 }), &mut rng(), 1, 16);
        assert!(matches!(r, Err(RatError::TooManyBadPoints(_))));
    }
}
