use super::{DensePolyFF, InterpError, Status};
use crate::numtheory::PrimeField;

/// Incremental Newton interpolation in divided-difference form.
///
/// Terminates after `eta` consecutive vanishing top differences, or as soon as
/// `degree_bound + 1` points are in when a bound is known.
#[derive(Clone, Debug)]
pub struct NewtonState {
    field: PrimeField,
    points: Vec<u64>,
    diffs: Vec<u64>,
    eta: usize,
    zero_run: usize,
    degree_bound: Option<usize>,
    done: bool,
}

impl NewtonState {
    pub fn new(field: PrimeField, eta: usize, degree_bound: Option<usize>) -> Self {
        Self {
            field,
            points: vec![],
            diffs: vec![],
            eta: eta.max(1),
            zero_run: 0,
            degree_bound,
            done: false,
        }
    }

    pub fn probes(&self) -> usize {
        self.points.len()
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn update(&mut self, x: u64, v: u64) -> Result<Status<DensePolyFF>, InterpError> {
        let f = self.field;
        if self.done {
            return Ok(Status::Done(self.to_poly()));
        }
        if self.points.contains(&x) {
            return Err(InterpError::RepeatedPoint(x));
        }
        // Evaluate the current Newton form at x and the basis product alongside.
        let mut val = 0;
        let mut prod = 1;
        for (i, &c) in self.diffs.iter().enumerate() {
            val = f.mul_add(c, prod, val);
            prod = f.mul(prod, f.sub(x, self.points[i]));
        }
        let c = f.mul(f.sub(f.reduce(v), val), f.inv(prod)?);
        self.points.push(x);
        self.diffs.push(c);
        if c == 0 {
            self.zero_run += 1;
        } else {
            self.zero_run = 0;
        }
        let bound_hit = self.degree_bound.is_some_and(|b| self.points.len() > b);
        if self.zero_run >= self.eta || bound_hit {
            self.done = true;
            return Ok(Status::Done(self.to_poly()));
        }
        Ok(Status::Running)
    }

    /// Monomial-basis form of the current interpolant.
    pub fn to_poly(&self) -> DensePolyFF {
        let f = self.field;
        let mut acc = DensePolyFF::zero(f);
        for i in (0..self.diffs.len()).rev() {
            acc = acc
                .mul(&DensePolyFF::linear(f, self.points[i]))
                .add(&DensePolyFF::constant(f, self.diffs[i]));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_needs_two_probes() {
        let f = PrimeField::new(509).unwrap();
        let mut n = NewtonState::new(f, 1, None);
        assert!(matches!(n.update(2, 9).unwrap(), Status::Running));
        match n.update(4, 9).unwrap() {
            Status::Done(p) => assert_eq!(p.coeffs(), &[9]),
            _ => panic!(),
        }
    }

    #[test]
    fn square_plus_one() {
        let f = PrimeField::new(509).unwrap();
        let mut n = NewtonState::new(f, 1, None);
        let mut out = None;
        for (k, x) in [2u64, 4, 8, 16, 32].into_iter().enumerate() {
            if let Status::Done(p) = n.update(x, (x * x + 1) % 509).unwrap() {
                out = Some((k + 1, p));
                break;
            }
        }
        let (probes, p) = out.unwrap();
        assert_eq!(probes, 4);
        assert_eq!(p.coeffs(), &[1, 0, 1]);
    }

    #[test]
    fn repeated_point_rejected() {
        let f = PrimeField::new(509).unwrap();
        let mut n = NewtonState::new(f, 1, None);
        n.update(3, 1).unwrap();
        assert!(matches!(n.update(3, 2), Err(InterpError::RepeatedPoint(3))));
    }
}
