use super::{bot_find_degrees, solve_shifted_vandermonde, BMState, InterpError, NewtonState, SparsePoly, Status};
use crate::numtheory::PrimeField;

/// Root-scan limit used when no degree bound is known.
pub const DEFAULT_SCAN_LIMIT: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Newton,
    Bot,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RaceMode {
    #[default]
    Race,
    NewtonOnly,
}

/// Newton and Ben-Or/Tiwari fed from the same probes `f(y^1), f(y^2), ...`.
#[derive(Clone, Debug)]
pub struct RacerState {
    field: PrimeField,
    y: u64,
    next: u64,
    r: usize,
    eta: usize,
    degree_bound: Option<u32>,
    newton: NewtonState,
    bot: Option<BMState>,
    winner: Option<Winner>,
    result: Option<Vec<(u32, u64)>>,
}

impl RacerState {
    pub fn new(field: PrimeField, y: u64, eta: usize, degree_bound: Option<u32>, mode: RaceMode) -> Self {
        let eta = eta.max(1);
        Self {
            field,
            y,
            next: y,
            r: 0,
            eta,
            degree_bound,
            newton: NewtonState::new(field, eta, degree_bound.map(|b| b as usize)),
            bot: (mode == RaceMode::Race).then(|| BMState::new(field)),
            winner: None,
            result: None,
        }
    }

    /// `y^(r+1)`, where the next probe must be taken.
    pub fn next_point(&self) -> u64 {
        self.next
    }

    pub fn probes(&self) -> usize {
        self.r
    }

    pub fn winner(&self) -> Option<Winner> {
        self.winner
    }

    pub fn is_done(&self) -> bool {
        self.result.is_some()
    }

    /// Nonzero `(degree, coefficient)` pairs once finished.
    pub fn terms(&self) -> Option<&[(u32, u64)]> {
        self.result.as_deref()
    }

    pub fn update(&mut self, value: u64) -> Result<Status<SparsePoly>, InterpError> {
        if self.result.is_none() {
            self.step(value)?;
        }
        Ok(match &self.result {
            Some(t) => Status::Done(SparsePoly::from_terms(
                self.field,
                1,
                t.iter().map(|&(d, c)| (vec![d], c)),
            )),
            None => Status::Running,
        })
    }

    fn step(&mut self, value: u64) -> Result<(), InterpError> {
        let f = self.field;
        let x = self.next;
        self.r += 1;
        self.next = f.mul(self.next, self.y);
        let newton = self.newton.update(x, value)?;

        if let Some(bm) = self.bot.as_mut() {
            bm.update(value);
            if bm.terminated(self.eta) {
                let bound = self.degree_bound.map_or(DEFAULT_SCAN_LIMIT, |b| b as u64);
                let zeta = bm.aux_poly(self.eta)?;
                let found = bot_find_degrees(&zeta, self.y, bound);
                match found {
                    Some(degs) => {
                        let t = degs.len();
                        let coeffs = solve_shifted_vandermonde(f, &degs, self.y, &bm.sequence()[..t])?;
                        self.result = Some(degs.into_iter().zip(coeffs).filter(|&(_, c)| c != 0).collect());
                        self.winner = Some(Winner::Bot);
                        return Ok(());
                    }
                    None => {
                        log::debug!("aux polynomial of degree {:?} does not split over powers of y", zeta.degree());
                        self.bot = None;
                    }
                }
            }
        }

        if let Status::Done(p) = newton {
            self.result = Some(
                p.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(d, &c)| (d as u32, c))
                    .collect(),
            );
            self.winner = Some(Winner::Newton);
        }
        Ok(())
    }
}

pub fn race_update(state: &mut RacerState, value: u64) -> Result<Status<SparsePoly>, InterpError> {
    state.update(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: PrimeField, coeffs: &[(u32, u64)], bound: Option<u32>) -> (usize, Winner, Vec<(u32, u64)>) {
        let mut r = RacerState::new(f, 123_456_789, 1, bound, RaceMode::Race);
        loop {
            let x = r.next_point();
            let v = coeffs.iter().fold(0, |a, &(d, c)| f.add(a, f.mul(c, f.pow(x, d as u64))));
            if let Status::Done(_) = r.update(v).unwrap() {
                return (r.probes(), r.winner().unwrap(), r.terms().unwrap().to_vec());
            }
        }
    }

    fn big() -> PrimeField {
        crate::numtheory::prime_sequence(0).unwrap()
    }

    #[test]
    fn sparse_high_degree_goes_to_bot() {
        let (n, w, t) = run(big(), &[(100, 1)], None);
        assert_eq!((n, w), (3, Winner::Bot));
        assert_eq!(t, vec![(100, 1)]);
    }

    #[test]
    fn tie_prefers_bot() {
        let (n, w, _) = run(big(), &[(1, 1)], None);
        assert_eq!((n, w), (3, Winner::Bot));
    }

    #[test]
    fn dense_goes_to_newton() {
        let c: Vec<_> = (0..6).map(|d| (d, d as u64 + 2)).collect();
        let (n, w, t) = run(big(), &c, None);
        assert_eq!((n, w), (7, Winner::Newton));
        assert_eq!(t, c);
    }

    #[test]
    fn zero_polynomial() {
        let (n, _, t) = run(big(), &[], None);
        assert_eq!(n, 1);
        assert!(t.is_empty());
    }

    #[test]
    fn degree_bound_stops_newton() {
        let (n, w, _) = run(big(), &[(0, 3), (1, 4), (2, 5)], Some(2));
        assert_eq!((n, w), (3, Winner::Newton));
    }

    proptest::proptest! {
        #[test]
        fn newton_and_bot_agree(c in proptest::collection::vec(0u64..1000, 1..6)) {
            let f = big();
            let terms: Vec<(u32, u64)> = c.iter().enumerate().map(|(d, &x)| (d as u32, x)).collect();
            let mut newton = RacerState::new(f, 987_654_321, 1, None, RaceMode::NewtonOnly);
            let mut bot = RacerState::new(f, 987_654_321, 1, Some(64), RaceMode::Race);
            let mut probes = 0;
            while !newton.is_done() || !bot.is_done() {
                probes += 1;
                proptest::prop_assert!(probes < 64);
                for r in [&mut newton, &mut bot] {
                    let x = r.next_point();
                    let v = terms.iter().fold(0, |a, &(d, c)| f.add(a, f.mul(c, f.pow(x, d as u64))));
                    r.update(v).unwrap();
                }
            }
            proptest::prop_assert_eq!(newton.terms(), bot.terms());
        }
    }
}
