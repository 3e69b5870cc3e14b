// Univariate interpolation with Newton and Ben-Or/Tiwari racing on the
// same probes `f(y), f(y^2), ...`.

use ratrecon::numtheory::{prime_sequence, PrimeField};
use ratrecon::polyinterp::{RaceMode, RacerState, Status};

fn interpolate(field: PrimeField, f: impl Fn(u64) -> u64, mode: RaceMode) -> Result<(String, usize), Box<dyn std::error::Error>> {
    let mut racer = RacerState::new(field, 3, 1, None, mode);
    loop {
        let x = racer.next_point();
        if let Status::Done(p) = racer.update(f(x))? {
            return Ok((format!("{p:?}"), racer.probes()));
        }
    }
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let small = PrimeField::new(509)?;
    let (p, n) = interpolate(small, |z| small.add(small.mul(z, z), 1), RaceMode::Race)?;
    println!("z^2 + 1 over Z_509: {p} after {n} probes");

    // sparse, high degree: Ben-Or/Tiwari wins by a wide margin
    let f = prime_sequence(0)?;
    let sparse = |z: u64| f.add(f.pow(z, 300), f.mul(7, f.pow(z, 17)));
    for mode in [RaceMode::Race, RaceMode::NewtonOnly] {
        let (_, n) = interpolate(f, sparse, mode)?;
        println!("z^300 + 7 z^17, {mode:?}: {n} probes");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
