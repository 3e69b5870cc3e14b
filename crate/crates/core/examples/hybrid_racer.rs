// One prime of multivariate rational interpolation: homogenize along a
// line, Thiele in t, racing for the coefficients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratrecon::cli::suites::{var_names, HYBRID_EXAMPLE};
use ratrecon::numtheory::prime_sequence;
use ratrecon::parser::parse;
use ratrecon::ratinterp::{hybrid_racer_auto, FnProbe, HybridConfig, Probe, Shift};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let f = prime_sequence(0)?;
    let prog = parse(HYBRID_EXAMPLE, &var_names(2))?.remove(0).precompute(f)?;
    let mut probe = FnProbe::new(f, 2, |x: &[u64]| prog.evaluate(x));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let out = hybrid_racer_auto(&mut probe, &Shift { s: vec![0, 2] }, &HybridConfig::default(), &mut rng)?;
    println!("{} probes over Z_{}", probe.count(), f.p());
    println!("numerator   {:?}", out.function.num);
    println!("denominator {:?}", out.function.den);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
