// Finding univariate factors before interpolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratrecon::cli::suites::var_names;
use ratrecon::factorscan::{full_scan, FactorScanConfig};
use ratrecon::numtheory::prime_sequence;
use ratrecon::parser::parse;
use ratrecon::ratinterp::{poly_text, FieldFnProbe};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let names = var_names(3);
    let src = "(z1-1)*(z2-2)*(z1*z2+z3)/((3*z3+7)^2*(z1+z2+z3));";
    let prog = parse(src, &names)?.remove(0);
    let mut probe = FieldFnProbe::new(prime_sequence(0)?, 3, |f, x: &[u64]| prog.evaluate(f, x));
    let scan = full_scan(&mut probe, &FactorScanConfig::default(), &mut ChaCha8Rng::seed_from_u64(5))?;
    println!("numerator factors   {}", poly_text(&scan.q_num(), &names));
    println!("denominator factors {}", poly_text(&scan.q_den(), &names));
    println!("{} probes, interpolation order {:?}", scan.probes, scan.ordering);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
