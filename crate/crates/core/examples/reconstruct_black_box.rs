// Full reconstruction over the rationals of a black box given as a
// closure, with the run report.

use num_bigint::BigInt;
use ratrecon::driver::{reconstruct, FnBlackBox, RunConfig};
use ratrecon::numtheory::BigRational;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // (x^2 y - 3/5) / (x + 123456789123456789 y^3), computed numerically
    let big = BigRational::from_integer(BigInt::from(123456789123456789u64));
    let c = BigRational::new(3.into(), 5.into());
    let bb = FnBlackBox::single(2, move |f, v| {
        let (x, y) = (v[0], v[1]);
        let num = f.sub(f.mul(f.mul(x, x), y), f.from_rational(&c)?);
        let den = f.add(x, f.mul(f.from_rational(&big)?, f.pow(y, 3)));
        f.div(num, den)
    });
    let cfg = RunConfig {
        n_threads: 2,
        max_bunch_size: 4,
        ..RunConfig::default()
    };
    let (fs, rep) = reconstruct(&bb, &cfg)?;
    println!("{}", fs[0].to_text(&["x".into(), "y".into()]));
    println!("{} probes over {} primes", rep.total_probes, rep.primes_used.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
