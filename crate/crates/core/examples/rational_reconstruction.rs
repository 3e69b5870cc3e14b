// Chinese remaindering of images modulo several primes, then recovery of
// the rational number they came from.

use num_bigint::BigInt;
use ratrecon::numtheory::{crt_combine, rational_reconstruct, BigRational, PrimeField, PRIMES};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let secret = BigRational::new(BigInt::from(-123456789012345678i64) * 1000, BigInt::from(987654321u64));
    let mut images = vec![];
    for &p in &PRIMES {
        images.push((PrimeField::new(p)?.from_rational(&secret)?, p));
        let sys = crt_combine(&images)?;
        match rational_reconstruct(sys.residue(), sys.modulus()) {
            Some(q) if q == secret => {
                println!("{q} recovered from {} primes", images.len());
                return Ok(());
            }
            Some(q) => println!("{} primes: candidate {q}, not yet stable", images.len()),
            None => println!("{} primes: no candidate", images.len()),
        }
    }
    Err("ran out of primes".into())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
