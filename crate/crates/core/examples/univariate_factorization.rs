// Cantor-Zassenhaus factorization of univariate polynomials over Z_p.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratrecon::factorscan::factorize_univariate_ff;
use ratrecon::numtheory::PrimeField;
use ratrecon::polyinterp::DensePolyFF;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f17 = PrimeField::new(17)?;
    // 15 z^2 + 16 z + 3 over Z_17
    let p = DensePolyFF::new(f17, vec![3, 16, 15]);
    let r = factorize_univariate_ff(&p, &mut rng)?;
    print!("{p} = {}", r.unit);
    for (q, m) in &r.factors {
        print!(" ({q})^{m}");
    }
    println!();

    let f = PrimeField::new(1_000_003)?;
    // (z - 1)^3 (z^2 + 1) (z + 5)
    let lin = |a: u64| DensePolyFF::new(f, vec![f.neg(a), 1]);
    let p = lin(1).pow(3).mul(&DensePolyFF::new(f, vec![1, 0, 1])).mul(&lin(f.neg(5)));
    let r = factorize_univariate_ff(&p, &mut rng)?;
    assert_eq!(r.expand(f), p);
    println!("{} factors of a degree {:?} polynomial", r.factors.len(), p.degree());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
