// Generated dense polynomials in expanded and Horner form, and what
// pre-evaluation buys when evaluating them.

use std::time::Instant;

use ratrecon::driver::{gen_dense_poly, monomial_count, PolyForm, GEN_VARS};
use ratrecon::numtheory::prime_sequence;
use ratrecon::parser::parse;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let degree = 30;
    let names: Vec<String> = GEN_VARS.iter().map(|s| s.to_string()).collect();
    let f = prime_sequence(0)?;
    let point = [12345, 678910, 1112131415];
    for form in [PolyForm::Expanded, PolyForm::Horner] {
        let src = gen_dense_poly(degree, 1, form);
        let prog = parse(&src, &names)?.remove(0);
        let pre = prog.precompute(f)?;
        let t = Instant::now();
        let a = prog.evaluate(f, &point)?;
        let plain = t.elapsed();
        let t = Instant::now();
        let b = pre.evaluate(&point)?;
        let fast = t.elapsed();
        assert_eq!(a, b);
        println!(
            "{form:?}: {} monomials, {} bytes, plain {plain:?}, pre-evaluated {fast:?}",
            monomial_count(degree),
            src.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
