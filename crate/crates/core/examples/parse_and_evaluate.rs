// Parsing expressions into postfix programs, pre-evaluating constants for
// a prime, bunched evaluation and duplicate removal.

use ratrecon::numtheory::prime_sequence;
use ratrecon::parser::{deduplicate, parse};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<String> = ["x", "y"].map(String::from).to_vec();
    let src = "(13/7*x + y^2)^3 - 2; y^2 + x*13/7 ; ((x*13/7)+y^2)^3-2;";
    let progs = parse(src, &names)?;
    println!("postfix: {}", progs[0].to_postfix_string(&names));

    let f = prime_sequence(0)?;
    let pre = progs[0].precompute(f)?;
    println!("{} tokens, {} after folding constants", progs[0].len(), pre.len());
    let points = vec![vec![1, 2], vec![3, 4], vec![5, 6]];
    let bunch = pre.evaluate_bunch(&points);
    for (p, v) in points.iter().zip(&bunch) {
        assert_eq!(*v, progs[0].evaluate(f, p));
        println!("f{p:?} = {}", v.as_ref().unwrap());
    }

    let (unique, map) = deduplicate(&progs);
    println!("{} expressions, {} distinct, map {map:?}", progs.len(), unique.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
