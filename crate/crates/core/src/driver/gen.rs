use std::fmt::Write as _;

use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Variables of the generated polynomials.
pub const GEN_VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyForm {
    Expanded,
    Horner,
}

/// Number of monomials of total degree at most `degree` in three variables.
pub fn monomial_count(degree: u32) -> u64 {
    let d = degree as u64;
    (d + 1) * (d + 2) * (d + 3) / 6
}

struct Coefficients {
    rng: ChaCha8Rng,
    lo: BigUint,
    hi: BigUint,
}

impl Coefficients {
    fn write_next(&mut self, out: &mut String) {
        let num = self.rng.gen_biguint_range(&self.lo, &self.hi);
        let den = self.rng.gen_biguint_range(&self.lo, &self.hi);
        write!(out, "{num}/{den}").unwrap();
    }
}

fn power(out: &mut String, var: usize, e: u32) {
    match e {
        0 => {}
        1 => write!(out, "*{}", GEN_VARS[var]).unwrap(),
        _ => write!(out, "*{}^{e}", GEN_VARS[var]).unwrap(),
    }
}

fn horner(out: &mut String, var: usize, degree: u32, cs: &mut Coefficients) {
    if var == GEN_VARS.len() {
        cs.write_next(out);
        return;
    }
    for a in 0..=degree {
        if a > 0 {
            write!(out, "+{}*(", GEN_VARS[var]).unwrap();
        }
        let nested = var + 1 < GEN_VARS.len() && degree > a;
        if nested {
            out.push('(');
        }
        horner(out, var + 1, degree - a, cs);
        if nested {
            out.push(')');
        }
    }
    for _ in 0..degree {
        out.push(')');
    }
}

/// Dense random polynomial in `x, y, z` with every monomial of total degree
/// up to `degree`; coefficients are fractions with numerator and denominator
/// drawn from `[10^98, 10^100]`. The text ends in `;`.
pub fn gen_dense_poly(degree: u32, seed: u64, form: PolyForm) -> String {
    let mut cs = Coefficients {
        rng: ChaCha8Rng::seed_from_u64(seed),
        lo: BigUint::from(10u32).pow(98),
        hi: BigUint::from(10u32).pow(100) + 1u32,
    };
    let mut out = String::with_capacity(monomial_count(degree) as usize * 215);
    match form {
        PolyForm::Expanded => {
            for i in 0..=degree {
                for j in 0..=degree - i {
                    for k in 0..=degree - i - j {
                        if !out.is_empty() {
                            out.push('+');
                        }
                        cs.write_next(&mut out);
                        power(&mut out, 0, i);
                        power(&mut out, 1, j);
                        power(&mut out, 2, k);
                    }
                }
            }
        }
        PolyForm::Horner => horner(&mut out, 0, degree, &mut cs),
    }
    out.push(';');
    out
}
