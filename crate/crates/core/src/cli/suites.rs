//! Benchmark functions, as expression sources over `z1, z2, ...`.

/// One benchmark function.
#[derive(Clone, Debug)]
pub struct BenchFunction {
    pub name: &'static str,
    pub n_vars: usize,
    pub source: String,
}

impl BenchFunction {
    pub fn var_names(&self) -> Vec<String> {
        var_names(self.n_vars)
    }
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

fn sum_of_powers(vars: std::ops::RangeInclusive<usize>, e: u32) -> String {
    vars.map(|i| format!("z{i}^{e}")).collect::<Vec<_>>().join("+")
}

fn dense_part(n: usize, e: u32) -> String {
    let s = (1..=n).map(|i| format!("z{i}")).collect::<Vec<_>>().join("+");
    format!("(1+{s})^{e}-1")
}

fn sparse_den(tail: &str) -> String {
    let inner = "(z1*z2+z3*z4+z5*z6)";
    let terms = (1..=5).map(|i| format!("{inner}^{i}")).collect::<Vec<_>>().join("+");
    format!("({terms}){tail}")
}

/// Sparse and dense test functions for racing and the hybrid racer.
pub fn racing_suite() -> Vec<BenchFunction> {
    let rational_dense = |e: u32| format!("({})/(z4-z2+z1^10*z2^10*z3^10*z4^10*z5^10);", dense_part(5, e));
    vec![
        BenchFunction {
            name: "f1",
            n_vars: 20,
            source: format!(
                "({})/({}-{});",
                sum_of_powers(1..=20, 20),
                sum_of_powers(1..=10, 20),
                sum_of_powers(11..=20, 20).replace('+', "-")
            ),
        },
        BenchFunction {
            name: "f2",
            n_vars: 5,
            source: "(z1^100+z2^200+z3^300)/(z1*z2*z3*z4*z5+z1^4*z2^4*z3^4*z4^4*z5^4);".into(),
        },
        BenchFunction {
            name: "f3",
            n_vars: 5,
            source: rational_dense(17),
        },
        BenchFunction {
            name: "f4",
            n_vars: 5,
            source: rational_dense(20),
        },
    ]
}

/// Functions with and without univariate factors.
pub fn factor_suite() -> Vec<BenchFunction> {
    let dense = format!("({})/({}+z1^20)", dense_part(4, 20), dense_part(4, 20));
    let sparse_num = format!("({})", sum_of_powers(1..=20, 20));
    vec![
        BenchFunction {
            name: "f1",
            n_vars: 4,
            source: format!("{dense};"),
        },
        BenchFunction {
            name: "f2",
            n_vars: 4,
            source: format!("(z4-4)*(z4-3)*{dense};"),
        },
        BenchFunction {
            name: "f3",
            n_vars: 20,
            source: format!("{sparse_num}/{};", sparse_den("")),
        },
        BenchFunction {
            name: "f4",
            n_vars: 20,
            source: format!("{sparse_num}/({});", sparse_den("*z20^35")),
        },
        BenchFunction {
            name: "f5",
            n_vars: 20,
            source: format!("{sparse_num}/({});", sparse_den("*(z2*z20^35-1)")),
        },
    ]
}

/// The two-variable function used to illustrate the hybrid racer.
pub const HYBRID_EXAMPLE: &str = "(z1*z2^3+z1^2*z2^2+z1^3*z2+z1^4+z2^5)/z2;";

/// The two-variable function used to illustrate the factor scan.
pub const FACTOR_EXAMPLE: &str = "(z1-1)*(z2-2)*(z1*z2-1);";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{prime_sequence, BigRational};
    use crate::parser::parse;

    #[test]
    fn sources_parse_with_their_arity() {
        for f in racing_suite().into_iter().chain(factor_suite()) {
            let p = parse(&f.source, &f.var_names()).unwrap();
            assert_eq!(p.len(), 1, "{}", f.name);
        }
    }

    #[test]
    fn racing_f1_by_hand() {
        let f = &racing_suite()[0];
        let p = &parse(&f.source, &f.var_names()).unwrap()[0];
        let field = prime_sequence(0).unwrap();
        // z1 = 2, the rest 1: (2^20 + 19) / (2^20 + 9 - 10)
        let mut x = vec![1u64; 20];
        x[0] = 2;
        let want = field
            .from_rational(&BigRational::new(((1i64 << 20) + 19).into(), ((1i64 << 20) - 1).into()))
            .unwrap();
        assert_eq!(p.evaluate(field, &x).unwrap(), want);
    }
}
