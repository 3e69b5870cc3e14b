use super::InterpError;
use crate::numtheory::PrimeField;

/// Solves `sum_j c_j * v_j^i = a_i` for `i = 1..T` in O(T^2) time.
///
/// Uses the master polynomial `M(z) = prod (z - v_j)`; row `j` of the inverse
/// comes from synthetic division by `z - v_j`.
pub fn solve_transposed_vandermonde(field: PrimeField, nodes: &[u64], values: &[u64]) -> Result<Vec<u64>, InterpError> {
    let f = field;
    let t = nodes.len();
    assert_eq!(values.len(), t, "one value per node");
    if t == 0 {
        return Ok(vec![]);
    }
    // m[i] is the coefficient of z^i in M(z)
    let mut m = vec![0u64; t + 1];
    m[0] = 1;
    for (k, &v) in nodes.iter().enumerate() {
        let nv = f.neg(v);
        for i in (1..=k + 1).rev() {
            m[i] = f.mul_add(m[i], nv, m[i - 1]);
        }
        m[0] = f.mul(m[0], nv);
    }

    let mut nums = Vec::with_capacity(t);
    let mut dens = Vec::with_capacity(t);
    let mut q = vec![0u64; t];
    for &v in nodes {
        if v == 0 {
            return Err(InterpError::Singular);
        }
        q[t - 1] = 1;
        for k in (1..t).rev() {
            q[k - 1] = f.mul_add(v, q[k], m[k]);
        }
        let mut num = 0;
        let mut den = 0;
        for k in (0..t).rev() {
            num = f.mul_add(q[k], values[k], num);
            den = f.mul_add(den, v, q[k]);
        }
        nums.push(num);
        dens.push(f.mul(den, v));
    }
    if dens.contains(&0) {
        return Err(InterpError::Singular);
    }
    f.batch_inv(&mut dens).map_err(|_| InterpError::Singular)?;
    Ok(nums.iter().zip(dens).map(|(&n, d)| f.mul(n, d)).collect())
}

/// Coefficients of `sum c_a z^a` from its values at `y^1..y^T`.
pub fn solve_shifted_vandermonde(field: PrimeField, degrees: &[u32], y: u64, values: &[u64]) -> Result<Vec<u64>, InterpError> {
    let nodes: Vec<u64> = degrees.iter().map(|&d| field.pow(y, d as u64)).collect();
    solve_transposed_vandermonde(field, &nodes, values)
}

/// Dense Gaussian elimination, kept as a reference solver for tests.
pub fn gauss_solve(field: PrimeField, mut a: Vec<Vec<u64>>, mut b: Vec<u64>) -> Option<Vec<u64>> {
    let f = field;
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = f.inv(a[col][col]).ok()?;
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let c = f.mul(a[r][col], inv);
            #[allow(clippy::needless_range_loop)]
            for k in col..n {
                a[r][k] = f.sub(a[r][k], f.mul(c, a[col][k]));
            }
            b[r] = f.sub(b[r], f.mul(c, b[col]));
        }
    }
    Some((0..n).map(|i| f.mul(b[i], f.inv(a[i][i]).unwrap())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let f = PrimeField::new(509).unwrap();
        assert_eq!(solve_shifted_vandermonde(f, &[0, 2], 2, &[5, 17]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn single_term() {
        let f = PrimeField::new(509).unwrap();
        let y = 3;
        let v = 100;
        let got = solve_shifted_vandermonde(f, &[3], y, &[v]).unwrap();
        assert_eq!(got, vec![f.mul(v, f.inv(f.pow(y, 3)).unwrap())]);
    }

    #[test]
    fn duplicate_nodes_are_singular() {
        let f = PrimeField::new(509).unwrap();
        assert!(matches!(
            solve_transposed_vandermonde(f, &[4, 4], &[1, 2]),
            Err(InterpError::Singular)
        ));
    }

    proptest! {
        #[test]
        fn matches_gaussian_elimination(seed in proptest::collection::vec(2u64..1_000_000, 1..16), vals in proptest::collection::vec(0u64..1_000_003, 16)) {
            let f = PrimeField::new(1_000_003).unwrap();
            let mut nodes = seed.clone();
            nodes.sort();
            nodes.dedup();
            let t = nodes.len();
            let values = &vals[..t];
            let a: Vec<Vec<u64>> = (1..=t as u64).map(|i| nodes.iter().map(|&v| f.pow(v, i)).collect()).collect();
            let want = gauss_solve(f, a, values.to_vec()).unwrap();
            prop_assert_eq!(solve_transposed_vandermonde(f, &nodes, values).unwrap(), want);
        }
    }
}
