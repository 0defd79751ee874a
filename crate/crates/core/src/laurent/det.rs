use super::{Coeff, LaurentPoly};
use crate::error::{Error, Result};

/// Determinant of a square matrix of Laurent polynomials.
///
/// Cofactor expansion up to size 4, fraction-free elimination above.
pub fn determinant<C: Coeff>(nvars: usize, m: &[Vec<LaurentPoly<C>>]) -> Result<LaurentPoly<C>> {
    if m.len() <= 4 {
        determinant_laplace(nvars, m)
    } else {
        determinant_bareiss(nvars, m)
    }
}

fn check_square<C: Coeff>(nvars: usize, m: &[Vec<LaurentPoly<C>>]) -> Result<()> {
    for row in m {
        if row.len() != m.len() {
            return Err(Error::InvalidParameter("matrix is not square".into()));
        }
        for e in row {
            if e.nvars() != nvars {
                return Err(Error::VariableCountMismatch {
                    left: nvars,
                    right: e.nvars(),
                });
            }
        }
    }
    Ok(())
}

pub fn determinant_laplace<C: Coeff>(
    nvars: usize,
    m: &[Vec<LaurentPoly<C>>],
) -> Result<LaurentPoly<C>> {
    check_square(nvars, m)?;
    let cols: Vec<usize> = (0..m.len()).collect();
    Ok(laplace(nvars, m, 0, &cols))
}

fn laplace<C: Coeff>(
    nvars: usize,
    m: &[Vec<LaurentPoly<C>>],
    row: usize,
    cols: &[usize],
) -> LaurentPoly<C> {
    if cols.is_empty() {
        return LaurentPoly::one(nvars);
    }
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = LaurentPoly::zero(nvars);
    for (k, &c) in cols.iter().enumerate() {
        let entry = &m[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = laplace(nvars, m, row + 1, &rest);
        let term = entry * &minor;
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

pub fn determinant_bareiss<C: Coeff>(
    nvars: usize,
    m: &[Vec<LaurentPoly<C>>],
) -> Result<LaurentPoly<C>> {
    check_square(nvars, m)?;
    let n = m.len();
    if n == 0 {
        return Ok(LaurentPoly::one(nvars));
    }
    let mut a: Vec<Vec<LaurentPoly<C>>> = m.to_vec();
    let mut prev = LaurentPoly::one(nvars);
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(LaurentPoly::zero(nvars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -&d } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn var(n: usize, i: usize, k: i32) -> LaurentPoly<BigRational> {
        LaurentPoly::var_power(n, i, k)
    }

    fn vandermonde(n: usize) -> Vec<Vec<LaurentPoly<BigRational>>> {
        (0..n)
            .map(|i| (0..n).map(|j| var(n, j, (n - 1 - i) as i32)).collect())
            .collect()
    }

    fn vandermonde_product(n: usize) -> LaurentPoly<BigRational> {
        let mut p = LaurentPoly::one(n);
        for i in 0..n {
            for j in i + 1..n {
                p = &p * &(&var(n, i, 1) - &var(n, j, 1));
            }
        }
        p
    }

    #[test]
    fn vandermonde_both_algorithms() {
        for n in 1..=5 {
            let m = vandermonde(n);
            let expect = vandermonde_product(n);
            assert_eq!(determinant_laplace(n, &m).unwrap(), expect, "laplace n={n}");
            assert_eq!(determinant_bareiss(n, &m).unwrap(), expect, "bareiss n={n}");
        }
    }

    #[test]
    fn bareiss_pivots_past_zeros() {
        // [[0, t1], [t2, 1]] has det -t1 t2.
        let n = 2;
        let m = vec![
            vec![LaurentPoly::zero(n), var(n, 0, 1)],
            vec![var(n, 1, 1), LaurentPoly::one(n)],
        ];
        let expect = -&(&var(n, 0, 1) * &var(n, 1, 1));
        assert_eq!(determinant_bareiss(n, &m).unwrap(), expect);
        assert_eq!(determinant_laplace(n, &m).unwrap(), expect);
        let singular = vec![
            vec![LaurentPoly::zero(n), var(n, 0, 1)],
            vec![LaurentPoly::zero(n), LaurentPoly::one(n)],
        ];
        assert!(determinant_bareiss(n, &singular).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_square() {
        let m = vec![vec![LaurentPoly::<BigRational>::one(1), LaurentPoly::one(1)]];
        assert!(determinant(1, &m).is_err());
    }
}
