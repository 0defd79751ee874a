//! Small floating-point helpers.

/// Determinant by Gaussian elimination with partial pivoting. A column with
/// no nonzero pivot gives exactly zero.
pub fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("nonempty range");
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k];
        det *= pivot;
        for i in k + 1..n {
            let f = a[i][k] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Modified Bessel function `I_m(x)` for integer `m`, by the ascending series.
pub fn bessel_i(m: i64, x: f64) -> f64 {
    let m = m.unsigned_abs();
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let h = x / 2.0;
    let mut term = (m as f64 * h.abs().ln() - ln_factorial(m)).exp();
    if h < 0.0 && m % 2 == 1 {
        term = -term;
    }
    let mut sum = 0.0;
    let mut k = 0u64;
    loop {
        sum += term;
        k += 1;
        term *= h * h / (k as f64 * (k + m) as f64);
        if term.abs() <= 1e-18 * sum.abs() || k > 10_000 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det_f64(vec![]), 1.0);
        assert_eq!(det_f64(vec![vec![2.0, 0.0], vec![0.0, 2.0]]), 4.0);
        assert_eq!(det_f64(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), -1.0);
        assert_eq!(det_f64(vec![vec![0.0, 1.0], vec![0.0, 3.0]]), 0.0);
        let d = det_f64(vec![
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        assert!((d - 4.0).abs() < 1e-14);
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_i(0, 1.0) - 1.2660658777520082).abs() < 1e-15);
        assert!((bessel_i(1, 1.0) - 0.5651591039924851).abs() < 1e-15);
        assert_eq!(bessel_i(-3, 0.7), bessel_i(3, 0.7));
        assert_eq!(bessel_i(2, 0.0), 0.0);
    }

    #[test]
    fn bessel_matches_integral() {
        // I_m(x) = (1/π) ∫_0^π e^{x cos θ} cos(mθ) dθ; the periodic trapezoid rule is spectrally accurate.
        for &x in &[0.25, 1.0, 2.0] {
            for m in 0..12 {
                let k = 256;
                let s: f64 = (0..k)
                    .map(|j| {
                        let t = std::f64::consts::TAU * j as f64 / k as f64;
                        (x * t.cos()).exp() * (m as f64 * t).cos()
                    })
                    .sum::<f64>()
                    / k as f64;
                assert!((s - bessel_i(m, x)).abs() < 1e-14, "m={m} x={x}");
            }
        }
    }
}
