//! Dense determinants: fraction-free elimination for rationals, partial-pivot LU for floats.

use num_traits::{One, Zero};

use crate::exact::Rational;

/// Exact determinant by Bareiss elimination.
///
/// Every intermediate pivot division is exact, so entries stay as small as the
/// minors they represent. Rows are swapped when a pivot vanishes.
pub fn det_exact(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    if n == 0 {
        return Rational::one();
    }
    assert!(matrix.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    let mut sign = Rational::one();
    let mut prev = Rational::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Floating-point determinant by LU with partial pivoting.
pub fn det_f64(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 1.0;
    }
    assert!(matrix.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a = matrix.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}
