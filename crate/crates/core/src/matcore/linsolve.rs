//! Dense factorizations used by the Lyapunov and Riccati solvers.

use super::Matrix;

/// LU factorization with partial pivoting, `P·M = L·U`.
///
/// L has a unit diagonal and is stored below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    singular: bool,
    norm_one: f64,
}

impl Lu {
    pub fn factor(m: &Matrix) -> Lu {
        assert!(m.is_square(), "LU of a non-square matrix");
        let n = m.rows();
        let norm_one = m.norm_one();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;

        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                singular = true;
                continue;
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                if factor == 0.0 {
                    continue;
                }
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Lu {
            lu,
            perm,
            singular,
            norm_one,
        }
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// An exact zero pivot was met during elimination.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `M·x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `Mᵀ·x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Mᵀ = Uᵀ Lᵀ P
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[(j, i)] * w[j];
            }
            w[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in (i + 1)..n {
                s -= self.lu[(j, i)] * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// 1-norm condition number estimate (Hager's method, as in LAPACK's
    /// `xLACON`). Returns infinity for an exactly singular factorization.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        if self.singular {
            return f64::INFINITY;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            if !estimate.is_finite() {
                return f64::INFINITY;
            }
            let signs: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&signs);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .fold((0, -1.0), |b, (j, v)| if v.abs() > b.1 { (j, v.abs()) } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x.iter_mut().for_each(|v| *v = 0.0);
            x[jmax] = 1.0;
        }
        // Alternative lower bound from the LAPACK estimator guards against
        // the power iteration stalling on a poor starting vector.
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0))
            })
            .collect();
        let alt_est = 2.0 * self.solve(&alt).iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        self.norm_one * estimate.max(alt_est)
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// when a non-positive pivot appears.
pub fn cholesky(m: &Matrix) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `S·X = B` for symmetric positive definite `S` given its lower
/// Cholesky factor.
pub fn cholesky_solve(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    assert_eq!(b.rows(), n);
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

pub fn is_positive_definite(m: &Matrix) -> bool {
    cholesky(m).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_transposed_solves() {
        let m = Matrix::from_rows(&[[0.0, 2.0, 1.0], [1.0, -1.0, 3.0], [4.0, 0.5, -2.0]]).unwrap();
        let lu = Lu::factor(&m);
        let b = [1.0, -2.0, 0.25];
        let x = lu.solve(&b);
        let r: Vec<f64> = m.mul_vec(&x).iter().zip(&b).map(|(a, b)| a - b).collect();
        assert!(r.iter().all(|v| v.abs() < 1e-14));
        let xt = lu.solve_transpose(&b);
        let rt: Vec<f64> = m.transpose().mul_vec(&xt).iter().zip(&b).map(|(a, b)| a - b).collect();
        assert!(rt.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn condition_estimate_is_exact_on_diagonal() {
        let m = Matrix::from_diag(&[1.0, 1e-3, 10.0]);
        let cond = Lu::factor(&m).condition_estimate();
        assert!((cond - 1e4).abs() < 1e-6);
        let sing = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(Lu::factor(&sing).condition_estimate() > 1e14);
    }

    #[test]
    fn cholesky_accepts_pd_and_rejects_indefinite() {
        let spd = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let l = cholesky(&spd).unwrap();
        assert!((&(&l * &l.transpose()) - &spd).max_abs() < 1e-15);
        let b = Matrix::from_rows(&[[2.0], [1.0]]).unwrap();
        let x = cholesky_solve(&l, &b);
        assert!((&(&spd * &x) - &b).max_abs() < 1e-15);
        assert!(cholesky(&Matrix::from_diag(&[1.0, -1.0])).is_none());
        assert!(cholesky(&Matrix::from_diag(&[1.0, 0.0])).is_none());
    }
}
