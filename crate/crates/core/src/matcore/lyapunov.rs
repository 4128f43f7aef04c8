use super::linsolve::{cholesky, Lu};
use super::Matrix;
use crate::error::{Error, Result};

/// Condition estimates above this mark the vectorized operator as singular.
pub const RESONANCE_CONDITION: f64 = 1e14;

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_REFINEMENT_STEPS: usize = 3;

/// The Lyapunov operator `X ↦ AᵀX + XA`, vectorized row-major.
struct LyapunovOperator {
    n: usize,
    lu: Lu,
}

impl LyapunovOperator {
    fn new(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        let dim = n * n;
        let mut op = Matrix::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                let row = i * n + j;
                for k in 0..n {
                    op[(row, k * n + j)] += a[(k, i)];
                    op[(row, i * n + k)] += a[(k, j)];
                }
            }
        }
        let lu = Lu::factor(&op);
        let condition = lu.condition_estimate();
        if !(condition <= RESONANCE_CONDITION) {
            return Err(Error::ResonantSpectrum { condition });
        }
        Ok(LyapunovOperator { n, lu })
    }

    /// Solves `AᵀX + XA = rhs`.
    fn apply_inverse(&self, rhs: &Matrix) -> Matrix {
        let x = self.lu.solve(rhs.as_slice());
        Matrix::from_fn(self.n, self.n, |i, j| x[i * self.n + j])
    }
}

fn lyapunov_residual(a: &Matrix, x: &Matrix, q: &Matrix) -> Matrix {
    let atx = &a.transpose() * x;
    let xa = x * a;
    &(&atx + &xa) + q
}

/// Solves `AᵀX + XA + Q = 0` for symmetric `Q`.
///
/// The n²×n² vectorized system is factored once; up to three rounds of
/// iterative refinement are applied when the first solve misses the
/// residual target `1e-10·max(1, ‖Q‖_F)`. The result is symmetrized.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    if !a.is_square() || q.shape() != a.shape() {
        return Err(Error::Dimension(format!(
            "Lyapunov equation needs square A and matching Q, got {:?} and {:?}",
            a.shape(),
            q.shape()
        )));
    }
    if !a.is_finite() || !q.is_finite() {
        return Err(Error::Input("non-finite entries in Lyapunov data".into()));
    }
    if !q.is_symmetric(1e-10) {
        return Err(Error::Input("Lyapunov right-hand side Q must be symmetric".into()));
    }
    let op = LyapunovOperator::new(a)?;
    let target = RESIDUAL_TOL * q.frobenius_norm().max(1.0);

    let mut x = op.apply_inverse(&-q);
    for _ in 0..MAX_REFINEMENT_STEPS {
        let res = lyapunov_residual(a, &x, q);
        if res.frobenius_norm() <= target {
            break;
        }
        let correction = op.apply_inverse(&-&res);
        x = &x + &correction;
    }
    let x = x.symmetrize();
    if !x.is_finite() {
        return Err(Error::ResonantSpectrum {
            condition: f64::INFINITY,
        });
    }
    Ok(x)
}

/// Eigenvalue-free Hurwitz test: `A` is Hurwitz iff `AᵀX + XA = −I` has a
/// symmetric positive definite solution.
pub fn is_hurwitz(a: &Matrix) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "Hurwitz test needs a square matrix, got {:?}",
            a.shape()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Input("non-finite entries in Hurwitz test".into()));
    }
    match solve_lyapunov(a, &Matrix::identity(a.rows())) {
        Ok(x) => Ok(cholesky(&x).is_some()),
        Err(Error::ResonantSpectrum { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn scalar_lyapunov() {
        let x = solve_lyapunov(&m(&[&[-1.0]]), &m(&[&[2.0]])).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decoupled_lyapunov_gives_identity() {
        let a = Matrix::from_diag(&[-1.0, -3.0]);
        let q = Matrix::from_diag(&[2.0, 6.0]);
        let x = solve_lyapunov(&a, &q).unwrap();
        assert!((&x - &Matrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn skew_symmetric_is_resonant() {
        let a = m(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let err = solve_lyapunov(&a, &Matrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::ResonantSpectrum { .. }), "{err}");
    }

    #[test]
    fn rejects_shape_and_asymmetry() {
        let a = Matrix::identity(2);
        assert!(matches!(
            solve_lyapunov(&a, &Matrix::identity(3)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            solve_lyapunov(&a.scale(-1.0), &m(&[&[1.0, 2.0], &[0.0, 1.0]])),
            Err(Error::Input(_))
        ));
        assert!(matches!(is_hurwitz(&Matrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn hurwitz_examples() {
        assert!(is_hurwitz(&m(&[&[-1.0]])).unwrap());
        assert!(!is_hurwitz(&m(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap());
        assert!(is_hurwitz(&m(&[&[-2.0, 2.0], &[-3.0, -8.0]])).unwrap());
        assert!(!is_hurwitz(&m(&[&[1.0]])).unwrap());
        assert!(!is_hurwitz(&Matrix::zeros(2, 2)).unwrap());
        // Eigenvalues 1 and -3: nonsingular operator, indefinite certificate.
        assert!(!is_hurwitz(&Matrix::from_diag(&[1.0, -3.0])).unwrap());
    }
}
