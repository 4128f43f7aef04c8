//! Unitary DFT and circulant matrices.
//!
//! A circulant matrix is stored by its first row `c`; row `j` of the
//! materialized matrix is `c` cyclically shifted right by `j`, so
//! `M[j][k] = c[(k − j) mod n]`. Its eigenvalue at spatial frequency `κ` is
//! `m̂(κ) = Σₗ cₗ·exp(+2πiκl/n)`, the `κ`-th diagonal entry of `F·M·F⁻¹`
//! with `F` the unitary DFT matrix `F[κ][j] = exp(−2πiκj/n)/√n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::Matrix;

fn twiddle(kappa: usize, j: usize, n: usize, sign: f64) -> Complex64 {
    // Reduce the index product first so large n keeps the angle accurate.
    let phase = ((kappa * j) % n) as f64 / n as f64;
    Complex64::from_polar(1.0, sign * 2.0 * PI * phase)
}

fn transform(x: &[Complex64], sign: f64) -> Result<Vec<Complex64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Input("DFT of an empty sequence".into()));
    }
    let norm = 1.0 / (n as f64).sqrt();
    Ok((0..n)
        .map(|kappa| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * twiddle(kappa, j, n, sign))
                .sum::<Complex64>()
                * norm
        })
        .collect())
}

/// Unitary DFT `x̂_κ = n^{-1/2} Σ_j x_j exp(−2πiκj/n)`, direct summation.
pub fn dft_apply(x: &[Complex64]) -> Result<Vec<Complex64>> {
    transform(x, -1.0)
}

/// Inverse of [`dft_apply`].
pub fn dft_inverse(x: &[Complex64]) -> Result<Vec<Complex64>> {
    transform(x, 1.0)
}

pub fn dft_apply_real(x: &[f64]) -> Result<Vec<Complex64>> {
    let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft_apply(&z)
}

/// A circulant matrix held by its first row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CirculantRepr", into = "CirculantRepr")]
pub struct CirculantSpec {
    first_row: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CirculantRepr {
    first_row: Vec<f64>,
}

impl TryFrom<CirculantRepr> for CirculantSpec {
    type Error = Error;
    fn try_from(r: CirculantRepr) -> Result<Self> {
        CirculantSpec::new(r.first_row)
    }
}

impl From<CirculantSpec> for CirculantRepr {
    fn from(c: CirculantSpec) -> Self {
        CirculantRepr {
            first_row: c.first_row,
        }
    }
}

impl CirculantSpec {
    pub fn new(first_row: Vec<f64>) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::Input("circulant first row must be non-empty".into()));
        }
        if first_row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite circulant entry".into()));
        }
        Ok(CirculantSpec { first_row })
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// `s·I` as an `n`-point circulant.
    pub fn scalar(n: usize, s: f64) -> Self {
        assert!(n >= 1);
        let mut first_row = vec![0.0; n];
        first_row[0] = s;
        CirculantSpec { first_row }
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    pub fn scale(&self, s: f64) -> Self {
        CirculantSpec {
            first_row: self.first_row.iter().map(|v| v * s).collect(),
        }
    }

    /// Entrywise `self + other`; both must have the same size.
    pub fn add(&self, other: &CirculantSpec) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::Dimension(format!(
                "circulant sizes {} and {} differ",
                self.n(),
                other.n()
            )));
        }
        Ok(CirculantSpec {
            first_row: self
                .first_row
                .iter()
                .zip(&other.first_row)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Symmetric circulants satisfy `c[j] = c[n − j]`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n();
        (1..n).all(|j| (self.first_row[j] - self.first_row[n - j]).abs() <= tol)
    }

    pub fn materialize(&self) -> Matrix {
        circulant_materialize(self)
    }

    pub fn eigenvalues(&self) -> FrequencySymbols {
        circulant_eigenvalues(self)
    }
}

/// Complex eigenvalue sequence of a circulant, indexed by spatial frequency
/// `κ = 0, …, n − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySymbols {
    pub values: Vec<Complex64>,
}

impl FrequencySymbols {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, kappa: usize) -> Complex64 {
        self.values[kappa]
    }

    /// `values[n − κ] = conj(values[κ])` within `tol`, the signature of a
    /// real first row.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let n = self.len();
        (1..n).all(|k| (self.values[n - k] - self.values[k].conj()).norm() <= tol)
    }

    /// Inverts [`circulant_eigenvalues`]. Fails when the symbols do not come
    /// from a real first row.
    pub fn to_circulant(&self) -> Result<CirculantSpec> {
        let n = self.len();
        if n == 0 {
            return Err(Error::Input("empty frequency symbols".into()));
        }
        let scale = self.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let mut row = Vec::with_capacity(n);
        for l in 0..n {
            let c: Complex64 = self
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| v * twiddle(k, l, n, -1.0))
                .sum::<Complex64>()
                / n as f64;
            if c.im.abs() > 1e-9 * scale {
                return Err(Error::Input(
                    "frequency symbols are not conjugate symmetric; first row would be complex"
                        .into(),
                ));
            }
            row.push(c.re);
        }
        CirculantSpec::new(row)
    }
}

pub fn circulant_materialize(spec: &CirculantSpec) -> Matrix {
    let n = spec.n();
    let c = &spec.first_row;
    Matrix::from_fn(n, n, |j, k| c[(k + n - j) % n])
}

/// Frequencies `κ ≤ n/2` are summed directly and the rest mirrored, so the
/// conjugate symmetry of a real first row holds bit for bit.
pub fn circulant_eigenvalues(spec: &CirculantSpec) -> FrequencySymbols {
    let n = spec.n();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for kappa in 0..=n / 2 {
        let mut v: Complex64 = spec
            .first_row
            .iter()
            .enumerate()
            .map(|(l, &c)| twiddle(kappa, l, n, 1.0) * c)
            .sum();
        if 2 * kappa % n == 0 {
            v.im = 0.0;
        }
        values[kappa] = v;
        values[(n - kappa) % n] = v.conj();
    }
    FrequencySymbols { values }
}

/// True iff every row is the cyclic right-shift of the previous one within
/// entrywise absolute tolerance `tol`.
pub fn is_circulant(m: &Matrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "circulant test needs a square matrix, got {:?}",
            m.shape()
        )));
    }
    let n = m.rows();
    for j in 1..n {
        for k in 0..n {
            if (m[(j, k)] - m[(j - 1, (k + n - 1) % n)]).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const DEFAULT_CIRCULANT_TOL: f64 = 1e-12;

/// Reads a matrix back into circulant form when it is one.
pub fn as_circulant(m: &Matrix, tol: f64) -> Result<Option<CirculantSpec>> {
    if is_circulant(m, tol)? {
        Ok(Some(CirculantSpec::new(m.row(0).to_vec())?))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn impulse_maps_to_flat_spectrum() {
        let xh = dft_apply_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for v in xh {
            assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_maps_to_dc() {
        let n = 7;
        let xh = dft_apply_real(&vec![2.5; n]).unwrap();
        assert!((xh[0] - c(2.5 * (n as f64).sqrt(), 0.0)).norm() < 1e-13);
        assert!(xh[1..].iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn round_trip_and_empty() {
        let x = [c(1.0, 0.0), c(2.0, 0.0)];
        let back = dft_inverse(&dft_apply(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(dft_apply(&[]), Err(Error::Input(_))));
        assert!(CirculantSpec::new(vec![]).is_err());
    }

    #[test]
    fn materialize_examples() {
        let two = CirculantSpec::new(vec![3.0, -1.0]).unwrap().materialize();
        assert_eq!(two.to_rows(), vec![vec![3.0, -1.0], vec![-1.0, 3.0]]);
        let lap = CirculantSpec::new(vec![-2.0, 1.0, 0.0, 1.0]).unwrap().materialize();
        assert_eq!(
            lap.to_rows(),
            vec![
                vec![-2.0, 1.0, 0.0, 1.0],
                vec![1.0, -2.0, 1.0, 0.0],
                vec![0.0, 1.0, -2.0, 1.0],
                vec![1.0, 0.0, 1.0, -2.0],
            ]
        );
        let one = CirculantSpec::new(vec![5.0]).unwrap().materialize();
        assert_eq!(one.to_rows(), vec![vec![5.0]]);
    }

    #[test]
    fn eigenvalue_examples() {
        let lap = CirculantSpec::new(vec![-2.0, 1.0, 0.0, 1.0]).unwrap();
        let expected = [0.0, -2.0, -4.0, -2.0];
        for (v, e) in lap.eigenvalues().values.iter().zip(expected) {
            assert!((v - c(e, 0.0)).norm() < 1e-14);
        }
        for v in CirculantSpec::identity(5).eigenvalues().values {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
        let shift = CirculantSpec::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap().eigenvalues();
        assert!(shift.values.iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        assert!(shift.is_conjugate_symmetric(1e-15));
        // Distinct fourth roots of unity.
        for (v, e) in shift.values.iter().zip([c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]) {
            assert!((v - e).norm() < 1e-15);
        }
    }

    #[test]
    fn circulant_detection() {
        let yes = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        let no = Matrix::from_rows(&[[1.0, 2.0], [3.0, 1.0]]).unwrap();
        assert!(is_circulant(&yes, DEFAULT_CIRCULANT_TOL).unwrap());
        assert!(!is_circulant(&no, DEFAULT_CIRCULANT_TOL).unwrap());
        assert!(is_circulant(&Matrix::zeros(2, 3), 1e-12).is_err());
        let spec = CirculantSpec::new(vec![0.3, -1.0, 2.0, 7.0, 0.0]).unwrap();
        assert_eq!(
            as_circulant(&spec.materialize(), 0.0).unwrap(),
            Some(spec.clone())
        );
    }

    #[test]
    fn symbols_invert_to_first_row() {
        let spec = CirculantSpec::new(vec![1.0, -0.5, 2.0, 0.25, 3.0, -1.0]).unwrap();
        let back = spec.eigenvalues().to_circulant().unwrap();
        for (a, b) in spec.first_row().iter().zip(back.first_row()) {
            assert!((a - b).abs() < 1e-13);
        }
        let bad = FrequencySymbols {
            values: vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0)],
        };
        assert!(bad.to_circulant().is_err());
    }
}
