//! Frames of totally real subspaces, Hermitian forms and the wedge-product
//! quantities built from them.
//!
//! Convention: `h(u, v) = sum_ab u_a H_ab conj(v_b)`, linear in the first
//! slot and conjugate-linear in the second. With it the squared norm of
//! `s_1 ^ ... ^ s_k` in the induced metric on the top exterior power is the
//! determinant of the Gram matrix `G_ij = h(s_i, s_j)`, and the Leibniz rule
//! for the induced connection turns `<nabla(s_1 ^ ... ^ s_k), s_1 ^ ... ^ s_k>`
//! into a sum of Gram determinants with one row replaced.

use num_complex::Complex;
use num_traits::Zero;

use super::linalg::{expect_square, CMatrix};
use crate::error::{MaslovError, Result};
use crate::scalar::{CVec, Real};

/// Sign attached to an ordered frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Orientation::Positive => T::one(),
            Orientation::Negative => -T::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// Ordered list of `k` complex `n`-vectors spanning a totally real subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    vectors: Vec<CVec<T>>,
    orientation: Orientation,
}

impl<T: Real> Frame<T> {
    /// Builds a positively oriented frame. All vectors must share one
    /// dimension `n >= k`.
    pub fn new(vectors: Vec<CVec<T>>) -> Result<Self> {
        Self::with_orientation(vectors, Orientation::Positive)
    }

    pub fn with_orientation(vectors: Vec<CVec<T>>, orientation: Orientation) -> Result<Self> {
        let n = vectors.first().map_or(0, Vec::len);
        if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
            return Err(MaslovError::DimensionMismatch { expected: n, found: bad.len() });
        }
        if vectors.is_empty() || vectors.len() > n {
            return Err(MaslovError::DimensionMismatch { expected: n, found: vectors.len() });
        }
        Ok(Self { vectors, orientation })
    }

    /// Frame given by the columns of `m`.
    pub fn from_columns(m: &CMatrix<T>) -> Result<Self> {
        Self::new((0..m.cols()).map(|j| m.column(j)).collect())
    }

    pub fn vectors(&self) -> &[CVec<T>] {
        &self.vectors
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Number of vectors `k`.
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Ambient complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn flipped(&self) -> Self {
        Self { vectors: self.vectors.clone(), orientation: self.orientation.flipped() }
    }

    pub fn conj(&self) -> Self {
        Self {
            vectors: self.vectors.iter().map(|v| v.iter().map(|z| z.conj()).collect()).collect(),
            orientation: self.orientation,
        }
    }

    /// `n x k` matrix whose columns are the frame vectors.
    pub fn as_matrix(&self) -> CMatrix<T> {
        CMatrix::from_columns(&self.vectors)
    }
}

/// Conjugate-symmetric positive definite form on `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianForm<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(MaslovError::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let residual = matrix.hermitian_residual();
        if !(residual <= T::tol(1e-12)) {
            return Err(MaslovError::NotHermitian { residual: residual.as_f64() });
        }
        if matrix.cholesky().is_none() {
            return Err(MaslovError::NotPositiveDefinite);
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n) }
    }

    /// `e^{2f} h`.
    pub fn conformal(&self, factor: T) -> Self {
        Self { matrix: self.matrix.scale_real(factor) }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn conj(&self) -> Self {
        Self { matrix: self.matrix.conj() }
    }

    /// `h(u, v)`, linear in `u`, conjugate-linear in `v`.
    pub fn eval(&self, u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
        let n = self.dim();
        let mut acc = Complex::zero();
        for a in 0..n {
            let mut row = Complex::zero();
            for b in 0..n {
                row = row + self.matrix[(a, b)] * v[b].conj();
            }
            acc = acc + u[a] * row;
        }
        acc
    }

    pub fn norm_sq(&self, u: &[Complex<T>]) -> T {
        self.eval(u, u).re
    }
}

fn check_dims<T: Real>(frame: &Frame<T>, h: &HermitianForm<T>) -> Result<()> {
    expect_square(h.matrix(), frame.dim())
}

/// Gram matrix `G_ij = h(s_i, s_j)`.
pub fn gram_matrix<T: Real>(frame: &Frame<T>, h: &HermitianForm<T>) -> Result<CMatrix<T>> {
    check_dims(frame, h)?;
    // G = F^T H conj(F)
    let f = frame.as_matrix();
    let g = &(&f.transpose() * h.matrix()) * &f.conj();
    Ok(g)
}

/// Squared norm of `s_1 ^ ... ^ s_k` in the induced metric, `det G`.
pub fn wedge_norm_sq<T: Real>(frame: &Frame<T>, h: &HermitianForm<T>) -> Result<T> {
    let g = gram_matrix(frame, h)?;
    let det = g.det().re;
    let diag = (0..g.rows()).fold(T::one(), |p, i| p * g[(i, i)].re);
    let threshold = T::tol(1e-12) * diag;
    if !(det > threshold) {
        return Err(MaslovError::DegenerateFrame { value: det.as_f64(), threshold: threshold.as_f64() });
    }
    Ok(det)
}

/// `<nabla(s_1 ^ ... ^ s_k), s_1 ^ ... ^ s_k>_h` given the covariant
/// derivatives `derivs[i] = nabla s_i` along a fixed direction.
pub fn wedge_pair_derivative<T: Real>(frame: &Frame<T>, derivs: &[CVec<T>], h: &HermitianForm<T>) -> Result<Complex<T>> {
    check_dims(frame, h)?;
    if derivs.len() != frame.rank() {
        return Err(MaslovError::DimensionMismatch { expected: frame.rank(), found: derivs.len() });
    }
    if let Some(d) = derivs.iter().find(|d| d.len() != frame.dim()) {
        return Err(MaslovError::DimensionMismatch { expected: frame.dim(), found: d.len() });
    }
    let g = gram_matrix(frame, h)?;
    let k = frame.rank();
    let mut total = Complex::zero();
    for (i, d) in derivs.iter().enumerate() {
        let mut gi = g.clone();
        for j in 0..k {
            gi[(i, j)] = h.eval(d, &frame.vectors()[j]);
        }
        total = total + gi.det();
    }
    Ok(total)
}

/// Connection 1-form of the normalized wedge section evaluated on the
/// velocity that produced `derivs`. Assumes an `h`-unitary connection, for
/// which the real part vanishes identically.
pub fn theta_of_velocity<T: Real>(frame: &Frame<T>, derivs: &[CVec<T>], h: &HermitianForm<T>) -> Result<Complex<T>> {
    let norm = wedge_norm_sq(frame, h)?;
    let pairing = wedge_pair_derivative(frame, derivs, h)?;
    Ok(Complex::new(T::zero(), pairing.im / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn e(n: usize, i: usize) -> CVec<f64> {
        (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()
    }

    #[test]
    fn standard_basis_gram_is_identity() {
        let f = Frame::new(vec![e(3, 0), e(3, 1)]).unwrap();
        let g = gram_matrix(&f, &HermitianForm::identity(3)).unwrap();
        assert!(g.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        assert!((wedge_norm_sq(&f, &HermitianForm::identity(3)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_vector_gram() {
        let f = Frame::new(vec![vec![c(2.0, 0.0)]]).unwrap();
        let g = gram_matrix(&f, &HermitianForm::identity(1)).unwrap();
        assert_eq!(g[(0, 0)], c(4.0, 0.0));
    }

    #[test]
    fn repeated_vector_is_degenerate() {
        let f = Frame::new(vec![e(2, 0), e(2, 0)]).unwrap();
        assert!(matches!(wedge_norm_sq(&f, &HermitianForm::identity(2)), Err(MaslovError::DegenerateFrame { .. })));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = Frame::new(vec![e(2, 0)]).unwrap();
        assert!(matches!(gram_matrix(&f, &HermitianForm::identity(3)), Err(MaslovError::DimensionMismatch { .. })));
        assert!(Frame::new(vec![e(2, 0), e(3, 1)]).is_err());
        assert!(Frame::new(vec![e(1, 0), e(1, 0)]).is_err());
    }

    #[test]
    fn zero_derivatives_give_zero() {
        let f = Frame::new(vec![e(2, 0), e(2, 1)]).unwrap();
        let z = vec![vec![c(0.0, 0.0); 2]; 2];
        let h = HermitianForm::identity(2);
        assert_eq!(wedge_pair_derivative(&f, &z, &h).unwrap(), c(0.0, 0.0));
        assert_eq!(theta_of_velocity(&f, &z, &h).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn circle_tangent_pairing_is_i() {
        for &psi in &[0.0, 0.7, 2.0, 4.5] {
            let s = Complex::from_polar(1.0, psi);
            let f = Frame::new(vec![vec![s]]).unwrap();
            let d = vec![vec![c(0.0, 1.0) * s]];
            let h = HermitianForm::identity(1);
            assert!((wedge_pair_derivative(&f, &d, &h).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
            assert!((theta_of_velocity(&f, &d, &h).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn theta_ignores_positive_rescaling() {
        // frame f(psi) e^{i psi} with f = 2 + sin psi, derivative includes f'
        let psi: f64 = 1.1;
        let f = 2.0 + psi.sin();
        let fp = psi.cos();
        let s = Complex::from_polar(1.0, psi);
        let h = HermitianForm::identity(1);
        let plain = theta_of_velocity(&Frame::new(vec![vec![s]]).unwrap(), &[vec![c(0.0, 1.0) * s]], &h).unwrap();
        let scaled = theta_of_velocity(
            &Frame::new(vec![vec![s * f]]).unwrap(),
            &[vec![s * fp + c(0.0, 1.0) * s * f]],
            &h,
        )
        .unwrap();
        assert!((plain - scaled).norm() < 1e-15);
        assert_eq!(scaled.re, 0.0);
    }

    #[test]
    fn hermitian_form_validation() {
        let bad = CMatrix::from_fn(2, 2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.5, 0.5) });
        assert!(matches!(HermitianForm::new(bad), Err(MaslovError::NotHermitian { .. })));
        let indefinite = CMatrix::from_real_diagonal(&[1.0, -2.0]);
        assert!(matches!(HermitianForm::new(indefinite), Err(MaslovError::NotPositiveDefinite)));
    }

    #[test]
    fn works_in_single_precision() {
        let f = Frame::<f32>::new(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]).unwrap();
        let n = wedge_norm_sq(&f, &HermitianForm::identity(2)).unwrap();
        assert!((n - 1.0).abs() < 1e-6);
    }
}
