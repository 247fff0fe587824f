//! Dense complex matrix kernel: Hermitian eigensolver, spectral matrix
//! functions, polar decomposition, geometric mean and tensor operations.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, UhlError};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative tolerance for structural predicates.
pub const DEFAULT_TOL: f64 = 1e-11;

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from row-major entries; panics unless `entries.len()` is a square.
    pub fn from_vec(entries: Vec<C64>) -> Self {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, entries.len(), "entry count must be a perfect square");
        Self { dim, data: entries }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        Self::from_fn(rows.len(), |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_residual() <= rel_tol * self.frobenius_norm().max(1.0)
    }

    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.dim)).frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn is_positive(&self, rel_tol: f64) -> bool {
        if !self.is_hermitian(rel_tol) {
            return false;
        }
        match hermitian_eig(self) {
            Ok(e) => e.eigenvalues[0] >= -rel_tol * self.frobenius_norm(),
            Err(_) => false,
        }
    }

    /// `(A + A*)/2`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// `(A - A*)/2`
    pub fn anti_hermitian_part(&self) -> Self {
        (self - &self.adjoint()).scale_real(0.5)
    }

    /// LU factorization with partial pivoting. Returns packed LU, pivots and permutation sign.
    fn lu(&self) -> (Vec<C64>, Vec<usize>, f64) {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let d = a[k * n + k];
            if d == ZERO {
                continue;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / d;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        (a, piv, sign)
    }

    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let (lu, _, sign) = self.lu();
        let mut d = C64::new(sign, 0.0);
        for k in 0..n {
            d *= lu[k * n + k];
        }
        d
    }

    /// General inverse by LU; `Singular` when a pivot vanishes.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let (lu, piv, _) = self.lu();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            if lu[k * n + k].norm() <= 1e-14 * scale {
                return Err(UhlError::Singular(self.determinant().norm()));
            }
        }
        let mut inv = Self::zeros(n);
        for col in 0..n {
            let mut x: Vec<C64> = (0..n).map(|i| if piv[i] == col { ONE } else { ZERO }).collect();
            for i in 0..n {
                for j in 0..i {
                    let t = x[j];
                    x[i] -= lu[i * n + j] * t;
                }
            }
            for i in (0..n).rev() {
                for j in i + 1..n {
                    let t = x[j];
                    x[i] -= lu[i * n + j] * t;
                }
                x[i] /= lu[i * n + i];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale_real(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let v = &self.eigenvectors;
        (0..v.dim()).map(|i| v[(i, k)]).collect()
    }

    /// `V f(Λ) V*`
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigDecomposition> {
    let norm = h.frobenius_norm();
    let herm = h.hermiticity_residual();
    if herm > 1e-9 * norm.max(f64::MIN_POSITIVE) && herm > 0.0 {
        return Err(UhlError::NotHermitian(herm));
    }
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = 1e-13 * norm;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotation J: J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}.
                let pc = phase.conj();
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -pc * s;
                let jqq = pc * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re).then(x.cmp(&y)));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigDecomposition { eigenvalues, eigenvectors })
}

fn clamp_negative(eig: &EigDecomposition, norm: f64) -> Result<Vec<f64>> {
    let min = eig.eigenvalues[0];
    if min < -1e-9 * norm {
        return Err(UhlError::NotPositive(min));
    }
    Ok(eig.eigenvalues.iter().map(|&l| if l < 0.0 { 0.0 } else { l }).collect())
}

/// Principal square root of a positive semidefinite matrix.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let lam = clamp_negative(&eig, a.frobenius_norm())?;
    let clamped = EigDecomposition { eigenvalues: lam, eigenvectors: eig.eigenvectors };
    Ok(clamped.apply(|l| C64::new(l.sqrt(), 0.0)))
}

fn require_pd(a: &ComplexMatrix) -> Result<EigDecomposition> {
    let eig = hermitian_eig(a)?;
    if eig.eigenvalues[0] <= 1e-12 {
        return Err(UhlError::NotPositive(eig.eigenvalues[0]));
    }
    Ok(eig)
}

/// `A^{-1/2}` for positive definite `A`.
pub fn matrix_inv_sqrt_pd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(require_pd(a)?.apply(|l| C64::new(1.0 / l.sqrt(), 0.0)))
}

/// `A^{-1}` for positive definite `A`, via the spectrum.
pub fn matrix_inverse_pd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(require_pd(a)?.apply(|l| C64::new(1.0 / l, 0.0)))
}

/// `log A` for positive definite `A`.
pub fn matrix_log_pd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(require_pd(a)?.apply(|l| C64::new(l.ln(), 0.0)))
}

/// `exp(H)` for Hermitian `H`.
pub fn matrix_exp_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(h)?.apply(|l| C64::new(l.exp(), 0.0)))
}

/// `exp(iθH)` for Hermitian `H`.
pub fn unitary_exp(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(h)?.apply(|l| C64::from_polar(1.0, theta * l)))
}

/// `exp(K)` for anti-Hermitian `K`.
pub fn matrix_exp_anti_hermitian(k: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = k.scale(-I);
    unitary_exp(&h, 1.0)
}

/// `A # B = A^{1/2}(A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`
pub fn geometric_mean(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ea = require_pd(a)?;
    require_pd(b)?;
    let sa = ea.apply(|l| C64::new(l.sqrt(), 0.0));
    let isa = ea.apply(|l| C64::new(1.0 / l.sqrt(), 0.0));
    let inner = isa.matmul(b).matmul(&isa).hermitian_part();
    let mid = matrix_sqrt_psd(&inner)?;
    Ok(sa.matmul(&mid).matmul(&sa).hermitian_part())
}

/// Polar decomposition `W = P U` with `P = (WW*)^{1/2}`.
pub fn polar_decompose(w: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let wws = w.matmul(&w.adjoint()).hermitian_part();
    let eig = hermitian_eig(&wws)?;
    let det_abs: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).product();
    if det_abs <= 1e-12 || eig.eigenvalues[0] <= 0.0 {
        return Err(UhlError::Singular(det_abs));
    }
    let p = eig.apply(|l| C64::new(l.sqrt(), 0.0));
    let pinv = eig.apply(|l| C64::new(1.0 / l.sqrt(), 0.0));
    Ok((p, pinv.matmul(w)))
}

/// Which factor of a bipartite `n ⊗ n` system to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Reduced state of the left (slow index) factor.
    Left,
    /// Reduced state of the right (fast index) factor.
    Right,
}

pub fn partial_trace(m: &ComplexMatrix, side: Side, n: usize) -> Result<ComplexMatrix> {
    if m.dim() != n * n {
        return Err(UhlError::DimMismatch { expected: n * n, got: m.dim() });
    }
    let idx = |a: usize, b: usize| a * n + b;
    Ok(match side {
        Side::Left => ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| m[(idx(i, k), idx(j, k))]).sum()),
        Side::Right => ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| m[(idx(k, i), idx(k, j))]).sum()),
    })
}

/// Transposes the qubits in `mask`; bit `q-1` of the mask selects qubit `q`,
/// qubit 1 being the leftmost tensor factor.
pub fn partial_transpose(rho: &ComplexMatrix, mask: u64, n: usize) -> Result<ComplexMatrix> {
    let full = (1u64 << n) - 1;
    if mask == 0 || mask & !full != 0 || mask == full {
        return Err(UhlError::BadSubset { mask, n });
    }
    if rho.dim() != 1 << n {
        return Err(UhlError::DimMismatch { expected: 1 << n, got: rho.dim() });
    }
    let mut bits = 0usize;
    for q in 0..n {
        if mask >> q & 1 == 1 {
            bits |= 1 << (n - 1 - q);
        }
    }
    Ok(ComplexMatrix::from_fn(rho.dim(), |i, j| {
        let ii = (i & !bits) | (j & bits);
        let jj = (j & !bits) | (i & bits);
        rho[(ii, jj)]
    }))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(m * n, |i, j| a[(i / n, j / n)] * b[(i % n, j % n)])
}

pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.hermitian_part()
}

/// Random positive definite matrix `G G* + εI`, trace-normalized when `unit_trace`.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, dim: usize, unit_trace: bool) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut p = g.matmul(&g.adjoint()).hermitian_part();
    p += &ComplexMatrix::identity(dim).scale_real(0.05 * dim as f64);
    if unit_trace {
        let t = p.trace().re;
        p = p.scale_real(1.0 / t);
    }
    p
}

/// Random unitary `exp(iH)` with `H` Gaussian Hermitian.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    unitary_exp(&h, 1.0).expect("Hermitian input")
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let h = ComplexMatrix::diag_real(&[3.0, 1.0]);
        let e = hermitian_eig(&h).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 5, 8, 16] {
            let h = random_hermitian(&mut rng, dim);
            let e = hermitian_eig(&h).unwrap();
            let rec = e.apply(c);
            assert!(rec.distance(&h) < 1e-10 * h.frobenius_norm());
            assert!(e.eigenvectors.unitarity_residual() < 1e-11);
            for k in 0..dim {
                let v = e.eigenvector(k);
                let hv = h.mat_vec(&v);
                let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * e.eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
                assert!(r < 1e-11 * h.frobenius_norm());
            }
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_is_bit_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 8);
        let a = hermitian_eig(&h).unwrap();
        let b = hermitian_eig(&h.clone()).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(UhlError::NotHermitian(_))));
    }

    #[test]
    fn degenerate_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 6);
        let d = ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -2.0, -2.0, 0.5]);
        let h = u.matmul(&d).matmul(&u.adjoint());
        let e = hermitian_eig(&h).unwrap();
        let want = [-2.0, -2.0, 0.5, 1.0, 1.0, 1.0];
        for (a, b) in e.eigenvalues.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sqrt_of_identity_and_random_psd() {
        let id = ComplexMatrix::identity(4);
        assert!(matrix_sqrt_psd(&id).unwrap().distance(&id) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_pd(&mut rng, 8, false);
        let s = matrix_sqrt_psd(&a).unwrap();
        assert!(s.matmul(&s).distance(&a) < 1e-10 * a.frobenius_norm());
        assert!(s.is_positive(1e-11));
    }

    #[test]
    fn sqrt_clamps_roundoff_and_rejects_indefinite() {
        let a = ComplexMatrix::diag_real(&[1.0, -1e-13]);
        let s = matrix_sqrt_psd(&a).unwrap();
        assert_eq!(s[(1, 1)], ZERO);
        let b = ComplexMatrix::diag_real(&[1.0, -1e-3]);
        assert!(matches!(matrix_sqrt_psd(&b), Err(UhlError::NotPositive(_))));
    }

    #[test]
    fn geometric_mean_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_pd(&mut rng, 4, false);
        let b = random_pd(&mut rng, 4, false);
        let ab = geometric_mean(&a, &b).unwrap();
        assert!(geometric_mean(&a, &a).unwrap().distance(&a) < 1e-10 * a.frobenius_norm());
        assert!(ab.distance(&geometric_mean(&b, &a).unwrap()) < 1e-10 * ab.frobenius_norm());
        let ainv = matrix_inverse_pd(&a).unwrap();
        // A (A^{-1}B)^{1/2}: the square root of a matrix similar to a PD one,
        // computed as A^{-1/2}(A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}.
        let isa = matrix_inv_sqrt_pd(&a).unwrap();
        let sa = matrix_sqrt_psd(&a).unwrap();
        let root = isa.matmul(&matrix_sqrt_psd(&isa.matmul(&b).matmul(&isa)).unwrap()).matmul(&sa);
        assert!(root.matmul(&root).distance(&ainv.matmul(&b)) < 1e-9);
        assert!(a.matmul(&root).distance(&ab) < 1e-10 * ab.frobenius_norm());
    }

    #[test]
    fn polar_of_unitary_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_unitary(&mut rng, 4);
        let (p, v) = polar_decompose(&u).unwrap();
        assert!(p.distance(&ComplexMatrix::identity(4)) < 1e-10);
        assert!(v.distance(&u) < 1e-10);
        let w = random_matrix(&mut rng, 8);
        let (p, v) = polar_decompose(&w).unwrap();
        assert!(p.matmul(&v).distance(&w) < 1e-10 * w.frobenius_norm());
        assert!(v.unitarity_residual() < 1e-10);
        let sing = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(matches!(polar_decompose(&sing), Err(UhlError::Singular(_))));
    }

    #[test]
    fn partial_trace_of_product_and_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = random_pd(&mut rng, 2, true);
        let b = random_pd(&mut rng, 2, true);
        let ab = kron(&a, &b);
        assert!(partial_trace(&ab, Side::Left, 2).unwrap().distance(&a) < 1e-14);
        assert!(partial_trace(&ab, Side::Right, 2).unwrap().distance(&b) < 1e-14);
        let mixed = ComplexMatrix::identity(9).scale_real(1.0 / 9.0);
        let red = partial_trace(&mixed, Side::Left, 3).unwrap();
        assert!(red.distance(&ComplexMatrix::identity(3).scale_real(1.0 / 3.0)) < 1e-15);
        assert!(matches!(partial_trace(&mixed, Side::Left, 2), Err(UhlError::DimMismatch { .. })));
    }

    #[test]
    fn bell_partial_transpose_is_negative() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(s), ZERO, ZERO, c(s)];
        let proj = ComplexMatrix::from_fn(4, |i, j| psi[i] * psi[j].conj());
        let pt = partial_transpose(&proj, 0b10, 2).unwrap();
        let e = hermitian_eig(&pt).unwrap();
        assert!((e.eigenvalues[0] + 0.5).abs() < 1e-12);
        assert_eq!(partial_transpose(&pt, 0b10, 2).unwrap(), proj);
        assert!(matches!(partial_transpose(&proj, 0b11, 2), Err(UhlError::BadSubset { .. })));
        assert!(matches!(partial_transpose(&proj, 0, 2), Err(UhlError::BadSubset { .. })));
    }

    #[test]
    fn partial_transpose_selects_leftmost_qubit() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let id = ComplexMatrix::identity(2);
        let m = kron(&x, &id);
        assert_eq!(partial_transpose(&m, 0b01, 2).unwrap(), kron(&x.transpose(), &id));
        assert_eq!(partial_transpose(&m, 0b10, 2).unwrap(), m);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (a, b, cm, d) = (
            random_matrix(&mut rng, 2),
            random_matrix(&mut rng, 2),
            random_matrix(&mut rng, 2),
            random_matrix(&mut rng, 2),
        );
        let lhs = kron(&a, &b).matmul(&kron(&cm, &d));
        let rhs = kron(&a.matmul(&cm), &b.matmul(&d));
        assert!(lhs.distance(&rhs) < 1e-13);
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
    }

    #[test]
    fn inverse_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let m = random_matrix(&mut rng, 5);
        let inv = m.inverse().unwrap();
        assert!(inv.matmul(&m).distance(&ComplexMatrix::identity(5)) < 1e-11);
        let d = ComplexMatrix::diag_real(&[2.0, 3.0, -1.0]);
        assert!((d.determinant() - c(-6.0)).norm() < 1e-14);
        let u = random_unitary(&mut rng, 4);
        assert!((u.determinant().norm() - 1.0).abs() < 1e-12);
    }
}
