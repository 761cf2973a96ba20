//! Dense complex linear algebra on finite-dimensional Hilbert spaces.
//!
//! Every operator, vector and Choi operator in the crate is a [`ComplexMatrix`].
//! Bases are always the computational ones: transposes, conjugates and the
//! vectorization `|F>> = (F ⊗ 1)|1>>` are taken entrywise with respect to them.
//! Vectorization stacks rows, so entry `F[m, n]` lands at index `m * d_in + n`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Relative threshold for rank decisions and Hermiticity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from row-major real entries.
pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

/// Builds a matrix from row-major complex entries.
pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<ComplexMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j]))
}

/// Computational basis ket `|i>` in dimension `d`, as a `d x 1` matrix.
pub fn ket(d: usize, i: usize) -> ComplexMatrix {
    let mut v = zeros(d, 1);
    v[(i, 0)] = ONE;
    v
}

/// Matrix unit `|i><j|` of shape `rows x cols`.
pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

/// All matrix units `E_ij` of a `d x d` matrix algebra, row-major in `(i, j)`.
pub fn matrix_units(d: usize) -> impl Iterator<Item = (usize, usize, ComplexMatrix)> {
    (0..d).flat_map(move |i| (0..d).map(move |j| (i, j, matrix_unit(d, d, i, j))))
}

/// Projector `|psi><psi|` for a column vector.
pub fn projector(v: &ComplexMatrix) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Hilbert-Schmidt product `Tr[F^dag G]`.
pub fn hs_inner(f: &ComplexMatrix, g: &ComplexMatrix) -> C64 {
    f.iter().zip(g.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Frobenius norm of `a - b`.
pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "dist: shape mismatch");
    (a - b).norm()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors (left to right).
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| kron(&acc, f))
}

/// `|F>> = sum_{m,n} F[m,n] |m>|n>`, returned as a column.
pub fn vectorize(f: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = f.shape();
    ComplexMatrix::from_fn(r * c, 1, |k, _| f[(k / c, k % c)])
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &ComplexMatrix, d_out: usize, d_in: usize) -> Result<ComplexMatrix> {
    if v.ncols() != 1 || v.nrows() != d_out * d_in {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape a {}x{} vector into {d_out}x{d_in}",
            v.nrows(),
            v.ncols()
        )));
    }
    Ok(ComplexMatrix::from_fn(d_out, d_in, |m, n| v[(m * d_in + n, 0)]))
}

/// The maximally entangled (unnormalized) vector `|1_d>> = sum_n |n>|n>`.
pub fn max_entangled(d: usize) -> ComplexMatrix {
    vectorize(&identity(d))
}

pub fn transpose_op(f: &ComplexMatrix) -> ComplexMatrix {
    f.transpose()
}

pub fn conjugate_op(f: &ComplexMatrix) -> ComplexMatrix {
    f.map(|z| z.conj())
}

pub fn adjoint_op(f: &ComplexMatrix) -> ComplexMatrix {
    f.adjoint()
}

fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

/// Partial trace over every tensor factor not listed in `keep`.
///
/// `dims` are the factor dimensions (first factor is most significant). The
/// kept factors stay in their original order.
pub fn partial_trace(x: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n: usize = dims.iter().product();
    if !x.is_square() || x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace: dims {:?} (product {n}) vs {}x{} operator",
            dims,
            x.nrows(),
            x.ncols()
        )));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::DimensionMismatch("zero-dimensional factor".into()));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep {:?} out of range for {} factors",
            keep,
            dims.len()
        )));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|k| keep.contains(&k)).collect();
    let out_dim: usize = (0..dims.len()).filter(|&k| kept[k]).map(|k| dims[k]).product();

    // split each flat index into (kept index, traced index)
    let mut kept_idx = vec![0usize; n];
    let mut traced_idx = vec![0usize; n];
    let mut dig = vec![0usize; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut dig);
        let (mut a, mut t) = (0usize, 0usize);
        for k in 0..dims.len() {
            if kept[k] {
                a = a * dims[k] + dig[k];
            } else {
                t = t * dims[k] + dig[k];
            }
        }
        kept_idx[i] = a;
        traced_idx[i] = t;
    }

    let mut out = zeros(out_dim, out_dim);
    for j in 0..n {
        for i in 0..n {
            if traced_idx[i] == traced_idx[j] {
                out[(kept_idx[i], kept_idx[j])] += x[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Swap `E(|i>|j>) = |j>|i>` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut e = zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            e[(j * d + i, i * d + j)] = ONE;
        }
    }
    e
}

/// `‖H - H^dag‖_F`.
pub fn hermiticity_residual(h: &ComplexMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn new(h: &ComplexMatrix, tol: f64) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "eigendecomposition of a {}x{} matrix",
                h.nrows(),
                h.ncols()
            )));
        }
        let scale = h.norm().max(1.0);
        let residual = hermiticity_residual(h);
        if residual > tol * scale {
            return Err(Error::NotHermitian { residual });
        }
        let n = h.nrows();
        if n == 0 {
            return Ok(Self { eigenvalues: vec![], eigenvectors: zeros(0, 0) });
        }
        let sym = (h + h.adjoint()) * c(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues strictly above `tol * lambda_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let lmax = self.lambda_max();
        if lmax <= 0.0 {
            return 0;
        }
        self.eigenvalues.iter().filter(|&&l| l > tol * lmax).count()
    }

    /// `U f(Λ) U^dag`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = u.nrows();
        let mut scaled = u.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let s = f(l);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| l)
    }
}

/// PSD square root; eigenvalues in `[-tol‖H‖, 0)` are clamped to zero.
pub fn herm_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = HermitianEig::new(h, tol)?;
    let threshold = tol * eig.max_abs_eigenvalue();
    let min = eig.min_eigenvalue();
    if min < -threshold {
        return Err(Error::NegativeEigenvalue { value: min, threshold: -threshold });
    }
    Ok(eig.apply_fn(|l| l.max(0.0).sqrt()))
}

/// Moore-Penrose `H^{-1/2}`: eigenvalues at or below `tol * lambda_max` map to zero.
pub fn herm_pinv_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = HermitianEig::new(h, tol)?;
    let cut = tol * eig.lambda_max();
    Ok(eig.apply_fn(|l| if l > cut && l > 0.0 { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix.
pub fn herm_pinv(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = HermitianEig::new(h, tol)?;
    let cut = tol * eig.lambda_max();
    Ok(eig.apply_fn(|l| if l > cut && l > 0.0 { 1.0 / l } else { 0.0 }))
}

/// Orthonormal basis (as columns) of the support of a PSD matrix.
pub fn support_basis(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = HermitianEig::new(h, tol)?;
    let r = eig.rank(tol);
    Ok(eig.eigenvectors.columns(0, r).into_owned())
}

/// Orthogonal projector onto the support of a PSD matrix.
pub fn support_projector(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let b = support_basis(h, tol)?;
    Ok(&b * b.adjoint())
}

/// Reshuffle of a bipartite operator on `H_out ⊗ H_in` into an operator
/// `H_in^{⊗2} -> H_out^{⊗2}`: `R'[(m,m'),(n,n')] = R[(m,n),(m',n')]`.
pub fn reshuffle(r: &ComplexMatrix, d_out: usize, d_in: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_out * d_out, d_in * d_in, |row, col| {
        let (m, mp) = (row / d_out, row % d_out);
        let (n, np) = (col / d_in, col % d_in);
        r[(m * d_in + n, mp * d_in + np)]
    })
}

/// Inverse of [`reshuffle`].
pub fn unreshuffle(check: &ComplexMatrix, d_out: usize, d_in: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_out * d_in, d_out * d_in, |row, col| {
        let (m, n) = (row / d_in, row % d_in);
        let (mp, np) = (col / d_in, col % d_in);
        check[(m * d_out + mp, n * d_in + np)]
    })
}

/// Pauli matrices `[I, X, Y, Z]`.
pub fn paulis() -> [ComplexMatrix; 4] {
    [
        identity(2),
        from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]),
    ]
}

/// Clock-and-shift operators `X^a Z^b`, `a, b ∈ Z_d`, ordered by `(a, b)`.
pub fn weyl_heisenberg(d: usize) -> Vec<ComplexMatrix> {
    let omega = |k: usize| {
        let ang = 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64;
        c(ang.cos(), ang.sin())
    };
    let mut ops = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // X^a Z^b |j> = omega^{b j} |j + a>
            let mut w = zeros(d, d);
            for j in 0..d {
                w[((j + a) % d, j)] = omega(b * j);
            }
            ops.push(w);
        }
    }
    ops
}

/// Conjugation `U X U^dag`.
pub fn conjugate_by(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    u * x * u.adjoint()
}

/// `‖U^dag U - I‖_F`.
pub fn isometry_residual(v: &ComplexMatrix) -> f64 {
    dist(&(v.adjoint() * v), &identity(v.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_psd, rng};

    #[test]
    fn kron_identity_and_shape() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let a = zeros(2, 3);
        let b = zeros(3, 2);
        assert_eq!(kron(&a, &b).shape(), (6, 6));
    }

    #[test]
    fn kron_xx_fixes_bell_vector() {
        let x = &paulis()[1];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = from_real(4, 1, &[s, 0.0, 0.0, s]);
        assert!(dist(&(kron(x, x) * &phi), &phi) < 1e-15);
    }

    #[test]
    fn kron_index_convention() {
        let mut r = rng(3);
        let a = random_matrix(&mut r, 2, 3);
        let b = random_matrix(&mut r, 3, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn vectorize_examples() {
        assert_eq!(vectorize(&identity(2)), from_real(4, 1, &[1.0, 0.0, 0.0, 1.0]));
        assert_eq!(vectorize(&paulis()[1]), from_real(4, 1, &[0.0, 1.0, 1.0, 0.0]));
        let v = from_real(4, 1, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(devectorize(&v, 2, 2).unwrap(), identity(2));
        assert!(devectorize(&v, 3, 2).is_err());
    }

    #[test]
    fn vectorize_matches_definition() {
        // |F>> = (F ⊗ 1)|1>>
        let mut r = rng(5);
        let f = random_matrix(&mut r, 3, 2);
        let lhs = vectorize(&f);
        let rhs = kron(&f, &identity(2)) * max_entangled(2);
        assert!(dist(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn inner_product_is_hilbert_schmidt() {
        let mut r = rng(11);
        let f = random_matrix(&mut r, 3, 3);
        let g = random_matrix(&mut r, 3, 3);
        let lhs = (vectorize(&f).adjoint() * vectorize(&g))[(0, 0)];
        let rhs = trace(&(f.adjoint() * &g));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn tensor_action_on_vectorized_operator() {
        // (B ⊗ A)|F>> = |B F A^T>>
        let mut r = rng(13);
        for _ in 0..5 {
            let a = random_matrix(&mut r, 2, 2);
            let b = random_matrix(&mut r, 2, 2);
            let f = random_matrix(&mut r, 2, 2);
            let lhs = devectorize(&(kron(&b, &a) * vectorize(&f)), 2, 2).unwrap();
            let rhs = &b * &f * a.transpose();
            assert!(dist(&lhs, &rhs) < 1e-12);
        }
        let a = random_matrix(&mut r, 3, 2);
        let b = random_matrix(&mut r, 4, 2);
        let f = random_matrix(&mut r, 2, 2);
        let lhs = kron(&b, &a) * vectorize(&f);
        assert!(dist(&lhs, &vectorize(&(&b * &f * a.transpose()))) < 1e-12);
    }

    #[test]
    fn transpose_relation() {
        // (1 ⊗ F^T)|1>> = |F>>
        let mut r = rng(17);
        let f = random_matrix(&mut r, 3, 3);
        let lhs = kron(&identity(3), &transpose_op(&f)) * max_entangled(3);
        assert!(dist(&lhs, &vectorize(&f)) < 1e-13);
        let [_, x, y, _] = paulis();
        assert_eq!(transpose_op(&x), x);
        assert_eq!(conjugate_op(&y), -y.clone());
        assert_eq!(adjoint_op(&zeros(2, 3)).shape(), (3, 2));
        assert_eq!(conjugate_op(&f), adjoint_op(&f).transpose());
    }

    #[test]
    fn partial_trace_examples() {
        let x = kron(&identity(2), &identity(3));
        let t = partial_trace(&x, &[2, 3], &[0]).unwrap();
        assert!(dist(&t, &(identity(2) * c(3.0, 0.0))) < 1e-14);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = from_real(4, 1, &[s, 0.0, 0.0, s]);
        let t = partial_trace(&projector(&phi), &[2, 2], &[0]).unwrap();
        assert!(dist(&t, &(identity(2) * c(0.5, 0.0))) < 1e-15);

        assert!(partial_trace(&identity(5), &[2, 3], &[0]).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_order() {
        let mut r = rng(19);
        let a = random_matrix(&mut r, 2, 2);
        let b = random_matrix(&mut r, 3, 3);
        let cc = random_matrix(&mut r, 2, 2);
        let x = kron_all([&a, &b, &cc]);
        let kept = partial_trace(&x, &[2, 3, 2], &[0, 2]).unwrap();
        let expected = kron(&a, &cc) * trace(&b);
        assert!(dist(&kept, &expected) < 1e-12);
        let all = partial_trace(&x, &[2, 3, 2], &[]).unwrap();
        assert!((all[(0, 0)] - trace(&x)).norm() < 1e-12);
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_operator(1), identity(1));
        let e = swap_operator(2);
        assert_eq!(e, from_real(4, 4, &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ]));
        let mut r = rng(23);
        let a = random_matrix(&mut r, 3, 3);
        let b = random_matrix(&mut r, 3, 3);
        let e3 = swap_operator(3);
        assert!(dist(&(&e3 * kron(&a, &b) * &e3), &kron(&b, &a)) < 1e-13);
        assert!(dist(&(&e3 * &e3), &identity(9)) < 1e-15);
    }

    #[test]
    fn sqrt_examples() {
        assert!(dist(&herm_sqrt(&identity(4), DEFAULT_TOL).unwrap(), &identity(4)) < 1e-14);
        let d = from_real(3, 3, &[4.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let s = herm_sqrt(&d, DEFAULT_TOL).unwrap();
        let expected = from_real(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(dist(&s, &expected) < 1e-14);
    }

    #[test]
    fn sqrt_errors() {
        let not_herm = from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(herm_sqrt(&not_herm, DEFAULT_TOL), Err(Error::NotHermitian { .. })));
        let neg = from_real(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        assert!(matches!(herm_sqrt(&neg, DEFAULT_TOL), Err(Error::NegativeEigenvalue { .. })));
        // roundoff-sized negative eigenvalue is clamped
        let tiny = from_real(2, 2, &[1.0, 0.0, 0.0, -1e-13]);
        let s = herm_sqrt(&tiny, DEFAULT_TOL).unwrap();
        assert!(s[(1, 1)].norm() == 0.0);
    }

    #[test]
    fn pinv_sqrt_examples() {
        let d = from_real(2, 2, &[4.0, 0.0, 0.0, 0.0]);
        let p = herm_pinv_sqrt(&d, DEFAULT_TOL).unwrap();
        assert!(dist(&p, &from_real(2, 2, &[0.5, 0.0, 0.0, 0.0])) < 1e-15);
        assert!(dist(&herm_pinv_sqrt(&identity(3), DEFAULT_TOL).unwrap(), &identity(3)) < 1e-14);

        let mut r = rng(29);
        let h = random_psd(&mut r, 5, 3);
        let p = herm_pinv_sqrt(&h, DEFAULT_TOL).unwrap();
        let lhs = &p * &h * &p;
        let proj = support_projector(&h, DEFAULT_TOL).unwrap();
        assert!(dist(&lhs, &proj) < 1e-10);
        assert!((trace(&proj).re - 3.0).abs() < 1e-10);
    }

    #[test]
    fn support_examples() {
        let b = support_basis(&projector(&max_entangled(2)), DEFAULT_TOL).unwrap();
        assert_eq!(b.ncols(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let overlap = (b.adjoint() * from_real(4, 1, &[s, 0.0, 0.0, s]))[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-14);
        assert_eq!(support_basis(&zeros(3, 3), DEFAULT_TOL).unwrap().ncols(), 0);
    }

    #[test]
    fn eig_invariants() {
        let mut r = rng(31);
        for n in [1, 2, 5, 9] {
            let h = random_psd(&mut r, n, n) - random_psd(&mut r, n, 2);
            let eig = HermitianEig::new(&h, DEFAULT_TOL).unwrap();
            assert!(dist(&eig.reconstruct(), &h) <= 1e-10 * h.norm().max(1.0));
            assert!(isometry_residual(&eig.eigenvectors) < 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn reshuffle_roundtrip() {
        let mut r = rng(37);
        let x = random_matrix(&mut r, 6, 6);
        let y = reshuffle(&x, 2, 3);
        assert_eq!(y.shape(), (4, 9));
        assert_eq!(unreshuffle(&y, 2, 3), x);
    }

    #[test]
    fn weyl_heisenberg_is_orthogonal_unitary_basis() {
        for d in [2, 3, 4] {
            let ops = weyl_heisenberg(d);
            assert_eq!(ops.len(), d * d);
            for (i, a) in ops.iter().enumerate() {
                assert!(isometry_residual(a) < 1e-13);
                for (j, b) in ops.iter().enumerate() {
                    let ip = hs_inner(a, b);
                    let expected = if i == j { d as f64 } else { 0.0 };
                    assert!((ip - c(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    mod props {
        use super::super::*;
        use crate::random::{random_matrix, random_psd, rng};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn vectorize_bijection(seed in any::<u64>(), r in 1usize..5, cdim in 1usize..5) {
                let mut g = rng(seed);
                let f = random_matrix(&mut g, r, cdim);
                prop_assert_eq!(devectorize(&vectorize(&f), r, cdim).unwrap(), f);
            }

            #[test]
            fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..7, rank in 1usize..7) {
                let mut g = rng(seed);
                let h = random_psd(&mut g, n, rank.min(n));
                let s = herm_sqrt(&h, DEFAULT_TOL).unwrap();
                prop_assert!(dist(&(&s * &s), &h) <= 1e-9 * h.norm());
            }

            #[test]
            fn partial_trace_preserves_trace(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, keep0 in any::<bool>()) {
                let mut g = rng(seed);
                let x = random_matrix(&mut g, a * b, a * b);
                let keep = if keep0 { vec![0] } else { vec![1] };
                let t = partial_trace(&x, &[a, b], &keep).unwrap();
                prop_assert!((trace(&t) - trace(&x)).norm() < 1e-12 * (1.0 + x.norm()));
            }
        }
    }
}
