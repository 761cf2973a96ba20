//! Completely positive maps `L(H_in) -> L(H_out)`.
//!
//! A [`CpMap`] carries a Kraus list, a Choi operator, or both. The missing
//! representation is derived on first use and cached; the canonical Kraus form
//! comes from the eigendecomposition of the Choi operator.
//!
//! The Choi operator is `R = (M ⊗ I)(|1>><<1|)` on `H_out ⊗ H_in`, so that
//! `M(rho) = Tr_in[(1 ⊗ rho^T) R]`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linmat::{
    c, devectorize, dist, herm_sqrt, identity, isometry_residual, kron, matrix_units,
    max_entangled, partial_trace, reshuffle, support_basis, vectorize, ComplexMatrix,
    HermitianEig, DEFAULT_TOL,
};
use crate::report::{max_of, VerificationReport};

#[derive(Clone, Debug)]
pub struct CpMap {
    d_in: usize,
    d_out: usize,
    kraus: OnceLock<Vec<ComplexMatrix>>,
    choi: OnceLock<ComplexMatrix>,
}

/// `R = sum_i |M_i>><<M_i|`.
pub fn choi_from_kraus(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::Invalid("empty Kraus list".into()))?;
    let shape = first.shape();
    let n = shape.0 * shape.1;
    let mut r = ComplexMatrix::zeros(n, n);
    for k in kraus {
        if k.shape() != shape {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators of shapes {:?} and {:?}",
                shape,
                k.shape()
            )));
        }
        let v = vectorize(k);
        r += &v * v.adjoint();
    }
    Ok(r)
}

/// Canonical Kraus operators `K_i = devec(sqrt(lambda_i) e_i)` from the
/// eigenpairs of the Choi operator with `lambda_i > tol * lambda_max`.
pub fn kraus_from_choi(
    choi: &ComplexMatrix,
    d_in: usize,
    d_out: usize,
    tol: f64,
) -> Result<Vec<ComplexMatrix>> {
    check_choi_shape(choi, d_in, d_out)?;
    let eig = HermitianEig::new(choi, tol)?;
    let floor = tol * eig.max_abs_eigenvalue().max(f64::MIN_POSITIVE);
    if eig.min_eigenvalue() < -floor {
        return Err(Error::NotPsd { min_eigenvalue: eig.min_eigenvalue() });
    }
    let r = eig.rank(tol);
    (0..r)
        .map(|j| {
            let v = eig.eigenvectors.columns(j, 1) * c(eig.eigenvalues[j].sqrt(), 0.0);
            devectorize(&v, d_out, d_in)
        })
        .collect()
}

fn check_choi_shape(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<()> {
    let n = d_in * d_out;
    if d_in == 0 || d_out == 0 || choi.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Choi operator {}x{} for d_in={d_in}, d_out={d_out}",
            choi.nrows(),
            choi.ncols()
        )));
    }
    Ok(())
}

impl CpMap {
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let (d_out, d_in) = kraus
            .first()
            .ok_or_else(|| Error::Invalid("empty Kraus list".into()))?
            .shape();
        if d_in == 0 || d_out == 0 {
            return Err(Error::DimensionMismatch("zero-dimensional Kraus operator".into()));
        }
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators of shapes {:?} and {:?}",
                (d_out, d_in),
                bad.shape()
            )));
        }
        Ok(Self { d_in, d_out, kraus: OnceLock::from(kraus), choi: OnceLock::new() })
    }

    /// Builds a map from its Choi operator; rejects non-PSD input as not CP.
    pub fn from_choi(choi: ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        Self::from_choi_with_tol(choi, d_in, d_out, DEFAULT_TOL)
    }

    pub fn from_choi_with_tol(choi: ComplexMatrix, d_in: usize, d_out: usize, tol: f64) -> Result<Self> {
        check_choi_shape(&choi, d_in, d_out)?;
        let eig = HermitianEig::new(&choi, tol).map_err(|e| Error::NotCp(e.to_string()))?;
        let floor = tol * eig.max_abs_eigenvalue().max(1.0);
        if eig.min_eigenvalue() < -floor {
            return Err(Error::NotCp(format!(
                "Choi operator has eigenvalue {:.3e}",
                eig.min_eigenvalue()
            )));
        }
        Ok(Self { d_in, d_out, kraus: OnceLock::new(), choi: OnceLock::from(choi) })
    }

    /// Map given by a Kraus list and a matching Choi operator, both cached.
    pub fn from_parts(kraus: Vec<ComplexMatrix>, choi: ComplexMatrix) -> Result<Self> {
        let m = Self::from_kraus(kraus)?;
        check_choi_shape(&choi, m.d_in, m.d_out)?;
        let _ = m.choi.set(choi);
        Ok(m)
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(identity(d))
    }

    /// `rho -> U rho U^dag` (any operator, not only unitaries).
    pub fn unitary(u: ComplexMatrix) -> Self {
        Self::from_kraus(vec![u]).expect("single operator")
    }

    pub fn zero(d_in: usize, d_out: usize) -> Self {
        Self::from_kraus(vec![ComplexMatrix::zeros(d_out, d_in)]).expect("single operator")
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        self.choi.get_or_init(|| {
            choi_from_kraus(self.kraus.get().expect("one representation is always present"))
                .expect("shapes validated at construction")
        })
    }

    /// Kraus operators: the stored list, or the canonical form of the Choi operator.
    pub fn kraus(&self) -> &[ComplexMatrix] {
        self.kraus.get_or_init(|| {
            let choi = self.choi.get().expect("one representation is always present");
            let ks = kraus_from_choi(choi, self.d_in, self.d_out, DEFAULT_TOL)
                .expect("Choi operator validated at construction");
            if ks.is_empty() {
                vec![ComplexMatrix::zeros(self.d_out, self.d_in)]
            } else {
                ks
            }
        })
    }

    pub fn has_kraus(&self) -> bool {
        self.kraus.get().is_some()
    }

    pub fn has_choi(&self) -> bool {
        self.choi.get().is_some()
    }

    /// Canonical Kraus operators (Hilbert-Schmidt orthogonal).
    pub fn canonical_kraus(&self, tol: f64) -> Result<Vec<ComplexMatrix>> {
        kraus_from_choi(self.choi(), self.d_in, self.d_out, tol)
    }

    /// `‖R - sum_i |M_i>><<M_i|‖_F` when both representations are cached.
    pub fn consistency_residual(&self) -> Option<f64> {
        match (self.kraus.get(), self.choi.get()) {
            (Some(k), Some(r)) => Some(dist(r, &choi_from_kraus(k).ok()?)),
            _ => None,
        }
    }

    fn check_input(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch(format!(
                "map with d_in={} applied to a {}x{} operator",
                self.d_in,
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.has_kraus() {
            self.apply_kraus(rho)
        } else {
            self.apply_choi(rho)
        }
    }

    /// `sum_i M_i rho M_i^dag`.
    pub fn apply_kraus(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(rho)?;
        Ok(self
            .kraus()
            .iter()
            .fold(ComplexMatrix::zeros(self.d_out, self.d_out), |acc, k| acc + k * rho * k.adjoint()))
    }

    /// `Tr_in[(1 ⊗ rho^T) R]`.
    pub fn apply_choi(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(rho)?;
        let x = kron(&identity(self.d_out), &rho.transpose()) * self.choi();
        partial_trace(&x, &[self.d_out, self.d_in], &[0])
    }

    /// `sum_i M_i^dag M_i = Tr_out[R^T]`, the effect of the map's total probability.
    pub fn xi(&self) -> ComplexMatrix {
        if let Some(k) = self.kraus.get() {
            k.iter()
                .fold(ComplexMatrix::zeros(self.d_in, self.d_in), |acc, m| acc + m.adjoint() * m)
        } else {
            partial_trace(&self.choi().transpose(), &[self.d_out, self.d_in], &[1])
                .expect("shape validated")
        }
    }

    /// `‖Tr_out[R] - I_in‖_F`; zero for channels.
    pub fn trace_preservation_residual(&self) -> f64 {
        dist(&self.xi(), &identity(self.d_in))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_residual() <= tol
    }

    /// Smallest eigenvalue of `I - Tr_out[R]^T`; non-negative for trace-non-increasing maps.
    pub fn trace_deficit_min_eigenvalue(&self) -> f64 {
        let gap = identity(self.d_in) - self.xi();
        HermitianEig::new(&gap, 1e-8).map_or(f64::NAN, |e| e.min_eigenvalue())
    }

    fn map_kraus(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> CpMap {
        CpMap::from_kraus(self.kraus().iter().map(f).collect()).expect("non-empty")
    }

    /// Hilbert-Schmidt adjoint `A -> sum_i M_i^dag A M_i`.
    pub fn adjoint(&self) -> CpMap {
        self.map_kraus(|k| k.adjoint())
    }

    /// `A -> sum_i M_i^T A M_i^*`.
    pub fn transpose(&self) -> CpMap {
        self.map_kraus(|k| k.transpose())
    }

    /// `rho -> sum_i M_i^* rho M_i^T`.
    pub fn conjugate(&self) -> CpMap {
        self.map_kraus(|k| k.map(|z| z.conj()))
    }

    /// `Ř` with `Ř |A>> = |M(A)>>`, i.e. `sum_i M_i ⊗ M_i^*`.
    pub fn check_operator(&self) -> ComplexMatrix {
        if let Some(k) = self.kraus.get() {
            k.iter().fold(
                ComplexMatrix::zeros(self.d_out * self.d_out, self.d_in * self.d_in),
                |acc, m| acc + kron(m, &m.map(|z| z.conj())),
            )
        } else {
            reshuffle(self.choi(), self.d_out, self.d_in)
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CpMap) -> Result<CpMap> {
        if self.d_in != inner.d_out {
            return Err(Error::DimensionMismatch(format!(
                "compose: outer d_in={} vs inner d_out={}",
                self.d_in, inner.d_out
            )));
        }
        let kraus = self
            .kraus()
            .iter()
            .flat_map(|a| inner.kraus().iter().map(move |b| a * b))
            .collect();
        CpMap::from_kraus(kraus)
    }

    pub fn tensor(&self, other: &CpMap) -> CpMap {
        let kraus = self
            .kraus()
            .iter()
            .flat_map(|a| other.kraus().iter().map(move |b| kron(a, b)))
            .collect();
        CpMap::from_kraus(kraus).expect("non-empty")
    }

    pub fn scaled(&self, factor: f64) -> CpMap {
        assert!(factor >= 0.0, "CP maps scale by non-negative factors");
        let s = c(factor.sqrt(), 0.0);
        let kraus = self.kraus.get().map(|ks| ks.iter().map(|k| k * s).collect::<Vec<_>>());
        let choi = self.choi.get().map(|r| r * c(factor, 0.0));
        CpMap {
            d_in: self.d_in,
            d_out: self.d_out,
            kraus: kraus.map(OnceLock::from).unwrap_or_default(),
            choi: choi.map(OnceLock::from).unwrap_or_default(),
        }
    }

    /// Numerical rank of the Choi operator (minimal number of Kraus operators).
    pub fn choi_rank(&self, tol: f64) -> Result<usize> {
        Ok(HermitianEig::new(self.choi(), tol)?.rank(tol))
    }

    /// `max_ij ‖self(E_ij) - other(E_ij)‖_F` over matrix units.
    pub fn distance_on_basis(&self, other: &CpMap) -> Result<f64> {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return Err(Error::DimensionMismatch("maps act between different spaces".into()));
        }
        let mut worst = 0.0f64;
        for (_, _, e) in matrix_units(self.d_in) {
            worst = worst.max(dist(&self.apply(&e)?, &other.apply(&e)?));
        }
        Ok(worst)
    }
}

/// Minimal Stinespring dilation `M(rho) = Tr_A[V rho V^dag]`.
#[derive(Clone, Debug)]
pub struct StinespringDilation {
    pub ancilla_dim: usize,
    /// Orthonormal columns in `H_out ⊗ H_in` spanning the ancilla; `None` for
    /// dilations obtained by embedding into an abstract larger ancilla.
    pub ancilla_embedding: Option<ComplexMatrix>,
    /// `(d_out * ancilla_dim) x d_in`, output factor first.
    pub v: ComplexMatrix,
}

impl StinespringDilation {
    /// `V' = (1 ⊗ Y) V` for an ancilla isometry `Y`.
    pub fn embed(&self, y: &ComplexMatrix, d_out: usize) -> Result<StinespringDilation> {
        if y.ncols() != self.ancilla_dim {
            return Err(Error::DimensionMismatch(format!(
                "ancilla isometry has {} columns, ancilla dimension is {}",
                y.ncols(),
                self.ancilla_dim
            )));
        }
        Ok(StinespringDilation {
            ancilla_dim: y.nrows(),
            ancilla_embedding: None,
            v: kron(&identity(d_out), y) * &self.v,
        })
    }
}

/// `(1_out ⊗ X^{1/2}) (|1_out>> ⊗ 1_in)` for a PSD `X` on `H_out ⊗ H_in`,
/// landing in `H_out ⊗ H_out ⊗ H_in`.
pub(crate) fn sqrt_dilation_full(x_t: &ComplexMatrix, d_out: usize, d_in: usize, tol: f64) -> Result<ComplexMatrix> {
    let root = herm_sqrt(x_t, tol)?;
    Ok(kron(&identity(d_out), &root) * kron(&max_entangled(d_out), &identity(d_in)))
}

/// The compact minimal dilation `V = (1 ⊗ (R^T)^{1/2})(|1_out>> ⊗ 1_in)`,
/// compressed onto the support of `R^T`.
pub fn stinespring_minimal(map: &CpMap, tol: f64) -> Result<StinespringDilation> {
    let (d_in, d_out) = (map.d_in, map.d_out);
    let rt = map.choi().transpose();
    let full = sqrt_dilation_full(&rt, d_out, d_in, tol).map_err(|e| Error::NotCp(e.to_string()))?;
    let basis = support_basis(&rt, tol)?;
    let v = kron(&identity(d_out), &basis.adjoint()) * full;
    Ok(StinespringDilation { ancilla_dim: basis.ncols(), ancilla_embedding: Some(basis), v })
}

/// The alternative form `V = (Ř(R^{1/2}) ⊗ 1_in)(1_in ⊗ |1_in>>)`, uncompressed
/// (in `H_out ⊗ H_out ⊗ H_in`).
pub fn stinespring_via_check_operator(map: &CpMap, tol: f64) -> Result<ComplexMatrix> {
    let (d_in, d_out) = (map.d_in, map.d_out);
    let root = herm_sqrt(map.choi(), tol).map_err(|e| Error::NotCp(e.to_string()))?;
    let check = reshuffle(&root, d_out, d_in);
    Ok(kron(&check, &identity(d_in)) * kron(&identity(d_in), &max_entangled(d_in)))
}

/// The uncompressed minimal dilation in `H_out ⊗ H_out ⊗ H_in`.
pub fn stinespring_uncompressed(map: &CpMap, tol: f64) -> Result<ComplexMatrix> {
    sqrt_dilation_full(&map.choi().transpose(), map.d_out, map.d_in, tol)
        .map_err(|e| Error::NotCp(e.to_string()))
}

/// Reconstruction residual over matrix units plus isometry/contraction checks.
pub fn verify_stinespring(map: &CpMap, dil: &StinespringDilation, tol: f64) -> Result<VerificationReport> {
    let (d_in, d_out) = (map.d_in, map.d_out);
    if dil.v.shape() != (d_out * dil.ancilla_dim, d_in) {
        return Err(Error::DimensionMismatch(format!(
            "dilation V is {}x{}, expected {}x{}",
            dil.v.nrows(),
            dil.v.ncols(),
            d_out * dil.ancilla_dim,
            d_in
        )));
    }
    let v = &dil.v;
    let residuals = matrix_units(d_in).map(|(_, _, e)| {
        let out = partial_trace(&(v * &e * v.adjoint()), &[d_out, dil.ancilla_dim], &[0])?;
        Ok(dist(&out, &map.apply(&e)?))
    });
    let recon = max_of(residuals.collect::<Result<Vec<_>>>()?);

    let mut report = VerificationReport::new();
    report.push("stinespring-reconstruction", recon, tol);
    // V^dag V = Tr_out[R]^T: an isometry exactly for channels, a contraction otherwise
    let vv = v.adjoint() * v;
    report.push("gram-matches-total-effect", dist(&vv, &map.xi()), tol);
    if map.is_trace_preserving(tol) {
        report.push("isometry", isometry_residual(v), tol);
    } else {
        let gap = identity(d_in) - vv;
        let min = HermitianEig::new(&gap, 1e-8)?.min_eigenvalue();
        report.push("contraction", (-min).max(0.0), tol);
    }
    Ok(report)
}
