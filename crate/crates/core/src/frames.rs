//! Finite weighted operator frames `{(mu_i, A_i)}` on a single space.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linmat::{
    c, devectorize, dist, hs_inner, identity, kron, matrix_units, max_entangled, partial_trace,
    paulis, support_projector, trace, vectorize, weyl_heisenberg, ComplexMatrix, HermitianEig, C64,
    ZERO,
};
use crate::report::{max_of, VerificationReport};

#[derive(Clone, Debug)]
pub struct OperatorFrame {
    d: usize,
    members: Vec<(f64, ComplexMatrix)>,
    frame_operator: OnceLock<ComplexMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tightness {
    Tight,
    LeftTight,
    Generic,
}

#[derive(Clone, Debug)]
pub struct TightnessReport {
    pub kind: Tightness,
    /// `K` with frame operator `1 ⊗ K`; present for tight and left-tight frames.
    pub k: Option<ComplexMatrix>,
    /// `‖frame_operator - 1 ⊗ K_candidate‖_F`.
    pub left_tight_residual: f64,
    /// Residuals of the equivalent forms `sum mu A X A^dag = Tr[X K^T] 1` and
    /// `sum mu A ⊗ A^* = |1>><<K^T|`; empty for generic frames.
    pub identities: VerificationReport,
}

impl OperatorFrame {
    pub fn new(members: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let d = members
            .first()
            .ok_or_else(|| Error::Invalid("frame without members".into()))?
            .1
            .nrows();
        for (w, a) in &members {
            if a.shape() != (d, d) || d == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "frame member of shape {:?}, expected {d}x{d}",
                    a.shape()
                )));
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::Invalid(format!("frame weight {w} is not positive")));
            }
        }
        Ok(Self { d, members, frame_operator: OnceLock::new() })
    }

    /// Equal weight `weight` on every operator.
    pub fn uniform(ops: Vec<ComplexMatrix>, weight: f64) -> Result<Self> {
        Self::new(ops.into_iter().map(|a| (weight, a)).collect())
    }

    /// `{I, X, Y, Z}` with weight 1/2 each (frame operator `I_4`).
    pub fn pauli() -> Self {
        Self::uniform(paulis().to_vec(), 0.5).expect("valid")
    }

    /// Clock-and-shift unitaries `X^a Z^b` with weight `1/d` (frame operator `I`).
    pub fn weyl_heisenberg(d: usize) -> Self {
        Self::uniform(weyl_heisenberg(d), 1.0 / d as f64).expect("valid")
    }

    pub fn matrix_units(d: usize) -> Self {
        Self::uniform(matrix_units(d).map(|(_, _, e)| e).collect(), 1.0).expect("valid")
    }

    /// Builds a frame by name: `pauli`, `weyl-heisenberg`, `matrix-units`.
    pub fn named(name: &str, d: usize) -> Result<Self> {
        match name {
            "pauli" if d == 2 => Ok(Self::pauli()),
            "pauli" => Err(Error::Invalid(format!("the Pauli frame acts on d=2, not d={d}"))),
            "weyl-heisenberg" if d >= 1 => Ok(Self::weyl_heisenberg(d)),
            "matrix-units" if d >= 1 => Ok(Self::matrix_units(d)),
            _ => Err(Error::Invalid(format!("unknown frame '{name}' (d={d})"))),
        }
    }

    /// Flattens multi-operator members `(mu_w, {A_wk})` into single operators
    /// indexed by `(w, k)`. Returns the frame and the group index of each member.
    pub fn flattened(groups: Vec<(f64, Vec<ComplexMatrix>)>) -> Result<(Self, Vec<usize>)> {
        let mut owner = Vec::new();
        let mut members = Vec::new();
        for (w, (mu, ops)) in groups.into_iter().enumerate() {
            for a in ops {
                owner.push(w);
                members.push((mu, a));
            }
        }
        Ok((Self::new(members)?, owner))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[(f64, ComplexMatrix)] {
        &self.members
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(|(w, _)| *w)
    }

    pub fn operators(&self) -> impl Iterator<Item = &ComplexMatrix> + '_ {
        self.members.iter().map(|(_, a)| a)
    }

    /// Same operators with every weight multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.members.iter().map(|(w, a)| (w * factor, a.clone())).collect())
    }

    /// `sum_i mu_i |A_i>><<A_i|`.
    pub fn frame_operator(&self) -> &ComplexMatrix {
        self.frame_operator.get_or_init(|| {
            let n = self.d * self.d;
            self.members.iter().fold(ComplexMatrix::zeros(n, n), |acc, (w, a)| {
                let v = vectorize(a);
                acc + &v * v.adjoint() * c(*w, 0.0)
            })
        })
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.operators().all(|a| dist(&(a.adjoint() * a), &identity(self.d)) <= tol)
    }

    /// `|N_i>> = F^+ |A_i>>` with `F^+` the Moore-Penrose inverse of the frame operator.
    pub fn canonical_dual(&self, tol: f64) -> Result<Vec<ComplexMatrix>> {
        let pinv = crate::linmat::herm_pinv(self.frame_operator(), tol)?;
        self.operators()
            .map(|a| devectorize(&(&pinv * vectorize(a)), self.d, self.d))
            .collect()
    }

    /// `‖sum_i mu_i |A_i>><<N_i| - Pi_F‖_F`, zero for the canonical dual.
    pub fn dual_identity_residual(&self, dual: &[ComplexMatrix], tol: f64) -> Result<f64> {
        let n = self.d * self.d;
        let sum = self
            .members
            .iter()
            .zip(dual)
            .fold(ComplexMatrix::zeros(n, n), |acc, ((w, a), b)| {
                acc + vectorize(a) * vectorize(b).adjoint() * c(*w, 0.0)
            });
        Ok(dist(&sum, &support_projector(self.frame_operator(), tol)?))
    }

    /// Expansion coefficients `c_i = mu_i <<N_i|X>>`, weights included, so that
    /// `X = sum_i c_i A_i`.
    pub fn expand(&self, dual: &[ComplexMatrix], x: &ComplexMatrix, tol: f64) -> Result<Vec<C64>> {
        if dual.len() != self.len() || x.shape() != (self.d, self.d) {
            return Err(Error::DimensionMismatch(format!(
                "expanding a {}x{} operator with {} dual members on a {}-member frame of d={}",
                x.nrows(),
                x.ncols(),
                dual.len(),
                self.len(),
                self.d
            )));
        }
        let coeffs: Vec<C64> = self
            .members
            .iter()
            .zip(dual)
            .map(|((w, _), n)| hs_inner(n, x) * c(*w, 0.0))
            .collect();
        let rebuilt = self
            .operators()
            .zip(&coeffs)
            .fold(ComplexMatrix::zeros(self.d, self.d), |acc, (a, k)| acc + a * *k);
        let residual = dist(&rebuilt, x);
        if residual > tol * x.norm().max(1.0) {
            return Err(Error::NotInSpan { residual });
        }
        Ok(coeffs)
    }

    /// Tight (frame operator `kappa * I`), left-tight (`1 ⊗ K`), or generic.
    /// The candidate is `K = Tr_1[F] / d`; `tol` is scaled by `d`.
    pub fn classify_tightness(&self, tol: f64) -> TightnessReport {
        let d = self.d;
        let f = self.frame_operator();
        let k = partial_trace(f, &[d, d], &[1]).expect("square") / c(d as f64, 0.0);
        let left_tight_residual = dist(f, &kron(&identity(d), &k));
        let threshold = tol * d as f64;
        let psd = HermitianEig::new(&k, 1e-8).is_ok_and(|e| e.min_eigenvalue() >= -threshold);
        if left_tight_residual > threshold || !psd {
            return TightnessReport {
                kind: Tightness::Generic,
                k: None,
                left_tight_residual,
                identities: VerificationReport::new(),
            };
        }
        let kappa = trace(&k).re / d as f64;
        let tight = dist(&k, &(identity(d) * c(kappa, 0.0))) <= threshold;
        let identities = self.left_tight_identities(&k, threshold);
        TightnessReport {
            kind: if tight { Tightness::Tight } else { Tightness::LeftTight },
            k: Some(k),
            left_tight_residual,
            identities,
        }
    }

    /// Checks `sum mu A X A^dag = Tr[X K^T] 1` on matrix units and
    /// `sum mu A ⊗ A^* = |1>><<K^T|`.
    pub fn left_tight_identities(&self, k: &ComplexMatrix, tol: f64) -> VerificationReport {
        let d = self.d;
        let kt = k.transpose();
        let channel_form = max_of(matrix_units(d).map(|(_, _, x)| {
            let lhs = self
                .members
                .iter()
                .fold(ComplexMatrix::zeros(d, d), |acc, (w, a)| acc + a * &x * a.adjoint() * c(*w, 0.0));
            dist(&lhs, &(identity(d) * trace(&(&x * &kt))))
        }));
        let tensor_form = {
            let lhs = self.members.iter().fold(ComplexMatrix::zeros(d * d, d * d), |acc, (w, a)| {
                acc + kron(a, &a.map(|z| z.conj())) * c(*w, 0.0)
            });
            dist(&lhs, &(max_entangled(d) * vectorize(&kt).adjoint()))
        };
        let mut rep = VerificationReport::new();
        rep.push("left-tight-channel-form", channel_form, tol);
        rep.push("left-tight-tensor-form", tensor_form, tol);
        rep
    }

    /// `sum_i mu_i A_i X A_i^dag`.
    pub fn twirl(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.members
            .iter()
            .fold(ComplexMatrix::from_element(self.d, self.d, ZERO), |acc, (w, a)| {
                acc + a * x * a.adjoint() * c(*w, 0.0)
            })
    }
}
