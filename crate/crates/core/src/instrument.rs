//! Finite-outcome quantum instruments and their minimal ancilla-POVM dilation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::cpmap::{sqrt_dilation_full, CpMap};
use crate::error::{Error, Result};
use crate::linmat::{
    c, dist, herm_pinv_sqrt, identity, isometry_residual, kron, matrix_units, partial_trace,
    support_basis, trace, ComplexMatrix, HermitianEig,
};
use crate::random::rng;
use crate::report::{max_of, VerificationReport};

/// Tolerance for the trace-preservation check performed by [`Instrument::new`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Probabilities below this are treated as zero when sampling.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub label: String,
    /// Weight `mu_i >= 0`; the outcome's map is `mu_i * density`.
    pub weight: f64,
    pub density: CpMap,
}

impl Outcome {
    pub fn new(label: impl Into<String>, weight: f64, density: CpMap) -> Self {
        Self { label: label.into(), weight, density }
    }

    /// The outcome's operation `Z_i = mu_i S_i`.
    pub fn operation(&self) -> CpMap {
        self.density.scaled(self.weight)
    }
}

#[derive(Clone, Debug)]
pub struct Instrument {
    d_in: usize,
    d_out: usize,
    outcomes: Vec<Outcome>,
}

/// Choi blocks `Z_i = mu_i choi(S_i)` together with their sum.
#[derive(Clone, Debug)]
pub struct Cjm {
    pub blocks: Vec<ComplexMatrix>,
    pub total: ComplexMatrix,
}

impl Instrument {
    /// Validates shapes, weights, and trace preservation of the total map.
    pub fn new(d_in: usize, d_out: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        Self::with_tol(d_in, d_out, outcomes, NORMALIZATION_TOL)
    }

    pub fn with_tol(d_in: usize, d_out: usize, outcomes: Vec<Outcome>, tol: f64) -> Result<Self> {
        let instr = Self::unchecked(d_in, d_out, outcomes)?;
        let residual = instr.normalization_residual();
        if !(residual <= tol) {
            return Err(Error::NotNormalized { residual });
        }
        Ok(instr)
    }

    /// Shape and weight validation only; normalization is not enforced.
    pub fn unchecked(d_in: usize, d_out: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Invalid("instrument without outcomes".into()));
        }
        for o in &outcomes {
            if o.density.d_in() != d_in || o.density.d_out() != d_out {
                return Err(Error::DimensionMismatch(format!(
                    "outcome '{}' maps {}->{}, instrument is {d_in}->{d_out}",
                    o.label,
                    o.density.d_in(),
                    o.density.d_out()
                )));
            }
            if !(o.weight.is_finite() && o.weight >= 0.0) {
                return Err(Error::Invalid(format!("outcome '{}' has weight {}", o.label, o.weight)));
            }
        }
        Ok(Self { d_in, d_out, outcomes })
    }

    /// A channel viewed as a one-outcome instrument.
    pub fn from_channel(channel: CpMap) -> Result<Self> {
        Self::new(channel.d_in(), channel.d_out(), vec![Outcome::new("0", 1.0, channel)])
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    pub fn cjm(&self) -> Cjm {
        let n = self.d_in * self.d_out;
        let blocks: Vec<_> = self
            .outcomes
            .iter()
            .map(|o| o.density.choi() * c(o.weight, 0.0))
            .collect();
        let total = blocks.iter().fold(ComplexMatrix::zeros(n, n), |a, b| a + b);
        Cjm { blocks, total }
    }

    /// `‖Tr_out[Z_total] - I‖_F`.
    pub fn normalization_residual(&self) -> f64 {
        let p = partial_trace(&self.cjm().total, &[self.d_out, self.d_in], &[1]).expect("shape");
        dist(&p, &identity(self.d_in))
    }

    /// Effects `P_i = Tr_out[Z_i^T]`.
    pub fn povm(&self) -> Vec<ComplexMatrix> {
        self.outcomes
            .iter()
            .map(|o| o.density.xi() * c(o.weight, 0.0))
            .collect()
    }

    /// The total channel `sum_i mu_i S_i`, represented by its Choi operator.
    pub fn total_channel(&self) -> CpMap {
        CpMap::from_choi(self.cjm().total, self.d_in, self.d_out).expect("sum of PSD blocks")
    }

    /// Unnormalized conditional output `Z_i(rho) = mu_i S_i(rho)`.
    pub fn apply_outcome(&self, i: usize, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let o = &self.outcomes[i];
        Ok(o.density.apply(rho)? * c(o.weight, 0.0))
    }

    /// Born probabilities `p_i = mu_i Tr[S_i(rho)]`.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|i| Ok(trace(&self.apply_outcome(i, rho)?).re))
            .collect()
    }

    /// Draws one outcome and returns it with its posterior state.
    pub fn sample<R: Rng + ?Sized>(&self, rho: &ComplexMatrix, rng: &mut R) -> Result<Sample> {
        let (dist, outputs) = self.outcome_distribution(rho)?;
        let i = dist.sample(rng);
        Ok(self.finish_sample(i, &outputs[i]))
    }

    pub fn sample_seeded(&self, rho: &ComplexMatrix, seed: u64) -> Result<Sample> {
        self.sample(rho, &mut rng(seed))
    }

    /// Outcome counts over `n` draws from one seeded stream.
    pub fn sample_counts(&self, rho: &ComplexMatrix, n: usize, seed: u64) -> Result<Vec<usize>> {
        let (dist, _) = self.outcome_distribution(rho)?;
        let mut g = rng(seed);
        let mut counts = vec![0usize; self.len()];
        for _ in 0..n {
            counts[dist.sample(&mut g)] += 1;
        }
        Ok(counts)
    }

    fn outcome_distribution(&self, rho: &ComplexMatrix) -> Result<(WeightedIndex<f64>, Vec<ComplexMatrix>)> {
        let outputs = (0..self.len())
            .map(|i| self.apply_outcome(i, rho))
            .collect::<Result<Vec<_>>>()?;
        let probs: Vec<f64> = outputs
            .iter()
            .map(|o| {
                let p = trace(o).re;
                if p > DEGENERATE_PROBABILITY { p } else { 0.0 }
            })
            .collect();
        let dist = WeightedIndex::new(&probs).map_err(|_| Error::DegenerateState)?;
        Ok((dist, outputs))
    }

    fn finish_sample(&self, i: usize, output: &ComplexMatrix) -> Sample {
        let p = trace(output).re;
        Sample {
            index: i,
            label: self.outcomes[i].label.clone(),
            probability: p,
            posterior: output / c(p, 0.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub index: usize,
    pub label: String,
    pub probability: f64,
    pub posterior: ComplexMatrix,
}

/// Rebuilds an instrument from its Choi blocks: `mu_i = Tr Z_i`, density
/// `Z_i / mu_i`. Blocks with `mu_i <= tol` are dropped.
pub fn density_from_cjm(
    blocks: &[ComplexMatrix],
    labels: Option<&[String]>,
    d_in: usize,
    d_out: usize,
    tol: f64,
) -> Result<Instrument> {
    if let Some(l) = labels {
        if l.len() != blocks.len() {
            return Err(Error::DimensionMismatch(format!("{} labels for {} blocks", l.len(), blocks.len())));
        }
    }
    let mut outcomes = Vec::new();
    for (i, z) in blocks.iter().enumerate() {
        let eig = HermitianEig::new(z, tol)?;
        if eig.min_eigenvalue() < -tol * eig.max_abs_eigenvalue().max(1.0) {
            return Err(Error::NotPsd { min_eigenvalue: eig.min_eigenvalue() });
        }
        let mu = trace(z).re;
        if mu <= tol {
            continue;
        }
        let label = labels.map_or_else(|| i.to_string(), |l| l[i].clone());
        let density = CpMap::from_choi_with_tol(z / c(mu, 0.0), d_in, d_out, tol)?;
        outcomes.push(Outcome { label, weight: mu, density });
    }
    if outcomes.is_empty() {
        let residual = identity(d_in).norm();
        return Err(Error::NotNormalized { residual });
    }
    Instrument::with_tol(d_in, d_out, outcomes, tol.max(NORMALIZATION_TOL))
}

/// Isometry `V: H_in -> H_out ⊗ H_A` and POVM `{Q_i}` on `H_A` with
/// `Z_i(rho) = Tr_A[V rho V^dag (1 ⊗ Q_i)]`.
#[derive(Clone, Debug)]
pub struct InstrumentDilation {
    pub ancilla_dim: usize,
    /// Orthonormal columns in `H_out ⊗ H_in` spanning the ancilla, when the
    /// ancilla is a subspace of that space.
    pub ancilla_embedding: Option<ComplexMatrix>,
    pub v: ComplexMatrix,
    pub q: Vec<ComplexMatrix>,
    pub labels: Vec<String>,
}

impl InstrumentDilation {
    /// The dilation `((1 ⊗ Y) V, {Q'_i})` on a larger ancilla. It realizes the
    /// same instrument whenever `Y^dag Q'_i Y = Q_i`.
    pub fn embed(&self, y: &ComplexMatrix, q_prime: Vec<ComplexMatrix>, d_out: usize) -> Result<InstrumentDilation> {
        if y.ncols() != self.ancilla_dim || q_prime.len() != self.q.len() {
            return Err(Error::DimensionMismatch(format!(
                "embedding {}x{} with {} effects into ancilla {} with {} effects",
                y.nrows(),
                y.ncols(),
                q_prime.len(),
                self.ancilla_dim,
                self.q.len()
            )));
        }
        if let Some(bad) = q_prime.iter().find(|q| q.shape() != (y.nrows(), y.nrows())) {
            return Err(Error::DimensionMismatch(format!("effect of shape {:?}", bad.shape())));
        }
        Ok(InstrumentDilation {
            ancilla_dim: y.nrows(),
            ancilla_embedding: None,
            v: kron(&identity(d_out), y) * &self.v,
            q: q_prime,
            labels: self.labels.clone(),
        })
    }

    /// `max_i ‖Y^dag Q'_i Y - Q_i‖_F`.
    pub fn compression_residual(&self, y: &ComplexMatrix, q_prime: &[ComplexMatrix]) -> f64 {
        max_of(self.q.iter().zip(q_prime).map(|(q, qp)| dist(&(y.adjoint() * qp * y), q)))
    }

    /// `Tr_A[V rho V^dag (1 ⊗ Q_i)]`.
    pub fn apply_outcome(&self, i: usize, rho: &ComplexMatrix, d_out: usize) -> Result<ComplexMatrix> {
        let x = &self.v * rho * self.v.adjoint() * kron(&identity(d_out), &self.q[i]);
        partial_trace(&x, &[d_out, self.ancilla_dim], &[0])
    }
}

/// Minimal dilation: `V = (1 ⊗ (Z^T)^{1/2})(|1_out>> ⊗ 1_in)` and
/// `Q_i = (Z^{-1/2} Z_i Z^{-1/2})^T`, both compressed to the support of `Z^T`
/// where `Z` is the total Choi operator.
pub fn minimal_dilation(instr: &Instrument, tol: f64) -> Result<InstrumentDilation> {
    let residual = instr.normalization_residual();
    if !(residual <= tol.max(NORMALIZATION_TOL)) {
        return Err(Error::NotNormalized { residual });
    }
    let (d_in, d_out) = (instr.d_in, instr.d_out);
    let cjm = instr.cjm();
    let zt = cjm.total.transpose();
    let basis = support_basis(&zt, tol)?;
    let v = kron(&identity(d_out), &basis.adjoint()) * sqrt_dilation_full(&zt, d_out, d_in, tol)?;
    let inv = herm_pinv_sqrt(&cjm.total, tol)?;
    let q = cjm
        .blocks
        .iter()
        .map(|z| basis.adjoint() * (&inv * z * &inv).transpose() * &basis)
        .collect();
    Ok(InstrumentDilation {
        ancilla_dim: basis.ncols(),
        ancilla_embedding: Some(basis),
        v,
        q,
        labels: instr.labels(),
    })
}

/// Per-outcome reconstruction over matrix units, POVM normalization and
/// isometry residuals.
pub fn verify_dilation(instr: &Instrument, dil: &InstrumentDilation, tol: f64) -> Result<VerificationReport> {
    let (d_in, d_out) = (instr.d_in, instr.d_out);
    let a = dil.ancilla_dim;
    if dil.v.shape() != (d_out * a, d_in) || dil.q.len() != instr.len() {
        return Err(Error::DimensionMismatch(format!(
            "dilation V {}x{} with {} effects for a {}-outcome instrument {d_in}->{d_out}",
            dil.v.nrows(),
            dil.v.ncols(),
            dil.q.len(),
            instr.len()
        )));
    }
    let mut report = VerificationReport::new();
    let mut per_outcome = Vec::with_capacity(instr.len());
    for i in 0..instr.len() {
        let mut worst = 0.0f64;
        for (_, _, e) in matrix_units(d_in) {
            let got = dil.apply_outcome(i, &e, d_out)?;
            worst = worst.max(dist(&got, &instr.apply_outcome(i, &e)?));
        }
        per_outcome.push(worst);
        report.push(format!("dilation-reconstruction[{}]", instr.outcomes[i].label), worst, tol);
    }
    report.push("dilation-reconstruction", max_of(per_outcome), tol);
    let total_q = dil.q.iter().fold(ComplexMatrix::zeros(a, a), |s, q| s + q);
    report.push("povm-normalization", dist(&total_q, &identity(a)), tol);
    let min_eig = max_of(
        dil.q
            .iter()
            .map(|q| HermitianEig::new(q, 1e-8).map_or(f64::INFINITY, |e| (-e.min_eigenvalue()).max(0.0))),
    );
    report.push("povm-positivity", min_eig, tol);
    report.push("isometry", isometry_residual(&dil.v), tol);
    Ok(report)
}
