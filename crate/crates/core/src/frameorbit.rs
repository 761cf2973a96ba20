//! Frame-orbit instruments `S_w = B_w ∘ S_0 ∘ A_w^dag`, their feed-forward
//! realization, and teleportation schemes for left-tight frames.
//!
//! Conventions used throughout:
//! * the seed `S_0` maps `H_in -> H_out` and `A_w` acts on `H_in`;
//! * `A_w^dag` denotes the operation `rho -> A_w^dag rho A_w`;
//! * teleportation resources and joint effects use the factor order
//!   (Bob's half, Alice's half, input), see [`FACTOR_ORDER`].

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::cpmap::{sqrt_dilation_full, CpMap};
use crate::error::{Error, Result};
use crate::frames::{OperatorFrame, Tightness};
use crate::instrument::{minimal_dilation, Instrument, InstrumentDilation, Outcome};
use crate::linmat::{
    c, dist, herm_pinv_sqrt, herm_sqrt, identity, kron, kron_all, matrix_units, partial_trace,
    support_basis, support_projector, swap_operator, trace, vectorize, ComplexMatrix, HermitianEig,
};
use crate::report::{max_of, VerificationReport};

/// Tensor-factor order of resource states and joint effects.
pub const FACTOR_ORDER: &str = "bob-half ⊗ alice-half ⊗ input";

/// Largest number of copies accepted by [`symmetric_projector`].
pub const MAX_SYMMETRIC_COPIES: usize = 4;

#[derive(Clone, Debug)]
pub struct FrameOrbitSpec {
    frame: OperatorFrame,
    seed: CpMap,
    conditional: Vec<CpMap>,
}

impl FrameOrbitSpec {
    /// `conditional`: one channel `B_w` on `H_out` per frame member, or `None`
    /// for the identity channel on every outcome.
    pub fn new(frame: OperatorFrame, seed: CpMap, conditional: Option<Vec<CpMap>>) -> Result<Self> {
        if seed.d_in() != frame.d() {
            return Err(Error::DimensionMismatch(format!(
                "seed map input dimension {} differs from frame dimension {}",
                seed.d_in(),
                frame.d()
            )));
        }
        let d_out = seed.d_out();
        let conditional = conditional.unwrap_or_else(|| vec![CpMap::identity(d_out); frame.len()]);
        if conditional.len() != frame.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} conditional channels for {} frame members",
                conditional.len(),
                frame.len()
            )));
        }
        for (i, b) in conditional.iter().enumerate() {
            if b.d_in() != d_out || b.d_out() != d_out {
                return Err(Error::DimensionMismatch(format!(
                    "conditional channel {i} maps {}->{}, expected {d_out}->{d_out}",
                    b.d_in(),
                    b.d_out()
                )));
            }
            let residual = b.trace_preservation_residual();
            if residual > 1e-9 {
                return Err(Error::NotCp(format!(
                    "conditional channel {i} is not trace preserving (residual {residual:.3e})"
                )));
            }
        }
        Ok(Self { frame, seed, conditional })
    }

    /// Conditional channels `B_w(rho) = A_w rho A_w^dag` taken from a unitary frame.
    pub fn with_frame_unitaries(frame: OperatorFrame, seed: CpMap) -> Result<Self> {
        let b = frame.operators().map(|a| CpMap::unitary(a.clone())).collect();
        Self::new(frame, seed, Some(b))
    }

    pub fn frame(&self) -> &OperatorFrame {
        &self.frame
    }

    pub fn seed(&self) -> &CpMap {
        &self.seed
    }

    pub fn conditional(&self) -> &[CpMap] {
        &self.conditional
    }

    pub fn d_in(&self) -> usize {
        self.seed.d_in()
    }

    pub fn d_out(&self) -> usize {
        self.seed.d_out()
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    /// `‖sum_w mu_w A_w xi A_w^dag - I‖_F`.
    pub fn normalization_residual(&self) -> f64 {
        dist(&self.frame.twirl(&xi_of(&self.seed)), &identity(self.d_in()))
    }

    fn require_normalized(&self, tol: f64) -> Result<()> {
        let residual = self.normalization_residual();
        if residual > tol {
            return Err(Error::NormalizationFailed { residual });
        }
        Ok(())
    }

    /// `S_0 ∘ A_w^dag`.
    pub fn reduced_density(&self, w: usize) -> CpMap {
        let a = &self.frame.members()[w].1;
        self.seed.compose(&CpMap::unitary(a.adjoint())).expect("dimensions checked")
    }

    /// `B_w ∘ S_0 ∘ A_w^dag`.
    pub fn density(&self, w: usize) -> CpMap {
        self.conditional[w].compose(&self.reduced_density(w)).expect("dimensions checked")
    }

    fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|w| w.to_string()).collect()
    }
}

/// `xi = sum_k S_k^dag S_k = Tr_out[choi(S_0)^T]`.
pub fn xi_of(seed: &CpMap) -> ComplexMatrix {
    seed.xi()
}

/// Induced POVM densities `A_w xi A_w^dag` (weights excluded).
pub fn povm_densities(spec: &FrameOrbitSpec) -> Vec<ComplexMatrix> {
    let xi = xi_of(&spec.seed);
    spec.frame.operators().map(|a| a * &xi * a.adjoint()).collect()
}

pub fn build_instrument(spec: &FrameOrbitSpec, tol: f64) -> Result<Instrument> {
    spec.require_normalized(tol)?;
    let outcomes = spec
        .frame
        .weights()
        .zip(spec.labels())
        .enumerate()
        .map(|(w, (mu, label))| Outcome::new(label, mu, spec.density(w)))
        .collect();
    Instrument::with_tol(spec.d_in(), spec.d_out(), outcomes, tol)
}

/// The instrument `T` with densities `S_0 ∘ A_w^dag`, equivalent to the
/// frame-orbit instrument up to the conditional channels.
pub fn reduced_instrument(spec: &FrameOrbitSpec, tol: f64) -> Result<Instrument> {
    spec.require_normalized(tol)?;
    let outcomes = spec
        .frame
        .weights()
        .zip(spec.labels())
        .enumerate()
        .map(|(w, (mu, label))| Outcome::new(label, mu, spec.reduced_density(w)))
        .collect();
    Instrument::with_tol(spec.d_in(), spec.d_out(), outcomes, tol)
}

/// Total Choi operator of `T` as the sum of its outcome blocks.
pub fn t_omega_direct(spec: &FrameOrbitSpec) -> ComplexMatrix {
    let n = spec.d_in() * spec.d_out();
    (0..spec.len()).fold(ComplexMatrix::zeros(n, n), |acc, w| {
        acc + spec.reduced_density(w).choi() * c(spec.frame.members()[w].0, 0.0)
    })
}

/// Total Choi operator of `T` as `(S_0 ⊗ I)(E F^* E)` with `F` the frame
/// operator and `E` the swap.
pub fn t_omega_swap(spec: &FrameOrbitSpec) -> ComplexMatrix {
    let d = spec.d_in();
    let e = swap_operator(d);
    let x = &e * spec.frame.frame_operator().map(|z| z.conj()) * &e;
    spec.seed.tensor(&CpMap::identity(d)).apply(&x).expect("dimensions checked")
}

/// Minimal dilation of `T` followed by the conditional channels.
#[derive(Clone, Debug)]
pub struct FeedForward {
    /// Dilation of `T`, with `Q_w = mu_w zeta_w` compressed to the ancilla.
    pub dilation: InstrumentDilation,
    /// Effect densities `zeta_w` on `H_out ⊗ H_in` before compression.
    pub zeta: Vec<ComplexMatrix>,
    pub conditional: Vec<CpMap>,
    pub report: VerificationReport,
}

impl FeedForward {
    /// `B_w(Tr_A[V rho V^dag (1 ⊗ zeta_w)])`, the density `S_w(rho)`.
    pub fn apply_density(&self, w: usize, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d_out = self.conditional[w].d_in();
        let basis = self.dilation.ancilla_embedding.as_ref().expect("minimal dilation");
        let zeta = basis.adjoint() * &self.zeta[w] * basis;
        let v = &self.dilation.v;
        let x = v * rho * v.adjoint() * kron(&identity(d_out), &zeta);
        self.conditional[w].apply(&partial_trace(&x, &[d_out, self.dilation.ancilla_dim], &[0])?)
    }
}

/// `V = (1 ⊗ (T^T)^{1/2})(|1>> ⊗ 1)` on the support of `T^T`, with
/// `zeta_w = (T^{-1/2} (1 ⊗ A_w^*) choi(S_0) (1 ⊗ A_w^T) T^{-1/2})^T`.
pub fn feedforward_realization(spec: &FrameOrbitSpec, tol: f64) -> Result<FeedForward> {
    spec.require_normalized(tol)?;
    let (d_in, d_out) = (spec.d_in(), spec.d_out());
    let t = t_omega_swap(spec);
    let tt = t.transpose();
    let basis = support_basis(&tt, tol)?;
    let v = kron(&identity(d_out), &basis.adjoint()) * sqrt_dilation_full(&tt, d_out, d_in, tol)?;
    let inv = herm_pinv_sqrt(&t, tol)?;
    let s0 = spec.seed.choi();
    let id_out = identity(d_out);
    let zeta: Vec<ComplexMatrix> = spec
        .frame
        .operators()
        .map(|a| {
            let left = kron(&id_out, &a.map(|z| z.conj()));
            let right = kron(&id_out, &a.transpose());
            (&inv * left * s0 * right * &inv).transpose()
        })
        .collect();
    let q = spec
        .frame
        .weights()
        .zip(&zeta)
        .map(|(mu, z)| basis.adjoint() * z * &basis * c(mu, 0.0))
        .collect();
    let dilation = InstrumentDilation {
        ancilla_dim: basis.ncols(),
        ancilla_embedding: Some(basis),
        v,
        q,
        labels: spec.labels(),
    };
    let mut ff = FeedForward { dilation, zeta, conditional: spec.conditional.clone(), report: VerificationReport::new() };

    let mut report = VerificationReport::new();
    report.push("t-omega-two-routes", dist(&t_omega_direct(spec), &t), tol);
    let per_outcome = (0..spec.len())
        .map(|w| {
            let target = spec.density(w);
            max_of_units(d_in, |e| Ok(dist(&ff.apply_density(w, e)?, &target.apply(e)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    report.push("feedforward-reconstruction", max_of(per_outcome), tol);
    let a = ff.dilation.ancilla_dim;
    let total_q = ff.dilation.q.iter().fold(ComplexMatrix::zeros(a, a), |s, q| s + q);
    report.push("povm-normalization", dist(&total_q, &identity(a)), tol);
    report.push("isometry", crate::linmat::isometry_residual(&ff.dilation.v), tol);
    ff.report = report;
    Ok(ff)
}

/// Cross-check: the generic instrument dilation of `T` realizes the same
/// effects as the explicit feed-forward formula.
pub fn feedforward_matches_generic_dilation(spec: &FrameOrbitSpec, ff: &FeedForward, tol: f64) -> Result<f64> {
    let generic = minimal_dilation(&reduced_instrument(spec, tol)?, tol)?;
    if generic.ancilla_dim != ff.dilation.ancilla_dim {
        return Ok(f64::INFINITY);
    }
    // both dilations use the same V up to the ancilla basis, so compare on H_out ⊗ H_in
    let lift = |dil: &InstrumentDilation, q: &ComplexMatrix| {
        let b = dil.ancilla_embedding.as_ref().expect("minimal");
        b * q * b.adjoint()
    };
    Ok(max_of(
        generic
            .q
            .iter()
            .zip(&ff.dilation.q)
            .map(|(g, f)| dist(&lift(&generic, g), &lift(&ff.dilation, f))),
    ))
}

fn max_of_units(d: usize, mut f: impl FnMut(&ComplexMatrix) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for (_, _, e) in matrix_units(d) {
        let r = f(&e)?;
        if r.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Minimal,
    Nonminimal,
}

/// Shared resource, joint POVM and conditional channels realizing
/// `S_w(rho) = B_w(Tr_{2,3}[(resource ⊗ rho)(1 ⊗ zeta_w)])`.
#[derive(Clone, Debug)]
pub struct TeleportationScheme {
    pub kind: SchemeKind,
    /// Density operator on (Bob's half ⊗ Alice's half).
    pub resource: ComplexMatrix,
    pub bob_dim: usize,
    pub alice_dim: usize,
    pub d_in: usize,
    /// POVM densities `zeta_w` on (Alice's half ⊗ input).
    pub effects: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
    pub conditional: Vec<CpMap>,
    /// Expected value of `sum_w mu_w zeta_w`; the identity unless the
    /// resource is rank deficient.
    pub effect_sum_target: ComplexMatrix,
}

impl TeleportationScheme {
    /// Density `S_w(rho)` implemented by the scheme.
    pub fn apply_density(&self, w: usize, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch(format!("input of shape {:?}", rho.shape())));
        }
        let joint = kron(&self.resource, rho) * kron(&identity(self.bob_dim), &self.effects[w]);
        let bob = partial_trace(&joint, &[self.bob_dim, self.alice_dim, self.d_in], &[0])?;
        self.conditional[w].apply(&bob)
    }

    /// Choi operator of the realized density for outcome `w`.
    pub fn realized_choi(&self, w: usize) -> Result<ComplexMatrix> {
        let d_out = self.conditional[w].d_out();
        let mut r = ComplexMatrix::zeros(d_out * self.d_in, d_out * self.d_in);
        for (_, _, e) in matrix_units(self.d_in) {
            r += kron(&self.apply_density(w, &e)?, &e);
        }
        Ok(r)
    }

    pub fn effect_sum(&self) -> ComplexMatrix {
        let n = self.alice_dim * self.d_in;
        self.weights
            .iter()
            .zip(&self.effects)
            .fold(ComplexMatrix::zeros(n, n), |acc, (mu, z)| acc + z * c(*mu, 0.0))
    }

    /// Reconstruction against `densities`, POVM normalization and resource validity.
    pub fn verify(&self, densities: &[CpMap], tol: f64) -> Result<VerificationReport> {
        if densities.len() != self.effects.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} densities for {} scheme outcomes",
                densities.len(),
                self.effects.len()
            )));
        }
        let mut report = VerificationReport::new();
        let per_outcome = densities
            .iter()
            .enumerate()
            .map(|(w, s)| max_of_units(self.d_in, |e| Ok(dist(&self.apply_density(w, e)?, &s.apply(e)?))))
            .collect::<Result<Vec<_>>>()?;
        report.push("teleportation-reconstruction", max_of(per_outcome), tol);
        report.push("joint-povm-normalization", dist(&self.effect_sum(), &self.effect_sum_target), tol);
        report.push("resource-trace", (trace(&self.resource).re - 1.0).abs(), tol);
        let min_eig = HermitianEig::new(&self.resource, 1e-8)?.min_eigenvalue();
        report.push("resource-positivity", (-min_eig).max(0.0), tol);
        Ok(report)
    }
}

fn left_tight_k(spec: &FrameOrbitSpec, tol: f64) -> Result<ComplexMatrix> {
    let rep = spec.frame.classify_tightness(tol);
    match rep.kind {
        Tightness::Generic => Err(Error::NotLeftTight { residual: rep.left_tight_residual }),
        _ => Ok(rep.k.expect("present for left-tight frames")),
    }
}

/// Minimal scheme: resource `|sigma^{1/2}>>` with `sigma = S_0(K^T)` and
/// `zeta_w = (sigma^{-1/2 T} ⊗ A_w) choi(S_0)^T (sigma^{-1/2 T} ⊗ A_w^dag)`.
pub fn tele_minimal(spec: &FrameOrbitSpec, tol: f64) -> Result<TeleportationScheme> {
    let k = left_tight_k(spec, tol)?;
    spec.require_normalized(tol)?;
    let (d_in, d_out) = (spec.d_in(), spec.d_out());
    let sigma = spec.seed.apply(&k.transpose())?;
    let root = vectorize(&herm_sqrt(&sigma, tol)?);
    let resource = &root * root.adjoint();
    let s = herm_pinv_sqrt(&sigma, tol)?.transpose();
    let s0t = spec.seed.choi().transpose();
    let effects = spec
        .frame
        .operators()
        .map(|a| kron(&s, a) * &s0t * kron(&s, &a.adjoint()))
        .collect();
    let target = kron(&support_projector(&sigma.transpose(), tol)?, &identity(d_in));
    Ok(TeleportationScheme {
        kind: SchemeKind::Minimal,
        resource,
        bob_dim: d_out,
        alice_dim: d_out,
        d_in,
        effects,
        weights: spec.frame.weights().collect(),
        conditional: spec.conditional.clone(),
        effect_sum_target: target,
    })
}

/// Non-minimal scheme: mixed resource `(S_0 ⊗ I)(|K^{T 1/2}>><<K^{T 1/2}|)` and
/// rank-one effects `|K^{-1/2} A_w^T>><<K^{-1/2} A_w^T|`.
///
/// For singular `K` the pseudo-inverse is used; outcomes whose `A_w^T` leaks
/// outside the support of `K` are reported by [`nonminimal_support_report`].
pub fn tele_nonminimal(spec: &FrameOrbitSpec, tol: f64) -> Result<TeleportationScheme> {
    let k = left_tight_k(spec, tol)?;
    spec.require_normalized(tol)?;
    let (d_in, d_out) = (spec.d_in(), spec.d_out());
    let kt_root = vectorize(&herm_sqrt(&k.transpose(), tol)?);
    let resource = spec
        .seed
        .tensor(&CpMap::identity(d_in))
        .apply(&(&kt_root * kt_root.adjoint()))?;
    let k_inv = herm_pinv_sqrt(&k, tol)?;
    let effects = spec
        .frame
        .operators()
        .map(|a| {
            let v = vectorize(&(&k_inv * a.transpose()));
            &v * v.adjoint()
        })
        .collect();
    let target = kron(&support_projector(&k, tol)?, &identity(d_in));
    Ok(TeleportationScheme {
        kind: SchemeKind::Nonminimal,
        resource,
        bob_dim: d_out,
        alice_dim: d_in,
        d_in,
        effects,
        weights: spec.frame.weights().collect(),
        conditional: spec.conditional.clone(),
        effect_sum_target: target,
    })
}

/// `‖(I - Pi_K) A_w^T‖_F` per outcome.
pub fn nonminimal_support_report(spec: &FrameOrbitSpec, tol: f64) -> Result<VerificationReport> {
    let k = left_tight_k(spec, tol)?;
    let leak = identity(spec.d_in()) - support_projector(&k, tol)?;
    let mut rep = VerificationReport::new();
    for (w, a) in spec.frame.operators().enumerate() {
        rep.push(format!("support-condition[{w}]"), (&leak * a.transpose()).norm(), tol);
    }
    Ok(rep)
}

/// Builds the frame-orbit instrument and both schemes, and verifies each
/// scheme against the instrument densities plus their mutual agreement.
pub fn verify_tele_schemes(spec: &FrameOrbitSpec, tol: f64) -> Result<(TeleportationScheme, TeleportationScheme, VerificationReport)> {
    let densities: Vec<CpMap> = (0..spec.len()).map(|w| spec.density(w)).collect();
    let min = tele_minimal(spec, tol)?;
    let non = tele_nonminimal(spec, tol)?;
    let mut report = VerificationReport::new();
    for (tag, scheme) in [("minimal", &min), ("nonminimal", &non)] {
        for check in scheme.verify(&densities, tol)?.checks {
            report.push(format!("{tag}:{}", check.name), check.residual, check.tolerance);
        }
    }
    let cross = (0..spec.len())
        .map(|w| Ok(dist(&min.realized_choi(w)?, &non.realized_choi(w)?)))
        .collect::<Result<Vec<_>>>()?;
    report.push("minimal-vs-nonminimal", max_of(cross), tol);
    Ok((min, non, report))
}

#[derive(Clone, Debug)]
pub struct CovariantSchemes {
    pub spec: FrameOrbitSpec,
    pub minimal: TeleportationScheme,
    pub nonminimal: TeleportationScheme,
    pub report: VerificationReport,
}

/// Teleportation schemes for a channel `C` covariant under a tight unitary
/// frame: `C ∘ U_w = B_w ∘ C`. The frame weights are rescaled to a
/// probability measure, so every outcome density equals `C`.
pub fn covariant_channel_schemes(
    channel: &CpMap,
    frame: &OperatorFrame,
    conditional: Vec<CpMap>,
    tol: f64,
) -> Result<CovariantSchemes> {
    let tight = frame.classify_tightness(tol);
    if tight.kind != Tightness::Tight || !frame.is_unitary(tol) {
        let residual = match tight.kind {
            Tightness::Tight => max_of(frame.operators().map(|a| dist(&(a.adjoint() * a), &identity(frame.d())))),
            _ => tight.left_tight_residual,
        };
        return Err(Error::NotTight { residual });
    }
    let total_weight: f64 = frame.weights().sum();
    let frame = frame.rescaled(1.0 / total_weight)?;
    let spec = FrameOrbitSpec::new(frame, channel.clone(), Some(conditional))?;
    let covariance = max_of(
        spec.frame
            .operators()
            .zip(&spec.conditional)
            .map(|(u, b)| {
                let lhs = channel.compose(&CpMap::unitary(u.clone()))?;
                let rhs = b.compose(channel)?;
                lhs.distance_on_basis(&rhs)
            })
            .collect::<Result<Vec<_>>>()?,
    );
    if !(covariance <= tol) {
        return Err(Error::NotCovariant { residual: covariance });
    }

    let minimal = tele_minimal(&spec, tol)?;
    let nonminimal = tele_nonminimal(&spec, tol)?;
    let d = channel.d_in() as f64;
    let copies = vec![channel.clone(); spec.len()];
    let mut report = VerificationReport::new();
    report.push("covariance", covariance, tol);
    for (tag, scheme) in [("minimal", &minimal), ("nonminimal", &nonminimal)] {
        for check in scheme.verify(&copies, tol)?.checks {
            report.push(format!("{tag}:{}", check.name), check.residual, check.tolerance);
        }
        let chois = (0..spec.len()).map(|w| scheme.realized_choi(w)).collect::<Result<Vec<_>>>()?;
        let spread = max_of(chois.iter().tuple_combinations().map(|(a, b)| dist(a, b)));
        report.push(format!("{tag}:outcome-independence"), spread, tol);
    }
    let sigma = channel.apply(&identity(channel.d_in()))? / c(d, 0.0);
    let root = vectorize(&herm_sqrt(&sigma, tol)?);
    report.push("minimal:resource-is-c(1)/d", dist(&minimal.resource, &(&root * root.adjoint())), tol);
    report.push("nonminimal:resource-is-choi/d", dist(&nonminimal.resource, &(channel.choi() / c(d, 0.0))), tol);
    Ok(CovariantSchemes { spec, minimal, nonminimal, report })
}

/// `P_M^+ = (1/M!) sum_pi W_pi` on `(C^d)^{⊗M}`.
pub fn symmetric_projector(d: usize, m: usize) -> Result<ComplexMatrix> {
    if m > MAX_SYMMETRIC_COPIES || d.checked_pow(m as u32).is_none_or(|n| n > 4096) {
        return Err(Error::SizeOverflow(m));
    }
    if d == 0 || m == 0 {
        return Err(Error::Invalid(format!("symmetric projector needs d >= 1 and M >= 1 (d={d}, M={m})")));
    }
    let n = d.pow(m as u32);
    let mut p = ComplexMatrix::zeros(n, n);
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    for idx in 0..n {
        let digits = to_digits(idx, d, m);
        for perm in &perms {
            let permuted: Vec<usize> = perm.iter().map(|&k| digits[k]).collect();
            p[(from_digits(&permuted, d), idx)] += c(1.0, 0.0);
        }
    }
    Ok(p / c(perms.len() as f64, 0.0))
}

/// Isometry whose columns span the symmetric subspace of `(C^d)^{⊗M}`.
pub fn symmetric_isometry(d: usize, m: usize) -> Result<ComplexMatrix> {
    support_basis(&symmetric_projector(d, m)?, 1e-10)
}

/// `binomial(M + d - 1, d - 1)`.
pub fn symmetric_dim(d: usize, m: usize) -> usize {
    (1..d).fold(1usize, |acc, k| acc * (m + k) / k)
}

fn to_digits(mut idx: usize, d: usize, m: usize) -> Vec<usize> {
    let mut digits = vec![0; m];
    for slot in digits.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    digits
}

fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// `U^{⊗M}`.
pub fn tensor_power(u: &ComplexMatrix, m: usize) -> ComplexMatrix {
    kron_all(std::iter::repeat_n(u, m))
}
