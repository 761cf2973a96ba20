//! Finite-group covariant instruments.
//!
//! Groups are given by Cayley tables, representations by explicit matrices and
//! character tables as validated input. Haar averages are uniform averages over
//! the group.

use rand::SeedableRng;

use crate::cpmap::CpMap;
use crate::error::{Error, Result};
use crate::instrument::{Instrument, InstrumentDilation, Outcome};
use crate::linmat::{
    c, dist, hermiticity_residual, identity, isometry_residual, ket, kron, matrix_units,
    partial_trace, support_basis, trace, vectorize, ComplexMatrix, HermitianEig, C64, ZERO,
};
use crate::random::{random_matrix, random_unitary, TestRng};
use crate::report::{max_of, VerificationReport};

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity of `cayley[a][b] = ab`.
    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if cayley.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table is not an n x n table over 0..n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| cayley[e][a] == a && cayley[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| cayley[a][b] == identity && cayley[b][a] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    if cayley[cayley[a][b]][x] != cayley[a][cayley[b][x]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {x})")));
                    }
                }
            }
        }
        Ok(Self { cayley, identity, inverse })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z_n` with element `k` standing for `k mod n`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_cayley(table).expect("cyclic group")
    }

    /// `S_3` with elements listed by [`s3_permutations`], product `(ab)(x) = a(b(x))`.
    pub fn s3() -> Self {
        let perms = s3_permutations();
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        Self::from_cayley(table).expect("S3")
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        !h.is_empty()
            && h.iter().all(|&a| a < self.order())
            && h.iter().all(|&a| h.iter().all(|&b| h.contains(&self.mul(a, self.inv(b)))))
    }

    /// Index of the coset `g H` (from `section`) containing each element.
    pub fn coset_of(&self, section: &[usize], stabilizer: &[usize]) -> Result<Vec<usize>> {
        if !self.is_subgroup(stabilizer) {
            return Err(Error::InvalidGroup("stabilizer is not a subgroup".into()));
        }
        let mut owner = vec![usize::MAX; self.order()];
        for (w, &s) in section.iter().enumerate() {
            if s >= self.order() {
                return Err(Error::InvalidGroup(format!("section element {s} out of range")));
            }
            for &h in stabilizer {
                let g = self.mul(s, h);
                if owner[g] != usize::MAX {
                    return Err(Error::InvalidGroup(format!("section elements share the coset of {g}")));
                }
                owner[g] = w;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::InvalidGroup("section does not cover every coset".into()));
        }
        Ok(owner)
    }

    /// `action[g][w]` = coset of `g * section[w]`.
    pub fn coset_action(&self, section: &[usize], stabilizer: &[usize]) -> Result<Vec<Vec<usize>>> {
        let owner = self.coset_of(section, stabilizer)?;
        Ok((0..self.order())
            .map(|g| section.iter().map(|&s| owner[self.mul(g, s)]).collect())
            .collect())
    }
}

/// The six permutations of `{0, 1, 2}`, identity first.
pub fn s3_permutations() -> [[usize; 3]; 6] {
    [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

#[derive(Clone, Debug)]
pub struct UnitaryRep {
    group: FiniteGroup,
    matrices: Vec<ComplexMatrix>,
    projective: bool,
}

impl UnitaryRep {
    pub fn new(group: FiniteGroup, matrices: Vec<ComplexMatrix>, projective: bool) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let d = matrices[0].nrows();
        for (g, u) in matrices.iter().enumerate() {
            if u.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!("matrix {g} has shape {:?}", u.shape())));
            }
            let r = isometry_residual(u);
            if r > 1e-10 {
                return Err(Error::Invalid(format!("matrix {g} is not unitary (residual {r:.3e})")));
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let prod = &matrices[a] * &matrices[b];
                let target = &matrices[group.mul(a, b)];
                let ok = if projective {
                    (trace(&(target.adjoint() * &prod)).norm() - d as f64).abs() <= 1e-9
                } else {
                    dist(&prod, target) <= 1e-9
                };
                if !ok {
                    return Err(Error::Invalid(format!("representation fails U_{a} U_{b} = U_({a}{b})")));
                }
            }
        }
        Ok(Self { group, matrices, projective })
    }

    pub fn trivial(group: FiniteGroup, d: usize) -> Self {
        let n = group.order();
        Self::new(group, vec![identity(d); n], false).expect("trivial rep")
    }

    /// Left regular representation `U_g |h> = |gh>`.
    pub fn regular(group: FiniteGroup) -> Self {
        let n = group.order();
        let mats = (0..n)
            .map(|g| {
                let mut u = ComplexMatrix::zeros(n, n);
                for h in 0..n {
                    u[(group.mul(g, h), h)] = c(1.0, 0.0);
                }
                u
            })
            .collect();
        Self::new(group, mats, false).expect("regular rep")
    }

    /// Permutation matrices of `S_3` on `C^3`.
    pub fn s3_natural() -> Self {
        let mats = s3_permutations()
            .iter()
            .map(|p| {
                let mut u = ComplexMatrix::zeros(3, 3);
                for (x, &px) in p.iter().enumerate() {
                    u[(px, x)] = c(1.0, 0.0);
                }
                u
            })
            .collect();
        Self::new(FiniteGroup::s3(), mats, false).expect("natural rep")
    }

    /// `Z_n` acting diagonally: `U_k = diag(omega^{k q_j})` for charges `q_j`.
    pub fn cyclic_diagonal(n: usize, charges: &[usize]) -> Self {
        let omega = std::f64::consts::TAU / n as f64;
        let mats = (0..n)
            .map(|k| {
                ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    charges.len(),
                    charges.iter().map(|&q| C64::from_polar(1.0, omega * (k * q) as f64)),
                ))
            })
            .collect();
        Self::new(FiniteGroup::cyclic(n), mats, false).expect("diagonal rep")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }
}

#[derive(Clone, Debug)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    /// `chi(g)` for every group element.
    pub values: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    irreps: Vec<Irrep>,
}

impl CharacterTable {
    /// Validates `chi(e) = dim` and `sum_g chi_mu^*(g) chi_nu(g) = n delta`.
    pub fn new(group: &FiniteGroup, irreps: Vec<Irrep>) -> Result<Self> {
        let n = group.order();
        for ir in &irreps {
            if ir.values.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "irrep '{}' has {} character values for {n} elements",
                    ir.label,
                    ir.values.len()
                )));
            }
            if (ir.values[group.identity()] - c(ir.dim as f64, 0.0)).norm() > 1e-9 {
                return Err(Error::InvalidGroup(format!("irrep '{}' has chi(e) != dim", ir.label)));
            }
        }
        for (i, a) in irreps.iter().enumerate() {
            for (j, b) in irreps.iter().enumerate() {
                let s: C64 = a.values.iter().zip(&b.values).map(|(x, y)| x.conj() * y).sum();
                let expected = if i == j { n as f64 } else { 0.0 };
                if (s - c(expected, 0.0)).norm() > 1e-9 * n as f64 {
                    return Err(Error::InvalidGroup(format!(
                        "characters '{}' and '{}' violate row orthogonality",
                        a.label, b.label
                    )));
                }
            }
        }
        Ok(Self { irreps })
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    /// `Z_n`: characters `chi_k(g) = omega^{kg}`.
    pub fn cyclic(n: usize) -> Self {
        let omega = std::f64::consts::TAU / n as f64;
        let irreps = (0..n)
            .map(|k| Irrep {
                label: format!("chi{k}"),
                dim: 1,
                values: (0..n).map(|g| C64::from_polar(1.0, omega * (k * g % n) as f64)).collect(),
            })
            .collect();
        Self::new(&FiniteGroup::cyclic(n), irreps).expect("cyclic characters")
    }

    /// `S_3` ordered as in [`s3_permutations`]: trivial, sign, standard.
    pub fn s3() -> Self {
        let perms = s3_permutations();
        let fixed = |p: &[usize; 3]| (0..3).filter(|&x| p[x] == x).count() as f64;
        let sign = |p: &[usize; 3]| match fixed(p) as usize {
            3 | 0 => 1.0,
            _ => -1.0,
        };
        let irreps = vec![
            Irrep { label: "trivial".into(), dim: 1, values: vec![c(1.0, 0.0); 6] },
            Irrep { label: "sign".into(), dim: 1, values: perms.iter().map(|p| c(sign(p), 0.0)).collect() },
            Irrep { label: "standard".into(), dim: 2, values: perms.iter().map(|p| c(fixed(p) - 1.0, 0.0)).collect() },
        ];
        Self::new(&FiniteGroup::s3(), irreps).expect("S3 characters")
    }
}

/// `(1/n) sum_g U_g X U_g^dag`.
pub fn group_average(x: &ComplexMatrix, rep: &UnitaryRep) -> Result<ComplexMatrix> {
    let d = rep.dim();
    if x.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!("averaging a {:?} operator over a {d}-dim rep", x.shape())));
    }
    Ok(rep.matrices.iter().fold(ComplexMatrix::zeros(d, d), |acc, u| acc + u * x * u.adjoint())
        / c(rep.order() as f64, 0.0))
}

/// `Pi_mu = (d_mu/n) sum_g chi_mu^*(g) U_g`, dropping irreps absent from the rep.
pub fn isotypic_projectors(rep: &UnitaryRep, chars: &CharacterTable) -> Result<Vec<(String, ComplexMatrix)>> {
    if rep.projective {
        return Err(Error::ProjectiveUnsupported);
    }
    let (n, d) = (rep.order(), rep.dim());
    let mut out = Vec::new();
    for ir in &chars.irreps {
        let p = rep
            .matrices
            .iter()
            .zip(&ir.values)
            .fold(ComplexMatrix::zeros(d, d), |acc, (u, chi)| acc + u * chi.conj())
            * c(ir.dim as f64 / n as f64, 0.0);
        if p.norm() > 1e-9 {
            out.push((ir.label.clone(), p));
        }
    }
    Ok(out)
}

/// Sum, idempotence, orthogonality, Hermiticity and commutation residuals.
pub fn verify_isotypic_projectors(rep: &UnitaryRep, projectors: &[(String, ComplexMatrix)], tol: f64) -> VerificationReport {
    let d = rep.dim();
    let mut report = VerificationReport::new();
    let sum = projectors.iter().fold(ComplexMatrix::zeros(d, d), |acc, (_, p)| acc + p);
    report.push("isotypic-sum", dist(&sum, &identity(d)), tol);
    report.push("isotypic-idempotent", max_of(projectors.iter().map(|(_, p)| dist(&(p * p), p))), tol);
    report.push("isotypic-hermitian", max_of(projectors.iter().map(|(_, p)| hermiticity_residual(p))), tol);
    let mut cross = Vec::new();
    for (i, (_, a)) in projectors.iter().enumerate() {
        for (_, b) in projectors.iter().skip(i + 1) {
            cross.push((a * b).norm());
        }
    }
    report.push("isotypic-orthogonal", max_of(cross), tol);
    let commute = projectors
        .iter()
        .flat_map(|(_, p)| rep.matrices.iter().map(move |u| dist(&(u * p), &(p * u))));
    report.push("isotypic-commutes", max_of(commute), tol);
    report
}

/// One isotypic component written as `H_mu ⊗ C^m`.
#[derive(Clone, Debug)]
pub struct IrrepBlock {
    pub label: String,
    pub dim: usize,
    pub multiplicity: usize,
    /// `rep.dim() x (dim * multiplicity)` isometry; column `a * multiplicity + k`
    /// is basis vector `a` of copy `k`.
    pub basis: ComplexMatrix,
    /// Irrep matrices `U_g^mu` (`dim x dim`), identical on every copy.
    pub matrices: Vec<ComplexMatrix>,
}

#[derive(Clone, Debug)]
pub struct IrrepDecomposition {
    pub blocks: Vec<IrrepBlock>,
}

impl IrrepDecomposition {
    /// Dimension of `⊕_mu H_mu ⊗ C^{d_mu}`.
    pub fn eta_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// `|eta_g> = ⊕_mu sqrt(d_mu) |U_g^mu>>`.
    pub fn eta(&self, g: usize) -> ComplexMatrix {
        let parts: Vec<ComplexMatrix> = self
            .blocks
            .iter()
            .map(|b| vectorize(&b.matrices[g]) * c((b.dim as f64).sqrt(), 0.0))
            .collect();
        let total = self.eta_dim();
        let mut v = ComplexMatrix::zeros(total, 1);
        let mut offset = 0;
        for p in parts {
            v.view_mut((offset, 0), (p.nrows(), 1)).copy_from(&p);
            offset += p.nrows();
        }
        v
    }

    /// `max_g ‖B^dag U_g B - ⊕ (U_g^mu ⊗ 1_m)‖` over all blocks.
    pub fn block_residual(&self, rep: &UnitaryRep) -> f64 {
        max_of(self.blocks.iter().flat_map(|b| {
            rep.matrices.iter().zip(&b.matrices).map(move |(u, um)| {
                dist(&(b.basis.adjoint() * u * &b.basis), &kron(um, &identity(b.multiplicity)))
            })
        }))
    }
}

/// Splits each isotypic component into irreducible copies and aligns their bases.
///
/// Copies are separated by the eigenspaces of a random invariant Hermitian
/// operator restricted to the component; each further copy is aligned with
/// the first through the averaged intertwiner `(1/n) sum_g U_g E_k U_g^{mu dag}`.
pub fn decompose(rep: &UnitaryRep, chars: &CharacterTable, seed: u64, tol: f64) -> Result<IrrepDecomposition> {
    let projectors = isotypic_projectors(rep, chars)?;
    let dims: Vec<usize> = chars
        .irreps
        .iter()
        .filter(|ir| projectors.iter().any(|(l, _)| *l == ir.label))
        .map(|ir| ir.dim)
        .collect();
    let mut g = TestRng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    for ((label, p), d_mu) in projectors.iter().zip(dims) {
        let support = support_basis(p, tol)?;
        let total = support.ncols();
        if total % d_mu != 0 {
            return Err(Error::InvalidGroup(format!(
                "isotypic component '{label}' has rank {total}, not a multiple of {d_mu}"
            )));
        }
        let m = total / d_mu;
        let mut attempt = 0;
        let block = loop {
            attempt += 1;
            if let Some(b) = split_component(rep, &support, d_mu, m, &mut g, tol)? {
                break b;
            }
            if attempt >= 8 {
                return Err(Error::InvalidGroup(format!("could not split isotypic component '{label}'")));
            }
        };
        let (basis, matrices) = block;
        blocks.push(IrrepBlock { label: label.clone(), dim: d_mu, multiplicity: m, basis, matrices });
    }
    Ok(IrrepDecomposition { blocks })
}

type SplitBlock = (ComplexMatrix, Vec<ComplexMatrix>);

fn split_component(
    rep: &UnitaryRep,
    support: &ComplexMatrix,
    d_mu: usize,
    m: usize,
    g: &mut TestRng,
    tol: f64,
) -> Result<Option<SplitBlock>> {
    let n = rep.order();
    let total = d_mu * m;
    // random Hermitian on the component, averaged into the commutant
    let h = random_matrix(g, total, total);
    let h = support * (&h + h.adjoint()) * support.adjoint();
    let avg = group_average(&h, rep)?;
    let eig = HermitianEig::new(&(support.adjoint() * avg * support), 1e-8)?;
    let copies: Vec<ComplexMatrix> = (0..m)
        .map(|k| support * eig.eigenvectors.columns(k * d_mu, d_mu))
        .collect();
    for e in &copies {
        let proj = e * e.adjoint();
        if rep.matrices.iter().any(|u| dist(&(u * &proj), &(&proj * u)) > 1e-7) {
            return Ok(None);
        }
    }
    let first = &copies[0];
    let matrices: Vec<ComplexMatrix> = rep.matrices.iter().map(|u| first.adjoint() * u * first).collect();
    let mut aligned = vec![first.clone()];
    for e in copies.iter().skip(1) {
        let mut found = None;
        for trial in 0..4 {
            let seedop = if trial == 0 { e.clone() } else { e * random_unitary(g, d_mu) };
            let t = rep
                .matrices
                .iter()
                .zip(&matrices)
                .fold(ComplexMatrix::zeros(rep.dim(), d_mu), |acc, (u, um)| acc + u * &seedop * um.adjoint())
                / c(n as f64, 0.0);
            let scale = (t.adjoint() * &t)[(0, 0)].re;
            if scale > tol {
                found = Some(t / c(scale.sqrt(), 0.0));
                break;
            }
        }
        match found {
            Some(j) => aligned.push(j),
            None => return Ok(None),
        }
    }
    let mut basis = ComplexMatrix::zeros(rep.dim(), total);
    for (k, j) in aligned.iter().enumerate() {
        for a in 0..d_mu {
            basis.set_column(a * m + k, &j.column(a));
        }
    }
    Ok(Some((basis, matrices)))
}

/// Block form of the group average, `⊕_mu B_mu (1_mu ⊗ Tr_mu[B_mu^dag X B_mu]/d_mu) B_mu^dag`.
pub fn group_average_blocks(x: &ComplexMatrix, dec: &IrrepDecomposition) -> ComplexMatrix {
    let d = x.nrows();
    dec.blocks.iter().fold(ComplexMatrix::zeros(d, d), |acc, b| {
        let xb = b.basis.adjoint() * x * &b.basis;
        let reduced = partial_trace(&xb, &[b.dim, b.multiplicity], &[1]).expect("block shape") / c(b.dim as f64, 0.0);
        acc + &b.basis * kron(&identity(b.dim), &reduced) * b.basis.adjoint()
    })
}

/// `Z_B ∘ U_g` versus `V_g ∘ Z_{g^{-1} B}` in Choi form for every `(g, B)`;
/// `action[g][i]` is the image of outcome `i` under `g`.
pub fn check_covariance(
    instr: &Instrument,
    rep_in: &UnitaryRep,
    rep_out: &UnitaryRep,
    action: &[Vec<usize>],
    tol: f64,
) -> Result<VerificationReport> {
    let n = rep_in.order();
    if rep_out.order() != n || action.len() != n || action.iter().any(|a| a.len() != instr.len()) {
        return Err(Error::DimensionMismatch("action table does not match group and outcomes".into()));
    }
    if rep_in.dim() != instr.d_in() || rep_out.dim() != instr.d_out() {
        return Err(Error::DimensionMismatch("representation dimensions do not match the instrument".into()));
    }
    let blocks = instr.cjm().blocks;
    let mut worst = 0.0f64;
    for g in 0..n {
        let u = &rep_in.matrices[g];
        let v = &rep_out.matrices[g];
        let left = kron(&identity(instr.d_out()), &u.transpose());
        let right = kron(v, &identity(instr.d_in()));
        let g_inv = rep_in.group.inv(g);
        for (i, z) in blocks.iter().enumerate() {
            let lhs = &left * z * left.adjoint();
            let j = action[g_inv][i];
            let rhs = &right * &blocks[j] * right.adjoint();
            worst = worst.max(dist(&lhs, &rhs));
        }
    }
    let mut report = VerificationReport::new();
    report.push("covariance", worst, tol);
    Ok(report)
}

/// `‖[choi(S_0), V_h ⊗ U_h^*]‖` maximized over the stabilizer.
pub fn stabilizer_residual(s0: &CpMap, rep_in: &UnitaryRep, rep_out: &UnitaryRep, stabilizer: &[usize]) -> f64 {
    let r = s0.choi();
    max_of(stabilizer.iter().map(|&h| {
        let w = kron(&rep_out.matrices[h], &rep_in.matrices[h].map(|z| z.conj()));
        dist(&(r * &w), &(&w * r))
    }))
}

/// Outcomes are the cosets `section[w] G_0`, with weight `|G_0|/|G|` and density
/// `V_s ∘ S_0 ∘ U_s^dag` for `s = section[w]`.
pub fn build_covariant_instrument(
    s0: &CpMap,
    rep_in: &UnitaryRep,
    rep_out: &UnitaryRep,
    section: &[usize],
    stabilizer: &[usize],
    tol: f64,
) -> Result<Instrument> {
    let group = &rep_in.group;
    group.coset_of(section, stabilizer)?;
    let residual = stabilizer_residual(s0, rep_in, rep_out, stabilizer);
    if residual > tol {
        return Err(Error::StabilizerInvarianceFailed { residual });
    }
    let weight = stabilizer.len() as f64 / group.order() as f64;
    let outcomes = section
        .iter()
        .map(|&s| {
            let density = CpMap::unitary(rep_out.matrices[s].clone())
                .compose(&s0.compose(&CpMap::unitary(rep_in.matrices[s].adjoint()))?)?;
            Ok(Outcome::new(s.to_string(), weight, density))
        })
        .collect::<Result<Vec<_>>>()?;
    let instr = Instrument::unchecked(s0.d_in(), s0.d_out(), outcomes)?;
    let residual = instr.normalization_residual();
    if residual > tol {
        return Err(Error::NormalizationFailed { residual });
    }
    Ok(instr)
}

/// Dilation with ancilla `H_0 ⊗ H̃`, `H_0` indexing the Kraus operators of `S_0`.
#[derive(Clone, Debug)]
pub struct GroupDilation {
    /// `H_in -> H_0 ⊗ H_out ⊗ H̃`.
    pub v: ComplexMatrix,
    pub kraus_count: usize,
    pub decomposition: IrrepDecomposition,
    pub eta: Vec<ComplexMatrix>,
    pub report: VerificationReport,
}

impl GroupDilation {
    /// `V_g Tr_{H_0, H̃}[(1 ⊗ 1 ⊗ |eta_g><eta_g|) V rho V^dag] V_g^dag`.
    pub fn apply_group_element(&self, g: usize, rho: &ComplexMatrix, rep_out: &UnitaryRep) -> Result<ComplexMatrix> {
        let d_out = rep_out.dim();
        let e = self.decomposition.eta_dim();
        let eta = &self.eta[g];
        let filter = kron(&identity(self.kraus_count * d_out), &(eta * eta.adjoint()));
        let x = filter * &self.v * rho * self.v.adjoint();
        let out = partial_trace(&x, &[self.kraus_count, d_out, e], &[1])?;
        let vg = &rep_out.matrices[g];
        Ok(vg * out * vg.adjoint())
    }
}

/// `V' = sum_i |i> ⊗ (1/n) sum_g S_i U_g^dag ⊗ |eta_g>`, verified against the
/// covariant instrument built from the same data.
pub fn nonminimal_group_dilation(
    s0: &CpMap,
    rep_in: &UnitaryRep,
    rep_out: &UnitaryRep,
    chars: &CharacterTable,
    section: &[usize],
    stabilizer: &[usize],
    seed: u64,
    tol: f64,
) -> Result<GroupDilation> {
    let instr = build_covariant_instrument(s0, rep_in, rep_out, section, stabilizer, tol)?;
    let dec = decompose(rep_in, chars, seed, tol)?;
    let n = rep_in.order();
    let eta: Vec<ComplexMatrix> = (0..n).map(|g| dec.eta(g)).collect();
    let e = dec.eta_dim();
    let kraus = s0.kraus();
    let (d_in, d_out) = (s0.d_in(), s0.d_out());
    let mut v = ComplexMatrix::zeros(kraus.len() * d_out * e, d_in);
    for (i, s) in kraus.iter().enumerate() {
        let ki = ket(kraus.len(), i);
        for (u, et) in rep_in.matrices.iter().zip(&eta) {
            v += kron(&ki, &kron(&(s * u.adjoint()), et));
        }
    }
    v /= c(n as f64, 0.0);

    let mut report = VerificationReport::new();
    let resolution = eta.iter().fold(ComplexMatrix::zeros(e, e), |acc, x| acc + x * x.adjoint()) / c(n as f64, 0.0);
    report.push("eta-resolution", dist(&resolution, &identity(e)), tol);
    report.push("irrep-blocks", dec.block_residual(rep_in), tol);
    report.push("isometry", isometry_residual(&v), tol);
    let dil = GroupDilation { v, kraus_count: kraus.len(), decomposition: dec, eta, report: VerificationReport::new() };
    let owner = rep_in.group.coset_of(section, stabilizer)?;
    let mut worst = 0.0f64;
    for g in 0..n {
        let density = &instr.outcomes()[owner[g]].density;
        for (_, _, unit) in matrix_units(d_in) {
            worst = worst.max(dist(&dil.apply_group_element(g, &unit, rep_out)?, &density.apply(&unit)?));
        }
    }
    report.push("group-reconstruction", worst, tol);
    Ok(GroupDilation { report, ..dil })
}

/// Naimark dilation of the POVM `Q'_g = |eta_g><eta_g|/n` on `H̃`.
#[derive(Clone, Debug)]
pub struct NaimarkDilation {
    /// `n x dim H̃` isometry with rows `sqrt(d_mu/n) <<U_g^mu|`.
    pub y: ComplexMatrix,
    pub report: VerificationReport,
}

impl NaimarkDilation {
    /// Singleton projector `E_g = |g><g|`.
    pub fn pvm_element(&self, g: usize) -> ComplexMatrix {
        let k = ket(self.y.nrows(), g);
        &k * k.adjoint()
    }
}

pub fn naimark_group(dec: &IrrepDecomposition, order: usize, tol: f64) -> Result<NaimarkDilation> {
    let e = dec.eta_dim();
    let mut y = ComplexMatrix::from_element(order, e, ZERO);
    for g in 0..order {
        let mut offset = 0;
        for b in &dec.blocks {
            let row = vectorize(&b.matrices[g]).adjoint() * c((b.dim as f64 / order as f64).sqrt(), 0.0);
            y.view_mut((g, offset), (1, row.ncols())).copy_from(&row);
            offset += row.ncols();
        }
    }
    let mut report = VerificationReport::new();
    report.push("naimark-isometry", isometry_residual(&y), tol);
    let mut worst = 0.0f64;
    let nimark = NaimarkDilation { y, report: VerificationReport::new() };
    for g in 0..order {
        let eta = dec.eta(g);
        let q = &eta * eta.adjoint() / c(order as f64, 0.0);
        let compressed = nimark.y.adjoint() * nimark.pvm_element(g) * &nimark.y;
        worst = worst.max(dist(&q, &compressed));
    }
    report.push("naimark-compression", worst, tol);
    Ok(NaimarkDilation { report, ..nimark })
}

/// `‖Q̂_{gB} - (V_g^* ⊗ U_g) Q̂_B (V_g^* ⊗ U_g)^dag‖` with effects lifted to
/// `H_out ⊗ H_in` through the ancilla embedding.
pub fn covariant_povm_residual(
    dil: &InstrumentDilation,
    rep_in: &UnitaryRep,
    rep_out: &UnitaryRep,
    action: &[Vec<usize>],
) -> Result<f64> {
    let basis = dil
        .ancilla_embedding
        .as_ref()
        .ok_or_else(|| Error::Invalid("dilation has no ancilla embedding".into()))?;
    let lifted: Vec<ComplexMatrix> = dil.q.iter().map(|q| basis * q * basis.adjoint()).collect();
    let mut worst = 0.0f64;
    for g in 0..rep_in.order() {
        let w = kron(&rep_out.matrices[g].map(|z| z.conj()), &rep_in.matrices[g]);
        for (i, q) in lifted.iter().enumerate() {
            worst = worst.max(dist(&lifted[action[g][i]], &(&w * q * w.adjoint())));
        }
    }
    Ok(worst)
}
