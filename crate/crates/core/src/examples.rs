//! Covariant channels realized by teleportation schemes: ideal teleportation,
//! universal telecloning and the universal NOT.
//!
//! Multi-copy spaces are handled in compressed coordinates: an operator on the
//! symmetric subspace of `(C^d)^{⊗N}` is stored as a `d_N^+ x d_N^+` matrix in
//! the occupation-number basis returned by [`symmetric_basis`].
//!
//! Haar integrals over SU(2) are replaced by averages over finite subgroups
//! that are unitary designs: the binary octahedral group (48 elements, a
//! 3-design) and the binary icosahedral group (120 elements, a 5-design).

use rand::Rng;

use crate::cpmap::CpMap;
use crate::error::{Error, Result};
use crate::frameorbit::{
    covariant_channel_schemes, symmetric_dim, symmetric_projector, tensor_power, CovariantSchemes,
    FrameOrbitSpec, MAX_SYMMETRIC_COPIES,
};
use crate::frames::OperatorFrame;
use crate::linmat::{c, ket, kron, partial_trace, ComplexMatrix, C64};
use crate::random::rng;

/// Orthonormal columns spanning the symmetric subspace of `(C^d)^{⊗M}`, one per
/// occupation pattern, ordered by the sorted digit tuple.
pub fn symmetric_basis(d: usize, m: usize) -> Result<ComplexMatrix> {
    let p = symmetric_projector(d, m)?;
    let n = d.pow(m as u32);
    let mut cols = Vec::with_capacity(symmetric_dim(d, m));
    for idx in 0..n {
        let mut digits = vec![0; m];
        let mut k = idx;
        for slot in digits.iter_mut().rev() {
            *slot = k % d;
            k /= d;
        }
        if digits.windows(2).all(|w| w[0] <= w[1]) {
            let v = p.column(idx).into_owned();
            let norm = v.norm();
            cols.push(v / c(norm, 0.0));
        }
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

/// `W^dag U^{⊗M} W` on the symmetric subspace.
pub fn symmetric_power(u: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    let w = symmetric_basis(u.nrows(), m)?;
    Ok(w.adjoint() * tensor_power(u, m) * &w)
}

/// Universal `N -> M` cloner `(d_N^+/d_M^+) P_M^+ (rho ⊗ I^{⊗(M-N)}) P_M^+` in
/// compressed coordinates, with Kraus operators `sqrt(c) W_M^dag (W_N ⊗ |k>)`.
pub fn cloner(d: usize, n: usize, m: usize) -> Result<CpMap> {
    if n == 0 || n > m {
        return Err(Error::Invalid(format!("cloning needs 1 <= N <= M (N={n}, M={m})")));
    }
    if m > MAX_SYMMETRIC_COPIES {
        return Err(Error::SizeOverflow(m));
    }
    let wn = symmetric_basis(d, n)?;
    let wm = symmetric_basis(d, m)?;
    let extra = d.pow((m - n) as u32);
    let scale = c((symmetric_dim(d, n) as f64 / symmetric_dim(d, m) as f64).sqrt(), 0.0);
    let kraus = (0..extra)
        .map(|k| wm.adjoint() * kron(&wn, &ket(extra, k)) * scale)
        .collect();
    CpMap::from_kraus(kraus)
}

/// `<psi| Tr_{2..M}[W_M C(|psi^N><psi^N|) W_M^dag] |psi>` for a compressed cloner.
pub fn single_clone_fidelity(channel: &CpMap, psi: &ComplexMatrix, n: usize, m: usize) -> Result<f64> {
    let d = psi.nrows();
    let wn = symmetric_basis(d, n)?;
    let wm = symmetric_basis(d, m)?;
    let input = wn.adjoint() * tensor_power(psi, n);
    let out = wm.clone() * channel.apply(&(&input * input.adjoint()))? * wm.adjoint();
    let rest = d.pow((m - 1) as u32);
    let one = partial_trace(&out, &[d, rest], &[0])?;
    Ok((psi.adjoint() * one * psi)[(0, 0)].re)
}

/// Closed form of the optimal single-clone fidelity for the universal cloner.
pub fn cloning_fidelity_closed_form(d: usize, n: usize, m: usize) -> f64 {
    let (d, n, m) = (d as f64, n as f64, m as f64);
    (n * (m + d) + m - n) / (m * (n + d))
}

/// Ideal teleportation: the identity channel with the Weyl-Heisenberg frame
/// and conditional corrections `U_w`.
pub fn ideal_teleportation(d: usize, tol: f64) -> Result<CovariantSchemes> {
    let frame = OperatorFrame::weyl_heisenberg(d);
    let b = frame.operators().map(|u| CpMap::unitary(u.clone())).collect();
    covariant_channel_schemes(&CpMap::identity(d), &frame, b, tol)
}

#[derive(Clone, Debug)]
pub struct TelecloningExample {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub channel: CpMap,
    pub schemes: CovariantSchemes,
    /// Single-clone fidelity on `|0>`.
    pub fidelity: f64,
    pub frame_name: &'static str,
}

/// Telecloning `C_{N,M}` as a tele-channel. For `N = 1` the input frame is the
/// Weyl-Heisenberg frame; for `N > 1` (qubits only) it is the binary
/// icosahedral group acting on the symmetric subspace.
pub fn telecloning(d: usize, n: usize, m: usize, tol: f64) -> Result<TelecloningExample> {
    let channel = cloner(d, n, m)?;
    let (ops, frame_name): (Vec<(ComplexMatrix, ComplexMatrix)>, _) = if n == 1 {
        let ops = crate::linmat::weyl_heisenberg(d)
            .into_iter()
            .map(|u| Ok((u.clone(), symmetric_power(&u, m)?)))
            .collect::<Result<_>>()?;
        (ops, "weyl-heisenberg")
    } else if d == 2 {
        let ops = binary_icosahedral()
            .iter()
            .map(|g| Ok((symmetric_power(g, n)?, symmetric_power(g, m)?)))
            .collect::<Result<_>>()?;
        (ops, "binary-icosahedral")
    } else {
        return Err(Error::Invalid(format!(
            "telecloning with N > 1 is available for qubits only (d={d}, N={n})"
        )));
    };
    let weight = 1.0 / ops.len() as f64;
    let frame = OperatorFrame::uniform(ops.iter().map(|(u, _)| u.clone()).collect(), weight)?;
    let b = ops.into_iter().map(|(_, v)| CpMap::unitary(v)).collect();
    let schemes = covariant_channel_schemes(&channel, &frame, b, tol)?;
    let fidelity = single_clone_fidelity(&channel, &ket(d, 0), n, m)?;
    Ok(TelecloningExample { d, n, m, channel, schemes, fidelity, frame_name })
}

/// Named finite subgroup of SU(2) used as a unitary design.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Su2Design {
    /// 48 elements, a unitary 3-design.
    BinaryOctahedral,
    /// 120 elements, a unitary 5-design.
    BinaryIcosahedral,
}

impl Su2Design {
    pub fn elements(self) -> Vec<ComplexMatrix> {
        match self {
            Su2Design::BinaryOctahedral => binary_octahedral(),
            Su2Design::BinaryIcosahedral => binary_icosahedral(),
        }
    }

    pub fn strength(self) -> usize {
        match self {
            Su2Design::BinaryOctahedral => 3,
            Su2Design::BinaryIcosahedral => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Su2Design::BinaryOctahedral => "binary-octahedral",
            Su2Design::BinaryIcosahedral => "binary-icosahedral",
        }
    }

    /// Smallest design exact for `N`-copy UNOT averages (degree `N + 1`).
    pub fn for_unot(n: usize) -> Result<Self> {
        match n {
            1 | 2 => Ok(Su2Design::BinaryOctahedral),
            3 | 4 => Ok(Su2Design::BinaryIcosahedral),
            _ => Err(Error::SizeOverflow(n)),
        }
    }
}

/// Unit quaternion `a + bi + cj + dk` as the SU(2) matrix `[[a+bi, c+di], [-c+di, a-bi]]`.
fn quaternion(q: [f64; 4]) -> ComplexMatrix {
    let [a, b, cc, d] = q;
    ComplexMatrix::from_row_slice(2, 2, &[c(a, b), c(cc, d), c(-cc, d), c(a, -b)])
}

/// The 24 Hurwitz units.
fn hurwitz_units() -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for axis in 0..4 {
        for s in [1.0, -1.0] {
            let mut q = [0.0; 4];
            q[axis] = s;
            out.push(q);
        }
    }
    for signs in 0..16u32 {
        let q: [f64; 4] = std::array::from_fn(|k| if signs >> k & 1 == 1 { -0.5 } else { 0.5 });
        out.push(q);
    }
    out
}

pub fn binary_octahedral() -> Vec<ComplexMatrix> {
    let mut qs = hurwitz_units();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..4 {
        for j in i + 1..4 {
            for (si, sj) in [(r, r), (r, -r), (-r, r), (-r, -r)] {
                let mut q = [0.0; 4];
                q[i] = si;
                q[j] = sj;
                qs.push(q);
            }
        }
    }
    qs.into_iter().map(quaternion).collect()
}

pub fn binary_icosahedral() -> Vec<ComplexMatrix> {
    let mut qs = hurwitz_units();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let base = [0.0, 1.0, phi, 1.0 / phi];
    const EVEN_PERMS: [[usize; 4]; 12] = [
        [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2],
        [1, 0, 3, 2], [1, 2, 0, 3], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 1, 3, 0], [2, 3, 0, 1],
        [3, 0, 2, 1], [3, 1, 0, 2], [3, 2, 1, 0],
    ];
    for perm in EVEN_PERMS {
        for signs in 0..8u32 {
            // signs apply to the three non-zero entries 1, phi, 1/phi
            let mut q = [0.0; 4];
            for (slot, &src) in perm.iter().enumerate() {
                let sign = if src > 0 && signs >> (src - 1) & 1 == 1 { -1.0 } else { 1.0 };
                q[slot] = sign * base[src] / 2.0;
            }
            qs.push(q);
        }
    }
    qs.into_iter().map(quaternion).collect()
}

/// Seed of the `N`-copy UNOT: `rho -> d_N^+ <0^N|rho|0^N> |1><1|`.
pub fn unot_seed(n: usize) -> Result<CpMap> {
    let dn = symmetric_dim(2, n);
    let w = symmetric_basis(2, n)?;
    let zero_n = w.adjoint() * tensor_power(&ket(2, 0), n);
    let k = ket(2, 1) * zero_n.adjoint() * c((dn as f64).sqrt(), 0.0);
    CpMap::from_kraus(vec![k])
}

/// Measure-and-reprepare frame-orbit spec: frame `{g^{⊗N}}` on the symmetric
/// subspace with uniform weights, conditional channels `g` on the output qubit.
pub fn unot_spec(n: usize, design: Su2Design) -> Result<FrameOrbitSpec> {
    let elems = design.elements();
    let weight = 1.0 / elems.len() as f64;
    let frame = OperatorFrame::uniform(
        elems.iter().map(|g| symmetric_power(g, n)).collect::<Result<_>>()?,
        weight,
    )?;
    let b = elems.into_iter().map(CpMap::unitary).collect();
    FrameOrbitSpec::new(frame, unot_seed(n)?, Some(b))
}

/// The UNOT channel `d_N^+ avg_g <(g0)^N|rho|(g0)^N> g|1><1|g^dag`.
pub fn unot_channel(n: usize, design: Su2Design) -> Result<CpMap> {
    let spec = unot_spec(n, design)?;
    let kraus = (0..spec.len())
        .flat_map(|w| {
            let mu = spec.frame().members()[w].0;
            spec.density(w).kraus().iter().map(move |k| k * c(mu.sqrt(), 0.0)).collect::<Vec<_>>()
        })
        .collect();
    CpMap::from_kraus(kraus)
}

/// `<psi_perp| C(|psi^N><psi^N|) |psi_perp>` for a qubit state `psi`.
pub fn unot_fidelity(channel: &CpMap, psi: &ComplexMatrix, n: usize) -> Result<f64> {
    let w = symmetric_basis(2, n)?;
    let input = w.adjoint() * tensor_power(psi, n);
    let out = channel.apply(&(&input * input.adjoint()))?;
    let perp = orthogonal_qubit(psi);
    Ok((perp.adjoint() * out * &perp)[(0, 0)].re)
}

/// `(N + 1)/(N + 2)`.
pub fn unot_fidelity_closed_form(n: usize) -> f64 {
    (n as f64 + 1.0) / (n as f64 + 2.0)
}

fn orthogonal_qubit(psi: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(2, 1, &[-psi[(1, 0)].conj(), psi[(0, 0)].conj()])
}

/// UNOT channel as the measure-and-reprepare integral evaluated on a
/// stratified jittered grid of pure states: `sqrt(points)` strata in
/// `p = |<0|phi>|^2` times `sqrt(points)` strata in the relative phase.
/// Returns the output on `|psi^N><psi^N|`.
pub fn unot_grid_output(psi: &ComplexMatrix, n: usize, points: usize, seed: u64) -> Result<ComplexMatrix> {
    let side = (points as f64).sqrt().round() as usize;
    if side == 0 {
        return Err(Error::Invalid("grid needs at least one point".into()));
    }
    let dn = symmetric_dim(2, n) as f64;
    let mut g = rng(seed);
    let mut acc = ComplexMatrix::zeros(2, 2);
    for i in 0..side {
        for j in 0..side {
            let p = (i as f64 + g.random::<f64>()) / side as f64;
            let theta = std::f64::consts::TAU * (j as f64 + g.random::<f64>()) / side as f64;
            let phi = ComplexMatrix::from_column_slice(2, 1, &[c(p.sqrt(), 0.0), C64::from_polar((1.0 - p).sqrt(), theta)]);
            let overlap = (phi.adjoint() * psi)[(0, 0)].norm_sqr().powi(n as i32);
            let perp = orthogonal_qubit(&phi);
            acc += &perp * perp.adjoint() * c(overlap, 0.0);
        }
    }
    Ok(acc * c(dn / (side * side) as f64, 0.0))
}

/// UNOT fidelity from the grid integral.
pub fn unot_grid_fidelity(psi: &ComplexMatrix, n: usize, points: usize, seed: u64) -> Result<f64> {
    let out = unot_grid_output(psi, n, points, seed)?;
    let perp = orthogonal_qubit(psi);
    Ok((perp.adjoint() * &out * &perp)[(0, 0)].re)
}

/// Qubit pure state `cos(t/2)|0> + e^{i f} sin(t/2)|1>`.
pub fn bloch_state(theta: f64, phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(
        2,
        1,
        &[c((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)],
    )
}

/// `avg_g g X g^dag` for a qubit operator `X`.
pub fn design_twirl(x: &ComplexMatrix, design: Su2Design) -> ComplexMatrix {
    let elems = design.elements();
    let n = elems.len() as f64;
    elems.iter().fold(ComplexMatrix::zeros(2, 2), |acc, g| acc + g * x * g.adjoint()) / c(n, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmat::{dist, identity, isometry_residual};
    use crate::random::random_unitary;

    fn is_group(elems: &[ComplexMatrix]) -> bool {
        elems.iter().all(|a| {
            elems.iter().all(|b| {
                let ab = a * b;
                elems.iter().any(|e| dist(e, &ab) < 1e-9)
            })
        })
    }

    #[test]
    fn design_groups_are_closed() {
        let oct = binary_octahedral();
        let ico = binary_icosahedral();
        assert_eq!(oct.len(), 48);
        assert_eq!(ico.len(), 120);
        for g in oct.iter().chain(&ico) {
            assert!(isometry_residual(g) < 1e-12);
        }
        assert!(is_group(&oct));
        assert!(is_group(&ico));
    }

    /// Frame potential test: a group is a t-design iff
    /// `avg |Tr g|^{2t}` equals the Haar moment `Catalan(t)` for SU(2).
    #[test]
    fn design_strengths() {
        let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0];
        for design in [Su2Design::BinaryOctahedral, Su2Design::BinaryIcosahedral] {
            let elems = design.elements();
            let moment = |t: i32| elems.iter().map(|g| crate::linmat::trace(g).norm_sqr().powi(t)).sum::<f64>() / elems.len() as f64;
            for t in 1..=design.strength() {
                assert!((moment(t as i32) - catalan[t]).abs() < 1e-9, "{} t={t}", design.name());
            }
            let next = design.strength() as i32 + 1;
            assert!((moment(next) - catalan[next as usize]).abs() > 1e-3);
        }
    }

    #[test]
    fn symmetric_basis_is_isometric_and_spans_projector() {
        for (d, m) in [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let w = symmetric_basis(d, m).unwrap();
            assert_eq!(w.ncols(), symmetric_dim(d, m));
            assert!(isometry_residual(&w) < 1e-12);
            assert!(dist(&(&w * w.adjoint()), &symmetric_projector(d, m).unwrap()) < 1e-12);
        }
        assert!(dist(&symmetric_basis(3, 1).unwrap(), &identity(3)) < 1e-15);
    }

    #[test]
    fn cloner_is_a_channel_and_matches_the_projector_formula() {
        let mut g = rng(3);
        for (d, n, m) in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 3)] {
            let ch = cloner(d, n, m).unwrap();
            assert!(ch.trace_preservation_residual() < 1e-12);
            let wn = symmetric_basis(d, n).unwrap();
            let wm = symmetric_basis(d, m).unwrap();
            let pm = symmetric_projector(d, m).unwrap();
            let ratio = symmetric_dim(d, n) as f64 / symmetric_dim(d, m) as f64;
            let rest = identity(d.pow((m - n) as u32));
            let u = random_unitary(&mut g, symmetric_dim(d, n));
            let rho = &u.columns(0, 1) * u.columns(0, 1).adjoint();
            let full_in = &wn * &rho * wn.adjoint();
            let oracle = &pm * kron(&full_in, &rest) * &pm * c(ratio, 0.0);
            let got = &wm * ch.apply(&rho).unwrap() * wm.adjoint();
            assert!(dist(&got, &oracle) < 1e-12, "d={d} N={n} M={m}");
        }
    }

    #[test]
    fn cloning_fidelities_match_closed_form() {
        for (d, n, m) in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 3), (2, 1, 4)] {
            let ch = cloner(d, n, m).unwrap();
            let f = single_clone_fidelity(&ch, &ket(d, 0), n, m).unwrap();
            assert!((f - cloning_fidelity_closed_form(d, n, m)).abs() < 1e-12, "d={d} N={n} M={m}: {f}");
        }
        assert!((cloning_fidelity_closed_form(2, 1, 2) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn telecloning_one_to_two() {
        let ex = telecloning(2, 1, 2, 1e-9).unwrap();
        assert!(ex.schemes.report.passed(), "{}", ex.schemes.report);
        assert!((ex.fidelity - 5.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn telecloning_two_to_three_uses_group_frame() {
        let ex = telecloning(2, 2, 3, 1e-9).unwrap();
        assert_eq!(ex.frame_name, "binary-icosahedral");
        assert!(ex.schemes.report.passed(), "{}", ex.schemes.report);
        assert!(telecloning(3, 2, 3, 1e-9).is_err());
    }

    #[test]
    fn ideal_teleportation_schemes() {
        for d in [2, 3] {
            let s = ideal_teleportation(d, 1e-9).unwrap();
            assert!(s.report.passed(), "{}", s.report);
            for w in 0..d * d {
                let choi = s.minimal.realized_choi(w).unwrap();
                assert!(dist(&choi, CpMap::identity(d).choi()) < 1e-9);
            }
        }
    }

    #[test]
    fn unot_fidelity_exact_for_designs() {
        for n in 1..=4 {
            let design = Su2Design::for_unot(n).unwrap();
            let ch = unot_channel(n, design).unwrap();
            assert!(ch.trace_preservation_residual() < 1e-10);
            for (t, p) in [(0.0, 0.0), (1.1, 0.4), (2.5, -2.0)] {
                let f = unot_fidelity(&ch, &bloch_state(t, p), n).unwrap();
                assert!((f - unot_fidelity_closed_form(n)).abs() < 1e-9, "N={n}: {f}");
            }
        }
        assert!(Su2Design::for_unot(5).is_err());
    }

    #[test]
    fn unot_channel_is_design_independent_when_both_are_exact() {
        let a = unot_channel(1, Su2Design::BinaryOctahedral).unwrap();
        let b = unot_channel(1, Su2Design::BinaryIcosahedral).unwrap();
        assert!(dist(a.choi(), b.choi()) < 1e-10);
    }

    #[test]
    fn unot_grid_oracle_converges() {
        let psi = bloch_state(0.7, 1.3);
        let coarse = (unot_grid_fidelity(&psi, 1, 100, 1).unwrap() - 2.0 / 3.0).abs();
        let fine = (unot_grid_fidelity(&psi, 1, 10_000, 1).unwrap() - 2.0 / 3.0).abs();
        assert!(fine < 1e-3, "{fine}");
        assert!(fine < coarse);
    }

    #[test]
    fn unot_minimal_scheme_is_measure_and_reprepare() {
        let spec = unot_spec(1, Su2Design::BinaryOctahedral).unwrap();
        let scheme = crate::frameorbit::tele_minimal(&spec, 1e-9).unwrap();
        let densities: Vec<_> = (0..spec.len()).map(|w| spec.density(w)).collect();
        let rep = scheme.verify(&densities, 1e-9).unwrap();
        assert!(rep.passed(), "{rep}");
        // the rank-one resource is |1>|1> and each effect is d_N^+ |g0><g0| on the input
        let e11 = kron(&ket(2, 1), &ket(2, 1));
        assert!(dist(&scheme.resource, &(&e11 * e11.adjoint())) < 1e-12);
    }

    #[test]
    fn design_twirl_of_projector() {
        let p = ket(2, 0) * ket(2, 0).adjoint();
        for design in [Su2Design::BinaryOctahedral, Su2Design::BinaryIcosahedral] {
            assert!(dist(&design_twirl(&p, design), &(identity(2) * c(0.5, 0.0))) < 1e-12);
        }
    }
}
