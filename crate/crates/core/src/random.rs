//! Seeded random operators, maps and instruments for tests and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cpmap::CpMap;
use crate::instrument::{Instrument, Outcome};
use crate::linmat::{c, herm_pinv_sqrt, identity, kron, partial_trace, trace, ComplexMatrix, HermitianEig, DEFAULT_TOL};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `G G^dag` with `G` an `n x rank` Gaussian matrix.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, rank);
    &g * g.adjoint()
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random isometry `C^cols -> C^rows` (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols);
    random_unitary(rng, rows).columns(0, cols).into_owned()
}

/// Random density matrix of full rank.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let p = random_psd(rng, d, d);
    let t = trace(&p);
    p / t
}

/// Random pure state `|psi><psi|`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let v = random_matrix(rng, d, 1);
    let n = v.norm();
    let v = v / c(n, 0.0);
    &v * v.adjoint()
}

pub fn random_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    d_in: usize,
    d_out: usize,
    terms: usize,
) -> Vec<ComplexMatrix> {
    (0..terms).map(|_| random_matrix(rng, d_out, d_in)).collect()
}

/// Random CP map (generally not trace preserving).
pub fn random_cp_map<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, terms: usize) -> CpMap {
    CpMap::from_kraus(random_kraus(rng, d_in, d_out, terms)).expect("consistent shapes")
}

/// Random channel: Kraus operators right-multiplied by `(sum K^dag K)^{-1/2}`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, terms: usize) -> CpMap {
    let kraus = random_kraus(rng, d_in, d_out, terms);
    let xi = kraus
        .iter()
        .fold(ComplexMatrix::zeros(d_in, d_in), |acc, k| acc + k.adjoint() * k);
    let fix = herm_pinv_sqrt(&xi, DEFAULT_TOL).expect("Hermitian");
    CpMap::from_kraus(kraus.iter().map(|k| k * &fix).collect()).expect("consistent shapes")
}

/// Random normalized instrument.
///
/// Each outcome gets a random PSD Choi block; all blocks are then conjugated
/// on the input factor by `P^{-1/2}` with `P = Tr_out[sum_i Z_i]`, which makes
/// the total map exactly trace preserving.
pub fn random_instrument<R: Rng + ?Sized>(
    rng: &mut R,
    d_in: usize,
    d_out: usize,
    outcomes: usize,
) -> Instrument {
    let n = d_out * d_in;
    let (blocks, p) = loop {
        let blocks: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let rank = rng.random_range(1..=n);
                random_psd(rng, n, rank)
            })
            .collect();
        let total = blocks.iter().fold(ComplexMatrix::zeros(n, n), |a, b| a + b);
        let p = partial_trace(&total, &[d_out, d_in], &[1]).expect("dims");
        // low-rank draws can leave Tr_out of the total singular, which no
        // input-side rescaling can repair
        if HermitianEig::new(&p, DEFAULT_TOL).expect("Hermitian").min_eigenvalue() > 1e-6 {
            break (blocks, p);
        }
    };
    let fix = kron(&identity(d_out), &herm_pinv_sqrt(&p, DEFAULT_TOL).expect("Hermitian"));
    let outs = blocks
        .into_iter()
        .enumerate()
        .map(|(i, z)| {
            let z = &fix * z * &fix;
            let mu = trace(&z).re;
            let density = CpMap::from_choi(z / c(mu, 0.0), d_in, d_out).expect("dims");
            Outcome { label: i.to_string(), weight: mu, density }
        })
        .collect();
    Instrument::new(d_in, d_out, outs).expect("normalized by construction")
}
