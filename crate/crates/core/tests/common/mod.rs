//! Independent reference computations for integration tests. Everything here is
//! written with explicit index loops and nalgebra's SVD, without calling the
//! crate's own linear-algebra helpers.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> M {
    M::from_fn(n, n, |i, j| if i == j { cx(1.0, 0.0) } else { cx(0.0, 0.0) })
}

pub fn frob(a: &M, b: &M) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in oracle comparison");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn unit(d: usize, i: usize, j: usize) -> M {
    let mut m = M::zeros(d, d);
    m[(i, j)] = cx(1.0, 0.0);
    m
}

pub fn units(d: usize) -> Vec<M> {
    (0..d).flat_map(|i| (0..d).map(move |j| unit(d, i, j))).collect()
}

pub fn kraus_apply(kraus: &[M], rho: &M) -> M {
    let d_out = kraus[0].nrows();
    kraus.iter().fold(M::zeros(d_out, d_out), |acc, k| acc + k * rho * k.adjoint())
}

/// Kronecker product by explicit indices.
pub fn tensor(a: &M, b: &M) -> M {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    M::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Trace over the second factor of `C^da ⊗ C^db`.
pub fn trace_second(x: &M, da: usize, db: usize) -> M {
    M::from_fn(da, da, |i, j| (0..db).map(|k| x[(i * db + k, j * db + k)]).sum())
}

/// Trace over the first factor of `C^da ⊗ C^db`.
pub fn trace_first(x: &M, da: usize, db: usize) -> M {
    M::from_fn(db, db, |i, j| (0..da).map(|k| x[(k * db + i, k * db + j)]).sum())
}

/// Singular values above `rel * s_max`.
pub fn numerical_rank(x: &M, rel: f64) -> usize {
    let s = x.clone().svd(false, false).singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&v| v > rel * max).count()
}

/// `sum_ij M(E_ij) ⊗ E_ij`.
pub fn choi_of(d_in: usize, apply: impl Fn(&M) -> M) -> M {
    let mut out: Option<M> = None;
    for i in 0..d_in {
        for j in 0..d_in {
            let e = unit(d_in, i, j);
            let term = tensor(&apply(&e), &e);
            out = Some(match out {
                Some(acc) => acc + term,
                None => term,
            });
        }
    }
    out.expect("nonempty input space")
}

/// `|1>><<1|` for the identity on `C^d`.
pub fn max_entangled_projector(d: usize) -> M {
    M::from_fn(d * d, d * d, |r, s| {
        if r / d == r % d && s / d == s % d {
            cx(1.0, 0.0)
        } else {
            cx(0.0, 0.0)
        }
    })
}

/// Projector onto the symmetric subspace of `(C^d)^{⊗m}` as the average of all
/// digit permutations.
pub fn symmetric_projector_oracle(d: usize, m: usize) -> M {
    let n = d.pow(m as u32);
    let perms = permutations(m);
    let mut p = M::zeros(n, n);
    for perm in &perms {
        for col in 0..n {
            let digits = to_digits(col, d, m);
            let permuted: Vec<usize> = (0..m).map(|k| digits[perm[k]]).collect();
            p[(from_digits(&permuted, d), col)] += cx(1.0, 0.0);
        }
    }
    p / cx(perms.len() as f64, 0.0)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..m {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

fn to_digits(mut x: usize, d: usize, m: usize) -> Vec<usize> {
    let mut digits = vec![0; m];
    for k in (0..m).rev() {
        digits[k] = x % d;
        x /= d;
    }
    digits
}

fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Pure qubit state `cos(t/2)|0> + e^{i p} sin(t/2)|1>` as a column vector.
pub fn qubit(theta: f64, phi: f64) -> M {
    M::from_column_slice(2, 1, &[cx((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)])
}

pub fn proj(v: &M) -> M {
    v * v.adjoint()
}

/// Orthogonal qubit state `(-b^*, a^*)`.
pub fn qubit_perp(v: &M) -> M {
    M::from_column_slice(2, 1, &[-v[(1, 0)].conj(), v[(0, 0)].conj()])
}

pub fn min_eigenvalue(h: &M) -> f64 {
    let sym = (h + h.adjoint()) / cx(2.0, 0.0);
    sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}
