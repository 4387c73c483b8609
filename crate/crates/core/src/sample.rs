//! Deterministic sample generators used by the demo command and the test
//! suites. Everything routes through an explicit [`SplitMix64`] so a seed
//! pins the whole stream.

use num_complex::Complex64;

use crate::decomp::{herm_part_eig, operator_norm};
use crate::matrix::CMatrix;
use crate::rng::SplitMix64;

/// Matrix with iid standard complex Gaussian entries.
pub fn gaussian_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

/// Haar-like random unitary: eigenvector basis of a random Hermitian matrix
/// with its column phases scrambled.
pub fn random_unitary(rng: &mut SplitMix64, n: usize) -> CMatrix {
    let h = gaussian_matrix(rng, n, n).hermitize();
    let q = herm_part_eig(&h).eigenvectors;
    let phases: Vec<Complex64> = (0..n).map(|_| rng.unimodular()).collect();
    q.mul(&CMatrix::diag(&phases))
}

/// Random contraction with operator norm exactly `norm_cap` (Gaussian matrix
/// rescaled); `norm_cap = 1` exercises the defect rank boundary.
pub fn random_contraction(rng: &mut SplitMix64, n: usize, norm_cap: f64) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let top = operator_norm(&g).max(f64::MIN_POSITIVE);
    g.scale_re(norm_cap / top)
}

/// Random contraction with prescribed singular values (useful for planting
/// defect ranks).
pub fn contraction_with_singular_values(rng: &mut SplitMix64, sv: &[f64]) -> CMatrix {
    let n = sv.len();
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    u.mul(&CMatrix::real_diag(sv)).mul(&v.adjoint())
}

/// Tuple of doubly commuting contractions: a common random eigenbasis with
/// independent diagonal contractions. Commuting normal families always
/// doubly commute, so these are valid inputs for the product construction.
pub fn doubly_commuting_tuple(rng: &mut SplitMix64, k: usize, n: usize) -> Vec<CMatrix> {
    let q = random_unitary(rng, n);
    let qa = q.adjoint();
    (0..k)
        .map(|_| {
            let diag: Vec<Complex64> = (0..n)
                .map(|_| rng.unimodular() * rng.range(0.0, 1.0))
                .collect();
            q.mul(&CMatrix::diag(&diag)).mul(&qa)
        })
        .collect()
}

/// Commuting (not necessarily doubly commuting) tuple: polynomial functions
/// `q_i(A)` of a single random contraction, rescaled to norm at most
/// `norm_cap`.
pub fn commuting_polynomial_tuple(
    rng: &mut SplitMix64,
    k: usize,
    n: usize,
    norm_cap: f64,
) -> Vec<CMatrix> {
    let a = random_contraction(rng, n, 0.9);
    (0..k)
        .map(|_| {
            let deg = 1 + rng.below(3) as usize;
            let mut m = CMatrix::zeros(n, n);
            let mut power = CMatrix::identity(n);
            for _ in 0..=deg {
                m = m.add(&power.scale(rng.complex_gaussian()));
                power = power.mul(&a);
            }
            let top = operator_norm(&m);
            if top > norm_cap {
                m.scale_re(norm_cap / top)
            } else {
                m
            }
        })
        .collect()
}

/// Left/right multiplication by fresh random unitaries; preserves singular
/// values exactly up to rounding.
pub fn conjugate_by_random_unitaries(rng: &mut SplitMix64, a: &CMatrix) -> CMatrix {
    let u = random_unitary(rng, a.rows());
    let v = random_unitary(rng, a.cols());
    u.mul(a).mul(&v.adjoint())
}

/// Random Hermitian PSD matrix with unit-scale spectrum.
pub fn random_psd(rng: &mut SplitMix64, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let p = g.mul(&g.adjoint());
    let top = operator_norm(&p).max(f64::MIN_POSITIVE);
    p.scale_re(1.0 / top)
}

/// Random matrix with planted singular values spread across a rank
/// threshold (everything at least 10x above or 10x below `tol`).
pub fn matrix_with_split_spectrum(
    rng: &mut SplitMix64,
    m: usize,
    n: usize,
    tol: f64,
) -> (CMatrix, usize) {
    let k = m.min(n);
    let mut sv = Vec::with_capacity(k);
    for _ in 0..k {
        if rng.uniform() < 0.6 {
            sv.push(rng.range(10.0 * tol, 1.0).max(10.0 * tol));
        } else {
            sv.push(if rng.uniform() < 0.5 { 0.0 } else { 0.1 * tol });
        }
    }
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let u = random_unitary(rng, m);
    let v = random_unitary(rng, n);
    let mut sig = CMatrix::zeros(m, n);
    for (i, &s) in sv.iter().enumerate() {
        sig.set(i, i, crate::matrix::cr(s));
    }
    (u.mul(&sig).mul(&v.adjoint()), rank)
}
