//! Defect operators and unitary N-dilations of a single contraction.
//!
//! For a contraction T on an n-dimensional space, `D_T = (I − T*T)^{1/2}`
//! is the defect operator, its range the defect space, and `d_T` its rank.
//! The Halmos matrix `[[T, D_{T*}], [D_T, −T*]]` is a unitary 1-dilation on
//! dimension 2n; the Egerváry construction produces, for any order N, an
//! N-minimal unitary N-dilation on dimension `n + N·d_T`, which is the
//! smallest possible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::{numerical_rank, operator_norm, svd};
use crate::error::{Error, Result};
use crate::matrix::{block_assemble, cr, CMatrix};
use crate::mono::{graded_indices, MonomialTable};
use crate::tol::Tol;
use crate::tuple::ContractionTuple;

/// Which construction produced a dilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Halmos,
    Egervary,
    DoublyCommuting,
    CommutantPair,
    External,
}

/// A tuple of commuting unitaries on an enlarged space, together with the
/// dimension of the embedded space H (its first `h_dim` coordinates) and
/// the certified order N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NDilation {
    pub h_dim: usize,
    pub order: usize,
    pub construction: Construction,
    pub unitaries: Vec<CMatrix>,
}

impl NDilation {
    /// Dimension of the dilation space.
    pub fn dim(&self) -> usize {
        self.unitaries.first().map_or(0, CMatrix::rows)
    }

    /// Structural sanity for externally supplied files: nonempty, square,
    /// equal sizes, H fits inside.
    pub fn validate_shapes(&self) -> Result<()> {
        let m = self.dim();
        if self.unitaries.is_empty() {
            return Err(Error::InvalidInput("dilation has no unitaries".into()));
        }
        for (i, u) in self.unitaries.iter().enumerate() {
            if !u.is_square() || u.rows() != m {
                return Err(Error::ShapeMismatch(format!(
                    "unitary {i} is {}x{}, expected {m}x{m}",
                    u.rows(),
                    u.cols()
                )));
            }
        }
        if self.h_dim > m {
            return Err(Error::ShapeMismatch(format!(
                "h_dim {} exceeds dilation dimension {m}",
                self.h_dim
            )));
        }
        if self.order == 0 {
            return Err(Error::InvalidInput("order must be at least 1".into()));
        }
        Ok(())
    }
}

/// Defect data of a contraction: both defect operators, the defect rank,
/// and orthonormal bases of the two defect spaces read off the SVD.
#[derive(Debug, Clone)]
pub struct DefectData {
    /// `D_T = (I − T*T)^{1/2}`, n×n Hermitian PSD.
    pub d_op: CMatrix,
    /// `D_{T*} = (I − T·T*)^{1/2}`.
    pub d_star_op: CMatrix,
    /// Common rank of both defect operators.
    pub d_rank: usize,
    /// n×d_T orthonormal columns spanning the range of `D_T`.
    pub iso_basis: CMatrix,
    /// n×d_T orthonormal columns spanning the range of `D_{T*}`.
    pub iso_basis_star: CMatrix,
}

/// Internal SVD-side view of the defect data: singular values, defect
/// magnitudes and the selected columns, shared by `defect` and the
/// Egerváry construction.
struct DefectSvd {
    sel_sigma: Vec<f64>,
    sel_defect: Vec<f64>,
    basis: CMatrix,      // columns of V spanning the defect space of T
    basis_star: CMatrix, // columns of U spanning the defect space of T*
    defect_all: Vec<f64>,
    dec: crate::decomp::Svd,
}

fn defect_svd(t: &CMatrix, tol: &Tol) -> Result<DefectSvd> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "contraction must be square, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let norm = operator_norm(t);
    if norm > 1.0 + tol.eps_psd() {
        return Err(Error::NotContraction { norm });
    }
    let dec = svd(t);
    // singular values within rank_tol of 1 carry no defect direction
    let boundary = 1.0 - tol.rank_tol();
    let sel: Vec<usize> = dec
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < boundary)
        .map(|(i, _)| i)
        .collect();
    let defect_all: Vec<f64> = dec
        .singular_values
        .iter()
        .map(|&s| {
            if s < boundary {
                (1.0 - s * s).max(0.0).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let sel_sigma: Vec<f64> = sel.iter().map(|&i| dec.singular_values[i]).collect();
    let sel_defect: Vec<f64> = sel.iter().map(|&i| defect_all[i]).collect();
    let basis = dec.v.select_columns(&sel);
    let basis_star = dec.u.select_columns(&sel);
    Ok(DefectSvd {
        sel_sigma,
        sel_defect,
        basis,
        basis_star,
        defect_all,
        dec,
    })
}

/// Defect operators of a contraction. `D_T` is assembled from the SVD of T
/// as `V·diag(√(1−σ²))·V*`, which reproduces `(I − T*T)^{1/2}` exactly in
/// exact arithmetic while keeping the rank decision on the singular values
/// of T itself rather than on noise-amplified near-zero eigenvalues.
pub fn defect(t: &CMatrix, tol: &Tol) -> Result<DefectData> {
    let ds = defect_svd(t, tol)?;
    let diag = CMatrix::real_diag(&ds.defect_all);
    let d_op = ds.dec.v.mul(&diag).mul(&ds.dec.v.adjoint()).hermitize();
    let d_star_op = ds.dec.u.mul(&diag).mul(&ds.dec.u.adjoint()).hermitize();
    Ok(DefectData {
        d_op,
        d_star_op,
        d_rank: ds.sel_sigma.len(),
        iso_basis: ds.basis,
        iso_basis_star: ds.basis_star,
    })
}

/// The Halmos unitary 1-dilation `[[T, D_{T*}], [D_T, −T*]]` on H ⊕ H.
pub fn halmos_dilation(t: &CMatrix, tol: &Tol) -> Result<NDilation> {
    let dd = defect(t, tol)?;
    let n = t.rows();
    let grid = vec![
        vec![Some(t.clone()), Some(dd.d_star_op)],
        vec![Some(dd.d_op), Some(t.adjoint().neg())],
    ];
    let u = block_assemble(&grid, &[n, n], &[n, n])?;
    Ok(NDilation {
        h_dim: n,
        order: 1,
        construction: Construction::Halmos,
        unitaries: vec![u],
    })
}

/// The minimal-dimension unitary N-dilation on `n + N·d_T`.
///
/// The dilation space is H ⊕ 𝒟 ⊕ ··· ⊕ 𝒟 with N defect slots, each slot
/// written in the d_T-dimensional coordinates of the defect basis of T*.
/// In those coordinates the unitary identification V between the two defect
/// spaces becomes the identity and the blocks collapse to closed forms from
/// the SVD `T = W·Σ·V₀*`:
///
/// - top-left: T itself,
/// - below it: `diag(f)·B*` with `f_i = √(1−σ_i²)` over the defect columns B of V₀,
/// - top-right: `B_*·diag(f)` with B_* the defect columns of W,
/// - bottom-right: `−diag(σ)` over the defect columns,
/// - identities chaining the interior slots.
///
/// A contraction with no defect (unitary up to the rank boundary) is its own
/// N-dilation.
pub fn egervary_dilation(t: &CMatrix, n_order: usize, tol: &Tol) -> Result<NDilation> {
    if n_order == 0 {
        return Err(Error::InvalidInput(
            "dilation order must be at least 1".into(),
        ));
    }
    let ds = defect_svd(t, tol)?;
    let n = t.rows();
    let d = ds.sel_sigma.len();
    if d == 0 {
        return Ok(NDilation {
            h_dim: n,
            order: n_order,
            construction: Construction::Egervary,
            unitaries: vec![t.clone()],
        });
    }
    let big_n = n_order;
    let f = CMatrix::real_diag(&ds.sel_defect);
    let sigma = CMatrix::real_diag(&ds.sel_sigma);
    let mut dims = vec![n];
    dims.extend(std::iter::repeat_n(d, big_n));
    let slots = dims.len();
    let mut grid: Vec<Vec<Option<CMatrix>>> = vec![vec![None; slots]; slots];
    grid[0][0] = Some(t.clone());
    grid[0][big_n] = Some(ds.basis_star.mul(&f));
    grid[1][0] = Some(f.mul(&ds.basis.adjoint()));
    grid[1][big_n] = Some(sigma.neg());
    for j in 2..=big_n {
        grid[j][j - 1] = Some(CMatrix::identity(d));
    }
    let u = block_assemble(&grid, &dims, &dims)?;
    Ok(NDilation {
        h_dim: n,
        order: n_order,
        construction: Construction::Egervary,
        unitaries: vec![u],
    })
}

/// Outcome of checking the power-compression identities of a dilation.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub pass: bool,
    /// Largest power-compression residual over the checked multi-indices.
    pub max_residual: f64,
    /// First failing multi-index in enumeration order, if any.
    pub first_failure: Option<Vec<i64>>,
    /// Residual per multi-index, in enumeration order.
    pub residuals: Vec<(Vec<i64>, f64)>,
    pub unitarity_residual: f64,
    pub commutation_residual: f64,
    pub tolerance: f64,
}

pub(crate) fn unitarity_residual(unitaries: &[CMatrix]) -> f64 {
    unitaries
        .iter()
        .map(|u| {
            let m = u.rows();
            operator_norm(&u.adjoint().mul(u).sub(&CMatrix::identity(m)))
        })
        .fold(0.0, f64::max)
}

pub(crate) fn commutation_residual(unitaries: &[CMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..unitaries.len() {
        for j in (i + 1)..unitaries.len() {
            let r = unitaries[i]
                .mul(&unitaries[j])
                .sub(&unitaries[j].mul(&unitaries[i]));
            worst = worst.max(operator_norm(&r));
        }
    }
    worst
}

pub(crate) fn shape_check(dil: &NDilation, tuple: &ContractionTuple) -> Result<()> {
    dil.validate_shapes()?;
    if dil.unitaries.len() != tuple.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} unitaries for a {}-tuple",
            dil.unitaries.len(),
            tuple.len()
        )));
    }
    if dil.h_dim != tuple.dim() {
        return Err(Error::ShapeMismatch(format!(
            "h_dim {} does not match tuple dimension {}",
            dil.h_dim,
            tuple.dim()
        )));
    }
    Ok(())
}

/// Check `T_1^{a_1}···T_k^{a_k} = P_H U_1^{a_1}···U_k^{a_k} P_H` for every
/// multi-index of total degree at most `n_order`, along with unitarity and
/// mutual commutation of the dilation operators.
pub fn verify_dilation(
    dil: &NDilation,
    tuple: &ContractionTuple,
    n_order: usize,
    tol: &Tol,
) -> Result<VerificationReport> {
    shape_check(dil, tuple)?;
    let n = dil.h_dim;
    let u_table = MonomialTable::build(&dil.unitaries, n_order);
    let t_table = MonomialTable::build(tuple.ops(), n_order);
    let mut residuals = Vec::new();
    let mut max_residual = 0.0f64;
    let mut first_failure = None;
    let eps = tol.eps_dil();
    for alpha in graded_indices(tuple.len(), n_order) {
        let compressed = u_table.get(&alpha).corner(n);
        let r = operator_norm(&t_table.get(&alpha).sub(&compressed));
        if r > eps && first_failure.is_none() {
            first_failure = Some(alpha.iter().map(|&e| e as i64).collect());
        }
        max_residual = max_residual.max(r);
        residuals.push((alpha.iter().map(|&e| e as i64).collect(), r));
    }
    let unitarity = unitarity_residual(&dil.unitaries);
    let commutation = commutation_residual(&dil.unitaries);
    let pass = max_residual <= eps && unitarity <= eps && commutation <= eps;
    Ok(VerificationReport {
        pass,
        max_residual,
        first_failure,
        residuals,
        unitarity_residual: unitarity,
        commutation_residual: commutation,
        tolerance: eps,
    })
}

/// N-minimality: the dilation space is spanned by `{U^k h : h ∈ H, k ≤ N}`.
/// Returns whether the span is all of K, together with its dimension.
pub fn check_n_minimality(dil: &NDilation, n_order: usize, tol: &Tol) -> Result<(bool, usize)> {
    if dil.unitaries.len() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "minimality check applies to single unitaries, got {}",
            dil.unitaries.len()
        )));
    }
    let u = &dil.unitaries[0];
    let m = u.rows();
    let n = dil.h_dim;
    let mut block = CMatrix::from_fn(m, n, |i, j| {
        if i == j {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    });
    let mut stacked = CMatrix::zeros(m, n * (n_order + 1));
    for k in 0..=n_order {
        if k > 0 {
            block = u.mul(&block);
        }
        for i in 0..m {
            for j in 0..n {
                stacked.set(i, k * n + j, block.get(i, j));
            }
        }
    }
    let dim = numerical_rank(&stacked, tol.rank_tol());
    Ok((dim == m, dim))
}

/// For an invariant vector `Th = h`, the adjoint fixes it too. Returns the
/// relative adjoint residual `‖T*h − h‖ / ‖h‖`.
pub fn invariant_vector_check(t: &CMatrix, h: &CMatrix, tol: &Tol) -> Result<f64> {
    if !t.is_square() || h.cols() != 1 || h.rows() != t.rows() {
        return Err(Error::ShapeMismatch(format!(
            "need square T and a matching column vector, got {}x{} and {}x{}",
            t.rows(),
            t.cols(),
            h.rows(),
            h.cols()
        )));
    }
    let h_norm = h.fro_norm();
    if h_norm == 0.0 {
        return Err(Error::InvalidInput(
            "invariant vector must be nonzero".into(),
        ));
    }
    let forward = t.mul(h).sub(h).fro_norm();
    if forward > tol.eps_dil() * h_norm {
        return Err(Error::NotInvariant {
            residual: forward / h_norm,
        });
    }
    Ok(t.adjoint().mul(h).sub(h).fro_norm() / h_norm)
}

/// The two numbers the Cesàro-mean computation produces for T = 0, plus the
/// asymptotic target.
#[derive(Debug, Clone, Serialize)]
pub struct ErgodicReport {
    pub order: usize,
    /// Modulus of the Cesàro mean of the scalar direct summand
    /// `u = exp(2πi/(2N+2))` of the cyclic-shift dilation; stays near 2/π.
    pub residual_modulus: f64,
    /// 2/π, the asymptotic value of `residual_modulus`.
    pub limit_target: f64,
    /// Modulus of the compression to H of the Cesàro mean of the dilation,
    /// which equals the honest Cesàro mean of T = 0 itself: 1/(N+1).
    pub cesaro_mean_modulus: f64,
}

/// Cesàro means against the (2N+2)-dimensional cyclic-shift dilation of the
/// zero contraction. The compression of `(1/(N+1)) Σ U^k` to H tends to the
/// mean-ergodic limit 0, while the Cesàro mean of the scalar direct summand
/// `u = exp(2πi/(2N+2))` stays near 2/π: averaging an N-dilation is not a
/// substitute for averaging a genuine unitary dilation.
pub fn ergodic_demo(n_order: usize) -> Result<ErgodicReport> {
    if n_order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let n = n_order;
    let zero = CMatrix::zeros(1, 1);
    let dil = egervary_dilation(&zero, 2 * n + 1, &Tol::default())?;
    let u_mat = &dil.unitaries[0];
    let m = u_mat.rows();
    debug_assert_eq!(m, 2 * n + 2);

    // scalar direct summand u = exp(2πi/(2N+2))
    let u = Complex64::from_polar(1.0, std::f64::consts::TAU / (m as f64));
    let mut power = Complex64::ONE;
    let mut sum = Complex64::ZERO;
    for _ in 0..=n {
        sum += power;
        power *= u;
    }
    let residual_modulus = (sum / cr((n + 1) as f64)).norm();

    // compression to H of the Cesàro mean of the dilation itself
    let mut v = vec![Complex64::ZERO; m];
    v[0] = Complex64::ONE;
    let mut acc = v[0];
    for _ in 1..=n {
        v = u_mat.mul_vec(&v);
        acc += v[0];
    }
    let cesaro_mean_modulus = (acc / cr((n + 1) as f64)).norm();

    Ok(ErgodicReport {
        order: n,
        residual_modulus,
        limit_target: std::f64::consts::FRAC_2_PI,
        cesaro_mean_modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;
    use crate::rng::SplitMix64;
    use crate::sample;

    fn tol() -> Tol {
        Tol::default()
    }

    fn singleton(t: &CMatrix) -> ContractionTuple {
        ContractionTuple::new(vec![t.clone()], &tol()).unwrap()
    }

    #[test]
    fn defect_of_zero_scalar() {
        let dd = defect(&CMatrix::zeros(1, 1), &tol()).unwrap();
        assert!((dd.d_op.get(0, 0) - cr(1.0)).norm() < 1e-14);
        assert_eq!(dd.d_rank, 1);
    }

    #[test]
    fn defect_of_unitary_vanishes() {
        let mut rng = SplitMix64::new(8);
        for n in [1usize, 3, 5] {
            let u = sample::random_unitary(&mut rng, n);
            let dd = defect(&u, &tol()).unwrap();
            assert_eq!(dd.d_rank, 0);
            assert!(dd.d_op.fro_norm() < 1e-12);
            assert!(dd.d_star_op.fro_norm() < 1e-12);
            assert_eq!(numerical_rank(&dd.d_op, tol().rank_tol()), 0);
        }
    }

    #[test]
    fn defect_diagonal_oracle() {
        // entrywise formula √(1 − t²) on the diagonal
        let t = CMatrix::real_diag(&[0.6, 1.0]);
        let dd = defect(&t, &tol()).unwrap();
        assert!(dd.d_op.sub(&CMatrix::real_diag(&[0.8, 0.0])).max_abs() < 1e-12);
        assert_eq!(dd.d_rank, 1);
    }

    #[test]
    fn defect_rank_via_numerical_rank_matches() {
        // σ(D_T) = (0, √0.75) for T = diag(1, 0.5)
        let t = CMatrix::real_diag(&[1.0, 0.5]);
        let dd = defect(&t, &tol()).unwrap();
        assert_eq!(numerical_rank(&dd.d_op, 1e-10), 1);
        assert!((operator_norm(&dd.d_op) - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn defect_squares_to_identity_minus_tst() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..20 {
            let n = 1 + rng.below(6) as usize;
            let cap = rng.range(0.2, 1.0);
            let t = sample::random_contraction(&mut rng, n, cap);
            let dd = defect(&t, &tol()).unwrap();
            let lhs = dd.d_op.mul(&dd.d_op);
            let rhs = CMatrix::identity(n).sub(&t.adjoint().mul(&t));
            assert!(lhs.sub(&rhs).fro_norm() <= 1e-10 * (1.0 + rhs.fro_norm()));
            let lhs2 = dd.d_star_op.mul(&dd.d_star_op);
            let rhs2 = CMatrix::identity(n).sub(&t.mul(&t.adjoint()));
            assert!(lhs2.sub(&rhs2).fro_norm() <= 1e-10 * (1.0 + rhs2.fro_norm()));
            // span residual: (I − BB*)·D_T = 0
            let b = &dd.iso_basis;
            let proj = CMatrix::identity(n).sub(&b.mul(&b.adjoint()));
            assert!(operator_norm(&proj.mul(&dd.d_op)) <= 1e-8);
        }
    }

    #[test]
    fn intertwining_identity_t_dt_equals_dtstar_t() {
        let mut rng = SplitMix64::new(10);
        for _ in 0..30 {
            let n = 1 + rng.below(6) as usize;
            let cap = rng.range(0.3, 1.0);
            let t = sample::random_contraction(&mut rng, n, cap);
            let dd = defect(&t, &tol()).unwrap();
            let r = t.mul(&dd.d_op).sub(&dd.d_star_op.mul(&t));
            assert!(operator_norm(&r) <= 1e-10, "residual {}", operator_norm(&r));
        }
    }

    #[test]
    fn defect_rejects_expansion() {
        let t = CMatrix::real_diag(&[1.5]);
        assert!(matches!(
            defect(&t, &tol()),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn halmos_of_zero_scalar_is_the_flip() {
        let dil = halmos_dilation(&CMatrix::zeros(1, 1), &tol()).unwrap();
        let expect = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]);
        assert!(dil.unitaries[0].sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn halmos_of_unitary_is_block_diagonal() {
        let mut rng = SplitMix64::new(12);
        let u = sample::random_unitary(&mut rng, 3);
        let dil = halmos_dilation(&u, &tol()).unwrap();
        let big = &dil.unitaries[0];
        assert!(big.submatrix(0, 3, 3, 3).fro_norm() < 1e-12);
        assert!(big.submatrix(3, 0, 3, 3).fro_norm() < 1e-12);
        assert!(big.corner(3).sub(&u).fro_norm() < 1e-14);
    }

    #[test]
    fn halmos_of_half_dilates_at_order_one_only() {
        let t = CMatrix::real_diag(&[0.5]);
        let dil = halmos_dilation(&t, &tol()).unwrap();
        let u = &dil.unitaries[0];
        let root = 0.75f64.sqrt();
        let expect = CMatrix::from_rows(&[vec![cr(0.5), cr(root)], vec![cr(root), cr(-0.5)]]);
        assert!(u.sub(&expect).max_abs() < 1e-12);
        assert!(operator_norm(&u.adjoint().mul(u).sub(&CMatrix::identity(2))) <= 1e-12);
        let tuple = singleton(&t);
        let rep1 = verify_dilation(&dil, &tuple, 1, &tol()).unwrap();
        assert!(rep1.pass, "order 1 residual {}", rep1.max_residual);
        let rep2 = verify_dilation(&dil, &tuple, 2, &tol()).unwrap();
        assert!(!rep2.pass);
        // P U² P = 0.25 − 0.75 = −0.5, residual |0.25 − (−0.5)| = 0.75
        assert!((rep2.max_residual - 0.75).abs() < 1e-12);
        assert_eq!(rep2.first_failure, Some(vec![2]));
        let (minimal, dim) = check_n_minimality(&dil, 1, &tol()).unwrap();
        assert!(minimal);
        assert_eq!(dim, 2);
    }

    #[test]
    fn egervary_zero_scalar_is_cyclic_shift() {
        for n_order in [1usize, 3, 5] {
            let dil = egervary_dilation(&CMatrix::zeros(1, 1), n_order, &tol()).unwrap();
            let u = &dil.unitaries[0];
            let m = n_order + 1;
            assert_eq!(u.rows(), m);
            for i in 0..m {
                for j in 0..m {
                    let wraps = i == 0 && j == m - 1;
                    let shifts = i > 0 && j == i - 1;
                    let expect = if wraps || shifts { 1.0 } else { 0.0 };
                    assert!(
                        (u.get(i, j) - cr(expect)).norm() < 1e-14,
                        "entry ({i},{j}) of shift"
                    );
                }
            }
        }
    }

    #[test]
    fn egervary_order_one_matches_halmos_for_scalar_half() {
        let t = CMatrix::real_diag(&[0.5]);
        let e = egervary_dilation(&t, 1, &tol()).unwrap();
        let h = halmos_dilation(&t, &tol()).unwrap();
        // n = 1, d_T = 1: the constructions collapse up to the unimodular
        // choice of V; our convention makes them literally equal.
        assert!(e.unitaries[0].sub(&h.unitaries[0]).max_abs() < 1e-12);
    }

    #[test]
    fn egervary_random_contraction_full_checks() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..12 {
            let n = 1 + rng.below(4) as usize;
            let n_order = 1 + rng.below(4) as usize;
            let cap = rng.range(0.3, 1.0);
            let t = sample::random_contraction(&mut rng, n, cap);
            let dd = defect(&t, &tol()).unwrap();
            let dil = egervary_dilation(&t, n_order, &tol()).unwrap();
            assert_eq!(dil.dim(), n + n_order * dd.d_rank);
            let u = &dil.unitaries[0];
            let m = u.rows();
            assert!(operator_norm(&u.adjoint().mul(u).sub(&CMatrix::identity(m))) <= 1e-10);
            let tuple = singleton(&t);
            let rep = verify_dilation(&dil, &tuple, n_order, &tol()).unwrap();
            assert!(rep.pass, "residual {}", rep.max_residual);
            let (minimal, dim) = check_n_minimality(&dil, n_order, &tol()).unwrap();
            assert!(minimal);
            assert_eq!(dim, m);
        }
    }

    #[test]
    fn egervary_with_planted_defect_rank() {
        let mut rng = SplitMix64::new(31);
        // d_T = 2 out of n = 3: one singular value pinned at 1
        let t = sample::contraction_with_singular_values(&mut rng, &[1.0, 0.7, 0.2]);
        let dd = defect(&t, &tol()).unwrap();
        assert_eq!(dd.d_rank, 2);
        let dil = egervary_dilation(&t, 4, &tol()).unwrap();
        assert_eq!(dil.dim(), 3 + 4 * 2);
        let rep = verify_dilation(&dil, &singleton(&t), 4, &tol()).unwrap();
        assert!(rep.pass, "residual {}", rep.max_residual);
    }

    #[test]
    fn egervary_of_unitary_returns_itself() {
        let mut rng = SplitMix64::new(13);
        let u = sample::random_unitary(&mut rng, 4);
        let dil = egervary_dilation(&u, 6, &tol()).unwrap();
        assert_eq!(dil.dim(), 4);
        assert!(dil.unitaries[0].sub(&u).fro_norm() < 1e-14);
        let rep = verify_dilation(&dil, &singleton(&u), 6, &tol()).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn egervary_generically_fails_beyond_declared_order() {
        // the zero scalar: P U^{N+1} P = 1 ≠ 0 = T^{N+1}... the shift wraps
        // around exactly at m = N+1
        let n_order = 3;
        let dil = egervary_dilation(&CMatrix::zeros(1, 1), n_order, &tol()).unwrap();
        let tuple = singleton(&CMatrix::zeros(1, 1));
        let rep = verify_dilation(&dil, &tuple, n_order + 1, &tol()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_failure, Some(vec![(n_order + 1) as i64]));
        assert!((rep.max_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minimality_detects_padding() {
        let mut rng = SplitMix64::new(14);
        let t = sample::random_contraction(&mut rng, 2, 0.9);
        let n_order = 3;
        let dil = egervary_dilation(&t, n_order, &tol()).unwrap();
        let padded = NDilation {
            h_dim: dil.h_dim,
            order: dil.order,
            construction: Construction::External,
            unitaries: vec![dil.unitaries[0].direct_sum(&CMatrix::identity(1))],
        };
        let (minimal_orig, dim_orig) = check_n_minimality(&dil, n_order, &tol()).unwrap();
        let (minimal_pad, dim_pad) = check_n_minimality(&padded, n_order, &tol()).unwrap();
        assert!(minimal_orig);
        assert!(!minimal_pad);
        assert_eq!(dim_orig, dim_pad);
    }

    #[test]
    fn verify_accepts_unitary_as_its_own_dilation_at_any_order() {
        let mut rng = SplitMix64::new(15);
        let u = sample::random_unitary(&mut rng, 3);
        let dil = NDilation {
            h_dim: 3,
            order: 9,
            construction: Construction::External,
            unitaries: vec![u.clone()],
        };
        let rep = verify_dilation(&dil, &singleton(&u), 9, &tol()).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn invariant_vector_trivial_cases() {
        let t = CMatrix::identity(3);
        let h = CMatrix::col_vec(&[cr(1.0), cr(2.0), cr(-1.0)]);
        assert!(invariant_vector_check(&t, &h, &tol()).unwrap() < 1e-14);
        let t2 = CMatrix::real_diag(&[1.0, 0.3]);
        let e1 = CMatrix::col_vec(&[cr(1.0), cr(0.0)]);
        assert!(invariant_vector_check(&t2, &e1, &tol()).unwrap() < 1e-14);
    }

    #[test]
    fn invariant_vector_constructed_eigenvector() {
        let mut rng = SplitMix64::new(16);
        for _ in 0..10 {
            let n = 2 + rng.below(4) as usize;
            let w = sample::random_unitary(&mut rng, n);
            let mut diag = vec![cr(1.0)];
            for _ in 1..n {
                diag.push(cr(rng.range(0.0, 0.9)));
            }
            let t = w.mul(&CMatrix::diag(&diag)).mul(&w.adjoint());
            let h = CMatrix::from_fn(n, 1, |i, _| w.get(i, 0));
            let r = invariant_vector_check(&t, &h, &tol()).unwrap();
            assert!(r <= 1e-10, "adjoint residual {r}");
        }
    }

    #[test]
    fn invariant_vector_rejects_zero_vector() {
        let t = CMatrix::identity(2);
        let h = CMatrix::zeros(2, 1);
        assert!(matches!(
            invariant_vector_check(&t, &h, &tol()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn invariant_vector_rejects_noninvariant() {
        let t = CMatrix::real_diag(&[0.5]);
        let h = CMatrix::col_vec(&[cr(1.0)]);
        assert!(matches!(
            invariant_vector_check(&t, &h, &tol()),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn ergodic_order_one_exact_value() {
        // direct 2-term sum at u = i: |(1 + i)/2| = √2/2
        let rep = ergodic_demo(1).unwrap();
        assert!((rep.residual_modulus - 0.5f64 * 2.0f64.sqrt()).abs() < 1e-14);
        assert!((rep.cesaro_mean_modulus - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ergodic_large_order_approaches_two_over_pi() {
        let rep = ergodic_demo(500).unwrap();
        let target = std::f64::consts::FRAC_2_PI;
        assert!((rep.residual_modulus - target).abs() <= 0.01 * target);
        assert!((rep.cesaro_mean_modulus - 1.0 / 501.0).abs() < 1e-12);
    }

    #[test]
    fn ndilation_wire_round_trip() {
        let t = CMatrix::from_rows(&[vec![c(0.1, 0.2), cr(0.0)], vec![cr(0.3), cr(0.0)]]);
        let dil = halmos_dilation(&t, &tol()).unwrap();
        let s = serde_json::to_string(&dil).unwrap();
        let back: NDilation = serde_json::from_str(&s).unwrap();
        assert_eq!(back.h_dim, 2);
        assert_eq!(back.order, 1);
        assert!(matches!(back.construction, Construction::Halmos));
        assert!(back.unitaries[0].sub(&dil.unitaries[0]).fro_norm() == 0.0);
    }
}
