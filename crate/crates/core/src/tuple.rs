//! Commuting tuples of contractions: double-commutation diagnostics, the
//! product unitary N-dilation, regular-dilation operators T(m) and their
//! verification, the Brehmer positivity test, and the commutant-pair
//! dilation.

use crate::decomp::operator_norm;
use crate::dilation::{
    commutation_residual, defect, shape_check, unitarity_residual, Construction, NDilation,
    VerificationReport,
};
use crate::error::{Error, Result};
use crate::matrix::{block_assemble, CMatrix};
use crate::mono::{signed_indices, MonomialTable};
use crate::tol::Tol;

/// Ordered list of same-size commuting contractions with cached commutation
/// diagnostics, recomputed on construction.
#[derive(Debug, Clone)]
pub struct ContractionTuple {
    ops: Vec<CMatrix>,
    commute_residual: f64,
    double_commute_residual: f64,
}

impl ContractionTuple {
    /// Validates squareness, equal sizes and the contraction bound, then
    /// caches `max ‖T_iT_j − T_jT_i‖` and `max ‖T_iT_j* − T_j*T_i‖`.
    pub fn new(ops: Vec<CMatrix>, tol: &Tol) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidInput("tuple must be nonempty".into()));
        }
        let n = ops[0].rows();
        for (i, op) in ops.iter().enumerate() {
            if !op.is_square() || op.rows() != n {
                return Err(Error::ShapeMismatch(format!(
                    "operator {i} is {}x{}, expected {n}x{n}",
                    op.rows(),
                    op.cols()
                )));
            }
            let norm = operator_norm(op);
            if norm > 1.0 + tol.eps_psd() {
                return Err(Error::NotContraction { norm });
            }
        }
        let mut commute = 0.0f64;
        let mut double = 0.0f64;
        for i in 0..ops.len() {
            for j in (i + 1)..ops.len() {
                let c = ops[i].mul(&ops[j]).sub(&ops[j].mul(&ops[i]));
                commute = commute.max(operator_norm(&c));
                // the (j, i) adjoint-commutator is the adjoint of this one,
                // so one norm covers both orientations
                let d = ops[i]
                    .mul(&ops[j].adjoint())
                    .sub(&ops[j].adjoint().mul(&ops[i]));
                double = double.max(operator_norm(&d));
            }
        }
        Ok(Self {
            ops,
            commute_residual: commute,
            double_commute_residual: double,
        })
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Common dimension of the operators.
    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn commute_residual(&self) -> f64 {
        self.commute_residual
    }

    pub fn double_commute_residual(&self) -> f64 {
        self.double_commute_residual
    }

    pub fn is_commuting(&self, tol: &Tol) -> bool {
        self.commute_residual <= tol.eps_dc()
    }

    pub fn is_doubly_commuting(&self, tol: &Tol) -> bool {
        self.commute_residual <= tol.eps_dc() && self.double_commute_residual <= tol.eps_dc()
    }
}

/// Integer multi-index, possibly negative, used for the regular-dilation
/// operators T(m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total variation `Σ|m_i|`.
    pub fn total_variation(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).sum()
    }

    /// Componentwise positive part `max(m_i, 0)`.
    pub fn positive_part(&self) -> Vec<u32> {
        self.0.iter().map(|&x| x.max(0) as u32).collect()
    }

    /// Componentwise negative part `max(−m_i, 0)`.
    pub fn negative_part(&self) -> Vec<u32> {
        self.0.iter().map(|&x| (-x).max(0) as u32).collect()
    }
}

/// The regular-dilation operator
/// `T(m) = (T_1^{m_1⁻}···T_k^{m_k⁻})* · T_1^{m_1⁺}···T_k^{m_k⁺}`.
pub fn t_of_m(tuple: &ContractionTuple, m: &MultiIndex) -> Result<CMatrix> {
    if m.len() != tuple.len() {
        return Err(Error::ShapeMismatch(format!(
            "multi-index length {} for a {}-tuple",
            m.len(),
            tuple.len()
        )));
    }
    let n = tuple.dim();
    let prod = |exps: &[u32]| -> CMatrix {
        let mut acc = CMatrix::identity(n);
        for (op, &e) in tuple.ops().iter().zip(exps) {
            for _ in 0..e {
                acc = acc.mul(op);
            }
        }
        acc
    };
    let neg = prod(&m.negative_part());
    let pos = prod(&m.positive_part());
    Ok(neg.adjoint().mul(&pos))
}

/// One stage of the product construction: the (N+1)-slot unfolding
///
/// ```text
/// [ V        ·   ·   D_{V*} ]
/// [ D_V      ·   ·   −V*    ]
/// [      I           ·      ]
/// [          I       ·      ]
/// ```
///
/// which is unitary for any contraction V and reproduces V^j under
/// compression for j ≤ N. Defect slots are full copies of the current
/// space, so the result has (N+1) times its dimension.
fn unfold_stage(v: &CMatrix, n_order: usize, tol: &Tol) -> Result<CMatrix> {
    let dd = defect(v, tol)?;
    let d = v.rows();
    let slots = n_order + 1;
    let dims = vec![d; slots];
    let mut grid: Vec<Vec<Option<CMatrix>>> = vec![vec![None; slots]; slots];
    grid[0][0] = Some(v.clone());
    grid[0][slots - 1] = Some(dd.d_star_op);
    grid[1][0] = Some(dd.d_op);
    grid[1][slots - 1] = Some(v.adjoint().neg());
    for j in 2..slots {
        grid[j][j - 1] = Some(CMatrix::identity(d));
    }
    block_assemble(&grid, &dims, &dims)
}

/// Block-diagonal embedding `diag(V, ..., V)` with N+1 copies.
fn diagonal_stage(v: &CMatrix, n_order: usize) -> CMatrix {
    let mut out = v.clone();
    for _ in 0..n_order {
        out = out.direct_sum(v);
    }
    out
}

/// Unitary N-dilation of a doubly commuting k-tuple on dimension
/// `(N+1)^k · n`, built one coordinate at a time: at stage i the current
/// i-th operator is unfolded to a unitary and every other operator is
/// copied diagonally. The result is a regular N-dilation.
pub fn doubly_commuting_dilation(
    tuple: &ContractionTuple,
    n_order: usize,
    tol: &Tol,
) -> Result<NDilation> {
    if n_order == 0 {
        return Err(Error::InvalidInput(
            "dilation order must be at least 1".into(),
        ));
    }
    if !tuple.is_doubly_commuting(tol) {
        return Err(Error::NotDoublyCommuting {
            residual: tuple
                .double_commute_residual()
                .max(tuple.commute_residual()),
        });
    }
    let mut current: Vec<CMatrix> = tuple.ops().to_vec();
    for stage in 0..current.len() {
        let mut next = Vec::with_capacity(current.len());
        for (i, v) in current.iter().enumerate() {
            if i == stage {
                next.push(unfold_stage(v, n_order, tol)?);
            } else {
                next.push(diagonal_stage(v, n_order));
            }
        }
        current = next;
    }
    Ok(NDilation {
        h_dim: tuple.dim(),
        order: n_order,
        construction: Construction::DoublyCommuting,
        unitaries: current,
    })
}

/// Check the regular-dilation identities `T(m) = P_H U(m) P_H` for every
/// integer multi-index with total variation at most `n_order`, where
/// `U(m)` uses the same positive/negative-part formula with `U_i^{-1} = U_i*`.
pub fn verify_regular(
    dil: &NDilation,
    tuple: &ContractionTuple,
    n_order: usize,
    tol: &Tol,
) -> Result<VerificationReport> {
    shape_check(dil, tuple)?;
    let n = dil.h_dim;
    let u_table = MonomialTable::build(&dil.unitaries, n_order);
    let t_table = MonomialTable::build(tuple.ops(), n_order);
    let eps = tol.eps_dil();
    let mut residuals = Vec::new();
    let mut max_residual = 0.0f64;
    let mut first_failure = None;
    for m in signed_indices(tuple.len(), n_order) {
        let mi = MultiIndex(m.clone());
        let pos = mi.positive_part();
        let neg = mi.negative_part();
        let u_of_m = u_table.get(&neg).adjoint().mul(u_table.get(&pos));
        let t_of_m = t_table.get(&neg).adjoint().mul(t_table.get(&pos));
        let r = operator_norm(&t_of_m.sub(&u_of_m.corner(n)));
        if r > eps && first_failure.is_none() {
            first_failure = Some(m.clone());
        }
        max_residual = max_residual.max(r);
        residuals.push((m, r));
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

/// Minimum eigenvalue of each Brehmer operator sum, one per nonempty
/// subset of coordinates.
#[derive(Debug, Clone)]
pub struct BrehmerReport {
    /// `(subset as 1-based indices, min eigenvalue)` in bitmask order.
    pub min_eigenvalues: Vec<(Vec<usize>, f64)>,
    pub pass: bool,
    pub tolerance: f64,
}

const BREHMER_MAX_VARS: usize = 12;

/// The Brehmer positivity condition: for every nonempty `u ⊆ {1..k}`,
/// `Σ_{v ⊆ u} (−1)^{|v|} T(e(v))* T(e(v)) ⪰ 0`, where `e(v)` is the 0/1
/// multi-index of `v`. Necessary and sufficient for a regular unitary
/// dilation; doubly commuting tuples always satisfy it.
pub fn brehmer_check(tuple: &ContractionTuple, tol: &Tol) -> Result<BrehmerReport> {
    if !tuple.is_commuting(tol) {
        return Err(Error::NotCommuting {
            residual: tuple.commute_residual(),
        });
    }
    let k = tuple.len();
    if k > BREHMER_MAX_VARS {
        return Err(Error::InvalidInput(format!(
            "Brehmer check enumerates 2^k subsets; k = {k} exceeds the cap of {BREHMER_MAX_VARS}"
        )));
    }
    let n = tuple.dim();
    // products Π_{i∈v} T_i for every subset, built incrementally
    let mut subset_products: Vec<CMatrix> = Vec::with_capacity(1 << k);
    subset_products.push(CMatrix::identity(n));
    for v in 1usize..(1 << k) {
        let low = v.trailing_zeros() as usize;
        let prev = v & (v - 1);
        subset_products.push(subset_products[prev].mul(&tuple.ops()[low]));
    }
    let mut min_eigenvalues = Vec::new();
    let mut pass = true;
    for u in 1usize..(1 << k) {
        let mut sum = CMatrix::zeros(n, n);
        let mut v = u;
        loop {
            // iterate subsets v ⊆ u, including v = 0
            let p = &subset_products[v];
            let term = p.adjoint().mul(p);
            let sign = if (v.count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            sum = sum.add(&term.scale_re(sign));
            if v == 0 {
                break;
            }
            v = (v - 1) & u;
        }
        let eig = crate::decomp::herm_part_eig(&sum.hermitize());
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -tol.eps_psd() {
            pass = false;
        }
        let subset: Vec<usize> = (0..k)
            .filter(|i| u & (1 << i) != 0)
            .map(|i| i + 1)
            .collect();
        min_eigenvalues.push((subset, min));
    }
    Ok(BrehmerReport {
        min_eigenvalues,
        pass,
        tolerance: tol.eps_psd(),
    })
}

/// Joint unitary N-dilation of a commuting pair (U, V) with U unitary.
/// Commuting with a normal matrix forces commuting with its adjoint, so the
/// pair doubly commutes; the adjoint-commutation residual is checked rather
/// than assumed, and inconsistent input is rejected. U needs no dilation of
/// its own, so only one unfolding stage runs and the result lives on
/// dimension `(N+1)·m` instead of `(N+1)²·m`.
pub fn dilate_commutant_pair(
    u_mat: &CMatrix,
    v_mat: &CMatrix,
    n_order: usize,
    tol: &Tol,
) -> Result<NDilation> {
    if n_order == 0 {
        return Err(Error::InvalidInput(
            "dilation order must be at least 1".into(),
        ));
    }
    if !u_mat.is_square() || !v_mat.is_square() || u_mat.rows() != v_mat.rows() {
        return Err(Error::ShapeMismatch(format!(
            "need square operators of equal size, got {}x{} and {}x{}",
            u_mat.rows(),
            u_mat.cols(),
            v_mat.rows(),
            v_mat.cols()
        )));
    }
    let m = u_mat.rows();
    let unit_resid = operator_norm(&u_mat.adjoint().mul(u_mat).sub(&CMatrix::identity(m)));
    if unit_resid > tol.eps_eig() {
        return Err(Error::NotUnitary {
            residual: unit_resid,
        });
    }
    let commute = operator_norm(&u_mat.mul(v_mat).sub(&v_mat.mul(u_mat)));
    if commute > tol.eps_dc() {
        return Err(Error::NotCommuting { residual: commute });
    }
    let fuglede = operator_norm(&u_mat.mul(&v_mat.adjoint()).sub(&v_mat.adjoint().mul(u_mat)));
    if fuglede > tol.eps_dc() {
        return Err(Error::FugledeResidual { residual: fuglede });
    }
    let norm_v = operator_norm(v_mat);
    if norm_v > 1.0 + tol.eps_psd() {
        return Err(Error::NotContraction { norm: norm_v });
    }
    let u_dil = diagonal_stage(u_mat, n_order);
    let v_dil = unfold_stage(v_mat, n_order, tol)?;
    Ok(NDilation {
        h_dim: m,
        order: n_order,
        construction: Construction::CommutantPair,
        unitaries: vec![u_dil, v_dil],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::verify_dilation;
    use crate::matrix::{c, cr};
    use crate::rng::SplitMix64;
    use crate::sample;

    fn tol() -> Tol {
        Tol::default()
    }

    fn tuple_of(ops: Vec<CMatrix>) -> ContractionTuple {
        ContractionTuple::new(ops, &tol()).unwrap()
    }

    #[test]
    fn tuple_rejects_mismatched_sizes() {
        let a = CMatrix::zeros(2, 2);
        let b = CMatrix::zeros(3, 3);
        assert!(matches!(
            ContractionTuple::new(vec![a, b], &tol()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn tuple_rejects_expansion() {
        let a = CMatrix::real_diag(&[2.0]);
        assert!(matches!(
            ContractionTuple::new(vec![a], &tol()),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn residuals_of_diagonal_pair_vanish() {
        let t = tuple_of(vec![
            CMatrix::real_diag(&[0.5, 0.1]),
            CMatrix::real_diag(&[0.2, 0.9]),
        ]);
        assert_eq!(t.commute_residual(), 0.0);
        assert_eq!(t.double_commute_residual(), 0.0);
        assert!(t.is_doubly_commuting(&tol()));
    }

    #[test]
    fn t_of_m_zero_index_is_identity() {
        let t = tuple_of(vec![CMatrix::real_diag(&[0.5, 0.3])]);
        let out = t_of_m(&t, &MultiIndex(vec![0])).unwrap();
        assert!(out.sub(&CMatrix::identity(2)).fro_norm() == 0.0);
    }

    #[test]
    fn t_of_m_mixed_sign_ordering() {
        // m = (1, -1) puts the starred factor on the left: T2* T1
        let t1 = CMatrix::from_rows(&[vec![cr(0.5), cr(0.1)], vec![cr(0.0), cr(0.5)]]);
        let t2 = CMatrix::from_rows(&[vec![cr(0.3), cr(0.2)], vec![cr(0.0), cr(0.3)]]);
        let t = tuple_of(vec![t1.clone(), t2.clone()]);
        let out = t_of_m(&t, &MultiIndex(vec![1, -1])).unwrap();
        let expect = t2.adjoint().mul(&t1);
        assert!(out.sub(&expect).fro_norm() < 1e-14);
    }

    #[test]
    fn t_of_m_scalar_negative_powers() {
        let t = tuple_of(vec![CMatrix::real_diag(&[0.5])]);
        let out = t_of_m(&t, &MultiIndex(vec![-2])).unwrap();
        assert!((out.get(0, 0) - cr(0.25)).norm() < 1e-14);
    }

    #[test]
    fn unfold_of_zero_scalar_is_cyclic_shift() {
        let u = unfold_stage(&CMatrix::zeros(1, 1), 3, &tol()).unwrap();
        assert_eq!(u.rows(), 4);
        // P U^k P = 0 for k = 1..3
        for k in 1..=3 {
            assert!(u.pow(k).get(0, 0).norm() < 1e-14);
        }
        assert!(operator_norm(&u.adjoint().mul(&u).sub(&CMatrix::identity(4))) < 1e-12);
    }

    #[test]
    fn doubly_commuting_single_contraction_unfolds() {
        let mut rng = SplitMix64::new(21);
        let t = sample::random_contraction(&mut rng, 2, 0.9);
        let tuple = tuple_of(vec![t.clone()]);
        let dil = doubly_commuting_dilation(&tuple, 3, &tol()).unwrap();
        assert_eq!(dil.dim(), 4 * 2);
        let rep = verify_dilation(&dil, &tuple, 3, &tol()).unwrap();
        assert!(rep.pass, "residual {}", rep.max_residual);
    }

    #[test]
    fn stage_compression_telescopes() {
        // after each of the k stages, compressing the partial construction
        // back to H reproduces T(m) for every |m| ≤ N
        let mut rng = SplitMix64::new(210);
        let ops = sample::doubly_commuting_tuple(&mut rng, 3, 2);
        let tuple = tuple_of(ops.clone());
        let n = tuple.dim();
        let n_order = 2;
        let mut current = ops;
        for stage in 0..current.len() {
            let mut next = Vec::with_capacity(current.len());
            for (i, v) in current.iter().enumerate() {
                if i == stage {
                    next.push(unfold_stage(v, n_order, &tol()).unwrap());
                } else {
                    next.push(diagonal_stage(v, n_order));
                }
            }
            current = next;
            for m in crate::mono::signed_indices(3, n_order) {
                let mi = MultiIndex(m.clone());
                let expect = t_of_m(&tuple, &mi).unwrap();
                let pos = mi.positive_part();
                let neg = mi.negative_part();
                let prod = |exps: &[u32]| -> CMatrix {
                    let dim = current[0].rows();
                    let mut acc = CMatrix::identity(dim);
                    for (w, &e) in current.iter().zip(exps) {
                        for _ in 0..e {
                            acc = acc.mul(w);
                        }
                    }
                    acc
                };
                let w_of_m = prod(&neg).adjoint().mul(&prod(&pos));
                let resid = operator_norm(&expect.sub(&w_of_m.corner(n)));
                assert!(resid <= 1e-10, "stage {stage}, m = {m:?}: residual {resid}");
            }
        }
    }

    #[test]
    fn doubly_commuting_unitary_tuple_stays_diagonal_embedding() {
        let mut rng = SplitMix64::new(22);
        let q = sample::random_unitary(&mut rng, 2);
        let d1: Vec<_> = (0..2).map(|_| rng.unimodular()).collect();
        let d2: Vec<_> = (0..2).map(|_| rng.unimodular()).collect();
        let u1 = q.mul(&CMatrix::diag(&d1)).mul(&q.adjoint());
        let u2 = q.mul(&CMatrix::diag(&d2)).mul(&q.adjoint());
        let tuple = tuple_of(vec![u1.clone(), u2.clone()]);
        let n_order = 2;
        let dil = doubly_commuting_dilation(&tuple, n_order, &tol()).unwrap();
        // every stage keeps unitaries unitary; the dilation of a unitary
        // tuple embeds it diagonally, so all residuals vanish
        let rep = verify_dilation(&dil, &tuple, n_order, &tol()).unwrap();
        assert!(rep.pass);
        assert!(rep.max_residual <= 1e-12);
        for u in &dil.unitaries {
            let m = u.rows();
            assert!(operator_norm(&u.adjoint().mul(u).sub(&CMatrix::identity(m))) <= 1e-12);
        }
    }

    #[test]
    fn doubly_commuting_scalar_pair_example() {
        let t1 = CMatrix::diag(&[cr(0.5)]);
        let t2 = CMatrix::diag(&[c(0.0, 0.3)]);
        let tuple = tuple_of(vec![t1, t2]);
        let dil = doubly_commuting_dilation(&tuple, 2, &tol()).unwrap();
        assert_eq!(dil.dim(), 9);
        // scalar oracle: t1^a t2^b against the compressed products
        for a in 0..=2u32 {
            for b in 0..=(2 - a) {
                let expect = cr(0.5).powu(a) * c(0.0, 0.3).powu(b);
                let got = dil.unitaries[0]
                    .pow(a as usize)
                    .mul(&dil.unitaries[1].pow(b as usize))
                    .get(0, 0);
                assert!(
                    (got - expect).norm() <= 1e-10,
                    "a={a} b={b}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn doubly_commuting_rejects_non_doubly_commuting() {
        let s = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]]);
        // S commutes with itself but S S* ≠ S* S
        let tuple = tuple_of(vec![s.clone(), s]);
        assert!(matches!(
            doubly_commuting_dilation(&tuple, 2, &tol()),
            Err(Error::NotDoublyCommuting { .. })
        ));
    }

    #[test]
    fn regular_verification_passes_for_product_construction() {
        let mut rng = SplitMix64::new(23);
        let ops = sample::doubly_commuting_tuple(&mut rng, 2, 2);
        let tuple = tuple_of(ops);
        let n_order = 2;
        let dil = doubly_commuting_dilation(&tuple, n_order, &tol()).unwrap();
        let rep = verify_regular(&dil, &tuple, n_order, &tol()).unwrap();
        assert!(rep.pass, "max residual {}", rep.max_residual);
        // m = 0 is among the indices with residual 0
        let zero = rep
            .residuals
            .iter()
            .find(|(m, _)| m.iter().all(|&x| x == 0));
        assert!(zero.unwrap().1 <= 1e-14);
    }

    #[test]
    fn regular_holds_for_single_contraction_dilations() {
        // for one variable the negative-index identities are adjoints of
        // the positive ones, so any true N-dilation is N-regular
        let mut rng = SplitMix64::new(231);
        let t = sample::random_contraction(&mut rng, 3, 0.9);
        let tuple = tuple_of(vec![t.clone()]);
        let dil = crate::dilation::egervary_dilation(&t, 3, &tol()).unwrap();
        let rep = verify_regular(&dil, &tuple, 3, &tol()).unwrap();
        assert!(rep.pass, "max residual {}", rep.max_residual);
    }

    #[test]
    fn regular_detects_wrong_dilation() {
        let mut rng = SplitMix64::new(24);
        let ops = sample::doubly_commuting_tuple(&mut rng, 2, 2);
        let tuple = tuple_of(ops);
        let dil = doubly_commuting_dilation(&tuple, 2, &tol()).unwrap();
        let m = dil.dim();
        let mut broken = dil.clone();
        // replace U_2 by the identity on a nonunitary coordinate
        broken.unitaries[1] = CMatrix::identity(m);
        let rep = verify_regular(&broken, &tuple, 2, &tol()).unwrap();
        assert!(!rep.pass);
        let fail = rep.first_failure.unwrap();
        assert_eq!(fail.iter().map(|x| x.abs()).sum::<i64>(), 1);
        assert_ne!(fail[1], 0);
    }

    #[test]
    fn brehmer_single_contraction_always_passes() {
        let mut rng = SplitMix64::new(25);
        for _ in 0..10 {
            let cap = rng.range(0.2, 1.0);
            let t = sample::random_contraction(&mut rng, 3, cap);
            let rep = brehmer_check(&tuple_of(vec![t]), &tol()).unwrap();
            assert!(rep.pass);
            assert_eq!(rep.min_eigenvalues.len(), 1);
            assert!(rep.min_eigenvalues[0].1 >= -1e-10);
        }
    }

    #[test]
    fn brehmer_doubly_commuting_passes() {
        let mut rng = SplitMix64::new(26);
        for k in 1..=3usize {
            let ops = sample::doubly_commuting_tuple(&mut rng, k, 3);
            let rep = brehmer_check(&tuple_of(ops), &tol()).unwrap();
            assert!(rep.pass, "k={k}");
            for (_, min) in &rep.min_eigenvalues {
                assert!(*min >= -1e-10);
            }
        }
    }

    #[test]
    fn brehmer_shift_pair_fails_with_min_eigenvalue_minus_one() {
        // (S, S) with S = [[0,1],[0,0]]: the u = {1,2} sum is
        // I − 2S*S + (S²)*S² = diag(1, −1) since S² = 0
        let s = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]]);
        let rep = brehmer_check(&tuple_of(vec![s.clone(), s]), &tol()).unwrap();
        assert!(!rep.pass);
        let both = rep
            .min_eigenvalues
            .iter()
            .find(|(u, _)| u == &vec![1, 2])
            .unwrap();
        assert!((both.1 + 1.0).abs() <= 1e-12, "min eig {}", both.1);
    }

    #[test]
    fn commutant_pair_identity_reduces_to_single_dilation() {
        let mut rng = SplitMix64::new(27);
        let v = sample::random_contraction(&mut rng, 2, 0.9);
        let dil = dilate_commutant_pair(&CMatrix::identity(2), &v, 2, &tol()).unwrap();
        assert_eq!(dil.dim(), 3 * 2);
        let tuple = tuple_of(vec![CMatrix::identity(2), v]);
        let rep = verify_dilation(&dil, &tuple, 2, &tol()).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn commutant_pair_diagonal_example() {
        let u = CMatrix::diag(&[cr(1.0), c(0.0, 1.0)]);
        let v = CMatrix::real_diag(&[0.5, 0.2]);
        let dil = dilate_commutant_pair(&u, &v, 2, &tol()).unwrap();
        let tuple = tuple_of(vec![u, v]);
        let rep = verify_dilation(&dil, &tuple, 2, &tol()).unwrap();
        assert!(rep.pass, "residual {}", rep.max_residual);
    }

    #[test]
    fn commutant_pair_rotation_with_scalar() {
        let theta = 0.7f64;
        let u = CMatrix::from_rows(&[
            vec![cr(theta.cos()), cr(-theta.sin())],
            vec![cr(theta.sin()), cr(theta.cos())],
        ]);
        let v = CMatrix::identity(2).scale_re(0.7);
        let dil = dilate_commutant_pair(&u, &v, 3, &tol()).unwrap();
        let tuple = tuple_of(vec![u, v]);
        let rep = verify_dilation(&dil, &tuple, 3, &tol()).unwrap();
        assert!(rep.pass, "residual {}", rep.max_residual);
        let reg = verify_regular(&dil, &tuple, 3, &tol()).unwrap();
        assert!(reg.pass);
    }

    #[test]
    fn commutant_pair_rejects_nonunitary_first() {
        let a = CMatrix::real_diag(&[0.5, 0.5]);
        let v = CMatrix::real_diag(&[0.5, 0.2]);
        assert!(matches!(
            dilate_commutant_pair(&a, &v, 2, &tol()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn commutant_pair_rejects_noncommuting() {
        let u = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]);
        let v = CMatrix::real_diag(&[0.5, 0.2]);
        assert!(matches!(
            dilate_commutant_pair(&u, &v, 2, &tol()),
            Err(Error::NotCommuting { .. })
        ));
    }
}
