//! Boundary-rank and nilpotent stress cases for the minimal construction.

use dilatron_core::dilation::{check_n_minimality, defect, egervary_dilation, verify_dilation};
use dilatron_core::matrix::{cr, CMatrix};
use dilatron_core::rng::SplitMix64;
use dilatron_core::sample;
use dilatron_core::tuple::ContractionTuple;
use dilatron_core::Tol;

/// Two singular values pinned at exactly 1: only the strict contraction
/// direction contributes a defect slot.
#[test]
fn doubly_degenerate_boundary_contraction() {
    let t = Tol::default();
    let mut rng = SplitMix64::new(99);
    let m = sample::contraction_with_singular_values(&mut rng, &[1.0, 1.0, 0.5]);
    let dd = defect(&m, &t).unwrap();
    assert_eq!(dd.d_rank, 1);
    let dil = egervary_dilation(&m, 3, &t).unwrap();
    assert_eq!(dil.dim(), 3 + 3);
    let tuple = ContractionTuple::new(vec![m], &t).unwrap();
    let rep = verify_dilation(&dil, &tuple, 3, &t).unwrap();
    assert!(rep.pass, "residual {}", rep.max_residual);
    let (minimal, dim) = check_n_minimality(&dil, 3, &t).unwrap();
    assert!(minimal);
    assert_eq!(dim, 6);
}

/// The nilpotent Jordan cell has singular values (1, ..., 1, 0), hence a
/// single defect direction and dilation dimension n + N at every order.
#[test]
fn jordan_cell_dilates_with_one_defect_slot() {
    let t = Tol::default();
    let n = 4;
    let j = CMatrix::from_fn(n, n, |i, jj| if jj == i + 1 { cr(1.0) } else { cr(0.0) });
    let dd = defect(&j, &t).unwrap();
    assert_eq!(dd.d_rank, 1);
    let tuple = ContractionTuple::new(vec![j.clone()], &t).unwrap();
    for order in [1usize, 3, 6] {
        let dil = egervary_dilation(&j, order, &t).unwrap();
        assert_eq!(dil.dim(), n + order);
        let rep = verify_dilation(&dil, &tuple, order, &t).unwrap();
        assert!(rep.pass, "order {order}: residual {}", rep.max_residual);
        let (minimal, _) = check_n_minimality(&dil, order, &t).unwrap();
        assert!(minimal, "order {order}");
    }
}
