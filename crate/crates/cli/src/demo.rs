//! The bundled fixture tour: one report per piece, printed as a JSON array.

use num_complex::Complex64;

use dilatron_core::cpmap::automorphism_compression_check;
use dilatron_core::cubature::scalar_cubature;
use dilatron_core::decomp::operator_norm;
use dilatron_core::dilation::{
    check_n_minimality, egervary_dilation, halmos_dilation, verify_dilation, Construction,
    NDilation,
};
use dilatron_core::matrix::{c, cr, CMatrix};
use dilatron_core::poly::holbrook_poly;
use dilatron_core::rng::SplitMix64;
use dilatron_core::sample;
use dilatron_core::tuple::{brehmer_check, ContractionTuple};
use dilatron_core::{CPMap, Tol};

use crate::{cubature_self_check, emit, RunReport};

pub fn run_demo(seed: u64, tol: &Tol) -> Result<bool, String> {
    let reports = vec![
        halmos_vs_egervary(seed, tol)?,
        nonisomorphic_one_dilations(seed, tol)?,
        pair_cubature(seed, tol)?,
        brehmer_failure(seed, tol)?,
        holbrook_sup(seed, tol)?,
        cp_index_samples(seed, tol)?,
    ];
    emit(&reports)?;
    Ok(reports.iter().all(|r| r.pass))
}

/// Halmos passes at order 1 and fails at order 2 with residual exactly
/// 0.75 for t = 0.5; the order-3 minimal construction passes with the
/// predicted dimension 1 + 3·1.
fn halmos_vs_egervary(seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let t = CMatrix::real_diag(&[0.5]);
    let tuple = ContractionTuple::new(vec![t.clone()], tol).map_err(|e| e.to_string())?;
    let hal = halmos_dilation(&t, tol).map_err(|e| e.to_string())?;
    let hal1 = verify_dilation(&hal, &tuple, 1, tol).map_err(|e| e.to_string())?;
    let hal2 = verify_dilation(&hal, &tuple, 2, tol).map_err(|e| e.to_string())?;
    let ege = egervary_dilation(&t, 3, tol).map_err(|e| e.to_string())?;
    let ege3 = verify_dilation(&ege, &tuple, 3, tol).map_err(|e| e.to_string())?;
    let (minimal, span_dim) = check_n_minimality(&ege, 3, tol).map_err(|e| e.to_string())?;

    let mut report = RunReport::new("demo:halmos-vs-egervary", seed, tol);
    report
        .residuals
        .insert("halmos_order1_residual".into(), hal1.max_residual);
    report
        .residuals
        .insert("halmos_order2_residual".into(), hal2.max_residual);
    report
        .residuals
        .insert("egervary_order3_residual".into(), ege3.max_residual);
    report
        .residuals
        .insert("egervary_dimension".into(), ege.dim() as f64);
    report
        .residuals
        .insert("egervary_span_dimension".into(), span_dim as f64);
    report.pass = hal1.pass
        && !hal2.pass
        && (hal2.max_residual - 0.75).abs() <= 1e-12
        && ege3.pass
        && ege.dim() == 4
        && minimal;
    Ok(report)
}

/// Two unitary 1-dilations of the zero scalar that are not isomorphic:
/// both verify at order 1 on the minimal dimension, yet differ as matrices.
fn nonisomorphic_one_dilations(seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let zero = CMatrix::zeros(1, 1);
    let tuple = ContractionTuple::new(vec![zero], tol).map_err(|e| e.to_string())?;
    let u1 = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]);
    let u2 = CMatrix::from_rows(&[vec![cr(0.0), cr(-1.0)], vec![cr(1.0), cr(0.0)]]);
    let mk = |u: &CMatrix| NDilation {
        h_dim: 1,
        order: 1,
        construction: Construction::External,
        unitaries: vec![u.clone()],
    };
    let rep1 = verify_dilation(&mk(&u1), &tuple, 1, tol).map_err(|e| e.to_string())?;
    let rep2 = verify_dilation(&mk(&u2), &tuple, 1, tol).map_err(|e| e.to_string())?;
    let distance = operator_norm(&u1.sub(&u2));
    let mut report = RunReport::new("demo:nonisomorphic-1-dilations", seed, tol);
    report
        .residuals
        .insert("first_residual".into(), rep1.max_residual);
    report
        .residuals
        .insert("second_residual".into(), rep2.max_residual);
    report.residuals.insert("distance".into(), distance);
    report.pass = rep1.pass && rep2.pass && distance > 1.0;
    Ok(report)
}

/// Cubature from the doubly-commuting pair dilation of (0.5, 0.3i) at
/// order 2: nine points, nonnegative weights, exact on every monomial of
/// total degree at most 2.
fn pair_cubature(seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let t = [c(0.5, 0.0), c(0.0, 0.3)];
    let rule = scalar_cubature(&t, 2, tol, seed).map_err(|e| e.to_string())?;
    let (sum_dev, max_mono) = cubature_self_check(&rule, &t, 2);
    let min_weight = rule.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let mut report = RunReport::new("demo:pair-cubature", seed, tol);
    report
        .residuals
        .insert("point_count".into(), rule.points.len() as f64);
    report
        .residuals
        .insert("weight_sum_deviation".into(), sum_dev);
    report
        .residuals
        .insert("max_monomial_residual".into(), max_mono);
    report.residuals.insert("min_weight".into(), min_weight);
    report.pass =
        rule.points.len() == 9 && sum_dev <= 1e-12 && max_mono <= 1e-9 && min_weight >= 0.0;
    Ok(report)
}

/// The commuting-but-not-doubly-commuting pair (S, S) with S the 2×2
/// nilpotent shift: the two-coordinate Brehmer sum is diag(1, −1).
fn brehmer_failure(seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let s = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]]);
    let tuple = ContractionTuple::new(vec![s.clone(), s], tol).map_err(|e| e.to_string())?;
    let rep = brehmer_check(&tuple, tol).map_err(|e| e.to_string())?;
    let mut report = RunReport::new("demo:brehmer-failure", seed, tol);
    let mut witnessed = f64::NAN;
    for (subset, min) in &rep.min_eigenvalues {
        let key = format!(
            "min_eig[{}]",
            subset
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        report.residuals.insert(key, *min);
        if subset == &vec![1, 2] {
            witnessed = *min;
        }
    }
    report.pass = !rep.pass && (witnessed + 1.0).abs() <= 1e-12;
    Ok(report)
}

/// Torus sup norm of the Holbrook polynomial at two grid resolutions; the
/// refined grid contains the coarse one, so agreement certifies the value.
fn holbrook_sup(seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let p = holbrook_poly();
    let coarse = p.sup_norm_torus(256);
    let fine = p.sup_norm_torus(512);
    let mut report = RunReport::new("demo:holbrook-sup-norm", seed, tol);
    report.residuals.insert("sup_at_256".into(), coarse);
    report.residuals.insert("sup_at_512".into(), fine);
    report
        .residuals
        .insert("resolution_gap".into(), fine - coarse);
    report.pass = fine >= coarse && fine - coarse <= 1e-3;
    Ok(report)
}

/// Index samples: conjugation (1), two-Kraus mixture (2), depolarizing
/// (n² = 4), the non-CP transpose, and the compression of a random
/// unitary, which always has index 1.
fn cp_index_samples(seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let mut rng = SplitMix64::new(seed);
    let mut report = RunReport::new("demo:cp-index-samples", seed, tol);
    let mut ok = true;

    let ident = CPMap::from_kraus(2, vec![CMatrix::identity(2)]).map_err(|e| e.to_string())?;
    let ident_index = ident.index(tol).map_err(|e| e.to_string())?;
    report
        .residuals
        .insert("identity_index".into(), ident_index as f64);
    ok &= ident_index == 1;

    let flip = CMatrix::diag(&[cr(1.0), cr(-1.0)]);
    let half = cr(0.5f64.sqrt());
    let mix = CPMap::from_kraus(2, vec![CMatrix::identity(2).scale(half), flip.scale(half)])
        .map_err(|e| e.to_string())?;
    let mix_index = mix.index(tol).map_err(|e| e.to_string())?;
    report
        .residuals
        .insert("two_kraus_index".into(), mix_index as f64);
    ok &= mix_index == 2;

    // depolarizing: φ(E_ab) = δ_ab I/2
    let images: Vec<CMatrix> = (0..4)
        .map(|i| {
            if i / 2 == i % 2 {
                CMatrix::identity(2).scale_re(0.5)
            } else {
                CMatrix::zeros(2, 2)
            }
        })
        .collect();
    let depol = CPMap::from_unit_images(2, images).map_err(|e| e.to_string())?;
    let depol_index = depol.index(tol).map_err(|e| e.to_string())?;
    report
        .residuals
        .insert("depolarizing_index".into(), depol_index as f64);
    ok &= depol_index == 4;

    // transpose: not CP, Choi min eigenvalue −1
    let transpose_images: Vec<CMatrix> = (0..4)
        .map(|i| {
            let mut e = CMatrix::zeros(2, 2);
            e.set(i % 2, i / 2, Complex64::ONE);
            e
        })
        .collect();
    let transpose = CPMap::from_unit_images(2, transpose_images).map_err(|e| e.to_string())?;
    let (cp, min_eig) = transpose.is_cp(tol);
    report
        .residuals
        .insert("transpose_choi_min_eig".into(), min_eig);
    ok &= !cp && (min_eig + 1.0).abs() <= 1e-10;

    let u = sample::random_unitary(&mut rng, 6);
    let compressed = automorphism_compression_check(&u, 2, tol).map_err(|e| e.to_string())?;
    let comp_index = compressed.index(tol).map_err(|e| e.to_string())?;
    report
        .residuals
        .insert("compression_index".into(), comp_index as f64);
    ok &= comp_index == 1;

    report.pass = ok;
    Ok(report)
}
