//! Completely positive maps on matrix algebras: Choi matrix, CP test,
//! Kraus decomposition, index, and the automorphism-compression picture.
//!
//! Basis convention, applied everywhere including the wire format: matrix
//! units `E_ab` are ordered row-major (`a` outer, `b` inner) and `vec`
//! stacks rows, so `vec(A)[a·n + b] = A[a, b]`. The Choi matrix is laid out
//! as `Choi[a·n + b, c·n + d] = φ(E_bd)[a, c]`, which is exactly the layout
//! for which `choi = Σ_i vec(A_i)·vec(A_i)*` holds for a Kraus-given map.
//! The map is CP precisely when this Hermitian matrix is PSD, and its
//! numerical rank is the index: the minimal number of Kraus operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::{herm_part_eig, operator_norm};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::tol::Tol;

/// A linear map on n×n matrices, normalized internally to its Choi matrix.
/// The Kraus or matrix-unit-image presentation it was built from is kept
/// for serialization.
#[derive(Debug, Clone)]
pub struct CPMap {
    dim: usize,
    kraus: Option<Vec<CMatrix>>,
    unit_images: Option<Vec<CMatrix>>,
    choi: CMatrix,
}

fn vec_row(a: &CMatrix) -> Vec<Complex64> {
    a.data().to_vec()
}

impl CPMap {
    /// Build from Kraus operators; the Choi matrix is `Σ vec(A_i)vec(A_i)*`
    /// and is PSD by construction.
    pub fn from_kraus(dim: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidInput(
                "need at least one Kraus operator".into(),
            ));
        }
        for (i, a) in kraus.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        let nn = dim * dim;
        let mut choi = CMatrix::zeros(nn, nn);
        for a in &kraus {
            let v = vec_row(a);
            for (r, &vr) in v.iter().enumerate() {
                for (s, &vs) in v.iter().enumerate() {
                    choi.set(r, s, choi.get(r, s) + vr * vs.conj());
                }
            }
        }
        Ok(Self {
            dim,
            kraus: Some(kraus),
            unit_images: None,
            choi,
        })
    }

    /// Build from the n² images of the matrix units, `images[a·n + b] =
    /// φ(E_ab)`. No positivity is assumed; [`is_cp`](Self::is_cp) decides.
    pub fn from_unit_images(dim: usize, images: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if images.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} matrix-unit images for dimension {dim} (need {})",
                images.len(),
                dim * dim
            )));
        }
        for (i, a) in images.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "image {i} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        let nn = dim * dim;
        let mut choi = CMatrix::zeros(nn, nn);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        choi.set(a * dim + b, c * dim + d, images[b * dim + d].get(a, c));
                    }
                }
            }
        }
        Ok(Self {
            dim,
            kraus: None,
            unit_images: Some(images),
            choi,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn kraus(&self) -> Option<&[CMatrix]> {
        self.kraus.as_deref()
    }

    pub fn unit_images(&self) -> Option<&[CMatrix]> {
        self.unit_images.as_deref()
    }

    /// Apply the map: `φ(X)[a, c] = Σ_{b,d} X[b, d] · Choi[a·n+b, c·n+d]`.
    /// Works uniformly for both presentations.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let n = self.dim;
        if x.rows() != n || x.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "argument is {}x{}, map acts on {n}x{n}",
                x.rows(),
                x.cols()
            )));
        }
        let mut out = CMatrix::zeros(n, n);
        for a in 0..n {
            for c in 0..n {
                let mut acc = Complex64::ZERO;
                for b in 0..n {
                    for d in 0..n {
                        acc += x.get(b, d) * self.choi.get(a * n + b, c * n + d);
                    }
                }
                out.set(a, c, acc);
            }
        }
        Ok(out)
    }

    /// Complete positivity via Choi positivity: Hermitian within `ε_herm`
    /// and min eigenvalue at least `−ε_psd`. Returns the verdict and the
    /// min eigenvalue of the Hermitian part.
    pub fn is_cp(&self, tol: &Tol) -> (bool, f64) {
        let herm_ok = self.choi.herm_defect() <= tol.eps_herm() * self.choi.fro_norm().max(1.0);
        let eig = herm_part_eig(&self.choi);
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        (herm_ok && min >= -tol.eps_psd(), min)
    }

    /// Spectrum of the (hermitized) Choi matrix, ascending.
    fn choi_spectrum(&self) -> (Vec<f64>, CMatrix) {
        let eig = herm_part_eig(&self.choi);
        (eig.eigenvalues, eig.eigenvectors)
    }

    /// Minimal number of Kraus operators: the rank of the Choi matrix at
    /// the crate rank tolerance.
    pub fn index(&self, tol: &Tol) -> Result<usize> {
        let (cp, min) = self.is_cp(tol);
        if !cp {
            return Err(Error::NotCp {
                min_eigenvalue: min,
            });
        }
        let (evs, _) = self.choi_spectrum();
        Ok(count_above_rank_cut(&evs, tol))
    }

    /// Kraus operators from the spectral decomposition of the Choi matrix,
    /// exactly `index` of them: each retained eigenpair `(λ, q)` reshapes
    /// row-major into `√λ · mat(q)`.
    pub fn kraus_decompose(&self, tol: &Tol) -> Result<Vec<CMatrix>> {
        let (cp, min) = self.is_cp(tol);
        if !cp {
            return Err(Error::NotCp {
                min_eigenvalue: min,
            });
        }
        let n = self.dim;
        let (evs, q) = self.choi_spectrum();
        let keep = count_above_rank_cut(&evs, tol);
        let total = evs.len();
        let mut out = Vec::with_capacity(keep);
        // eigenvalues ascend; take the top `keep`, largest first
        for idx in (total - keep..total).rev() {
            let root = evs[idx].sqrt();
            out.push(CMatrix::from_fn(n, n, |a, b| q.get(a * n + b, idx) * root));
        }
        Ok(out)
    }

    /// Informational contractivity: `‖φ(I)‖` and whether it is at most 1.
    pub fn contractivity(&self, tol: &Tol) -> (bool, f64) {
        let phi_i = self
            .apply(&CMatrix::identity(self.dim))
            .expect("identity has the right shape");
        let norm = operator_norm(&phi_i);
        (norm <= 1.0 + tol.eps_psd(), norm)
    }
}

fn count_above_rank_cut(ascending: &[f64], tol: &Tol) -> usize {
    let top = ascending.last().copied().unwrap_or(0.0).abs();
    let cut = tol.rank_tol() * top.max(1.0);
    ascending.iter().filter(|&&l| l > cut).count()
}

/// The compression picture of a finite-dimensional automorphism
/// `α(T) = U T U*`: restricting to the first `h_dim` coordinates yields the
/// map `T ↦ (P_H U P_H) T (P_H U P_H)*`, a single-Kraus map of index 1. Any
/// CP map of index above 1 therefore cannot arise this way.
pub fn automorphism_compression_check(u: &CMatrix, h_dim: usize, tol: &Tol) -> Result<CPMap> {
    if !u.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "unitary must be square, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    if h_dim == 0 || h_dim > u.rows() {
        return Err(Error::ShapeMismatch(format!(
            "h_dim {h_dim} incompatible with a {}-dimensional unitary",
            u.rows()
        )));
    }
    let resid = operator_norm(&u.adjoint().mul(u).sub(&CMatrix::identity(u.rows())));
    if resid > tol.eps_eig() {
        return Err(Error::NotUnitary { residual: resid });
    }
    CPMap::from_kraus(h_dim, vec![u.corner(h_dim)])
}

// --- wire format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CpMapWire {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<CMatrix>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit_images: Option<Vec<CMatrix>>,
}

impl Serialize for CPMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CpMapWire {
            dim: self.dim,
            kraus: self.kraus.clone(),
            unit_images: if self.kraus.is_some() {
                None
            } else {
                self.unit_images.clone()
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CPMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = CpMapWire::deserialize(d)?;
        match (wire.kraus, wire.unit_images) {
            (Some(k), None) => CPMap::from_kraus(wire.dim, k).map_err(D::Error::custom),
            (None, Some(im)) => CPMap::from_unit_images(wire.dim, im).map_err(D::Error::custom),
            (Some(_), Some(_)) => Err(D::Error::custom(
                "supply either \"kraus\" or \"unit_images\", not both",
            )),
            (None, None) => Err(D::Error::custom(
                "supply one of \"kraus\" or \"unit_images\"",
            )),
        }
    }
}
