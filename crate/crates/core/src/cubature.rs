//! Simultaneous diagonalization of commuting unitaries and what it buys:
//! operator-weighted von Neumann certificates and scalar cubature rules on
//! the torus.
//!
//! A unitary N-dilation of a tuple, once jointly diagonalized, hands over
//! `m = dim K` torus points `w^i` and rank-one PSD weights
//! `A_i = (P_H e_i)(P_H e_i)*` with `Σ A_i = I`, such that
//! `p(T_1,...,T_k) = Σ p(w^i) A_i` for every polynomial of degree ≤ N.
//! Specializing to scalar tuples flattens the weights to a nonnegative
//! cubature rule with `(N+1)^k` nodes that reproduces point evaluation on
//! the polydisc.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::{herm_part_eig, operator_norm};
use crate::dilation::{verify_dilation, NDilation};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::poly::MultiPoly;
use crate::rng::SplitMix64;
use crate::tol::Tol;
use crate::tuple::{doubly_commuting_dilation, ContractionTuple};

/// Joint eigenbasis of a commuting unitary family: `U_j·Q ≈ Q·diag(w_j^·)`
/// for every j, with `spectra[j][i]` the j-th coordinate of the i-th joint
/// eigenvalue.
#[derive(Debug, Clone)]
pub struct JointDiag {
    pub basis: CMatrix,
    pub spectra: Vec<Vec<Complex64>>,
}

/// Torus points plus PSD operator weights summing to the identity on H.
#[derive(Debug, Clone)]
pub struct VNCertificate {
    /// Order of the dilation the certificate was extracted from; bounds the
    /// polynomial degrees it covers.
    pub order: usize,
    /// `m` points on the k-torus.
    pub points: Vec<Vec<Complex64>>,
    /// `m` PSD operators on H with `Σ A_i = I`.
    pub weight_ops: Vec<CMatrix>,
}

/// Torus points plus nonnegative scalar weights summing to one.
#[derive(Debug, Clone)]
pub struct CubatureRule {
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

// wire formats: points as nested [re, im] pairs

fn points_to_wire(points: &[Vec<Complex64>]) -> Vec<Vec<[f64; 2]>> {
    points
        .iter()
        .map(|p| p.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn points_from_wire(wire: Vec<Vec<[f64; 2]>>) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::with_capacity(wire.len());
    for (i, p) in wire.into_iter().enumerate() {
        let mut point = Vec::with_capacity(p.len());
        for (j, [re, im]) in p.into_iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "points[{i}][{j}]: non-finite coordinate"
                )));
            }
            point.push(Complex64::new(re, im));
        }
        out.push(point);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CertWire {
    order: usize,
    points: Vec<Vec<[f64; 2]>>,
    weight_ops: Vec<CMatrix>,
}

impl Serialize for VNCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertWire {
            order: self.order,
            points: points_to_wire(&self.points),
            weight_ops: self.weight_ops.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VNCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = CertWire::deserialize(d)?;
        Ok(VNCertificate {
            order: wire.order,
            points: points_from_wire(wire.points).map_err(D::Error::custom)?,
            weight_ops: wire.weight_ops,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RuleWire {
    points: Vec<Vec<[f64; 2]>>,
    weights: Vec<f64>,
}

impl Serialize for CubatureRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RuleWire {
            points: points_to_wire(&self.points),
            weights: self.weights.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubatureRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = RuleWire::deserialize(d)?;
        if wire.points.len() != wire.weights.len() {
            return Err(D::Error::custom(format!(
                "{} points for {} weights",
                wire.points.len(),
                wire.weights.len()
            )));
        }
        Ok(CubatureRule {
            points: points_from_wire(wire.points).map_err(D::Error::custom)?,
            weights: wire.weights,
        })
    }
}

const JD_CLUSTER_GAP: f64 = 1e-7;
const JD_MAX_DEPTH: usize = 5;

/// Simultaneously diagonalize commuting unitaries.
///
/// A random Gaussian combination `Z = Σ c_j U_j` is normal and generically
/// separates the joint eigenspaces; its unitary diagonalization (Hermitian
/// part first, skew part within the resulting eigenvalue clusters) is then
/// checked against every `U_j`, and clusters of the spectrum of Z are
/// refined recursively when accidental collisions keep the off-diagonal
/// residual above `ε_jd`. Joint eigenvalues are sorted lexicographically by
/// argument for reproducibility.
pub fn joint_diagonalize(unitaries: &[CMatrix], tol: &Tol, seed: u64) -> Result<JointDiag> {
    if unitaries.is_empty() {
        return Err(Error::InvalidInput("need at least one unitary".into()));
    }
    let m = unitaries[0].rows();
    for u in unitaries {
        if !u.is_square() || u.rows() != m {
            return Err(Error::ShapeMismatch(format!(
                "unitaries must be square of equal size, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let resid = operator_norm(&u.adjoint().mul(u).sub(&CMatrix::identity(m)));
        if resid > tol.eps_eig() {
            return Err(Error::NotUnitary { residual: resid });
        }
    }
    for i in 0..unitaries.len() {
        for j in (i + 1)..unitaries.len() {
            let r = unitaries[i]
                .mul(&unitaries[j])
                .sub(&unitaries[j].mul(&unitaries[i]));
            let residual = operator_norm(&r);
            if residual > tol.eps_dc() {
                return Err(Error::NotCommuting { residual });
            }
        }
    }
    let mut rng = SplitMix64::new(seed);
    let views: Vec<&CMatrix> = unitaries.iter().collect();
    let basis = jd_recurse(&views, &mut rng, 0, tol)?;

    // read off spectra and fold the off-diagonal residual into ε_jd
    let mut worst_off = 0.0f64;
    let mut spectra = Vec::with_capacity(unitaries.len());
    for u in unitaries {
        let d = basis.adjoint().mul(&u.mul(&basis));
        let diag: Vec<Complex64> = (0..m).map(|i| d.get(i, i)).collect();
        let mut off = d.clone();
        for i in 0..m {
            off.set(i, i, Complex64::ZERO);
        }
        worst_off = worst_off.max(operator_norm(&off));
        spectra.push(diag);
    }
    if worst_off > tol.eps_jd() {
        return Err(Error::DegenerateFailure {
            residual: worst_off,
        });
    }

    // lexicographic sort by (arg w_1, ..., arg w_k) in [0, 2π)
    let mut order: Vec<usize> = (0..m).collect();
    let key = |i: usize| -> Vec<f64> {
        spectra
            .iter()
            .map(|s| {
                let a = s[i].arg();
                if a < 0.0 {
                    a + std::f64::consts::TAU
                } else {
                    a
                }
            })
            .collect()
    };
    order.sort_by(|&i, &j| {
        key(i)
            .partial_cmp(&key(j))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let basis = basis.select_columns(&order);
    let spectra = spectra
        .into_iter()
        .map(|s| order.iter().map(|&i| s[i]).collect())
        .collect();
    Ok(JointDiag { basis, spectra })
}

fn jd_recurse(
    unitaries: &[&CMatrix],
    rng: &mut SplitMix64,
    depth: usize,
    tol: &Tol,
) -> Result<CMatrix> {
    let m = unitaries[0].rows();
    if m == 1 {
        return Ok(CMatrix::identity(1));
    }
    let coeffs: Vec<Complex64> = (0..unitaries.len())
        .map(|_| rng.complex_gaussian())
        .collect();
    let mut z = CMatrix::zeros(m, m);
    for (u, &c) in unitaries.iter().zip(&coeffs) {
        z = z.add(&u.scale(c));
    }
    let mut q = diagonalize_normal(&z);

    let off_residual = |q: &CMatrix| -> f64 {
        let mut worst = 0.0f64;
        for u in unitaries {
            let d = q.adjoint().mul(&u.mul(q));
            let mut off = d.clone();
            for i in 0..m {
                off.set(i, i, Complex64::ZERO);
            }
            worst = worst.max(operator_norm(&off));
        }
        worst
    };

    if off_residual(&q) <= tol.eps_jd() {
        return Ok(q);
    }
    if depth >= JD_MAX_DEPTH {
        return Err(Error::DegenerateFailure {
            residual: off_residual(&q),
        });
    }
    // refine inside clusters of the spectrum of Z
    let zq = q.adjoint().mul(&z.mul(&q));
    let mu: Vec<Complex64> = (0..m).map(|i| zq.get(i, i)).collect();
    for cluster in cluster_complex(&mu, JD_CLUSTER_GAP) {
        if cluster.len() < 2 {
            continue;
        }
        let w = q.select_columns(&cluster);
        let compressed: Vec<CMatrix> = unitaries
            .iter()
            .map(|u| w.adjoint().mul(&u.mul(&w)))
            .collect();
        let views: Vec<&CMatrix> = compressed.iter().collect();
        let sub_q = jd_recurse(&views, rng, depth + 1, tol)?;
        let lifted = w.mul(&sub_q);
        for (slot, &col) in cluster.iter().enumerate() {
            for i in 0..m {
                q.set(i, col, lifted.get(i, slot));
            }
        }
    }
    Ok(q)
}

/// Unitary diagonalization of a normal matrix: diagonalize the Hermitian
/// part, then the skew part compressed to each eigenvalue cluster.
fn diagonalize_normal(z: &CMatrix) -> CMatrix {
    let m = z.rows();
    let re = z.add(&z.adjoint()).scale_re(0.5);
    let im = z.sub(&z.adjoint()).scale(Complex64::new(0.0, -0.5));
    let eig = herm_part_eig(&re);
    let mut q = eig.eigenvectors;
    let scale = 1.0f64.max(re.fro_norm());
    for cluster in cluster_real(&eig.eigenvalues, JD_CLUSTER_GAP * scale) {
        if cluster.len() < 2 {
            continue;
        }
        let w = q.select_columns(&cluster);
        let bc = w.adjoint().mul(&im.mul(&w)).hermitize();
        let sub = herm_part_eig(&bc).eigenvectors;
        let lifted = w.mul(&sub);
        for (slot, &col) in cluster.iter().enumerate() {
            for i in 0..m {
                q.set(i, col, lifted.get(i, slot));
            }
        }
    }
    q
}

/// Indices grouped by transitive closeness on the real line (input
/// ascending).
fn cluster_real(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        match clusters.last_mut() {
            Some(cl) if values[i] - values[*cl.last().unwrap()] <= gap => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Union-find clustering of complex values by transitive closeness.
fn cluster_complex(values: &[Complex64], gap: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= gap {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        clusters[r].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    clusters
}

/// Extract the certificate of a verified dilation: torus points from the
/// joint spectrum and rank-one weights `A_i = (P_H e_i)(P_H e_i)*`.
pub fn vn_certificate(
    dil: &NDilation,
    tuple: &ContractionTuple,
    tol: &Tol,
    seed: u64,
) -> Result<VNCertificate> {
    let rep = verify_dilation(dil, tuple, dil.order, tol)?;
    if !rep.pass {
        return Err(Error::NotADilation {
            residual: rep
                .max_residual
                .max(rep.unitarity_residual)
                .max(rep.commutation_residual),
        });
    }
    let jd = joint_diagonalize(&dil.unitaries, tol, seed)?;
    let m = dil.dim();
    let n = dil.h_dim;
    let k = dil.unitaries.len();
    let points: Vec<Vec<Complex64>> = (0..m)
        .map(|i| (0..k).map(|j| jd.spectra[j][i]).collect())
        .collect();
    let weight_ops: Vec<CMatrix> = (0..m)
        .map(|i| {
            let x: Vec<Complex64> = (0..n).map(|r| jd.basis.get(r, i)).collect();
            CMatrix::from_fn(n, n, |r, s| x[r] * x[s].conj())
        })
        .collect();
    Ok(VNCertificate {
        order: dil.order,
        points,
        weight_ops,
    })
}

/// Scalar cubature on the torus, exact for polynomials of total degree ≤ N
/// at the point `t ∈ 𝔻^k`: the doubly-commuting dilation of the scalar
/// tuple, certified and flattened to `(N+1)^k` nonnegative weights.
pub fn scalar_cubature(
    t_point: &[Complex64],
    n_order: usize,
    tol: &Tol,
    seed: u64,
) -> Result<CubatureRule> {
    if t_point.is_empty() {
        return Err(Error::InvalidInput(
            "point must have at least one coordinate".into(),
        ));
    }
    for &t in t_point {
        if t.norm() > 1.0 - 1e-12 {
            return Err(Error::NotInDisc { modulus: t.norm() });
        }
    }
    let ops: Vec<CMatrix> = t_point.iter().map(|&t| CMatrix::diag(&[t])).collect();
    let tuple = ContractionTuple::new(ops, tol)?;
    let dil = doubly_commuting_dilation(&tuple, n_order, tol)?;
    let cert = vn_certificate(&dil, &tuple, tol, seed)?;
    let mut weights = Vec::with_capacity(cert.weight_ops.len());
    for a in &cert.weight_ops {
        let w = a.get(0, 0).re;
        if w < -1e-12 * tol.scale {
            return Err(Error::NegativeWeight { value: w });
        }
        weights.push(w.max(0.0));
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(CubatureRule {
        points: cert.points,
        weights,
    })
}

/// Outcome of a von Neumann inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct VnReport {
    /// `‖p(T_1, ..., T_k)‖`.
    pub lhs: f64,
    /// `max_i |p(w^i)|` over the certificate points, when one is supplied.
    pub cert_bound: Option<f64>,
    /// Grid sup norm of p on the torus.
    pub sup_bound: f64,
    pub pass: bool,
}

/// Check `‖p(T)‖` against the certificate bound (when given) and the torus
/// sup norm. The grid sup is a lower bound on the true sup, so it enters
/// with a slack of 1e-6; the certificate bound is exact up to rounding and
/// uses 1e-8.
pub fn vn_check(
    tuple: &ContractionTuple,
    p: &MultiPoly,
    cert: Option<&VNCertificate>,
    tol: &Tol,
) -> Result<VnReport> {
    if let Some(c) = cert {
        if p.total_degree() > c.order {
            return Err(Error::DegreeExceedsOrder {
                degree: p.total_degree(),
                order: c.order,
            });
        }
    }
    let lhs = operator_norm(&p.eval_matrix(tuple.ops(), tol)?);
    let cert_bound = match cert {
        Some(c) => {
            let mut best = 0.0f64;
            for point in &c.points {
                best = best.max(p.eval_scalar(point)?.norm());
            }
            Some(best)
        }
        None => None,
    };
    let sup_bound = p.sup_norm_torus(p.default_grid());
    let mut pass = lhs <= sup_bound + 1e-6 * tol.scale;
    if let Some(cb) = cert_bound {
        pass = pass && lhs <= cb + 1e-8 * tol.scale;
    }
    Ok(VnReport {
        lhs,
        cert_bound,
        sup_bound,
        pass,
    })
}
