//! Multivariate polynomials with complex coefficients: scalar and matrix
//! evaluation, total degree, and grid sup-norm on the torus.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::mono::MonomialTable;
use crate::tol::Tol;

/// Sparse polynomial in `num_vars` variables: a map from exponent
/// multi-indices to nonzero complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl MultiPoly {
    /// The zero polynomial.
    pub fn new(num_vars: usize) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidInput(
                "polynomial needs at least one variable".into(),
            ));
        }
        Ok(Self {
            num_vars,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(num_vars: usize, value: Complex64) -> Result<Self> {
        let mut p = Self::new(num_vars)?;
        p.add_term(&vec![0; num_vars], value)?;
        Ok(p)
    }

    /// Accumulate `coef · z^exps`; exact zero coefficients are pruned.
    pub fn add_term(&mut self, exps: &[u32], coef: Complex64) -> Result<()> {
        if exps.len() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "exponent length {} for {} variables",
                exps.len(),
                self.num_vars
            )));
        }
        if !coef.re.is_finite() || !coef.im.is_finite() {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert(Complex64::ZERO);
        *entry += coef;
        if *entry == Complex64::ZERO {
            self.terms.remove(exps);
        }
        Ok(())
    }

    /// Builder form of [`add_term`](Self::add_term).
    pub fn with_term(mut self, exps: &[u32], coef: Complex64) -> Result<Self> {
        self.add_term(exps, coef)?;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Max over terms of the exponent sum; 0 for the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "{} vs {} variables",
                self.num_vars, other.num_vars
            )));
        }
        let mut out = self.clone();
        for (e, &c) in other.terms() {
            out.add_term(e, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self {
            num_vars: self.num_vars,
            terms: BTreeMap::new(),
        };
        for (e, &c) in self.terms() {
            let v = c * s;
            if v != Complex64::ZERO {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    /// Pointwise evaluation `Σ coef · Π z_i^{e_i}`.
    pub fn eval_scalar(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for {} variables",
                z.len(),
                self.num_vars
            )));
        }
        let mut acc = Complex64::ZERO;
        for (exps, &coef) in &self.terms {
            let mut term = coef;
            for (zi, &e) in z.iter().zip(exps) {
                term *= zi.powu(e);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Evaluation at a commuting matrix tuple, `Σ coef · T_1^{e_1}···T_k^{e_k}`,
    /// with powers memoized. Well-definedness needs commutation, which is
    /// checked against `ε_dc`.
    pub fn eval_matrix(&self, ops: &[CMatrix], tol: &Tol) -> Result<CMatrix> {
        if ops.len() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "{} operators for {} variables",
                ops.len(),
                self.num_vars
            )));
        }
        let n = ops[0].rows();
        for op in ops {
            if !op.is_square() || op.rows() != n {
                return Err(Error::ShapeMismatch(format!(
                    "operators must be square of equal size, got {}x{}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        for i in 0..ops.len() {
            for j in (i + 1)..ops.len() {
                let r = ops[i].mul(&ops[j]).sub(&ops[j].mul(&ops[i]));
                let residual = crate::decomp::operator_norm(&r);
                if residual > tol.eps_dc() {
                    return Err(Error::NotCommuting { residual });
                }
            }
        }
        let table = MonomialTable::build(ops, self.total_degree());
        let mut acc = CMatrix::zeros(n, n);
        for (exps, &coef) in &self.terms {
            acc = acc.add(&table.get(exps).scale(coef));
        }
        Ok(acc)
    }

    /// Max of `|p|` over the uniform grid `{exp(2πi·j/M)}^k`. A lower bound
    /// on the torus sup norm that converges as M grows; the grid `{j/M}` is
    /// contained in `{j/2M}`, so doubling M never decreases the value.
    pub fn sup_norm_torus(&self, grid_per_dim: usize) -> f64 {
        assert!(grid_per_dim >= 1, "grid must have at least one point");
        let m = grid_per_dim;
        let k = self.num_vars;
        let max_exp = self
            .terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        // z^e for every grid node and exponent in play
        let mut node_pows: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        for j in 0..m {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            let mut pows = Vec::with_capacity(max_exp + 1);
            let mut acc = Complex64::ONE;
            for _ in 0..=max_exp {
                pows.push(acc);
                acc *= z;
            }
            node_pows.push(pows);
        }
        let terms: Vec<(&Vec<u32>, &Complex64)> = self.terms.iter().collect();
        let mut best = 0.0f64;
        let mut idx = vec![0usize; k];
        loop {
            let mut val = Complex64::ZERO;
            for (exps, &coef) in &terms {
                let mut t = coef;
                for (d, &e) in exps.iter().enumerate() {
                    t *= node_pows[idx[d]][e as usize];
                }
                val += t;
            }
            best = best.max(val.norm());
            // advance the grid odometer
            let mut d = 0;
            loop {
                if d == k {
                    return best;
                }
                idx[d] += 1;
                if idx[d] < m {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    /// Grid density used when a caller does not specify one: at least 16
    /// nodes per unit of degree resolves the trigonometric oscillation well
    /// inside the slacks the inequality checks use.
    pub fn default_grid(&self) -> usize {
        64.max(16 * self.total_degree())
    }
}

// --- wire format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermWire {
    exps: Vec<u32>,
    coef: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    vars: usize,
    terms: Vec<TermWire>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyWire {
            vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermWire {
                    exps: e.clone(),
                    coef: [c.re, c.im],
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PolyWire::deserialize(deserializer)?;
        let mut p = MultiPoly::new(wire.vars).map_err(|e| D::Error::custom(e.to_string()))?;
        for (i, term) in wire.terms.iter().enumerate() {
            p.add_term(&term.exps, Complex64::new(term.coef[0], term.coef[1]))
                .map_err(|e| D::Error::custom(format!("terms[{i}]: {e}")))?;
        }
        Ok(p)
    }
}

/// The three-variable quadratic `x² + y² + z² − 2xy − 2xz − 2yz` used as a
/// fixture: its matrix norm can exceed its torus sup norm on commuting
/// contractions.
pub fn holbrook_poly() -> MultiPoly {
    let two = Complex64::new(-2.0, 0.0);
    MultiPoly::new(3)
        .unwrap()
        .with_term(&[2, 0, 0], Complex64::ONE)
        .unwrap()
        .with_term(&[0, 2, 0], Complex64::ONE)
        .unwrap()
        .with_term(&[0, 0, 2], Complex64::ONE)
        .unwrap()
        .with_term(&[1, 1, 0], two)
        .unwrap()
        .with_term(&[1, 0, 1], two)
        .unwrap()
        .with_term(&[0, 1, 1], two)
        .unwrap()
}
