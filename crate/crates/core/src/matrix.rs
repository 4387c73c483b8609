//! Dense complex matrices: the carrier for every operator in the crate.
//!
//! Storage is row-major `Vec<Complex64>`, matching the JSON wire format
//! `{"rows": n, "cols": m, "data": [[[re, im], ...], ...]}`. Entries are
//! validated finite on construction and on deserialization.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Complex number shorthand used throughout the crate.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real number lifted to a complex entry.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense complex matrix with explicit row/column counts.
///
/// Zero-dimensional matrices are representable (a defect space can be empty);
/// the wire format, following the published schema, requires both dimensions
/// to be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Build from row-major data, validating the element count and
    /// finiteness of every entry.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                let (i, j) = (
                    idx.checked_div(cols).unwrap_or(0),
                    idx.checked_rem(cols).unwrap_or(0),
                );
                return Err(Error::InvalidInput(format!(
                    "data[{i}][{j}]: non-finite entry {z}"
                )));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix from nested rows; panics on ragged input. Test/fixture helper.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        Self::diag(&entries.iter().map(|&x| cr(x)).collect::<Vec<_>>())
    }

    /// Column vector.
    pub fn col_vec(entries: &[Complex64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(cr(-1.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(cr(s))
    }

    /// Matrix product; panics on inner-dimension mismatch (callers validate
    /// shapes at the boundary).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "inner dimensions {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let lhs_row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in lhs_row.iter().enumerate() {
                if a == Complex64::ZERO {
                    continue;
                }
                let rhs_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// k-th matrix power of a square matrix; `pow(0)` is the identity.
    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Matrix-vector product into a plain buffer (used by the large
    /// Cesaro-mean loop where allocating matrices per step would dominate).
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::ZERO; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *slot = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius distance to the adjoint, `‖A − A*‖_F`.
    pub fn herm_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Hermitian part `(A + A*)/2`.
    pub fn hermitize(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Top-left `n×n` corner: the compression `P_H · A · P_H` when H is the
    /// span of the first `n` coordinates.
    pub fn corner(&self, n: usize) -> Self {
        assert!(n <= self.rows && n <= self.cols);
        Self::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Contiguous rectangular block.
    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self.get(row0 + i, col0 + j))
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// `‖U*U − I‖` is left to callers; this is the cheap elementwise check
    /// used for input validation paths.
    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Direct sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }
}

/// Assemble a dense matrix from a grid of optional blocks; absent blocks are
/// zero-filled. `row_dims`/`col_dims` fix the slot sizes, and every present
/// block must match its slot exactly.
pub fn block_assemble(
    blocks: &[Vec<Option<CMatrix>>],
    row_dims: &[usize],
    col_dims: &[usize],
) -> Result<CMatrix> {
    if blocks.len() != row_dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} block rows for {} row dims",
            blocks.len(),
            row_dims.len()
        )));
    }
    for (bi, row) in blocks.iter().enumerate() {
        if row.len() != col_dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "block row {bi} has {} slots for {} col dims",
                row.len(),
                col_dims.len()
            )));
        }
        for (bj, slot) in row.iter().enumerate() {
            if let Some(b) = slot {
                if b.rows() != row_dims[bi] || b.cols() != col_dims[bj] {
                    return Err(Error::ShapeMismatch(format!(
                        "block ({bi},{bj}) is {}x{}, slot is {}x{}",
                        b.rows(),
                        b.cols(),
                        row_dims[bi],
                        col_dims[bj]
                    )));
                }
            }
        }
    }
    let total_rows: usize = row_dims.iter().sum();
    let total_cols: usize = col_dims.iter().sum();
    let mut out = CMatrix::zeros(total_rows, total_cols);
    let mut r0 = 0;
    for (bi, row) in blocks.iter().enumerate() {
        let mut c0 = 0;
        for (bj, slot) in row.iter().enumerate() {
            if let Some(b) = slot {
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        out.set(r0 + i, c0 + j, b.get(i, j));
                    }
                }
            }
            c0 += col_dims[bj];
        }
        r0 += row_dims[bi];
    }
    Ok(out)
}

// --- wire format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<Vec<[f64; 2]>>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // the + 0.0 folds negative zeros into plain zeros on the wire
        let data = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|z| [z.re + 0.0, z.im + 0.0])
                    .collect()
            })
            .collect();
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            data,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.rows == 0 || wire.cols == 0 {
            return Err(D::Error::custom("rows and cols must be positive"));
        }
        if wire.data.len() != wire.rows {
            return Err(D::Error::custom(format!(
                "data has {} rows, header says {}",
                wire.data.len(),
                wire.rows
            )));
        }
        let mut data = Vec::with_capacity(wire.rows * wire.cols);
        for (i, row) in wire.data.iter().enumerate() {
            if row.len() != wire.cols {
                return Err(D::Error::custom(format!(
                    "data[{i}] has {} entries, header says {}",
                    row.len(),
                    wire.cols
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(D::Error::custom(format!(
                        "data[{i}][{j}]: non-finite entry"
                    )));
                }
                data.push(c(re, im));
            }
        }
        Ok(CMatrix {
            rows: wire.rows,
            cols: wire.cols,
            data,
        })
    }
}
