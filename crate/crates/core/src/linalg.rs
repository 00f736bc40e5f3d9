//! Exact sparse linear algebra over ℚ(i).
//!
//! Vectors are sparse maps from coordinate to nonzero entry. Matrices are
//! stored row-major. Subspaces keep a basis in reduced row echelon form, which
//! makes membership tests and equality checks canonical.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeffring::GaussianRational as GR;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("denominator of dimension {den} is not contained in the numerator of dimension {num}")]
    NotASubspace { num: usize, den: usize },
}

/// Sparse vector; no stored zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec(pub BTreeMap<usize, GR>);

impl SparseVec {
    pub fn new() -> Self {
        Self(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.0.insert(i, GR::one());
        v
    }

    pub fn from_dense(d: &[GR]) -> Self {
        Self(d.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> GR {
        self.0.get(&i).cloned().unwrap_or_else(GR::zero)
    }

    pub fn leading(&self) -> Option<usize> {
        self.0.keys().next().copied()
    }

    pub fn add_entry(&mut self, i: usize, c: &GR) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c.clone());
            }
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &GR, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, v) in &other.0 {
            self.add_entry(*i, &(c * v));
        }
    }

    pub fn scale(&self, c: &GR) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        Self(self.0.iter().map(|(i, v)| (*i, v * c)).collect())
    }

    pub fn conj(&self) -> SparseVec {
        Self(self.0.iter().map(|(i, v)| (*i, v.conj())).collect())
    }

    pub fn to_dense(&self, len: usize) -> Vec<GR> {
        let mut d = vec![GR::zero(); len];
        for (i, v) in &self.0 {
            d[*i] = v.clone();
        }
        d
    }
}

/// Row-major sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, data: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.0.keys().all(|&c| c < cols)));
        Self { rows: rows.len(), cols, data: rows }
    }

    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in &col.0 {
                assert!(*i < rows, "column entry out of range");
                m.data[*i].0.insert(j, v.clone());
            }
        }
        m
    }

    pub fn from_dense(d: &[Vec<GR>]) -> Self {
        let cols = d.first().map_or(0, |r| r.len());
        Self::from_rows(cols, d.iter().map(|r| SparseVec::from_dense(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }
    pub fn row_vectors(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> GR {
        self.data[i].get(j)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.0.len()).sum()
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let mut v = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            if let Some(c) = r.0.get(&j) {
                v.0.insert(i, c.clone());
            }
        }
        v
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, c) in &r.0 {
                out[*j].0.insert(i, c.clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> ExactMatrix {
        ExactMatrix { rows: self.cols, cols: self.rows, data: self.columns() }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = GR::zero();
            for (j, c) in &r.0 {
                if let Some(x) = v.0.get(j) {
                    acc += &(c * x);
                }
            }
            if !acc.is_zero() {
                out.0.insert(i, acc);
            }
        }
        out
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut out = SparseVec::new();
                for (k, c) in &r.0 {
                    out.axpy(c, &other.data[*k]);
                }
                out
            })
            .collect();
        ExactMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.axpy(&GR::one(), b);
                r
            })
            .collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &GR) -> ExactMatrix {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|r| r.scale(c)).collect() }
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        self.add(&other.scale(&-GR::one()))
    }

    pub fn rank(&self) -> usize {
        RowEchelon::from_rows(self.data.iter().cloned()).rank()
    }
}

/// Incrementally maintained reduced row echelon form.
#[derive(Clone, Debug)]
struct RowEchelon {
    /// pivot column → row with leading 1 there and zeros in all other pivot columns
    rows: BTreeMap<usize, SparseVec>,
}

impl RowEchelon {
    fn new() -> Self {
        Self { rows: BTreeMap::new() }
    }

    fn from_rows(rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut e = Self::new();
        for r in rows {
            e.insert(r);
        }
        e
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current pivots.
    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        // Pivot rows only have entries at non-pivot columns besides their
        // pivot, so a single pass over pivot columns suffices.
        let pivots: Vec<usize> = v.0.keys().filter(|k| self.rows.contains_key(k)).copied().collect();
        for p in pivots {
            if let Some(c) = v.0.get(&p).cloned() {
                v.axpy(&-c, &self.rows[&p]);
            }
        }
        v
    }

    /// Returns true if `v` increased the rank.
    fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.leading() else { return false };
        let inv = v.get(p).inv().expect("leading entry is nonzero");
        let v = v.scale(&inv);
        for row in self.rows.values_mut() {
            if let Some(c) = row.0.get(&p).cloned() {
                row.axpy(&-c, &v);
            }
        }
        self.rows.insert(p, v);
        true
    }

    fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

/// Reduced row echelon form with the pivot columns in increasing order.
pub fn rref(m: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    let e = RowEchelon::from_rows(m.data.iter().cloned());
    let pivots: Vec<usize> = e.rows.keys().copied().collect();
    let mut rows: Vec<SparseVec> = e.rows.into_values().collect();
    rows.resize(m.rows, SparseVec::new());
    (ExactMatrix { rows: m.rows, cols: m.cols, data: rows }, pivots)
}

/// Linear subspace of `K^ambient`, stored as an RREF basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    echelon: RowEchelon,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.echelon.rows == other.echelon.rows
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, echelon: RowEchelon::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, (0..ambient).map(SparseVec::unit))
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        Self { ambient, echelon: RowEchelon::from_rows(vectors) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    /// Canonical (RREF) basis vectors, ordered by pivot column.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.echelon.rows.values().cloned().collect()
    }

    /// Basis as the columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> ExactMatrix {
        ExactMatrix::from_columns(self.ambient, &self.basis())
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.echelon.rows.keys().copied().collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.echelon.contains(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.echelon.rows.values().all(|v| self.contains(v))
    }

    fn check(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            Err(LinalgError::AmbientMismatch(self.ambient, other.ambient))
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        let mut e = self.echelon.clone();
        for v in other.echelon.rows.values() {
            e.insert(v.clone());
        }
        Ok(Subspace { ambient: self.ambient, echelon: e })
    }

    /// `A ∩ B` via the kernel of the stacked system `[A | -B]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let a = self.basis();
        let b = other.basis();
        let mut cols: Vec<SparseVec> = a.clone();
        cols.extend(b.iter().map(|v| v.scale(&-GR::one())));
        let stacked = ExactMatrix::from_columns(self.ambient, &cols);
        let ker = kernel_basis(&stacked);
        let vecs = ker.basis().into_iter().map(|x| {
            let mut v = SparseVec::new();
            for (i, c) in &x.0 {
                if *i < a.len() {
                    v.axpy(c, &a[*i]);
                }
            }
            v
        });
        Ok(Subspace::span(self.ambient, vecs))
    }

    /// Image under `m` (rows = new ambient).
    pub fn map(&self, m: &ExactMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        Subspace::span(m.rows(), self.echelon.rows.values().map(|v| m.apply(v)))
    }

    /// `{v ∈ self : m v = 0}`.
    pub fn kernel_within(&self, m: &ExactMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        let basis = self.basis();
        let images: Vec<SparseVec> = basis.iter().map(|v| m.apply(v)).collect();
        let coeffs = kernel_basis(&ExactMatrix::from_columns(m.rows(), &images));
        Subspace::span(
            self.ambient,
            coeffs.basis().into_iter().map(|x| {
                let mut v = SparseVec::new();
                for (i, c) in &x.0 {
                    v.axpy(c, &basis[*i]);
                }
                v
            }),
        )
    }

    /// Embeds into a larger ambient space through an index map.
    pub fn reindex(&self, ambient: usize, map: impl Fn(usize) -> usize) -> Subspace {
        Subspace::span(
            ambient,
            self.echelon.rows.values().map(|v| SparseVec(v.0.iter().map(|(i, c)| (map(*i), c.clone())).collect())),
        )
    }

    pub fn conj(&self) -> Subspace {
        Subspace::span(self.ambient, self.echelon.rows.values().map(|v| v.conj()))
    }
}

/// Basis of `ker M`, one vector per free column.
pub fn kernel_basis(m: &ExactMatrix) -> Subspace {
    let e = RowEchelon::from_rows(m.data.iter().cloned());
    let mut vecs = Vec::new();
    for f in 0..m.cols {
        if e.rows.contains_key(&f) {
            continue;
        }
        let mut v = SparseVec::unit(f);
        for (p, row) in &e.rows {
            let c = row.get(f);
            if !c.is_zero() {
                v.0.insert(*p, -c);
            }
        }
        vecs.push(v);
    }
    let k = Subspace::span(m.cols, vecs);
    debug_assert_eq!(k.dim() + e.rank(), m.cols, "rank-nullity");
    k
}

/// Column space of `M`.
pub fn image_basis(m: &ExactMatrix) -> Subspace {
    Subspace::span(m.rows, m.columns())
}

/// `dim num - dim den`, after verifying `den ⊆ num`.
pub fn quotient_dim(num: &Subspace, den: &Subspace) -> Result<usize, LinalgError> {
    num.check(den)?;
    if !num.contains_subspace(den) {
        return Err(LinalgError::NotASubspace { num: num.dim(), den: den.dim() });
    }
    Ok(num.dim() - den.dim())
}
