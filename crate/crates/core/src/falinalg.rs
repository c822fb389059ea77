//! Dense exact linear algebra over an [`ExtFieldCtx`].
//!
//! Elimination always pivots on the first nonzero entry in column order, so
//! every result is deterministic.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfield::{ExtFieldCtx, FieldElem};

/// Row-major dense matrix over a field context.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    ctx: ExtFieldCtx,
    data: Vec<FieldElem>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: FMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl FMatrix {
    pub fn zeros(ctx: &ExtFieldCtx, rows: usize, cols: usize) -> Self {
        FMatrix { rows, cols, ctx: ctx.clone(), data: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(ctx: &ExtFieldCtx, size: usize) -> Self {
        let mut m = Self::zeros(ctx, size, size);
        for i in 0..size {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_elems(ctx: &ExtFieldCtx, rows: usize, cols: usize, data: Vec<FieldElem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|e| e.raw() as u64 >= ctx.order()) {
            return Err(Error::OutOfRange { value: bad.raw() as u64, q: ctx.order() });
        }
        Ok(FMatrix { rows, cols, ctx: ctx.clone(), data })
    }

    /// Builds a matrix from rows of raw element encodings (base-field
    /// integers when the context has degree 1).
    pub fn from_rows(ctx: &ExtFieldCtx, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| ctx.from_raw(v)).collect::<Result<Vec<_>>>()?;
        Self::from_elems(ctx, rows.len(), cols, data)
    }

    /// A column vector.
    pub fn column_vector(ctx: &ExtFieldCtx, entries: Vec<FieldElem>) -> Result<Self> {
        let n = entries.len();
        Self::from_elems(ctx, n, 1, entries)
    }

    pub fn random<R: Rng + ?Sized>(ctx: &ExtFieldCtx, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| ctx.random(rng)).collect();
        FMatrix { rows, cols, ctx: ctx.clone(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &ExtFieldCtx {
        &self.ctx
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ctx, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape(format!("hcat of {} and {} rows", self.rows, other.rows)));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(FMatrix { rows: self.rows, cols, ctx: self.ctx.clone(), data })
    }

    /// `[self ; other]`.
    pub fn vcat(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Shape(format!("vcat of {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix { rows: self.rows + other.rows, cols: self.cols, ctx: self.ctx.clone(), data })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        FMatrix { rows: idx.len(), cols: self.cols, ctx: self.ctx.clone(), data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(&self.ctx, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn row_range(&self, range: std::ops::Range<usize>) -> Self {
        self.select_rows(&range.collect::<Vec<_>>())
    }

    pub fn col_range(&self, range: std::ops::Range<usize>) -> Self {
        self.select_cols(&range.collect::<Vec<_>>())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!("multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let f = &self.ctx;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("add of differently shaped matrices".into()));
        }
        let f = &self.ctx;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FMatrix { data, ..self.clone() })
    }

    pub fn neg(&self) -> Self {
        let f = &self.ctx;
        FMatrix { data: self.data.iter().map(|&a| f.neg(a)).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: FieldElem) -> Self {
        let f = &self.ctx;
        FMatrix { data: self.data.iter().map(|&a| f.mul(s, a)).collect(), ..self.clone() }
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!("vector of length {} against {} rows", v.len(), self.rows)));
        }
        let f = &self.ctx;
        let mut out = vec![FieldElem::ZERO; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, self.get(r, c)));
            }
        }
        Ok(out)
    }

    pub fn rref(&self) -> Echelon {
        let f = &self.ctx;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let Some(p) = (pr..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(pr, p);
            let inv = f.inv(m.get(pr, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(pr, j);
                m.set(pr, j, f.mul(inv, v));
            }
            for r in 0..m.rows {
                if r == pr {
                    continue;
                }
                let factor = m.get(r, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(pr, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.cols > self.rows {
            self.transpose().rref().rank()
        } else {
            self.rref().rank()
        }
    }

    pub fn det(&self) -> Result<FieldElem> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        let f = &self.ctx;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                return Ok(f.zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for r in c + 1..m.rows {
                let factor = f.mul(m.get(r, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(c, j)));
                    m.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("inverse of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let aug = self.hcat(&Self::identity(&self.ctx, n))?;
        let ech = aug.rref();
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(ech.reduced.col_range(n..2 * n))
    }

    /// Some `X` with `self * X = rhs`.
    pub fn solve_right(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::Shape(format!(
                "system with {} rows and right-hand side with {} rows",
                self.rows, rhs.rows
            )));
        }
        let ech = self.hcat(rhs)?.rref();
        if ech.pivots.iter().any(|&p| p >= self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = Self::zeros(&self.ctx, self.cols, rhs.cols);
        for (r, &p) in ech.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, ech.reduced.get(r, self.cols + j));
            }
        }
        Ok(x)
    }

    /// Rows form a basis of `{y : y * self = 0}`.
    pub fn left_nullspace_basis(&self) -> Self {
        self.transpose().right_nullspace_basis().transpose()
    }

    /// Columns form a basis of `{x : self * x = 0}`.
    pub fn right_nullspace_basis(&self) -> Self {
        let f = &self.ctx;
        let ech = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut basis = Self::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, f.one());
            for (r, &p) in ech.pivots.iter().enumerate() {
                basis.set(p, k, f.neg(ech.reduced.get(r, fc)));
            }
        }
        basis
    }

    /// Linearly independent columns spanning `col(self) ∩ col(other)`, by
    /// the Zassenhaus sum-intersection algorithm.
    pub fn col_space_intersect(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "intersecting column spaces in dimensions {} and {}",
                self.rows, other.rows
            )));
        }
        let n = self.rows;
        let at = self.transpose();
        let bt = other.transpose();
        let top = at.hcat(&at)?;
        let bottom = bt.hcat(&Self::zeros(&self.ctx, bt.rows, n))?;
        let ech = top.vcat(&bottom)?.rref();
        // pivots at or beyond column n mark rows whose left half vanished
        let rows: Vec<usize> = ech.pivots.iter().enumerate().filter(|(_, &p)| p >= n).map(|(r, _)| r).collect();
        Ok(ech.reduced.select_rows(&rows).col_range(n..2 * n).transpose())
    }

    pub fn in_col_span(&self, v: &[FieldElem]) -> Result<bool> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!("vector of length {} against {} rows", v.len(), self.rows)));
        }
        let col = Self::column_vector(&self.ctx, v.to_vec())?;
        Ok(self.hcat(&col)?.rank() == self.rank())
    }

    /// Entrywise embedding of a base-field matrix into `target`.
    pub fn lift(&self, target: &ExtFieldCtx) -> Result<Self> {
        if self.ctx.q() != target.q() {
            return Err(Error::FieldMismatch);
        }
        if self.ctx == *target {
            return Ok(self.clone());
        }
        let data = self
            .data
            .iter()
            .map(|&e| {
                let base = self.ctx.as_base(e).ok_or(Error::FieldMismatch)?;
                target.embed_base(base)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FMatrix { rows: self.rows, cols: self.cols, ctx: target.clone(), data })
    }

    /// Indices of the nonzero rows of column `c`.
    pub fn column_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| !self.get(r, c).is_zero()).collect()
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over {:?}", self.rows, self.cols, self.ctx)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|&e| self.ctx.format_elem(e)).collect();
            writeln!(f, "  [{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Free-function forms of the common operations.
pub fn rref(m: &FMatrix) -> Echelon {
    m.rref()
}

pub fn rank(m: &FMatrix) -> usize {
    m.rank()
}

pub fn left_nullspace_basis(m: &FMatrix) -> FMatrix {
    m.left_nullspace_basis()
}

pub fn col_space_intersect(a: &FMatrix, b: &FMatrix) -> Result<FMatrix> {
    a.col_space_intersect(b)
}

pub fn lift(m: &FMatrix, target: &ExtFieldCtx) -> Result<FMatrix> {
    m.lift(target)
}
