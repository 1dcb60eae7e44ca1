//! Exact sparse matrices over the rationals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use crate::error::{Error, Result};

pub type Q = Rational64;

/// Sparse matrix with entries sorted by (col, row), no duplicates, no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, Q)>,
}

impl SparseRationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseRationalMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n).map(|i| (i, i, Q::one())).collect();
        SparseRationalMatrix { rows: n, cols: n, entries }
    }

    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, Q)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (r, c, x) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Invalid(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            let slot = acc.entry((c, r)).or_insert_with(Q::zero);
            *slot = slot.checked_add(&x).ok_or(Error::Overflow("matrix assembly"))?;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, x)| !x.is_zero())
            .map(|((c, r), x)| (r, c, x))
            .collect();
        Ok(SparseRationalMatrix { rows, cols, entries })
    }

    /// Builds from integer columns: `columns[j]` lists (row, value).
    pub fn from_int_columns(rows: usize, columns: &[Vec<(usize, i64)>]) -> Result<Self> {
        let trip = columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, x)| (r, c, Q::from_integer(x))));
        Self::from_triplets(rows, columns.len(), trip)
    }

    pub fn entries(&self) -> &[(usize, usize, Q)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Q {
        self.entries
            .binary_search_by(|&(r, c, _)| (c, r).cmp(&(col, row)))
            .map(|i| self.entries[i].2)
            .unwrap_or_else(|_| Q::zero())
    }

    pub fn transpose(&self) -> Self {
        let trip = self.entries.iter().map(|&(r, c, x)| (c, r, x));
        Self::from_triplets(self.cols, self.rows, trip).expect("transpose")
    }

    /// Columns as sparse (row, value) lists.
    pub fn columns(&self) -> Vec<Vec<(usize, Q)>> {
        let mut cols = vec![Vec::new(); self.cols];
        for &(r, c, x) in &self.entries {
            cols[c].push((r, x));
        }
        cols
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let left = self.columns();
        let mut trip = Vec::new();
        for &(k, j, y) in &other.entries {
            for &(i, x) in &left[k] {
                let p = x.checked_mul(&y).ok_or(Error::Overflow("matrix product"))?;
                trip.push((i, j, p));
            }
        }
        Self::from_triplets(self.rows, other.cols, trip)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Invalid("shape mismatch in sum".into()));
        }
        let trip = self.entries.iter().chain(other.entries.iter()).copied();
        Self::from_triplets(self.rows, self.cols, trip)
    }

    pub fn neg(&self) -> Self {
        SparseRationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&(r, c, x)| (r, c, -x)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `diag(left) * self * diag(right)`.
    pub fn scaled(&self, left: &[Q], right: &[Q]) -> Result<Self> {
        let trip = self.entries.iter().map(|&(r, c, x)| (r, c, x * left[r] * right[c]));
        Self::from_triplets(self.rows, self.cols, trip)
    }

    /// Stacks blocks: `blocks[i][j]` has shape `row_sizes[i] x col_sizes[j]`.
    pub fn from_blocks(row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, SparseRationalMatrix)]) -> Result<Self> {
        let roff = offsets(row_sizes);
        let coff = offsets(col_sizes);
        let mut trip = Vec::new();
        for (bi, bj, m) in blocks {
            if m.rows != row_sizes[*bi] || m.cols != col_sizes[*bj] {
                return Err(Error::Invalid("block shape mismatch".into()));
            }
            trip.extend(m.entries.iter().map(|&(r, c, x)| (r + roff[*bi], c + coff[*bj], x)));
        }
        Self::from_triplets(roff[row_sizes.len()], coff[col_sizes.len()], trip)
    }

    /// Matrix file text: header `rows cols nnz`, then `row col num/den`
    /// sorted by (col, row).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for &(r, c, x) in &self.entries {
            let _ = writeln!(out, "{} {} {}/{}", r, c, x.numer(), x.denom());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::Invalid(format!("malformed matrix file: {what}"));
        let mut lines = text.lines();
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("header")))
            .collect::<Result<_>>()?;
        if header.len() != 3 {
            return Err(bad("header"));
        }
        let mut trip = Vec::with_capacity(header[2]);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(line));
            }
            let r: usize = parts[0].parse().map_err(|_| bad(line))?;
            let c: usize = parts[1].parse().map_err(|_| bad(line))?;
            let (num, den) = parts[2].split_once('/').ok_or_else(|| bad(line))?;
            let num: i64 = num.parse().map_err(|_| bad(line))?;
            let den: i64 = den.parse().map_err(|_| bad(line))?;
            if den == 0 {
                return Err(bad(line));
            }
            trip.push((r, c, Q::new(num, den)));
        }
        let m = Self::from_triplets(header[0], header[1], trip)?;
        if m.nnz() != header[2] {
            return Err(bad("entry count"));
        }
        Ok(m)
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}
