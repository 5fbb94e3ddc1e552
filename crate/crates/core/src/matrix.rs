//! Sparse and dense matrices over GF(q).
//!
//! Sparse matrices are stored row-compressed: all splitting is row-wise and
//! matvec iterates rows, so the cost of `matvec` is proportional to
//! nnz * x.cols — the quantity the simulator's timing model charges for.
//!
//! Text formats (both bit-exact round-trippable in canonical form):
//! sparse: header `q m n nnz`, then one `row col value` triple per line
//! (0-indexed, no zero values, sorted by row then column); dense: header
//! `q rows cols`, then one row of space-separated values per line.

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};

/// Row-compressed sparse matrix over GF(q). Stored entries are nonzero and
/// column indices are strictly increasing within a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<FieldElement>,
}

/// Dense row-major matrix over GF(q); holds x and y = Ax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("matrix dimensions must be positive"));
    }
    if cols > u32::MAX as usize {
        return Err(Error::invalid("column count exceeds u32 range"));
    }
    Ok(())
}

impl SparseMatrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(SparseMatrix {
            field,
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        })
    }

    pub fn identity(field: FieldSpec, n: usize) -> Result<Self> {
        let triples: Vec<(usize, usize, u32)> = (0..n).map(|i| (i, i, 1)).collect();
        Self::from_triples(field, n, n, &triples)
    }

    /// Build from `(row, col, value)` triples in any order. Rejects zero
    /// values, out-of-range indices or values, and duplicate positions.
    pub fn from_triples(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        triples: &[(usize, usize, u32)],
    ) -> Result<Self> {
        check_dims(rows, cols)?;
        let mut entries: Vec<(usize, u32, FieldElement)> = Vec::with_capacity(triples.len());
        for &(r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(Error::invalid(format!(
                    "entry ({r},{c}) outside {rows}x{cols}"
                )));
            }
            let elem = field.element(v)?;
            if elem.is_zero() {
                return Err(Error::invalid(format!(
                    "explicit zero stored at ({r},{c})"
                )));
            }
            entries.push((r, c as u32, elem));
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::invalid(format!(
                    "duplicate entry at ({},{})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut m = SparseMatrix {
            field,
            rows,
            cols,
            row_ptr: Vec::with_capacity(rows + 1),
            col_idx: Vec::with_capacity(entries.len()),
            values: Vec::with_capacity(entries.len()),
        };
        m.row_ptr.push(0);
        let mut row = 0usize;
        for (r, c, v) in entries {
            while row < r {
                m.row_ptr.push(m.col_idx.len());
                row += 1;
            }
            m.col_idx.push(c);
            m.values.push(v);
        }
        while row < rows {
            m.row_ptr.push(m.col_idx.len());
            row += 1;
        }
        Ok(m)
    }

    /// Row-by-row builder; each pushed row must have strictly increasing
    /// column indices and nonzero values (enforced by debug assertions since
    /// all in-crate generators construct rows in order).
    pub(crate) fn from_row_major<I>(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut next_row: I,
    ) -> Result<Self>
    where
        I: FnMut(usize, &mut Vec<(u32, FieldElement)>),
    {
        check_dims(rows, cols)?;
        let mut m = SparseMatrix {
            field,
            rows,
            cols,
            row_ptr: Vec::with_capacity(rows + 1),
            col_idx: Vec::new(),
            values: Vec::new(),
        };
        m.row_ptr.push(0);
        let mut buf: Vec<(u32, FieldElement)> = Vec::new();
        for r in 0..rows {
            buf.clear();
            next_row(r, &mut buf);
            debug_assert!(buf.windows(2).all(|w| w[0].0 < w[1].0));
            for &(c, v) in buf.iter() {
                debug_assert!(!v.is_zero() && (c as usize) < cols);
                m.col_idx.push(c);
                m.values.push(v);
            }
            m.row_ptr.push(m.col_idx.len());
        }
        Ok(m)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Fraction of zero entries: 1 - nnz/(m*n).
    pub fn measure_sparsity(&self) -> f64 {
        1.0 - self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        assert!(row < self.rows && col < self.cols);
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&(col as u32)) {
            Ok(i) => self.values[lo + i],
            Err(_) => FieldElement::ZERO,
        }
    }

    pub fn iter_row(&self, row: usize) -> impl Iterator<Item = (usize, FieldElement)> + '_ {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, FieldElement)> + '_ {
        (0..self.rows).flat_map(move |r| self.iter_row(r).map(move |(c, v)| (r, c, v)))
    }

    fn check_same_shape(&self, other: &SparseMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.q(), other.field.q()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(())
    }

    /// Exact product y = A x over GF(q); x is dense n x k.
    pub fn matvec(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if self.field != x.field {
            return Err(Error::FieldMismatch(self.field.q(), x.field.q()));
        }
        if self.cols != x.rows {
            return Err(Error::ShapeMismatch(self.rows, self.cols, x.rows, x.cols));
        }
        let k = x.cols;
        let f = self.field;
        let mut data = vec![FieldElement::ZERO; self.rows * k];
        for r in 0..self.rows {
            let out = &mut data[r * k..(r + 1) * k];
            for (c, v) in self.iter_row(r) {
                let xrow = &x.data[c * k..(c + 1) * k];
                for (acc, &xv) in out.iter_mut().zip(xrow) {
                    *acc = f.add(*acc, f.mul(v, xv));
                }
            }
        }
        Ok(DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: k,
            data,
        })
    }

    /// Entry-wise sum; positions that cancel (a + b = 0) are not stored.
    pub fn add_entrywise(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_shape(other)?;
        let f = self.field;
        SparseMatrix::from_row_major(f, self.rows, self.cols, |r, buf| {
            let mut left = self.iter_row(r).peekable();
            let mut right = other.iter_row(r).peekable();
            loop {
                match (left.peek().copied(), right.peek().copied()) {
                    (Some((lc, lv)), Some((rc, rv))) => {
                        if lc < rc {
                            buf.push((lc as u32, lv));
                            left.next();
                        } else if rc < lc {
                            buf.push((rc as u32, rv));
                            right.next();
                        } else {
                            let s = f.add(lv, rv);
                            if !s.is_zero() {
                                buf.push((lc as u32, s));
                            }
                            left.next();
                            right.next();
                        }
                    }
                    (Some((lc, lv)), None) => {
                        buf.push((lc as u32, lv));
                        left.next();
                    }
                    (None, Some((rc, rv))) => {
                        buf.push((rc as u32, rv));
                        right.next();
                    }
                    (None, None) => break,
                }
            }
        })
    }

    /// Entry-wise additive inverse.
    pub fn neg(&self) -> SparseMatrix {
        let f = self.field;
        let mut out = self.clone();
        for v in &mut out.values {
            *v = f.neg(*v);
        }
        out
    }

    /// Entry-wise difference self - other.
    pub fn sub_entrywise(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add_entrywise(&other.neg())
    }

    /// Split row-wise into `parts` blocks of equal height, zero-padding with
    /// empty rows up to the next multiple of `parts`. The original row count
    /// is the caller's to remember; decoders truncate back to it.
    pub fn split_rows(&self, parts: usize) -> Result<Vec<SparseMatrix>> {
        if parts == 0 {
            return Err(Error::invalid("parts must be positive"));
        }
        let block_rows = self.rows.div_ceil(parts);
        let mut blocks = Vec::with_capacity(parts);
        for b in 0..parts {
            let start = b * block_rows;
            let block = SparseMatrix::from_row_major(self.field, block_rows, self.cols, |r, buf| {
                let src = start + r;
                if src < self.rows {
                    buf.extend(self.iter_row(src).map(|(c, v)| (c as u32, v)));
                }
            })?;
            blocks.push(block);
        }
        Ok(blocks)
    }

    /// Vertical concatenation of equally wide blocks.
    pub fn vstack(blocks: &[SparseMatrix]) -> Result<SparseMatrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::invalid("vstack needs at least one block"))?;
        for b in blocks {
            if b.field != first.field {
                return Err(Error::FieldMismatch(first.field.q(), b.field.q()));
            }
            if b.cols != first.cols {
                return Err(Error::ShapeMismatch(first.rows, first.cols, b.rows, b.cols));
            }
        }
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        SparseMatrix::from_row_major(first.field, rows, first.cols, |r, buf| {
            let mut rr = r;
            for b in blocks {
                if rr < b.rows {
                    buf.extend(b.iter_row(rr).map(|(c, v)| (c as u32, v)));
                    return;
                }
                rr -= b.rows;
            }
        })
    }

    /// First `rows` rows (drops zero-padding added by `split_rows`).
    pub fn truncate_rows(&self, rows: usize) -> Result<SparseMatrix> {
        if rows == 0 || rows > self.rows {
            return Err(Error::invalid(format!(
                "cannot truncate {} rows to {rows}",
                self.rows
            )));
        }
        SparseMatrix::from_row_major(self.field, rows, self.cols, |r, buf| {
            buf.extend(self.iter_row(r).map(|(c, v)| (c as u32, v)));
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zero(self.field, self.rows, self.cols).expect("valid dims");
        for (r, c, v) in self.iter() {
            d.data[r * self.cols + c] = v;
        }
        d
    }

    /// Canonical coordinate text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} {} {}\n",
            self.field.q(),
            self.rows,
            self.cols,
            self.nnz()
        ));
        for (r, c, v) in self.iter() {
            out.push_str(&format!("{} {} {}\n", r, c, v.value()));
        }
        out
    }

    /// Parse the coordinate format. Triples may appear in any order; the
    /// parsed matrix is canonical (sorted, deduplicated-or-rejected).
    pub fn from_text(text: &str) -> Result<SparseMatrix> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "empty input".into(),
            })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 4 {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("expected header `q m n nnz`, got {head:?}"),
            });
        }
        let parse_num = |s: &str, line: usize| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer `{s}`"),
            })
        };
        let q = parse_num(head[0], hline + 1)? as u32;
        let rows = parse_num(head[1], hline + 1)? as usize;
        let cols = parse_num(head[2], hline + 1)? as usize;
        let nnz = parse_num(head[3], hline + 1)? as usize;
        let field = FieldSpec::new(q)?;
        let mut triples = Vec::with_capacity(nnz);
        for (lno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    line: lno + 1,
                    msg: format!("expected `row col value`, got `{line}`"),
                });
            }
            let r = parse_num(parts[0], lno + 1)? as usize;
            let c = parse_num(parts[1], lno + 1)? as usize;
            let v = parse_num(parts[2], lno + 1)? as u32;
            triples.push((r, c, v));
        }
        if triples.len() != nnz {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header claims {nnz} entries, found {}", triples.len()),
            });
        }
        SparseMatrix::from_triples(field, rows, cols, &triples)
    }
}

impl DenseMatrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(DenseMatrix {
            field,
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        })
    }

    pub fn from_values(field: FieldSpec, rows: usize, cols: usize, values: &[u32]) -> Result<Self> {
        check_dims(rows, cols)?;
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        let data = values
            .iter()
            .map(|&v| field.element(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: FieldElement) {
        assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = v;
    }

    fn zip_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.q(), other.field.q()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_same_shape(other)?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(DenseMatrix { data, ..*self })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_same_shape(other)?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(DenseMatrix { data, ..*self })
    }

    pub fn vstack(blocks: &[DenseMatrix]) -> Result<DenseMatrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::invalid("vstack needs at least one block"))?;
        let mut data = Vec::new();
        for b in blocks {
            if b.field != first.field {
                return Err(Error::FieldMismatch(first.field.q(), b.field.q()));
            }
            if b.cols != first.cols {
                return Err(Error::ShapeMismatch(first.rows, first.cols, b.rows, b.cols));
            }
            data.extend_from_slice(&b.data);
        }
        Ok(DenseMatrix {
            field: first.field,
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols: first.cols,
            data,
        })
    }

    pub fn truncate_rows(&self, rows: usize) -> Result<DenseMatrix> {
        if rows == 0 || rows > self.rows {
            return Err(Error::invalid(format!(
                "cannot truncate {} rows to {rows}",
                self.rows
            )));
        }
        Ok(DenseMatrix {
            field: self.field,
            rows,
            cols: self.cols,
            data: self.data[..rows * self.cols].to_vec(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.field.q(), self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.get(r, c).value().to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<DenseMatrix> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("expected header `q rows cols`, got {head:?}"),
            });
        }
        let parse_num = |s: &str, line: usize| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer `{s}`"),
            })
        };
        let q = parse_num(head[0], hline + 1)? as u32;
        let rows = parse_num(head[1], hline + 1)? as usize;
        let cols = parse_num(head[2], hline + 1)? as usize;
        let field = FieldSpec::new(q)?;
        let mut values = Vec::with_capacity(rows * cols);
        for (lno, line) in lines {
            for tok in line.split_whitespace() {
                values.push(parse_num(tok, lno + 1)? as u32);
            }
        }
        DenseMatrix::from_values(field, rows, cols, &values)
    }
}
