//! The ±1 game matrix `M` with `M[i][j] = y_i h_j(x_i)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An `m × n` matrix of weak-classifier agreements with the labels.
///
/// Entries are stored column-major since every boosting step reads one
/// column. Every entry is exactly `-1` or `+1`, `m >= 2`, `n >= 1` and no
/// column is all `+1` (no weak classifier is perfect on the training set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameMatrix {
    m: usize,
    n: usize,
    cols: Vec<i8>,
}

impl GameMatrix {
    /// Builds a matrix from row vectors.
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut cols = vec![0i8; m * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                cols[j * m + i] = v;
            }
        }
        Self::from_columns(m, n, cols)
    }

    /// Builds a matrix from column-major entries.
    pub fn from_columns(m: usize, n: usize, cols: Vec<i8>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidMatrix(format!("need at least 2 examples, got {m}")));
        }
        if n < 1 {
            return Err(Error::InvalidMatrix("need at least 1 weak classifier".into()));
        }
        if cols.len() != m * n {
            return Err(Error::Dimension { expected: m * n, got: cols.len() });
        }
        if let Some(pos) = cols.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) = {} is not ±1",
                pos % m,
                pos / m,
                cols[pos]
            )));
        }
        let matrix = GameMatrix { m, n, cols };
        if let Some(j) = (0..n).find(|&j| matrix.column(j).iter().all(|&v| v == 1)) {
            return Err(Error::InvalidMatrix(format!(
                "column {j} is all +1 (a perfect weak classifier)"
            )));
        }
        Ok(matrix)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.cols[j * self.m + i]
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[i8] {
        &self.cols[j * self.m..(j + 1) * self.m]
    }

    pub fn row(&self, i: usize) -> Vec<i8> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    /// `Mλ` for an arbitrary coefficient vector.
    pub fn mul_vec(&self, lambda: &[f64]) -> Vec<f64> {
        assert_eq!(lambda.len(), self.n, "coefficient vector length");
        let mut out = vec![0.0; self.m];
        for (j, &l) in lambda.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.column(j)) {
                *o += l * f64::from(v);
            }
        }
        out
    }

    /// `dᵀM`, the vector of edges of every column.
    pub fn edges(&self, d: &[f64]) -> Vec<f64> {
        assert_eq!(d.len(), self.m, "weight vector length");
        (0..self.n).map(|j| column_edge(self.column(j), d)).collect()
    }

    /// A new matrix with the rows permuted: row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        let rows: Vec<Vec<i8>> = perm.iter().map(|&i| self.row(i)).collect();
        Self::from_rows(&rows)
    }

    /// A new matrix with the given columns appended (by index, duplicates allowed).
    pub fn with_extra_columns(&self, extra: &[usize]) -> Result<Self> {
        let mut cols = self.cols.clone();
        for &j in extra {
            cols.extend_from_slice(self.column(j));
        }
        Self::from_columns(self.m, self.n + extra.len(), cols)
    }
}

/// Weighted agreement `Σ d_i c_i` of one ±1 column.
#[inline]
pub fn column_edge(column: &[i8], d: &[f64]) -> f64 {
    column
        .iter()
        .zip(d)
        .map(|(&c, &w)| if c > 0 { w } else { -w })
        .sum()
}

impl FromStr for GameMatrix {
    type Err = Error;

    /// Parses the text format: a header line `m n`, then `m` lines of `n`
    /// whitespace-separated entries from `{-1, 1, +1}`. Blank lines are
    /// skipped; any other token is an error.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header line \"m n\"".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse { line: hline, msg: "header must be \"m n\"".into() });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: hline,
                msg: format!("bad dimension {s:?}"),
            })
        };
        let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

        let mut rows = Vec::with_capacity(m);
        for (line, body) in lines {
            if rows.len() == m {
                return Err(Error::Parse { line, msg: "more rows than declared".into() });
            }
            let row = body
                .split_whitespace()
                .map(|tok| match tok {
                    "1" | "+1" => Ok(1i8),
                    "-1" => Ok(-1i8),
                    other => Err(Error::Parse { line, msg: format!("invalid entry {other:?}") }),
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {m} rows, found {}", rows.len()),
            });
        }
        Self::from_rows(&rows)
    }
}

impl fmt::Display for GameMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.m, self.n)?;
        for i in 0..self.m {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The canonical 3×3 cyclic instance: every example is misclassified by
/// exactly one of the three weak classifiers.
pub fn cyclic_3x3() -> GameMatrix {
    GameMatrix::from_rows(&[vec![1, 1, -1], vec![-1, 1, 1], vec![1, -1, 1]])
        .expect("static matrix is valid")
}
