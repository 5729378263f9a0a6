//! Grid diagrams, winding numbers and the Alexander normalization constant.
//!
//! Columns are indexed left to right and rows bottom to top, both from 0.
//! Markings sit at square centers, so the marking in column `i`, row `r`
//! occupies the square with lower-left grid point `(i, r)`.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("{which} markings are not a permutation of 0..{n}")]
    NotPermutation { which: char, n: usize },
    #[error("X and O share the square in column {0}")]
    SharedSquare(usize),
    #[error("grid size {0} is below the minimum of 2")]
    TooSmall(usize),
}

/// An `n x n` grid diagram, stored as the row of the X and of the O in every column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridDiagram {
    n: usize,
    x_row: Vec<usize>,
    o_row: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vertical {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizontal {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub columns: Vec<Vertical>,
    pub rows: Vec<Horizontal>,
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    v.len() == n && v.iter().all(|&r| r < n && !std::mem::replace(&mut seen[r], true))
}

impl GridDiagram {
    pub fn new(x_row: Vec<usize>, o_row: Vec<usize>) -> Result<Self, GridError> {
        let n = x_row.len();
        if n < 2 {
            return Err(GridError::TooSmall(n));
        }
        if !is_permutation(&x_row, n) {
            return Err(GridError::NotPermutation { which: 'X', n });
        }
        if !is_permutation(&o_row, n) {
            return Err(GridError::NotPermutation { which: 'O', n });
        }
        if let Some(c) = (0..n).find(|&c| x_row[c] == o_row[c]) {
            return Err(GridError::SharedSquare(c));
        }
        Ok(GridDiagram { n, x_row, o_row })
    }

    /// Parses the `n` / `X` / `O` text format. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, GridError> {
        let mut n = None;
        let mut xs = None;
        let mut os = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let nums = words
                .map(|w| {
                    w.parse::<usize>().map_err(|_| GridError::Syntax {
                        line: lineno,
                        msg: format!("`{w}` is not a nonnegative integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let slot = match key {
                "n" => {
                    if nums.len() != 1 {
                        return Err(GridError::Syntax { line: lineno, msg: "expected `n <int>`".into() });
                    }
                    if n.replace(nums[0]).is_some() {
                        return Err(GridError::Syntax { line: lineno, msg: "duplicate `n` line".into() });
                    }
                    continue;
                }
                "X" => &mut xs,
                "O" => &mut os,
                other => {
                    return Err(GridError::Syntax { line: lineno, msg: format!("unknown key `{other}`") });
                }
            };
            if slot.replace(nums).is_some() {
                return Err(GridError::Syntax { line: lineno, msg: format!("duplicate `{key}` line") });
            }
        }
        let n = n.ok_or(GridError::Missing("n"))?;
        let xs = xs.ok_or(GridError::Missing("X"))?;
        let os = os.ok_or(GridError::Missing("O"))?;
        if n < 2 {
            return Err(GridError::TooSmall(n));
        }
        if xs.len() != n || os.len() != n {
            return Err(GridError::Syntax { line: 0, msg: format!("marking lines must have {n} entries") });
        }
        GridDiagram::new(xs, os)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn x_row(&self, col: usize) -> usize {
        self.x_row[col]
    }

    pub fn o_row(&self, col: usize) -> usize {
        self.o_row[col]
    }

    pub fn x_rows(&self) -> &[usize] {
        &self.x_row
    }

    pub fn o_rows(&self) -> &[usize] {
        &self.o_row
    }

    /// Reflection in a vertical line. Represents the mirror knot.
    pub fn mirrored(&self) -> GridDiagram {
        let mut x = self.x_row.clone();
        let mut o = self.o_row.clone();
        x.reverse();
        o.reverse();
        GridDiagram { n: self.n, x_row: x, o_row: o }
    }

    /// Cyclic translation on the torus: column `c` moves to `c + dc`, row `r` to `r + dr`.
    /// The result is the same diagram with a different fundamental domain.
    pub fn translated(&self, dc: usize, dr: usize) -> GridDiagram {
        let n = self.n;
        let mut x = vec![0; n];
        let mut o = vec![0; n];
        for c in 0..n {
            x[(c + dc) % n] = (self.x_row[c] + dr) % n;
            o[(c + dc) % n] = (self.o_row[c] + dr) % n;
        }
        GridDiagram { n, x_row: x, o_row: o }
    }

    /// Swaps columns `c` and `c + 1` when their strands neither interleave nor
    /// share a row. The knot type is unchanged.
    pub fn commute_columns(&self, c: usize) -> Option<GridDiagram> {
        if c + 1 >= self.n || !commutable(self.strand_band(c), self.strand_band(c + 1)) {
            return None;
        }
        let mut g = self.clone();
        g.x_row.swap(c, c + 1);
        g.o_row.swap(c, c + 1);
        Some(g)
    }

    /// Row analogue of [`GridDiagram::commute_columns`].
    pub fn commute_rows(&self, r: usize) -> Option<GridDiagram> {
        self.transposed().commute_columns(r).map(|t| t.transposed())
    }

    /// Reflection in the diagonal, X and O kept.
    fn transposed(&self) -> GridDiagram {
        let mut x = vec![0; self.n];
        let mut o = vec![0; self.n];
        for c in 0..self.n {
            x[self.x_row[c]] = c;
            o[self.o_row[c]] = c;
        }
        GridDiagram { n: self.n, x_row: x, o_row: o }
    }

    /// Columns run from X to O, rows from O to X.
    pub fn orientation(&self) -> Orientation {
        let columns = (0..self.n)
            .map(|c| if self.o_row[c] > self.x_row[c] { Vertical::Up } else { Vertical::Down })
            .collect();
        let mut x_col = vec![0; self.n];
        let mut o_col = vec![0; self.n];
        for c in 0..self.n {
            x_col[self.x_row[c]] = c;
            o_col[self.o_row[c]] = c;
        }
        let rows = (0..self.n)
            .map(|r| if x_col[r] > o_col[r] { Horizontal::Right } else { Horizontal::Left })
            .collect();
        Orientation { columns, rows }
    }

    /// Heights `j` with `low < j <= high` are crossed by the vertical strand of column `col`.
    pub fn strand_band(&self, col: usize) -> (usize, usize) {
        let (a, b) = (self.x_row[col], self.o_row[col]);
        (a.min(b), a.max(b))
    }

    pub fn winding_table(&self) -> WindingTable {
        let n = self.n;
        let mut w = vec![0i32; n * n];
        for i in 1..n {
            let c = i - 1;
            let (low, high) = self.strand_band(c);
            let step = if self.x_row[c] > self.o_row[c] { 1 } else { -1 };
            for j in 0..n {
                let inside = j > low && j <= high;
                w[i * n + j] = w[c * n + j] + if inside { step } else { 0 };
            }
        }
        WindingTable { n, w }
    }

    pub fn constants(&self, w: &WindingTable) -> GridConstants {
        let n = self.n;
        let mut corner_sum = 0i64;
        for c in 0..n {
            for r in [self.x_row[c], self.o_row[c]] {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    corner_sum += w.get(c + di, r + dj) as i64;
                }
            }
        }
        let a = Ratio::new(1 - n as i64, 2) + Ratio::new(corner_sum, 8);
        GridConstants { a, corner_sum }
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
        format!("n {}\nX {}\nO {}\n", self.n, join(&self.x_row), join(&self.o_row))
    }
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in (0..self.n).rev() {
            for c in 0..self.n {
                let ch = if self.x_row[c] == r {
                    'X'
                } else if self.o_row[c] == r {
                    'O'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn commutable((lo1, hi1): (usize, usize), (lo2, hi2): (usize, usize)) -> bool {
    let ends = [lo1, hi1, lo2, hi2];
    let distinct = (0..4).all(|i| (i + 1..4).all(|j| ends[i] != ends[j]));
    let inside = |v: usize, lo: usize, hi: usize| lo < v && v < hi;
    distinct && inside(lo2, lo1, hi1) == inside(hi2, lo1, hi1)
}

/// Winding numbers of the knot projection around every grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindingTable {
    n: usize,
    w: Vec<i32>,
}

impl WindingTable {
    /// Builds a table from raw values in column-major order, `values[i * n + j] = w(i, j)`.
    pub fn from_values(n: usize, values: Vec<i32>) -> Self {
        assert_eq!(values.len(), n * n);
        WindingTable { n, w: values }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Indices are taken mod `n`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.w[(i % self.n) * self.n + j % self.n]
    }

    pub fn negated(&self) -> WindingTable {
        WindingTable { n: self.n, w: self.w.iter().map(|v| -v).collect() }
    }

    pub fn values(&self) -> &[i32] {
        &self.w
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridConstants {
    pub a: Rational,
    pub corner_sum: i64,
}
