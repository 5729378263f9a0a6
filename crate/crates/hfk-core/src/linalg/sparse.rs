use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::Gf2Matrix;

/// The active submatrix is handed to packed elimination once it has at most
/// this many cells and is at least `1 / DENSE_RATIO` full.
const DENSE_CELLS: usize = 1 << 26;
const DENSE_RATIO: usize = 16;

fn normalize(row: &mut Vec<u32>) {
    row.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < row.len() {
        let mut j = i;
        while j < row.len() && row[j] == row[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            row[out] = row[i];
            out += 1;
        }
        i = j;
    }
    row.truncate(out);
}

fn remove_entry(list: &mut Vec<u32>, v: u32) {
    let pos = list.iter().position(|&x| x == v).expect("incidence lists out of sync");
    list.swap_remove(pos);
}

/// Sparse elimination with minimum-degree column pivoting.
struct Eliminator {
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
    col_done: Vec<bool>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
    singles: Vec<u32>,
    rank: usize,
    nnz: usize,
    live_rows: usize,
    live_cols: usize,
}

impl Eliminator {
    fn new(ncols: usize, rows: Vec<Vec<u32>>) -> Self {
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); ncols];
        let mut nnz = 0;
        for (r, row) in rows.iter().enumerate() {
            nnz += row.len();
            for &c in row {
                cols[c as usize].push(r as u32);
            }
        }
        let heap = (0..ncols)
            .filter(|&c| !cols[c].is_empty())
            .map(|c| Reverse((cols[c].len() as u32, c as u32)))
            .collect();
        let singles = (0..rows.len()).filter(|&r| rows[r].len() == 1).map(|r| r as u32).collect();
        let live_rows = rows.iter().filter(|r| !r.is_empty()).count();
        let live_cols = cols.iter().filter(|c| !c.is_empty()).count();
        Eliminator {
            rows,
            col_done: vec![false; ncols],
            cols,
            heap,
            singles,
            rank: 0,
            nnz,
            live_rows,
            live_cols,
        }
    }

    fn pivot(&mut self, p: usize, c: usize) {
        let prow = std::mem::take(&mut self.rows[p]);
        self.rank += 1;
        self.live_rows -= 1;
        self.nnz -= prow.len();
        self.col_done[c] = true;
        for &c2 in &prow {
            remove_entry(&mut self.cols[c2 as usize], p as u32);
        }
        let others = std::mem::take(&mut self.cols[c]);
        for &r in &others {
            let old = std::mem::take(&mut self.rows[r as usize]);
            let mut new = Vec::with_capacity(old.len() + prow.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < prow.len() {
                let a = old.get(i).copied().unwrap_or(u32::MAX);
                let b = prow.get(j).copied().unwrap_or(u32::MAX);
                if a < b {
                    new.push(a);
                    i += 1;
                } else if b < a {
                    if b as usize != c {
                        self.cols[b as usize].push(r);
                    }
                    new.push(b);
                    j += 1;
                } else {
                    if a as usize != c {
                        remove_entry(&mut self.cols[a as usize], r);
                    }
                    i += 1;
                    j += 1;
                }
            }
            self.nnz = self.nnz + new.len() - old.len();
            match new.len() {
                0 => self.live_rows -= 1,
                1 => self.singles.push(r),
                _ => {}
            }
            self.rows[r as usize] = new;
        }
        self.live_cols -= 1;
        for &c2 in &prow {
            let c2 = c2 as usize;
            if c2 == c || self.col_done[c2] {
                continue;
            }
            let deg = self.cols[c2].len();
            if deg == 0 {
                self.col_done[c2] = true;
                self.live_cols -= 1;
            } else {
                self.heap.push(Reverse((deg as u32, c2 as u32)));
            }
        }
    }

    fn dense_ready(&self) -> bool {
        let cells = self.live_rows.saturating_mul(self.live_cols);
        cells <= DENSE_CELLS && self.nnz.saturating_mul(DENSE_RATIO) >= cells
    }

    fn finish_dense(&mut self) -> usize {
        let mut relabel = vec![u32::MAX; self.cols.len()];
        let mut next = 0u32;
        for (c, rows) in self.cols.iter().enumerate() {
            if !self.col_done[c] && !rows.is_empty() {
                relabel[c] = next;
                next += 1;
            }
        }
        let rest: Vec<Vec<u32>> = self
            .rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.iter().map(|&c| relabel[c as usize]).collect())
            .collect();
        self.rank + Gf2Matrix::from_sparse_rows(next as usize, &rest).rank()
    }

    fn run(mut self) -> usize {
        loop {
            if let Some(r) = self.singles.pop() {
                let r = r as usize;
                if self.rows[r].len() == 1 {
                    let c = self.rows[r][0] as usize;
                    self.pivot(r, c);
                }
                continue;
            }
            if self.live_rows == 0 {
                return self.rank;
            }
            if self.dense_ready() {
                return self.finish_dense();
            }
            let Some(Reverse((deg, c))) = self.heap.pop() else {
                return self.rank;
            };
            let c = c as usize;
            if self.col_done[c] || self.cols[c].len() != deg as usize {
                continue;
            }
            let p = *self.cols[c].iter().min_by_key(|&&r| self.rows[r as usize].len()).unwrap();
            self.pivot(p as usize, c);
        }
    }
}

/// Rank over GF(2) of a sparse matrix given by rows of column indices.
/// Repeated indices within a row cancel in pairs.
pub fn sparse_gf2_rank(ncols: usize, mut rows: Vec<Vec<u32>>) -> usize {
    for row in rows.iter_mut() {
        normalize(row);
    }
    Eliminator::new(ncols, rows).run()
}
