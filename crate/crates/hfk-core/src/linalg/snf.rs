use num_rational::Ratio;
use num_traits::Zero;

use super::{IntScalar, Matrix};

/// `u * a * v = diag`, with `diag[..rank]` positive and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct Snf<T> {
    pub diag: Vec<T>,
    pub rank: usize,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: IntScalar> Snf<T> {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<T> {
        self.diag[..self.rank].iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

fn sub_scaled<T: IntScalar>(rows: &mut [Vec<T>], dst: usize, src: usize, q: &T) {
    let (a, b) = if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x = x.clone() - q.clone() * y.clone();
        }
    }
}

fn abs_lt<T: IntScalar>(a: &T, b: &T) -> bool {
    a.abs() < b.abs()
}

pub fn smith_normal_form<T: IntScalar>(a: &Matrix<T>) -> Snf<T> {
    let (r, c) = (a.rows(), a.cols());
    let mut m = a.to_rows();
    let mut u = Matrix::<T>::identity(r).to_rows();
    let mut vt = Matrix::<T>::identity(c).to_rows();
    let mut t = 0;

    let swap_cols = |m: &mut Vec<Vec<T>>, vt: &mut Vec<Vec<T>>, i: usize, j: usize| {
        if i != j {
            for row in m.iter_mut() {
                row.swap(i, j);
            }
            vt.swap(i, j);
        }
    };

    'outer: while t < r.min(c) {
        let mut best: Option<(usize, usize)> = None;
        'search: for (i, row) in m.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| abs_lt(x, &m[bi][bj])) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        break 'search;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break 'outer };
        m.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut m, &mut vt, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                sub_scaled(&mut m, i, t, &q);
                sub_scaled(&mut u, i, t, &q);
                dirty |= !m[i][t].is_zero();
            }
            for j in t + 1..c {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        row[j] = row[j].clone() - q.clone() * row[t].clone();
                    }
                }
                sub_scaled(&mut vt, j, t, &q);
                dirty |= !m[t][j].is_zero();
            }
            if dirty {
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..r {
                    if !m[i][t].is_zero() && abs_lt(&m[i][t], &m[bi][bj]) {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t + 1..c {
                    if !m[t][j].is_zero() && abs_lt(&m[t][j], &m[bi][bj]) {
                        (bi, bj) = (t, j);
                    }
                }
                m.swap(t, bi);
                u.swap(t, bi);
                swap_cols(&mut m, &mut vt, t, bj);
                continue;
            }
            let p = m[t][t].clone();
            if !p.abs().is_one() {
                let bad = (t + 1..r).find(|&i| m[i][t + 1..].iter().any(|x| !x.is_multiple_of(&p)));
                if let Some(i) = bad {
                    for j in t..c {
                        let add = m[i][j].clone();
                        m[t][j] = m[t][j].clone() + add;
                    }
                    for j in 0..r {
                        let add = u[i][j].clone();
                        u[t][j] = u[t][j].clone() + add;
                    }
                    continue;
                }
            }
            break;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -x.clone();
            }
        }
        t += 1;
    }

    let diag = (0..r.min(c)).map(|i| m[i][i].clone()).collect();
    Snf {
        diag,
        rank: t,
        u: Matrix::from_rows(u, r),
        v: Matrix::from_rows(vt, c).transpose(),
    }
}

/// Reusable solver for `a * x = b` built from one Smith decomposition of `a`.
#[derive(Clone, Debug)]
pub struct SnfSolver<T> {
    snf: Snf<T>,
}

impl<T: IntScalar> SnfSolver<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        SnfSolver { snf: smith_normal_form(a) }
    }

    pub fn snf(&self) -> &Snf<T> {
        &self.snf
    }

    /// `u * b`, the right-hand side in the diagonal basis.
    pub fn transform(&self, b: &[T]) -> Vec<T> {
        self.snf.u.mul_vec(b)
    }

    fn consistent(&self, y: &[T]) -> bool {
        y[self.snf.rank..].iter().all(|v| v.is_zero())
    }

    /// Smallest `d >= 1` with `a * x = d * b` solvable, and one such `x`.
    pub fn minimal_multiple(&self, b: &[T]) -> Option<(T, Vec<T>)> {
        let y = self.transform(b);
        if !self.consistent(&y) {
            return None;
        }
        let rank = self.snf.rank;
        let mut d = T::one();
        for i in 0..rank {
            let di = &self.snf.diag[i];
            d = d.lcm(&(di.clone() / di.gcd(&y[i])));
        }
        let mut z = vec![T::zero(); self.snf.v.rows()];
        for i in 0..rank {
            z[i] = d.clone() * y[i].clone() / self.snf.diag[i].clone();
        }
        Some((d, self.snf.v.mul_vec(&z)))
    }

    /// One rational solution of `a * x = b`, linear in `b`.
    pub fn solve_rational(&self, b: &[T]) -> Option<Vec<Ratio<T>>> {
        let y = self.transform(b);
        if !self.consistent(&y) {
            return None;
        }
        let v = &self.snf.v;
        let mut x = vec![Ratio::zero(); v.rows()];
        for i in 0..self.snf.rank {
            if y[i].is_zero() {
                continue;
            }
            let zi = Ratio::new(y[i].clone(), self.snf.diag[i].clone());
            for (r, xr) in x.iter_mut().enumerate() {
                let e = v.get(r, i);
                if !e.is_zero() {
                    *xr = xr.clone() + zi.clone() * Ratio::from_integer(e.clone());
                }
            }
        }
        Some(x)
    }
}

/// Smallest `d >= 1` such that `a * x = d * b` has an integer solution, or `None`
/// when `b` is outside the rational column span of `a`.
pub fn solve_minimal_multiple<T: IntScalar>(a: &Matrix<T>, b: &[T]) -> Option<(T, Vec<T>)> {
    SnfSolver::new(a).minimal_multiple(b)
}
