//! Generators and rectangle differentials of the lifted grid complex.

use std::fmt;

use crate::cover::LiftedDiagram;
use crate::Rational;

/// Largest supported value of `m * n`; a generator packs one 4-bit row per lifted beta circle.
pub const MAX_SLOTS: usize = 32;
pub const MAX_GRID: usize = 16;

/// One point on every lifted beta circle: slot `i * m + k` holds the row of the
/// point on `beta_i^k`. Slot 0 is stored in the top nibble so that the integer
/// order is the lexicographic order of the slot table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(pub u128);

impl Generator {
    #[inline]
    fn shift(slot: usize) -> u32 {
        (124 - 4 * slot) as u32
    }

    pub fn from_rows(rows: &[u8]) -> Self {
        assert!(rows.len() <= MAX_SLOTS);
        let mut v = 0u128;
        for (s, &r) in rows.iter().enumerate() {
            v |= (r as u128 & 0xf) << Self::shift(s);
        }
        Generator(v)
    }

    #[inline]
    pub fn row(self, slot: usize) -> usize {
        ((self.0 >> Self::shift(slot)) & 0xf) as usize
    }

    #[inline]
    pub fn with_row(self, slot: usize, row: usize) -> Self {
        let sh = Self::shift(slot);
        Generator((self.0 & !(0xf << sh)) | ((row as u128) << sh))
    }

    pub fn rows(self, slots: usize) -> Vec<u8> {
        (0..slots).map(|s| self.row(s) as u8).collect()
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({:032x})", self.0)
    }
}

/// Bounds on the scaled Alexander key, inclusive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AlexanderWindow {
    pub min: Option<i64>,
    pub max: Option<i64>,
}

/// Precomputed tables for enumerating generators and their differentials.
#[derive(Clone, Debug)]
pub struct ComplexEngine {
    pub lift: LiftedDiagram,
    n: usize,
    m: usize,
    /// `w[i * n + j]`
    w: Vec<i32>,
    /// `alpha[(i * n + j) * m + k]`, the alpha lift through `(i, j, k)`.
    alpha: Vec<u8>,
    /// `mark_gap[c * n + j]`: rows `j, j + 1, ..., j + gap - 1` of column `c` carry no marking.
    mark_gap: Vec<u8>,
    /// `shift[(i1 * n + i2) * n + j]`: sheet offset when moving along row `j` from column `i1` to `i2`.
    shift: Vec<u8>,
    a8: i64,
    min_w_suffix: Vec<i64>,
    max_w_suffix: Vec<i64>,
    /// Assignment duals bounding the winding sum from below and from above.
    low: DualBound,
    high: DualBound,
}

/// `u[i] + v[j] <= sign * w(i, j)`. Since every row is used exactly m times, the
/// remaining slots contribute at least `sum u` over their columns plus `v[j]` per
/// remaining use of row `j`, in units of `sign * w`.
#[derive(Clone, Debug)]
struct DualBound {
    u_suffix: Vec<i64>,
    v: Vec<i64>,
}

impl DualBound {
    fn new(n: usize, m: usize, cost: impl Fn(usize, usize) -> i64) -> Self {
        let (u, v) = assignment_potentials(n, cost);
        let mut u_suffix = vec![0i64; n * m + 1];
        for s in (0..n * m).rev() {
            u_suffix[s] = u_suffix[s + 1] + u[s / m];
        }
        DualBound { u_suffix, v }
    }
}

/// Optimal dual potentials of the `n x n` assignment problem, by the Hungarian method.
fn assignment_potentials(n: usize, cost: impl Fn(usize, usize) -> i64) -> (Vec<i64>, Vec<i64>) {
    const INF: i64 = i64::MAX / 4;
    let (mut u, mut v) = (vec![0i64; n + 1], vec![0i64; n + 1]);
    let (mut p, mut way) = (vec![0usize; n + 1], vec![0usize; n + 1]);
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let (mut delta, mut j1) = (INF, 0);
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (u[1..].to_vec(), v[1..].to_vec())
}

impl ComplexEngine {
    pub fn new(lift: &LiftedDiagram) -> Self {
        let n = lift.n();
        let m = lift.m;
        assert!(n <= MAX_GRID && n * m <= MAX_SLOTS, "grid size {n} with {m} sheets exceeds generator encoding");
        let w: Vec<i32> = (0..n * n).map(|idx| lift.winding.get(idx / n, idx % n)).collect();
        let mut alpha = Vec::with_capacity(n * n * m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    alpha.push(lift.alpha_lift(i, j, k) as u8);
                }
            }
        }
        let grid = &lift.grid;
        let mut mark_gap = vec![0u8; n * n];
        for c in 0..n {
            for j in 0..n {
                let gx = (grid.x_row(c) + n - j) % n;
                let go = (grid.o_row(c) + n - j) % n;
                mark_gap[c * n + j] = gx.min(go) as u8;
            }
        }
        let mut shift = vec![0u8; n * n * n];
        for i1 in 0..n {
            for i2 in 0..n {
                for j in 0..n {
                    let d = (w[i2 * n + j] - w[i1 * n + j]) as i64;
                    shift[(i1 * n + i2) * n + j] = d.rem_euclid(m as i64) as u8;
                }
            }
        }
        let a = lift.constants.a;
        let a8 = (a * Rational::from_integer(8)).to_integer();
        let col_min: Vec<i64> = (0..n).map(|i| (0..n).map(|j| w[i * n + j] as i64).min().unwrap()).collect();
        let col_max: Vec<i64> = (0..n).map(|i| (0..n).map(|j| w[i * n + j] as i64).max().unwrap()).collect();
        let slots = n * m;
        let mut min_w_suffix = vec![0i64; slots + 1];
        let mut max_w_suffix = vec![0i64; slots + 1];
        for s in (0..slots).rev() {
            min_w_suffix[s] = min_w_suffix[s + 1] + col_min[s / m];
            max_w_suffix[s] = max_w_suffix[s + 1] + col_max[s / m];
        }
        let low = DualBound::new(n, m, |i, j| w[i * n + j] as i64);
        let high = DualBound::new(n, m, |i, j| -(w[i * n + j] as i64));
        ComplexEngine { lift: lift.clone(), n, m, w, alpha, mark_gap, shift, a8, min_w_suffix, max_w_suffix, low, high }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn slots(&self) -> usize {
        self.n * self.m
    }

    #[inline]
    pub fn winding(&self, i: usize, j: usize) -> i32 {
        self.w[i * self.n + j]
    }

    #[inline]
    pub fn alpha_lift(&self, i: usize, j: usize, k: usize) -> usize {
        self.alpha[(i * self.n + j) * self.m + k] as usize
    }

    /// Sum of winding numbers over all points of `x`.
    pub fn winding_sum(&self, x: Generator) -> i64 {
        (0..self.slots()).map(|s| self.winding(s / self.m, x.row(s)) as i64).sum()
    }

    /// `8 m A(x)`, an integer.
    #[inline]
    pub fn alexander_key_from_sum(&self, winding_sum: i64) -> i64 {
        self.m as i64 * self.a8 - 8 * winding_sum
    }

    pub fn alexander_key(&self, x: Generator) -> i64 {
        self.alexander_key_from_sum(self.winding_sum(x))
    }

    pub fn key_to_alexander(&self, key: i64) -> Rational {
        Rational::new(key, 8 * self.m as i64)
    }

    /// Scaled key of an Alexander grading, or `None` when not representable.
    pub fn alexander_to_key(&self, a: Rational) -> Option<i64> {
        let scaled = a * Rational::from_integer(8 * self.m as i64);
        scaled.is_integer().then(|| scaled.to_integer())
    }

    pub fn alexander_grading(&self, x: Generator) -> Rational {
        self.key_to_alexander(self.alexander_key(x))
    }

    /// Whether `x` has one point on every lifted alpha circle.
    pub fn is_generator(&self, x: Generator) -> bool {
        let mut used = 0u64;
        for s in 0..self.slots() {
            let (i, k) = (s / self.m, s % self.m);
            let j = x.row(s);
            if j >= self.n {
                return false;
            }
            let bit = 1u64 << (j * self.m + self.alpha_lift(i, j, k));
            if used & bit != 0 {
                return false;
            }
            used |= bit;
        }
        true
    }

    /// All m lifts of a downstairs generator, given as a permutation `column -> row`.
    pub fn lift_generator(&self, perm: &[usize]) -> Generator {
        assert_eq!(perm.len(), self.n);
        let rows: Vec<u8> = (0..self.slots()).map(|s| perm[s / self.m] as u8).collect();
        Generator::from_rows(&rows)
    }

    /// Lift of the identity permutation.
    pub fn canonical_reference(&self) -> Generator {
        let perm: Vec<usize> = (0..self.n).collect();
        self.lift_generator(&perm)
    }

    /// Visits every generator whose Alexander key lies in `window`, in increasing order.
    /// The callback receives the generator and its winding sum.
    pub fn enumerate(&self, window: AlexanderWindow, mut visit: impl FnMut(Generator, i64)) {
        // key >= min  <=>  8 * sum <= m * a8 - min
        let max_sum = window.min.map(|k| (self.m as i64 * self.a8 - k).div_euclid(8));
        let min_sum = window.max.map(|k| {
            let num = self.m as i64 * self.a8 - k;
            num.div_euclid(8) + i64::from(num.rem_euclid(8) != 0)
        });
        let caps = |b: &DualBound| self.m as i64 * b.v.iter().sum::<i64>();
        let mut state =
            Dfs { rows: [0u8; MAX_SLOTS], used: 0, max_sum, min_sum, low_caps: caps(&self.low), high_caps: caps(&self.high) };
        self.dfs(0, 0, &mut state, &mut visit);
    }

    fn dfs(&self, slot: usize, sum: i64, st: &mut Dfs, visit: &mut impl FnMut(Generator, i64)) {
        if slot == self.slots() {
            visit(Generator::from_rows(&st.rows[..slot]), sum);
            return;
        }
        let (i, k) = (slot / self.m, slot % self.m);
        for j in 0..self.n {
            let bit = 1u64 << (j * self.m + self.alpha_lift(i, j, k));
            if st.used & bit != 0 {
                continue;
            }
            let s2 = sum + self.winding(i, j) as i64;
            let (low_caps, high_caps) = (st.low_caps - self.low.v[j], st.high_caps - self.high.v[j]);
            if let Some(mx) = st.max_sum {
                let least = self.min_w_suffix[slot + 1].max(self.low.u_suffix[slot + 1] + low_caps);
                if s2 + least > mx {
                    continue;
                }
            }
            if let Some(mn) = st.min_sum {
                let most = self.max_w_suffix[slot + 1].min(-(self.high.u_suffix[slot + 1] + high_caps));
                if s2 + most < mn {
                    continue;
                }
            }
            st.used |= bit;
            st.rows[slot] = j as u8;
            let saved = (st.low_caps, st.high_caps);
            (st.low_caps, st.high_caps) = (low_caps, high_caps);
            self.dfs(slot + 1, s2, st, visit);
            (st.low_caps, st.high_caps) = saved;
            st.used &= !bit;
        }
    }

    /// Generators `y` with an odd number of empty lifted rectangles from `x` to `y`.
    /// The result is sorted.
    pub fn differentials_from(&self, x: Generator, out: &mut Vec<Generator>) {
        out.clear();
        self.rectangles_from(x, |r| out.push(r.target));
        cancel_pairs(out);
    }

    /// Calls `emit` for every empty lifted rectangle with lower-left and upper-right corners in `x`.
    pub fn rectangles_from(&self, x: Generator, mut emit: impl FnMut(LiftedRectangle)) {
        let (n, m) = (self.n, self.m);
        let mut rows = [0u8; MAX_SLOTS];
        for (s, r) in rows.iter_mut().enumerate().take(self.slots()) {
            *r = x.row(s) as u8;
        }
        for i1 in 0..n {
            for k1 in 0..m {
                let j1 = rows[i1 * m + k1] as usize;
                let mut mark_limit = n;
                let mut point_limit = n;
                for width in 1..n {
                    let c_prev = (i1 + width - 1) % n;
                    mark_limit = mark_limit.min(self.mark_gap[c_prev * n + j1] as usize);
                    if mark_limit == 0 {
                        break;
                    }
                    let i2 = (i1 + width) % n;
                    let k2 = (k1 + self.shift[(i1 * n + i2) * n + j1] as usize) % m;
                    let j2 = rows[i2 * m + k2] as usize;
                    let height = (j2 + n - j1) % n;
                    if height <= mark_limit && height < point_limit {
                        let target = x.with_row(i1 * m + k1, j2).with_row(i2 * m + k2, j1);
                        emit(LiftedRectangle { col: i1, row: j1, sheet: k1, width, height, right_sheet: k2, target });
                    }
                    point_limit = point_limit.min(height);
                }
            }
        }
    }
}

struct Dfs {
    rows: [u8; MAX_SLOTS],
    used: u64,
    max_sum: Option<i64>,
    min_sum: Option<i64>,
    /// `sum_j v[j]` over the remaining uses of each row, for both bounds.
    low_caps: i64,
    high_caps: i64,
}

/// Sorts and removes elements occurring an even number of times.
pub fn cancel_pairs(v: &mut Vec<Generator>) {
    v.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            v[out] = v[i];
            out += 1;
        }
        i = j;
    }
    v.truncate(out);
}

/// An empty rectangle on the lifted surface. The lower-left corner is the point
/// of the source on `beta_col^sheet`; the rectangle spans `width` columns and
/// `height` rows, both taken cyclically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftedRectangle {
    pub col: usize,
    pub row: usize,
    pub sheet: usize,
    pub width: usize,
    pub height: usize,
    pub right_sheet: usize,
    pub target: Generator,
}
