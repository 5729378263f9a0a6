//! The lifted Heegaard diagram on the m-fold cover of the grid torus.
//!
//! The point `beta_i ∩ alpha_j` has m lifts `(i, j, k)`, one on every lift
//! `beta_i^k`. It lies on the lift `alpha_j^l` with `l = g(i, j, k) = k - w(i, j) mod m`.
//! A rightward path along `alpha_j` that crosses the branch cut of column `i`
//! (between columns `i` and `i + 1`) moves from sheet `k` to `k + delta_i(j)`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::grid::{GridConstants, GridDiagram, WindingTable};
use crate::linalg::{smith_normal_form, Matrix, SnfSolver};

/// `g(i, j, k)` for every lifted intersection point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetMap {
    n: usize,
    m: usize,
    table: Vec<u8>,
}

impl SheetMap {
    pub fn new(w: &WindingTable, m: usize) -> Self {
        let n = w.size();
        let mut table = Vec::with_capacity(n * n * m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    table.push((k as i64 - w.get(i, j) as i64).rem_euclid(m as i64) as u8);
                }
            }
        }
        SheetMap { n, m, table }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> usize {
        self.table[(i * self.n + j) * self.m + k] as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutColumn {
    pub low: usize,
    pub high: usize,
    pub x_above_o: bool,
}

/// Branch cuts: in each column, the vertical segment joining the two marking centers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSystem {
    columns: Vec<CutColumn>,
}

impl CutSystem {
    pub fn new(grid: &GridDiagram) -> Self {
        let columns = (0..grid.size())
            .map(|c| {
                let (low, high) = grid.strand_band(c);
                CutColumn { low, high, x_above_o: grid.x_row(c) > grid.o_row(c) }
            })
            .collect();
        CutSystem { columns }
    }

    pub fn column(&self, c: usize) -> CutColumn {
        self.columns[c]
    }

    /// Sheet increment for a rightward crossing of the cut of column `col` at height `j`.
    #[inline]
    pub fn delta(&self, col: usize, j: usize) -> i32 {
        let cut = self.columns[col];
        if j > cut.low && j <= cut.high {
            if cut.x_above_o {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    /// Sheet of the point where `alpha_j^l` meets column `i`, found by walking from column 0.
    pub fn walk_sheet(&self, j: usize, l: usize, i: usize, m: usize) -> usize {
        let shift: i64 = (0..i).map(|c| self.delta(c, j) as i64).sum();
        (l as i64 + shift).rem_euclid(m as i64) as usize
    }
}

/// A grid together with the data of its m-fold lift.
#[derive(Clone, Debug)]
pub struct LiftedDiagram {
    pub grid: GridDiagram,
    pub winding: WindingTable,
    pub constants: GridConstants,
    pub m: usize,
    pub sheets: SheetMap,
    pub cuts: CutSystem,
}

impl LiftedDiagram {
    pub fn new(grid: &GridDiagram, m: usize) -> Self {
        Self::with_winding(grid, grid.winding_table(), m)
    }

    /// Uses a caller-supplied winding table instead of the one computed from the grid.
    pub fn with_winding(grid: &GridDiagram, winding: WindingTable, m: usize) -> Self {
        assert!(m >= 1, "cover degree must be positive");
        let constants = grid.constants(&winding);
        let sheets = SheetMap::new(&winding, m);
        LiftedDiagram { grid: grid.clone(), winding, constants, m, sheets, cuts: CutSystem::new(grid) }
    }

    pub fn n(&self) -> usize {
        self.grid.size()
    }

    /// Index of the alpha lift through `(i, j, k)`.
    #[inline]
    pub fn alpha_lift(&self, i: usize, j: usize, k: usize) -> usize {
        self.sheets.get(i, j, k)
    }

    /// Sheet reached at column `i2` when following `alpha_j` rightward from `(i1, j, k)`.
    #[inline]
    pub fn shift_sheet(&self, i1: usize, i2: usize, j: usize, k: usize) -> usize {
        let d = self.winding.get(i2, j) as i64 - self.winding.get(i1, j) as i64;
        (k as i64 + d).rem_euclid(self.m as i64) as usize
    }

    /// First point `(i, j, k)` where `g` disagrees with walking the alpha lift through the cuts.
    pub fn sheet_walk_mismatch(&self) -> Option<(usize, usize, usize)> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                for k in 0..self.m {
                    let l = self.alpha_lift(i, j, k);
                    if self.cuts.walk_sheet(j, l, i, self.m) != k {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basepoint {
    /// Lift of an O marking.
    W,
    /// Lift of an X marking.
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Counter-clockwise boundary as signed edges.
    pub boundary: Vec<(u32, i8)>,
    /// Euler measure, an integer for every face that occurs here.
    pub euler: i64,
    pub basepoint: Option<Basepoint>,
}

/// Cell structure of the lifted surface cut along all lifted alpha and beta circles.
///
/// Vertex `(i, j, k)` has id `(i * n + j) * m + k`. Alpha edge `(i, j, k)` runs
/// rightward from that vertex, beta edge `(i, j, k)` runs upward; alpha edges
/// take ids `0..V` and beta edges `V..2V`.
#[derive(Clone, Debug)]
pub struct CwSurface {
    pub n: usize,
    pub m: usize,
    pub faces: Vec<Face>,
    piece_face: Vec<u32>,
    cuts: CutSystem,
}

impl CwSurface {
    pub fn new(lift: &LiftedDiagram) -> Self {
        let (n, m) = (lift.n(), lift.m);
        let grid = &lift.grid;
        let cuts = lift.cuts.clone();
        let mut s = CwSurface { n, m, faces: Vec::new(), piece_face: vec![u32::MAX; n * n * m], cuts };
        for i in 0..n {
            for j in 0..n {
                let marking = if grid.o_row(i) == j {
                    Some(Basepoint::W)
                } else if grid.x_row(i) == j {
                    Some(Basepoint::Z)
                } else {
                    None
                };
                match marking {
                    None => {
                        for k in 0..m {
                            let id = s.faces.len() as u32;
                            s.piece_face[(i * n + j) * m + k] = id;
                            s.faces.push(Face { boundary: s.square_boundary(i, j, k), euler: 0, basepoint: None });
                        }
                    }
                    Some(bp) => {
                        let id = s.faces.len() as u32;
                        let mut boundary = Vec::with_capacity(4 * m);
                        for k in 0..m {
                            s.piece_face[(i * n + j) * m + k] = id;
                            boundary.extend(s.square_boundary(i, j, k));
                        }
                        s.faces.push(Face { boundary, euler: 1 - m as i64, basepoint: Some(bp) });
                    }
                }
            }
        }
        s
    }

    pub fn num_vertices(&self) -> usize {
        self.n * self.n * self.m
    }

    pub fn num_edges(&self) -> usize {
        2 * self.num_vertices()
    }

    #[inline]
    pub fn vertex(&self, i: usize, j: usize, k: usize) -> usize {
        ((i % self.n) * self.n + j % self.n) * self.m + k % self.m
    }

    #[inline]
    pub fn alpha_edge(&self, i: usize, j: usize, k: usize) -> u32 {
        self.vertex(i, j, k) as u32
    }

    #[inline]
    pub fn beta_edge(&self, i: usize, j: usize, k: usize) -> u32 {
        (self.num_vertices() + self.vertex(i, j, k)) as u32
    }

    fn cross(&self, i: usize, j: usize, k: usize) -> usize {
        (k as i64 + self.cuts.delta(i % self.n, j % self.n) as i64).rem_euclid(self.m as i64) as usize
    }

    fn uncross(&self, i: usize, j: usize, k: usize) -> usize {
        (k as i64 - self.cuts.delta(i % self.n, j % self.n) as i64).rem_euclid(self.m as i64) as usize
    }

    fn square_boundary(&self, i: usize, j: usize, k: usize) -> Vec<(u32, i8)> {
        vec![
            (self.alpha_edge(i, j, k), 1),
            (self.beta_edge(i + 1, j, self.cross(i, j, k)), 1),
            (self.alpha_edge(i, j + 1, k), -1),
            (self.beta_edge(i, j, k), -1),
        ]
    }

    /// Endpoints `(tail, head)` of an edge.
    pub fn endpoints(&self, e: u32) -> (usize, usize) {
        let v = self.num_vertices();
        let e = e as usize;
        let (id, is_beta) = if e < v { (e, false) } else { (e - v, true) };
        let k = id % self.m;
        let j = (id / self.m) % self.n;
        let i = id / (self.m * self.n);
        if is_beta {
            (id, self.vertex(i, j + 1, k))
        } else {
            (id, self.vertex(i + 1, j, self.cross(i, j, k)))
        }
    }

    /// Face containing the lift of square `(i, j)` whose left side lies on sheet `k`.
    #[inline]
    pub fn piece(&self, i: usize, j: usize, k: usize) -> u32 {
        self.piece_face[((i % self.n) * self.n + j % self.n) * self.m + k % self.m]
    }

    /// Faces at the NE, NW, SE, SW corners of vertex `(i, j, k)`.
    pub fn corner_faces(&self, i: usize, j: usize, k: usize) -> [u32; 4] {
        let n = self.n;
        let (il, jd) = ((i + n - 1) % n, (j + n - 1) % n);
        let kl = self.uncross(il, j, k);
        [self.piece(i, j, k), self.piece(il, j, kl), self.piece(i, jd, k), self.piece(il, jd, kl)]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.faces.len() as i64
    }

    /// Genus expected for the lift of a genus-one diagram with `n` basepoint pairs.
    pub fn expected_genus(&self) -> i64 {
        (self.m + (self.m - 1) * (self.n - 1)) as i64
    }

    /// `alpha_j^l` as a chain of alpha edges, starting at column 0.
    pub fn alpha_circle(&self, j: usize, l: usize) -> Vec<u32> {
        let mut k = l;
        (0..self.n)
            .map(|i| {
                let e = self.alpha_edge(i, j, k);
                k = self.cross(i, j, k);
                e
            })
            .collect()
    }

    pub fn beta_circle(&self, i: usize, k: usize) -> Vec<u32> {
        (0..self.n).map(|j| self.beta_edge(i, j, k)).collect()
    }

    /// Alpha edges from `(0, j, l)` rightward up to column `i`, together with the sheet reached.
    pub fn alpha_arc(&self, j: usize, l: usize, i: usize) -> (Vec<u32>, usize) {
        let mut k = l;
        let mut edges = Vec::with_capacity(i);
        for c in 0..i {
            edges.push(self.alpha_edge(c, j, k));
            k = self.cross(c, j, k);
        }
        (edges, k)
    }

    /// Beta edges from `(i, 0, k)` up to row `j`.
    pub fn beta_arc(&self, i: usize, k: usize, j: usize) -> Vec<u32> {
        (0..j).map(|r| self.beta_edge(i, r, k)).collect()
    }

    /// Checks that every face boundary is a cycle.
    pub fn boundaries_closed(&self) -> bool {
        self.faces.iter().all(|f| {
            let mut acc = vec![0i64; self.num_vertices()];
            for &(e, s) in &f.boundary {
                let (a, b) = self.endpoints(e);
                acc[a] -= s as i64;
                acc[b] += s as i64;
            }
            acc.iter().all(|&x| x == 0)
        })
    }

    /// Signed vertex-to-vertex paths along a spanning tree rooted at vertex 0.
    pub fn tree_paths(&self) -> Vec<Vec<(u32, i8)>> {
        let nv = self.num_vertices();
        let mut adj: Vec<Vec<(usize, u32, i8)>> = vec![Vec::new(); nv];
        for e in 0..self.num_edges() as u32 {
            let (a, b) = self.endpoints(e);
            adj[a].push((b, e, 1));
            adj[b].push((a, e, -1));
        }
        let mut parent: Vec<Option<(usize, u32, i8)>> = vec![None; nv];
        let mut seen = vec![false; nv];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(u, e, s) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some((v, e, s));
                    queue.push_back(u);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "1-skeleton of the lifted surface is disconnected");
        (0..nv)
            .map(|mut v| {
                let mut path = Vec::new();
                while let Some((p, e, s)) = parent[v] {
                    path.push((e, s));
                    v = p;
                }
                path.reverse();
                path
            })
            .collect()
    }
}

/// A finite abelian group `Z/d_1 + ... + Z/d_r` with `d_1 | ... | d_r`, all `d_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelian {
    pub factors: Vec<u64>,
}

pub type SpinClass = Vec<u64>;

impl FiniteAbelian {
    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> SpinClass {
        vec![0; self.factors.len()]
    }

    pub fn reduce(&self, v: &[i64]) -> SpinClass {
        v.iter().zip(&self.factors).map(|(&x, &d)| x.rem_euclid(d as i64) as u64).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> SpinClass {
        a.iter().zip(b).zip(&self.factors).map(|((&x, &y), &d)| (x + y) % d).collect()
    }

    pub fn neg(&self, a: &[u64]) -> SpinClass {
        a.iter().zip(&self.factors).map(|(&x, &d)| (d - x) % d).collect()
    }

    /// Mixed-radix index in `0..order()`.
    pub fn index(&self, a: &[u64]) -> usize {
        a.iter().zip(&self.factors).fold(0u64, |acc, (&x, &d)| acc * d + x) as usize
    }

    pub fn element(&self, mut idx: usize) -> SpinClass {
        let mut out = vec![0; self.factors.len()];
        for (slot, &d) in out.iter_mut().zip(&self.factors).rev() {
            *slot = (idx as u64) % d;
            idx /= d as usize;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = SpinClass> + '_ {
        (0..self.order() as usize).map(|i| self.element(i))
    }

    /// Order of an element.
    pub fn element_order(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.factors).fold(1u64, |acc, (&x, &d)| acc.lcm(&(d / d.gcd(&x))))
    }
}

/// H1 of the branched cover, presented as 1-cycles of the lifted surface modulo
/// face boundaries and lifted circles.
#[derive(Clone, Debug)]
pub struct H1Presentation {
    pub group: FiniteAbelian,
    /// Columns: faces in order, then alpha circles `(j, l)`, then beta circles `(i, k)`.
    pub relations: Matrix<BigInt>,
    pub solver: SnfSolver<BigInt>,
    projection: Vec<Vec<i64>>,
}

impl H1Presentation {
    pub fn new(surface: &CwSurface) -> Self {
        let (n, m) = (surface.n, surface.m);
        let ne = surface.num_edges();
        let mut cols: Vec<Vec<(u32, i64)>> = surface
            .faces
            .iter()
            .map(|f| f.boundary.iter().map(|&(e, s)| (e, s as i64)).collect())
            .collect();
        for j in 0..n {
            for l in 0..m {
                cols.push(surface.alpha_circle(j, l).into_iter().map(|e| (e, 1)).collect());
            }
        }
        for i in 0..n {
            for k in 0..m {
                cols.push(surface.beta_circle(i, k).into_iter().map(|e| (e, 1)).collect());
            }
        }
        let mut a = Matrix::<BigInt>::zeros(ne, cols.len());
        for (c, col) in cols.iter().enumerate() {
            for &(e, s) in col {
                let cur = a.get(e as usize, c).clone();
                a.set(e as usize, c, cur + s);
            }
        }
        let solver = SnfSolver::new(&a);
        let snf = solver.snf();
        let mut factors = Vec::new();
        let mut projection = Vec::new();
        for t in 0..snf.rank {
            let d = &snf.diag[t];
            if d > &BigInt::from(1) {
                let d64 = d.to_u64().expect("H1 invariant factor exceeds u64");
                factors.push(d64);
                let row = snf
                    .u
                    .row(t)
                    .iter()
                    .map(|x| x.mod_floor(d).to_i64().unwrap())
                    .collect();
                projection.push(row);
            }
        }
        H1Presentation { group: FiniteAbelian { factors }, relations: a, solver, projection }
    }

    /// Class of an integral 1-cycle given as signed edges.
    pub fn project(&self, cycle: &[(u32, i64)]) -> SpinClass {
        let raw: Vec<i64> = self
            .projection
            .iter()
            .zip(&self.group.factors)
            .map(|(row, &d)| {
                cycle
                    .iter()
                    .fold(0i64, |acc, &(e, s)| (acc + row[e as usize] * s).rem_euclid(d as i64))
            })
            .collect();
        self.group.reduce(&raw)
    }

    pub fn num_faces(&self, surface: &CwSurface) -> usize {
        surface.faces.len()
    }
}

/// Relators of H1 of the double branched cover in the basis `d_0, ..., d_{n-2}`
/// dual to loops around the cuts of columns `0..n-1` on sheet 1. One relator per
/// circle `alpha_i^0`; zero relators are dropped.
pub fn cut_basis_relators(grid: &GridDiagram) -> Vec<Vec<i64>> {
    let n = grid.size();
    let w = grid.winding_table();
    let cuts = CutSystem::new(grid);
    let mut out = Vec::new();
    for row in 0..n {
        let rel: Vec<i64> = (0..n - 1)
            .map(|c| {
                if cuts.delta(c, row) == 0 {
                    0
                } else if w.get(c, row).rem_euclid(2) == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        if rel.iter().any(|&x| x != 0) {
            out.push(rel);
        }
    }
    out
}

/// Invariant factors greater than one of the group presented by integer relators.
pub fn group_from_relators(relators: &[Vec<i64>], generators: usize) -> FiniteAbelian {
    let rows: Vec<Vec<BigInt>> = relators.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut rows = rows;
    if rows.is_empty() {
        rows.push(vec![BigInt::zero(); generators]);
    }
    let snf = smith_normal_form(&Matrix::from_rows(rows, generators));
    assert_eq!(snf.rank, generators, "presentation has infinite quotient");
    FiniteAbelian { factors: snf.torsion().iter().map(|d| d.to_u64().unwrap()).collect() }
}

/// H1 of the double branched cover from the cut basis relators.
pub fn cut_basis_presentation(grid: &GridDiagram) -> FiniteAbelian {
    group_from_relators(&cut_basis_relators(grid), grid.size() - 1)
}
