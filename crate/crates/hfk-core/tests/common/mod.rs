#![allow(dead_code)]

use std::path::PathBuf;

use hfk_core::GridDiagram;
use proptest::prelude::*;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus(name: &str) -> GridDiagram {
    let path = corpus_dir().join(format!("{name}.grid"));
    GridDiagram::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Every corpus grid, sorted by name.
pub fn all_corpus() -> Vec<(String, GridDiagram)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "grid").then(|| {
                let name = p.file_stem().unwrap().to_string_lossy().into_owned();
                (name, GridDiagram::parse(&std::fs::read_to_string(&p).unwrap()).unwrap())
            })
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// A knot grid built from an X permutation and an n-cycle `tau`: the O in column
/// `c` shares its row with the X of column `tau(c)`, so the strands close up into
/// a single component.
pub fn knot_from(x_row: Vec<usize>, cycle_order: Vec<usize>) -> GridDiagram {
    let n = x_row.len();
    let mut tau = vec![0; n];
    for w in 0..n {
        tau[cycle_order[w]] = cycle_order[(w + 1) % n];
    }
    let o_row = (0..n).map(|c| x_row[tau[c]]).collect();
    GridDiagram::new(x_row, o_row).unwrap()
}

pub fn knot_grid(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = GridDiagram> {
    sizes.prop_flat_map(|n| {
        let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (perm.clone(), perm).prop_map(|(x, c)| knot_from(x, c))
    })
}

/// Whether the strands of a grid form a single component.
pub fn is_knot(grid: &GridDiagram) -> bool {
    let n = grid.size();
    let mut x_col = vec![0; n];
    for c in 0..n {
        x_col[grid.x_row(c)] = c;
    }
    let mut c = 0;
    for step in 1..=n {
        c = x_col[grid.o_row(c)];
        if c == 0 {
            return step == n;
        }
    }
    false
}

/// Counter-clockwise winding number around grid point `(i, j)`, from a vertical
/// ray: rows are oriented from O to X, and a row strand above the point moving
/// left counts +1.
pub fn winding_by_rows(grid: &GridDiagram, i: usize, j: usize) -> i32 {
    let n = grid.size();
    let mut x_col = vec![0; n];
    let mut o_col = vec![0; n];
    for c in 0..n {
        x_col[grid.x_row(c)] = c;
        o_col[grid.o_row(c)] = c;
    }
    (j..n)
        .filter(|&r| x_col[r].min(o_col[r]) < i && i <= x_col[r].max(o_col[r]))
        .map(|r| if x_col[r] < o_col[r] { 1 } else { -1 })
        .sum()
}

/// Naive count of empty rectangles from `x` to `y` on the grid torus, both given
/// as permutations column -> row.
pub fn naive_rectangles(grid: &GridDiagram, x: &[usize], y: &[usize]) -> usize {
    let n = grid.size();
    let moved: Vec<usize> = (0..n).filter(|&c| x[c] != y[c]).collect();
    let &[a, b] = moved.as_slice() else { return 0 };
    if y[a] != x[b] || y[b] != x[a] {
        return 0;
    }
    let mut count = 0;
    for (lo, hi) in [(a, b), (b, a)] {
        let width = (hi + n - lo) % n;
        let height = (x[hi] + n - x[lo]) % n;
        let inside_cell = |c: usize, r: usize| (c + n - lo) % n < width && (r + n - x[lo]) % n < height;
        let marked = (0..n).any(|c| inside_cell(c, grid.x_row(c)) || inside_cell(c, grid.o_row(c)));
        let blocked = (0..n).any(|c| {
            let dc = (c + n - lo) % n;
            let dr = (x[c] + n - x[lo]) % n;
            dc > 0 && dc < width && dr > 0 && dr < height
        });
        if !marked && !blocked {
            count += 1;
        }
    }
    count
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sheet change when crossing the cut of column `c` rightward at height `j`: the
/// cut joins the two markings, and crossing a strand that runs downward raises the sheet.
pub fn cut_crossing(grid: &GridDiagram, c: usize, j: usize) -> i64 {
    let (x, o) = (grid.x_row(c), grid.o_row(c));
    if x.min(o) < j && j <= x.max(o) {
        if x > o {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Lifted generators with one point on each lifted beta and alpha circle, by
/// assigning rows to the `n m` lifted beta circles one at a time and backing out
/// when an alpha lift is hit twice. Sorted.
pub fn brute_force_generators(grid: &GridDiagram, m: usize) -> Vec<Vec<u8>> {
    fn extend(grid: &GridDiagram, m: usize, rows: &mut Vec<u8>, hit: &mut [bool], out: &mut Vec<Vec<u8>>) {
        let n = grid.size();
        let s = rows.len();
        if s == n * m {
            out.push(rows.clone());
            return;
        }
        let (i, k) = (s / m, s % m);
        for j in 0..n {
            let l = (k as i64 - winding_by_rows(grid, i, j) as i64).rem_euclid(m as i64) as usize;
            if !hit[j * m + l] {
                hit[j * m + l] = true;
                rows.push(j as u8);
                extend(grid, m, rows, hit, out);
                rows.pop();
                hit[j * m + l] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(grid, m, &mut Vec::new(), &mut vec![false; grid.size() * m], &mut out);
    out
}

/// Targets of the differential of a lifted generator, by walking every candidate
/// rectangle sheet by sheet. `rows[i * m + k]` is the row of the point on `beta_i^k`.
pub fn naive_lifted_differential(grid: &GridDiagram, m: usize, rows: &[u8]) -> Vec<Vec<u8>> {
    let n = grid.size();
    let mut targets: Vec<Vec<u8>> = Vec::new();
    for i1 in 0..n {
        for k1 in 0..m {
            let j1 = rows[i1 * m + k1] as usize;
            let mut sheets = vec![k1];
            for width in 1..n {
                let prev = (i1 + width - 1) % n;
                let k = (*sheets.last().unwrap() as i64 + cut_crossing(grid, prev, j1)).rem_euclid(m as i64) as usize;
                sheets.push(k);
                let i2 = (i1 + width) % n;
                let j2 = rows[i2 * m + k] as usize;
                let height = (j2 + n - j1) % n;
                if height == 0 {
                    continue;
                }
                let in_rect = |c: usize, r: usize| (c + n - i1) % n < width && (r + n - j1) % n < height;
                let marked = (0..n).any(|c| in_rect(c, grid.x_row(c)) || in_rect(c, grid.o_row(c)));
                let blocked = (1..width).any(|t| {
                    let c = (i1 + t) % n;
                    let r = rows[c * m + sheets[t]] as usize;
                    let dr = (r + n - j1) % n;
                    dr > 0 && dr < height
                });
                if !marked && !blocked {
                    let mut y = rows.to_vec();
                    y[i1 * m + k1] = j2 as u8;
                    y[i2 * m + k] = j1 as u8;
                    targets.push(y);
                }
            }
        }
    }
    targets.sort();
    let mut odd = Vec::new();
    for run in targets.chunk_by(|a, b| a == b) {
        if run.len() % 2 == 1 {
            odd.push(run[0].clone());
        }
    }
    odd
}

/// Signed terms `(coefficient, [(variable, exponent)])` of a KnotInfo style
/// polynomial such as `2*m^(-1)*a^(-1)+ 5+ 2*m*a` or `1-3*t+ t^2`.
pub fn knotinfo_terms(text: &str) -> Vec<(i64, Vec<(char, i64)>)> {
    let flat: String = text.chars().filter(|c| !c.is_whitespace() && *c != '(' && *c != ')').collect();
    let mut pieces = Vec::new();
    let mut cur = String::new();
    for ch in flat.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
            pieces.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    pieces.push(cur);
    pieces
        .into_iter()
        .filter(|p| p != "+" && !p.is_empty())
        .map(|p| {
            let (sign, body) = match p.strip_prefix('-') {
                Some(rest) => (-1, rest.to_string()),
                None => (1, p.trim_start_matches('+').to_string()),
            };
            let mut coeff = 1;
            let mut vars = Vec::new();
            for factor in body.split('*') {
                if let Ok(c) = factor.parse::<i64>() {
                    coeff = c;
                } else {
                    let mut it = factor.splitn(2, '^');
                    let var = it.next().unwrap().chars().next().unwrap();
                    let exp = it.next().map_or(1, |e| e.parse().unwrap());
                    vars.push((var, exp));
                }
            }
            (sign * coeff, vars)
        })
        .collect()
}

/// A `# key value` header line of a corpus file.
pub fn header(name: &str, key: &str) -> Option<String> {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.grid"))).unwrap();
    let prefix = format!("# {key} ");
    text.lines().find_map(|l| l.strip_prefix(&prefix).map(|s| s.split("   (").next().unwrap().to_string()))
}

/// Alexander polynomial from the corpus header, as `(exponent, coefficient)` pairs.
pub fn header_alexander(name: &str) -> Option<Vec<(i64, i64)>> {
    let text = header(name, "alexander")?;
    Some(
        knotinfo_terms(&text)
            .into_iter()
            .map(|(c, vars)| (vars.iter().find(|v| v.0 == 't').map_or(0, |v| v.1), c))
            .collect(),
    )
}

/// Knot Floer homology from the corpus header, as `(maslov, alexander, rank)`.
pub fn header_hfk(name: &str) -> Option<Vec<(i64, i64, u64)>> {
    let text = header(name, "hfk")?;
    let mut out: Vec<(i64, i64, u64)> = knotinfo_terms(&text)
        .into_iter()
        .map(|(c, vars)| {
            let get = |v: char| vars.iter().find(|x| x.0 == v).map_or(0, |x| x.1);
            (get('m'), get('a'), c as u64)
        })
        .collect();
    out.sort();
    Some(out)
}
