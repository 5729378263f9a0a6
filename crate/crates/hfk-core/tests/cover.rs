mod common;

use common::{all_corpus, corpus, header_alexander};
use hfk_core::cover::{cut_basis_presentation, cut_basis_relators};
use hfk_core::linalg::solve_minimal_multiple;
use hfk_core::{CwSurface, H1Presentation, LiftedDiagram, SmallIntMatrix};

#[test]
fn cut_walks_agree_with_the_sheet_map() {
    for (name, g) in all_corpus() {
        for m in 1..=3 {
            assert_eq!(LiftedDiagram::new(&g, m).sheet_walk_mismatch(), None, "{name}, m = {m}");
        }
    }
}

#[test]
fn lifted_surface_has_the_branched_cover_genus() {
    for (name, g) in all_corpus() {
        let n = g.size() as i64;
        for m in 1..=3i64 {
            let s = CwSurface::new(&LiftedDiagram::new(&g, m as usize));
            let h = m + (m - 1) * (n - 1);
            assert_eq!(s.euler_characteristic(), 2 - 2 * h, "{name}, m = {m}");
            assert_eq!(s.expected_genus(), h);
            assert!(s.boundaries_closed(), "{name}, m = {m}");
            assert_eq!(s.num_vertices() as i64, n * n * m);
        }
    }
}

fn h1_order(name: &str, m: usize) -> u64 {
    let lift = LiftedDiagram::new(&corpus(name), m);
    H1Presentation::new(&CwSurface::new(&lift)).group.order()
}

/// `|prod_k Delta(zeta^k)|` over the nontrivial m-th roots of unity, in floating point.
fn cyclic_resultant(delta: &[(i64, i64)], m: usize) -> f64 {
    (1..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let (re, im) = delta.iter().fold((0.0, 0.0), |(re, im), &(e, c)| {
                let a = theta * e as f64;
                (re + c as f64 * a.cos(), im + c as f64 * a.sin())
            });
            (re * re + im * im).sqrt()
        })
        .product()
}

#[test]
fn h1_order_is_the_cyclic_resultant_of_the_knotinfo_alexander_polynomial() {
    for (name, g) in all_corpus() {
        let Some(delta) = header_alexander(&name) else { continue };
        for m in [2, 3] {
            if g.size() * m > 24 {
                continue;
            }
            let expected = cyclic_resultant(&delta, m).round() as u64;
            assert_eq!(h1_order(&name, m), expected, "{name}, m = {m}");
            if m == 2 {
                assert_eq!(expected % 2, 1, "{name}: determinant is odd");
            }
        }
    }
}

#[test]
fn cut_basis_presentation_agrees_with_the_cell_complex() {
    for (name, g) in all_corpus() {
        let cw = H1Presentation::new(&CwSurface::new(&LiftedDiagram::new(&g, 2))).group;
        assert_eq!(cut_basis_presentation(&g), cw, "{name}");
    }
}

/// Whether every row of `a` is an integer combination of the rows of `b`.
fn rows_in_span(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let cols = b[0].len();
    let bt = SmallIntMatrix::from_rows((0..cols).map(|c| b.iter().map(|r| r[c]).collect()).collect(), b.len());
    a.iter().all(|r| matches!(solve_minimal_multiple(&bt, r), Some((k, _)) if k == 1))
}

#[test]
fn trefoil_relators_generate_the_expected_lattice() {
    let g = corpus("trefoil");
    let ours = cut_basis_relators(&g);
    let expected: Vec<Vec<i64>> = vec![vec![1, 0, 0, -1], vec![1, 0, -1, 1], vec![1, -1, 1, 0], vec![0, 1, 0, 0]];
    assert!(rows_in_span(&ours, &expected) && rows_in_span(&expected, &ours), "{ours:?}");
    assert_eq!(cut_basis_presentation(&g).factors, vec![3]);
    assert_eq!(h1_order("trefoil", 2), 3);
}

#[test]
fn unknot_cover_is_a_sphere() {
    for m in 1..=4 {
        assert_eq!(h1_order("unknot2", m), 1);
    }
}
