mod common;

use std::collections::BTreeMap;

use common::{all_corpus, corpus, header_hfk, knot_grid, naive_rectangles, permutations};
use hfk_core::pipeline::{compute, downstairs, normalization, ComputeOptions, Truncation};
use hfk_core::{GridDiagram, PoincarePolynomial, Rational};
use proptest::prelude::*;

/// Twice `M_P(x)`, where marks sit at cell centers: `M_P(x) = J(x - P, x - P) + 1`.
fn twice_maslov(x: &[usize], marks: &[usize]) -> i64 {
    let n = x.len() as i64;
    let gens: Vec<(i64, i64)> = x.iter().enumerate().map(|(c, &r)| (2 * c as i64, 2 * r as i64)).collect();
    let pts: Vec<(i64, i64)> = marks.iter().enumerate().map(|(c, &r)| (2 * c as i64 + 1, 2 * r as i64 + 1)).collect();
    let below = |a: &[(i64, i64)], b: &[(i64, i64)]| -> i64 {
        a.iter().map(|p| b.iter().filter(|q| p.0 < q.0 && p.1 < q.1).count() as i64).sum()
    };
    let j = |a: &[(i64, i64)], b: &[(i64, i64)]| below(a, b) + below(b, a);
    let _ = n;
    j(&gens, &gens) - 2 * j(&gens, &pts) + j(&pts, &pts) + 2
}

fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let words = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for bit in 0..words * 64 {
        let (w, b) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in rank + 1..rows.len() {
            if rows[r][w] & b != 0 {
                for (x, y) in rows[r].iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Homology of the tilde complex of a small grid by dense elimination, gradings
/// from mark counting and the differential from the naive rectangle count.
fn brute_force_tilde(grid: &GridDiagram) -> PoincarePolynomial {
    let n = grid.size();
    let perms = permutations(n);
    let x_marks: Vec<usize> = (0..n).map(|c| grid.x_row(c)).collect();
    let o_marks: Vec<usize> = (0..n).map(|c| grid.o_row(c)).collect();
    let grade = |p: &[usize]| {
        let mo = twice_maslov(p, &o_marks);
        let mx = twice_maslov(p, &x_marks);
        (mo / 2, (mo - mx) / 4 - (n as i64 - 1) / 2, (mo - mx) - 2 * (n as i64 - 1))
    };
    let mut by_grade: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    let mut grades = Vec::new();
    for (i, p) in perms.iter().enumerate() {
        let (m, _, a4) = grade(p);
        assert_eq!(a4 % 4, 0, "Alexander grading is an integer");
        by_grade.entry((m, a4 / 4)).or_default().push(i);
        grades.push((m, a4 / 4));
    }
    let index: BTreeMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    // d from (M, A) to (M - 1, A)
    let rank_d = |m: i64, a: i64| -> usize {
        let (Some(src), Some(dst)) = (by_grade.get(&(m, a)), by_grade.get(&(m - 1, a))) else { return 0 };
        let pos: BTreeMap<usize, usize> = dst.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let words = dst.len().div_ceil(64);
        let rows = src
            .iter()
            .map(|&i| {
                let x = &perms[i];
                let mut row = vec![0u64; words];
                for a in 0..n {
                    for b in a + 1..n {
                        let mut y = x.clone();
                        y.swap(a, b);
                        if naive_rectangles(grid, x, &y) % 2 == 1 {
                            let j = index[&y];
                            let k = *pos.get(&j).expect("rectangles preserve A and lower M by one");
                            row[k / 64] ^= 1 << (k % 64);
                        }
                    }
                }
                row
            })
            .collect();
        gf2_rank(rows)
    };
    let mut out = PoincarePolynomial::new();
    for (&(m, a), gens) in &by_grade {
        let rank = gens.len() - rank_d(m, a) - rank_d(m + 1, a);
        if rank > 0 {
            out.add(Rational::from_integer(m), Rational::from_integer(a), rank as u64);
        }
    }
    out
}

#[test]
fn downstairs_matches_brute_force_homology() {
    for name in ["unknot2", "trefoil", "3_1", "4_1", "5_2"] {
        let g = corpus(name);
        let ds = downstairs(&g).unwrap();
        let tilde = brute_force_tilde(&g);
        assert_eq!(ds.hfk.times_v(g.size() as u32 - 1), tilde, "{name}");
    }
}

fn as_triples(p: &PoincarePolynomial) -> Vec<(i64, i64, u64)> {
    let mut v: Vec<_> = p.terms().map(|(q, t, c)| (q.to_integer(), t.to_integer(), c)).collect();
    v.sort();
    v
}

#[test]
fn downstairs_matches_the_knotinfo_knot_floer_homology() {
    for (name, g) in all_corpus() {
        let Some(expected) = header_hfk(&name) else { continue };
        let ds = downstairs(&g).unwrap();
        assert_eq!(as_triples(&ds.hfk), expected, "{name}");
        assert!(ds.alexander.is_symmetric(), "{name}");
        assert_eq!(ds.alexander.value_at_one(), 1, "{name}");
    }
}

/// `sum (-1)^(M - f) rank` where `f` is the common fractional Maslov offset.
fn euler_at_one(p: &PoincarePolynomial) -> i64 {
    let f = p.common_maslov_fraction().expect("one fractional offset per class");
    p.terms().map(|(q, _, c)| if (q - f).to_integer() % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
}

fn full() -> ComputeOptions {
    ComputeOptions { truncation: Truncation::None, mirror_conjugates: false, ..ComputeOptions::default() }
}

#[test]
fn every_class_of_a_double_cover_has_unit_euler_characteristic() {
    for name in ["trefoil", "4_1", "5_2", "8_19"] {
        let g = corpus(name);
        let comp = compute(&g, 2, &ComputeOptions::for_grid(&g, 2)).unwrap();
        for c in &comp.classes {
            assert_eq!(euler_at_one(&c.hfk).abs(), 1, "{name} {:?}: {}", c.label, c.hfk);
        }
    }
}

#[test]
fn m_equals_one_is_the_downstairs_knot_up_to_shift() {
    for name in ["trefoil", "4_1", "5_2"] {
        let g = corpus(name);
        let comp = compute(&g, 1, &ComputeOptions::default()).unwrap();
        let ds = downstairs(&g).unwrap();
        let top = |p: &PoincarePolynomial| p.maslov_levels_at(p.max_alexander().unwrap())[0];
        let ours = &comp.canonical().hfk;
        assert_eq!(ours.shift_maslov(top(&ds.hfk) - top(ours)), ds.hfk, "{name}");
        assert!(comp.group.factors.is_empty());
    }
}

/// Canonical class with absolute gradings, and the sorted polynomials of the others.
fn normalized_summary(g: &GridDiagram, m: usize) -> (PoincarePolynomial, Vec<String>) {
    let comp = compute(g, m, &full()).unwrap();
    let genus = downstairs(g).unwrap().genus;
    let norm = normalization(&comp, genus);
    let mut rest: Vec<String> =
        comp.classes.iter().filter(|c| c.label.iter().any(|&x| x != 0)).map(|c| c.hfk.shift_maslov(norm.shift).to_string()).collect();
    rest.sort();
    (comp.canonical().hfk.shift_maslov(norm.shift), rest)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn results_are_invariant_under_translation(g in knot_grid(3..=5), dc in 0usize..5, dr in 0usize..5) {
        let n = g.size();
        let moved = g.translated(dc % n, dr % n);
        prop_assert_eq!(normalized_summary(&g, 2), normalized_summary(&moved, 2));
    }

    #[test]
    fn raw_homology_is_divisible_by_v(g in knot_grid(3..=5), m in 1usize..=3) {
        let comp = compute(&g, m, &full()).unwrap();
        for c in &comp.classes {
            prop_assert_eq!(&c.hfk.times_v(g.size() as u32 - 1), &c.raw);
        }
    }

    #[test]
    fn conjugate_classes_are_related_by_conjugation(g in knot_grid(3..=5), m in 2usize..=3) {
        let comp = compute(&g, m, &full()).unwrap();
        for c in &comp.classes {
            let neg = comp.class(&comp.group.neg(&c.label)).unwrap();
            prop_assert_eq!(c.hfk.conjugate(), neg.hfk.clone(), "{:?}", c.label);
        }
    }

    #[test]
    fn double_covers_are_rational_homology_spheres(g in knot_grid(3..=6)) {
        let comp = compute(&g, 2, &ComputeOptions::for_grid(&g, 2)).unwrap();
        prop_assert_eq!(comp.group.order() % 2, 1);
        for c in &comp.classes {
            prop_assert_eq!(euler_at_one(&c.hfk).abs(), 1);
        }
    }
}
