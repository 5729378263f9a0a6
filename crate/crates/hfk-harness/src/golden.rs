//! Reference per-class Poincaré polynomials of the lifted knot in the double
//! branched cover, and comparison of computed reports against them.

use std::collections::BTreeMap;

use hfk_core::{FiniteAbelian, PoincarePolynomial};
use serde::Serialize;

/// One knot's table: the canonical class followed by one entry per conjugate pair.
#[derive(Clone, Copy, Debug)]
pub struct GoldenRow {
    pub knot: &'static str,
    pub h1: &'static [u64],
    pub canonical: &'static str,
    /// `(label, polynomial)`; each label stands for itself and its negative.
    pub pairs: &'static [(&'static [u64], &'static str)],
}

macro_rules! shifted {
    ($e:literal, $body:literal) => {
        concat!("q^{", $e, "}(", $body, ")")
    };
}

pub const GOLDEN: &[GoldenRow] = &[
    GoldenRow {
        knot: "8_19",
        h1: &[3],
        canonical: "q^{-3}t^{-3} + q^{-2}t^{-2} + q + q^2t^2 + q^3t^3",
        pairs: &[(&[1], shifted!("2/3", "q^{-1}t^{-1} + 1 + qt"))],
    },
    GoldenRow {
        knot: "8_20",
        h1: &[9],
        canonical: "q^{-2}t^{-2} + 2q^{-1}t^{-1} + 3 + 2qt + q^2t^2",
        pairs: &[
            (&[1], shifted!("7/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[2], shifted!("1/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[3], "1"),
            (&[4], "q^{4/9}"),
        ],
    },
    GoldenRow {
        knot: "8_21",
        h1: &[15],
        canonical: "q^{-2}t^{-2} + 4q^{-1}t^{-1} + 5 + 4qt + q^2t^2",
        pairs: &[
            (&[1], shifted!("-2/15", "q^{-1}t^{-1} + 1 + qt")),
            (&[2], "q^{7/15}"),
            (&[3], shifted!("-1/5", "q^{-1}t^{-1} + 3 + qt")),
            (&[4], shifted!("-2/15", "q^{-1}t^{-1} + 1 + qt")),
            (&[5], "q^{-1/3}"),
            (&[6], "q^{1/5}"),
            (&[7], "q^{7/15}"),
        ],
    },
    GoldenRow {
        knot: "9_42",
        h1: &[7],
        canonical: "q^{-2}t^{-2} + 2q^{-1}t^{-1} + 2 + q + 2qt + q^2t^2",
        pairs: &[
            (&[1], "q^{3/7}"),
            (&[2], shifted!("5/7", "q^{-1}t^{-1} + 3 + qt")),
            (&[3], shifted!("6/7", "q^{-1}t^{-1} + 1 + qt")),
        ],
    },
    GoldenRow {
        knot: "9_43",
        h1: &[13],
        canonical: "q^{-3}t^{-3} + 3q^{-2}t^{-2} + 2q^{-1}t^{-1} + 1 + 2qt + 3q^2t^2 + q^3t^3",
        pairs: &[
            (&[1], shifted!("10/13", "q^{-1}t^{-1} + 3 + qt")),
            (&[2], shifted!("1/13", "q^{-1}t^{-1} + 1 + qt")),
            (&[3], "q^{12/13}"),
            (&[4], shifted!("4/13", "q^{-2}t^{-2} + q^{-1}t^{-1} + 1 + qt + q^2t^2")),
            (&[5], "q^{16/13}"),
            (&[6], shifted!("9/13", "q^{-1}t^{-1} + 1 + qt")),
        ],
    },
    GoldenRow {
        knot: "9_44",
        h1: &[17],
        canonical: "q^{-2}t^{-2} + 4q^{-1}t^{-1} + 7 + 4qt + q^2t^2",
        pairs: &[
            (&[1], "q^{-8/17}"),
            (&[2], shifted!("-15/17", "q^{-1}t^{-1} + 1 + qt")),
            (&[3], "q^{-4/17}"),
            (&[4], "q^{8/17}"),
            (&[5], "q^{4/17}"),
            (&[6], "q^{-16/17}"),
            (&[7], shifted!("-1/17", "q^{-1}t^{-1} + 1 + qt")),
            (&[8], shifted!("-2/17", "q^{-1}t^{-1} + 3 + qt")),
        ],
    },
    GoldenRow {
        knot: "9_45",
        h1: &[23],
        canonical: "q^{-2}t^{-2} + 6q^{-1}t^{-1} + 9 + 6qt + q^2t^2",
        pairs: &[
            (&[1], shifted!("-8/23", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[2], "q^{-9/23}"),
            (&[3], shifted!("-3/23", "q^{-1}t^{-1} + 3 + qt")),
            (&[4], "q^{-13/23}"),
            (&[5], "q^{7/23}"),
            (&[6], "q^{11/23}"),
            (&[7], "q^{-1/23}"),
            (&[8], shifted!("-6/23", "q^{-1}t^{-1} + 1 + qt")),
            (&[9], shifted!("-4/23", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[10], shifted!("-18/23", "q^{-1}t^{-1} + 1 + qt")),
            (&[11], shifted!("-2/23", "q^{-1}t^{-1} + 1 + qt")),
        ],
    },
    GoldenRow {
        knot: "9_46",
        h1: &[3, 3],
        canonical: "2q^{-1}t^{-1} + 5 + 2qt",
        pairs: &[
            (&[0, 1], shifted!("-2/3", "q^{-1}t^{-1} + 3 + qt")),
            (&[1, 0], "1"),
            (&[1, 1], "1"),
            (&[1, 2], "q^{-4/3}"),
        ],
    },
    GoldenRow {
        knot: "9_47",
        h1: &[3, 9],
        canonical: "q^{-3}t^{-3} + 4q^{-2}t^{-2} + 6q^{-1}t^{-1} + 5 + 6qt + 4q^2t^2 + q^3t^3",
        pairs: &[
            (&[0, 1], shifted!("-1/9", "q^{-1}t^{-1} + 3 + qt")),
            (&[0, 2], shifted!("-4/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[0, 3], "q^{-1}t^{-1} + 1 + qt"),
            (&[0, 4], "q^{-7/9}"),
            (&[1, 0], "q^{-1/3}"),
            (&[1, 1], shifted!("-1/9", "q^{-1}t^{-1} + 3 + qt")),
            (&[1, 2], shifted!("-1/9", "q^{-1}t^{-1} + 3 + qt")),
            (&[1, 3], "q^{-1/3}"),
            (&[1, 4], "q^{-7/9}"),
            (&[1, 5], shifted!("-4/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[1, 6], "q^{-1/3}"),
            (&[1, 7], shifted!("-4/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[1, 8], "q^{-7/9}"),
        ],
    },
    GoldenRow {
        knot: "9_48",
        h1: &[3, 9],
        canonical: "q^{-2}t^{-2} + 7q^{-1}t^{-1} + 11 + 7qt + q^2t^2",
        pairs: &[
            (&[0, 1], shifted!("-4/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[0, 2], shifted!("2/9", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[0, 3], "q^{-1}t^{-1} + 1 + qt"),
            (&[0, 4], "q^{-1/9}"),
            (&[1, 0], "q^{1/3}"),
            (&[1, 1], shifted!("2/9", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[1, 2], shifted!("2/9", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[1, 3], "q^{1/3}"),
            (&[1, 4], shifted!("-4/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[1, 5], "q^{-1/9}"),
            (&[1, 6], "q^{1/3}"),
            (&[1, 7], "q^{-1/9}"),
            (&[1, 8], shifted!("-4/9", "q^{-1}t^{-1} + 1 + qt")),
        ],
    },
    GoldenRow {
        knot: "9_49",
        h1: &[5, 5],
        canonical: "3q^{-2}t^{-2} + 6q^{-1}t^{-1} + 7 + 6qt + 3q^2t^2",
        pairs: &[
            (&[0, 1], shifted!("-2/5", "q^{-2}t^{-2} + q^{-1}t^{-1} + 1 + qt + q^2t^2")),
            (&[0, 2], "q^{2/5}"),
            (&[1, 0], shifted!("-2/5", "q^{-2}t^{-2} + q^{-1}t^{-1} + 1 + qt + q^2t^2")),
            (&[1, 1], shifted!("-1/5", "q^{-1}t^{-1} + 1 + qt")),
            (&[1, 2], shifted!("1/5", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[1, 3], shifted!("1/5", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[1, 4], shifted!("-2/5", "q^{-2}t^{-2} + q^{-1}t^{-1} + 1 + qt + q^2t^2")),
            (&[2, 0], "q^{2/5}"),
            (&[2, 1], shifted!("1/5", "2q^{-1}t^{-1} + 3 + 2qt")),
            (&[2, 2], shifted!("-1/5", "q^{-1}t^{-1} + 1 + qt")),
            (&[2, 3], "q^{2/5}"),
            (&[2, 4], shifted!("-1/5", "q^{-1}t^{-1} + 1 + qt")),
        ],
    },
    GoldenRow {
        knot: "10_124",
        h1: &[],
        canonical: "q^{-4}t^{-4} + q^{-3}t^{-3} + t^{-1} + q + q^2t + q^3t^3 + q^4t^4",
        pairs: &[],
    },
    GoldenRow {
        knot: "10_139",
        h1: &[3],
        canonical: "q^{-4}t^{-4} + q^{-3}t^{-3} + 2qt^{-1} + 3q + 2q^3t + q^3t^3 + q^4t^4",
        pairs: &[(&[1], shifted!("5/3", "q^{-2}t^{-2} + q^{-1}t^{-1} + 1 + qt + q^2t^2"))],
    },
    GoldenRow {
        knot: "10_140",
        h1: &[9],
        canonical: "q^{-2}t^{-2} + 2q^{-1}t^{-1} + 3 + 2qt + q^2t^2",
        pairs: &[
            (&[1], shifted!("11/9", "q^{-1}t^{-1} + 1 + qt")),
            (&[2], "q^{8/9}"),
            (&[3], "1"),
            (&[4], shifted!("5/9", "q^{-1}t^{-1} + 1 + qt")),
        ],
    },
];

pub fn lookup(knot: &str) -> Option<&'static GoldenRow> {
    GOLDEN.iter().find(|r| r.knot == knot)
}

/// All labels and their polynomials, both members of every pair included.
pub fn expected_classes(row: &GoldenRow) -> BTreeMap<Vec<u64>, PoincarePolynomial> {
    let group = FiniteAbelian { factors: row.h1.to_vec() };
    let parse = |s: &str| s.parse::<PoincarePolynomial>().expect("golden polynomials parse");
    let mut out = BTreeMap::new();
    out.insert(group.zero(), parse(row.canonical));
    for &(label, poly) in row.pairs {
        let p = parse(poly);
        out.insert(group.neg(label), p.clone());
        out.insert(label.to_vec(), p);
    }
    out
}

/// Every automorphism of the group, as the images of the standard generators.
pub fn automorphisms(group: &FiniteAbelian) -> Vec<Vec<Vec<u64>>> {
    let r = group.factors.len();
    let order = group.order() as usize;
    let candidates: Vec<Vec<Vec<u64>>> = group
        .factors
        .iter()
        .map(|&d| group.elements().filter(|e| d % group.element_order(e) == 0).collect())
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; r];
    loop {
        let images: Vec<Vec<u64>> = (0..r).map(|i| candidates[i][choice[i]].clone()).collect();
        let mut seen = vec![false; order];
        let bijective = group.elements().all(|e| {
            let idx = group.index(&apply(group, &images, &e));
            !std::mem::replace(&mut seen[idx], true)
        });
        if bijective {
            out.push(images);
        }
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Image of `e` under the homomorphism sending generator `i` to `images[i]`.
pub fn apply(group: &FiniteAbelian, images: &[Vec<u64>], e: &[u64]) -> Vec<u64> {
    let mut acc = group.zero();
    for (img, &c) in images.iter().zip(e) {
        for _ in 0..c {
            acc = group.add(&acc, img);
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassMismatch {
    pub label: Vec<u64>,
    pub expected: String,
    pub computed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenMatch {
    pub knot: String,
    pub h1_matches: bool,
    pub canonical_matches: bool,
    /// An automorphism carrying the reference labels onto the computed ones, if any.
    pub automorphism: Option<Vec<Vec<u64>>>,
    /// Whether the non-canonical polynomials agree as multisets.
    pub multiset_matches: bool,
    /// Disagreements under the best automorphism found.
    pub mismatches: Vec<ClassMismatch>,
}

impl GoldenMatch {
    pub fn passed(&self) -> bool {
        self.h1_matches && self.canonical_matches && self.automorphism.is_some()
    }
}

fn sorted_multiset<'a>(polys: impl Iterator<Item = &'a PoincarePolynomial>) -> Vec<String> {
    let mut v: Vec<String> = polys.map(|p| p.to_string()).collect();
    v.sort();
    v
}

/// Compares computed per-class polynomials (absolute gradings) with the reference row.
pub fn compare(row: &GoldenRow, h1: &[u64], computed: &BTreeMap<Vec<u64>, PoincarePolynomial>) -> GoldenMatch {
    let group = FiniteAbelian { factors: row.h1.to_vec() };
    let expected = expected_classes(row);
    let mut result = GoldenMatch {
        knot: row.knot.to_string(),
        h1_matches: h1 == row.h1,
        canonical_matches: false,
        automorphism: None,
        multiset_matches: false,
        mismatches: Vec::new(),
    };
    if !result.h1_matches {
        return result;
    }
    let zero = group.zero();
    let empty = PoincarePolynomial::new();
    let get = |label: &Vec<u64>| computed.get(label).unwrap_or(&empty);
    result.canonical_matches = get(&zero) == &expected[&zero];
    let others = |m: &BTreeMap<Vec<u64>, PoincarePolynomial>| {
        sorted_multiset(m.iter().filter(|(l, _)| **l != zero).map(|(_, p)| p))
    };
    result.multiset_matches = others(&expected) == others(computed);

    let mut best: Option<(usize, Vec<ClassMismatch>)> = None;
    for images in automorphisms(&group) {
        let bad: Vec<ClassMismatch> = expected
            .iter()
            .filter_map(|(label, p)| {
                let image = apply(&group, &images, label);
                let got = get(&image);
                (got != p).then(|| ClassMismatch {
                    label: image,
                    expected: p.to_string(),
                    computed: got.to_string(),
                })
            })
            .collect();
        if bad.is_empty() {
            result.automorphism = Some(images);
            result.mismatches.clear();
            return result;
        }
        if best.as_ref().map_or(true, |(n, _)| bad.len() < *n) {
            best = Some((bad.len(), bad));
        }
    }
    result.mismatches = best.map(|(_, b)| b).unwrap_or_default();
    result
}
