//! Structured and tabular output of a run.

use std::fmt::Write as _;

use hfk_core::cover::{FiniteAbelian, SpinClass};
use hfk_core::homology::h1_order_check;
use hfk_core::pipeline::{ClassOrigin, MaslovMode};
use hfk_core::{GridDiagram, PoincarePolynomial, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::run::KnotRun;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub q: String,
    pub t: String,
    pub coeff: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaslovModeTag {
    Absolute,
    Relative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub label: Vec<u64>,
    pub display: String,
    pub polynomial: Vec<Term>,
    pub maslov_mode: MaslovModeTag,
    /// `false` when the class was copied from its conjugate.
    pub computed: bool,
    pub total_rank: u64,
    /// Values of `maslov - alexander` that carry rank.
    pub diagonals: Vec<String>,
    /// Supported on a single diagonal.
    pub perfect: bool,
    /// Terms off the diagonal of the top Alexander grading.
    pub off_diagonal: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub genus: i64,
    pub alexander: String,
    pub determinant: i64,
    pub h1_order_matches: bool,
    pub spin_split: bool,
    /// `none`, `top` or `bottom`.
    pub truncation: String,
    pub normalization: Option<String>,
    pub mirror_check: Option<bool>,
    /// Classes with no homology at all.
    pub empty_classes: Vec<Vec<u64>>,
    pub all_perfect: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeStats {
    pub generators: u64,
    pub blocks: usize,
    pub largest_block: usize,
    pub edges: u64,
    pub spilled: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub enumerate_s: f64,
    pub homology_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotReport {
    pub name: Option<String>,
    pub grid_hash: String,
    pub n: usize,
    pub m: usize,
    pub h1: Vec<u64>,
    pub classes: Vec<ClassReport>,
    pub diagnostics: Diagnostics,
    pub stats: SizeStats,
    pub timings: Timings,
}

pub fn grid_hash(grid: &GridDiagram) -> String {
    hex::encode(Sha256::digest(grid.to_text().as_bytes()))
}

fn rational(r: Rational) -> String {
    r.to_string()
}

fn term(q: Rational, t: Rational, coeff: u64) -> Term {
    Term { q: rational(q), t: rational(t), coeff }
}

pub fn terms(p: &PoincarePolynomial) -> Vec<Term> {
    p.terms().map(|(q, t, c)| term(q, t, c)).collect()
}

/// Parses terms back into a polynomial.
pub fn polynomial(terms: &[Term]) -> Option<PoincarePolynomial> {
    let parse = |s: &str| -> Option<Rational> {
        match s.split_once('/') {
            Some((a, b)) => Some(Rational::new(a.parse().ok()?, b.parse().ok()?)),
            None => Some(Rational::from_integer(s.parse().ok()?)),
        }
    };
    let mut p = PoincarePolynomial::new();
    for t in terms {
        p.add(parse(&t.q)?, parse(&t.t)?, t.coeff);
    }
    Some(p)
}

fn off_diagonal(p: &PoincarePolynomial) -> Vec<Term> {
    let Some(top) = p.max_alexander() else { return Vec::new() };
    let main = p.maslov_levels_at(top).into_iter().max().map(|q| q - top);
    p.terms().filter(|&(q, t, _)| Some(q - t) != main).map(|(q, t, c)| term(q, t, c)).collect()
}

/// Zero first, then each class followed by its negative.
pub fn layout_order(group: &FiniteAbelian) -> Vec<SpinClass> {
    let mut out = Vec::new();
    let mut seen = vec![false; group.order() as usize];
    for c in group.elements() {
        let idx = group.index(&c);
        if seen[idx] {
            continue;
        }
        let neg = group.neg(&c);
        seen[idx] = true;
        out.push(c);
        let nidx = group.index(&neg);
        if !seen[nidx] {
            seen[nidx] = true;
            out.push(neg);
        }
    }
    out
}

impl KnotReport {
    pub fn from_run(run: &KnotRun, name: Option<String>) -> Self {
        let comp = &run.comp;
        let mode = match run.normalization.mode {
            MaslovMode::Absolute => MaslovModeTag::Absolute,
            MaslovMode::Relative => MaslovModeTag::Relative,
        };
        let classes: Vec<ClassReport> = layout_order(&comp.group)
            .into_iter()
            .map(|label| {
                let p = run.class(&label).cloned().unwrap_or_default();
                let origin = comp.class(&label).map_or(ClassOrigin::Computed, |c| c.origin);
                let diagonals = p.diagonals();
                ClassReport {
                    display: p.to_string(),
                    polynomial: terms(&p),
                    maslov_mode: mode.clone(),
                    computed: origin == ClassOrigin::Computed,
                    total_rank: p.total_rank(),
                    perfect: diagonals.len() <= 1,
                    diagonals: diagonals.into_iter().map(rational).collect(),
                    off_diagonal: off_diagonal(&p),
                    label,
                }
            })
            .collect();
        let ds = &run.downstairs;
        let h1_order_matches = !comp.options.split_spin || h1_order_check(&ds.alexander, run.m, &comp.group);
        let diagnostics = Diagnostics {
            genus: ds.genus,
            alexander: ds.alexander.to_string(),
            determinant: ds.alexander.determinant(),
            h1_order_matches,
            spin_split: comp.options.split_spin,
            truncation: format!("{:?}", comp.options.truncation).to_lowercase(),
            normalization: run.normalization.reason.clone(),
            mirror_check: comp.mirror_check,
            empty_classes: classes.iter().filter(|c| c.total_rank == 0).map(|c| c.label.clone()).collect(),
            all_perfect: classes.iter().all(|c| c.perfect),
        };
        KnotReport {
            name,
            grid_hash: grid_hash(&run.grid),
            n: comp.n,
            m: run.m,
            h1: comp.group.factors.clone(),
            classes,
            diagnostics,
            stats: SizeStats {
                generators: comp.stats.generators,
                blocks: comp.stats.blocks,
                largest_block: comp.stats.largest_block,
                edges: comp.stats.edges,
                spilled: comp.stats.spilled,
            },
            timings: Timings {
                enumerate_s: comp.stats.seconds_enumerate,
                homology_s: comp.stats.seconds_homology,
                total_s: run.seconds,
            },
        }
    }

    /// The report with timings zeroed, which is reproducible byte for byte.
    pub fn without_timings(&self) -> Self {
        KnotReport { timings: Timings { enumerate_s: 0.0, homology_s: 0.0, total_s: 0.0 }, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn class_polynomials(&self) -> std::collections::BTreeMap<Vec<u64>, PoincarePolynomial> {
        self.classes
            .iter()
            .map(|c| (c.label.clone(), polynomial(&c.polynomial).expect("report terms are well formed")))
            .collect()
    }

    /// Table with one line per class, conjugate pairs merged when their polynomials agree.
    pub fn render_table(&self) -> String {
        let group = FiniteAbelian { factors: self.h1.clone() };
        let mut out = String::new();
        let name = self.name.as_deref().unwrap_or("knot");
        let _ = writeln!(out, "{name}  n = {}  m = {}  H1 = {}", self.n, self.m, group_name(&self.h1));
        if self.classes.first().is_some_and(|c| c.maslov_mode == MaslovModeTag::Relative) {
            let _ = writeln!(out, "Maslov gradings are relative");
        }
        let mut i = 0;
        while i < self.classes.len() {
            let c = &self.classes[i];
            let next = self.classes.get(i + 1);
            let paired = next.is_some_and(|d| d.label == group.neg(&c.label) && d.label != c.label && d.display == c.display);
            let label = label_text(&c.label);
            let label = if paired { format!("±{label}") } else { label };
            let _ = writeln!(out, "  {label:<10} {}", c.display);
            i += if paired { 2 } else { 1 };
        }
        out
    }
}

pub fn group_name(factors: &[u64]) -> String {
    if factors.is_empty() {
        "0".into()
    } else {
        factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
    }
}

pub fn label_text(label: &[u64]) -> String {
    match label {
        [] => "0".into(),
        [x] => x.to_string(),
        xs => format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
    }
}
