//! End-to-end computation of the homology of the lifted knot, class by class.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use log::{debug, info};

use num_traits::Zero;
use thiserror::Error;

use crate::complex::{AlexanderWindow, ComplexEngine};
use crate::cover::{FiniteAbelian, LiftedDiagram, SpinClass};
use crate::grading::{downstairs_maslov, GradingError, GradingModel};
use crate::grid::GridDiagram;
use crate::homology::{block_homology, BlockError};
use crate::poly::{AlexanderPolynomial, PoincarePolynomial, PolyError};
use crate::store::BucketStore;
use crate::Rational;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error("class {label:?}: {source}")]
    Division { label: SpinClass, source: PolyError },
    #[error("{0}")]
    Unsupported(String),
    #[error("spill storage: {0}")]
    Io(#[from] std::io::Error),
}

/// Part of the Alexander range that is enumerated; the rest follows from the
/// conjugation symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    None,
    /// Gradings `A >= 0`.
    Top,
    /// Gradings `A <= 1 - n`, which determine the homology on `A <= 0`.
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputeOptions {
    pub truncation: Truncation,
    /// For m = 2, compute one class of each conjugate pair and mirror the other.
    pub mirror_conjugates: bool,
    pub check_d_squared: bool,
    pub split_spin: bool,
    /// Generators held in memory while enumerating; beyond this, buckets are spilled to disk.
    pub memory_budget: usize,
    /// Parent directory for spill files; the system temporary directory when unset.
    pub spill_dir: Option<PathBuf>,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        ComputeOptions {
            truncation: Truncation::None,
            mirror_conjugates: false,
            check_d_squared: true,
            split_spin: true,
            memory_budget: 1 << 24,
            spill_dir: None,
        }
    }
}

impl ComputeOptions {
    /// Full complex for small grids; symmetry reductions once the complex gets large.
    pub fn auto(n: usize, m: usize) -> Self {
        let large = m >= 2 && n * m >= 12;
        let truncation = if large { Truncation::Top } else { Truncation::None };
        ComputeOptions { truncation, mirror_conjugates: large && m == 2, ..Default::default() }
    }

    /// As [`ComputeOptions::auto`], truncating on whichever side has fewer generators.
    pub fn for_grid(grid: &GridDiagram, m: usize) -> Self {
        let mut options = Self::auto(grid.size(), m);
        if options.truncation != Truncation::None {
            let (top, bottom) = truncation_estimates(grid, m);
            if bottom < top {
                options.truncation = Truncation::Bottom;
            }
        }
        options
    }

    /// Scaled Alexander keys enumerated under this truncation.
    pub fn window(&self, n: usize, m: usize) -> AlexanderWindow {
        match self.truncation {
            Truncation::None => AlexanderWindow::default(),
            Truncation::Top => AlexanderWindow { min: Some(0), max: None },
            Truncation::Bottom => AlexanderWindow { min: None, max: Some(-8 * (m * (n - 1)) as i64) },
        }
    }
}

/// Downstairs generator counts by Alexander grading.
pub fn alexander_histogram(grid: &GridDiagram) -> BTreeMap<i64, u64> {
    let engine = ComplexEngine::new(&LiftedDiagram::new(grid, 1));
    let mut hist = BTreeMap::new();
    engine.enumerate(AlexanderWindow::default(), |_, sum| {
        *hist.entry(engine.alexander_key_from_sum(sum) / 8).or_insert(0u64) += 1;
    });
    hist
}

/// Estimated generator counts of the two truncations, `(top, bottom)`: the number
/// of m-tuples of downstairs generators whose average grading lies in the window.
pub fn truncation_estimates(grid: &GridDiagram, m: usize) -> (f64, f64) {
    let hist = alexander_histogram(grid);
    let mut acc: BTreeMap<i64, f64> = [(0, 1.0)].into_iter().collect();
    for _ in 0..m {
        let mut next = BTreeMap::new();
        for (&a, &x) in &acc {
            for (&b, &y) in &hist {
                *next.entry(a + b).or_insert(0.0) += x * y as f64;
            }
        }
        acc = next;
    }
    let bottom = -((m * (grid.size() - 1)) as i64);
    (acc.range(0..).map(|(_, v)| v).sum(), acc.range(..=bottom).map(|(_, v)| v).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassOrigin {
    Computed,
    /// Copied from the conjugate class via the deck involution.
    Mirrored,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassResult {
    pub label: SpinClass,
    pub origin: ClassOrigin,
    /// Homology before removing the `V` factors, on the computed Alexander range.
    pub raw: PoincarePolynomial,
    pub hfk: PoincarePolynomial,
    pub generators: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    pub generators: u64,
    pub blocks: usize,
    pub largest_block: usize,
    pub edges: u64,
    pub spilled: u64,
    pub seconds_enumerate: f64,
    pub seconds_homology: f64,
}

#[derive(Clone, Debug)]
pub struct Computation {
    pub n: usize,
    pub m: usize,
    pub group: FiniteAbelian,
    /// Sorted by label.
    pub classes: Vec<ClassResult>,
    pub options: ComputeOptions,
    /// Whether a directly computed conjugate class agreed with its mirror image.
    pub mirror_check: Option<bool>,
    /// Grading denominator of the model.
    pub denom: i64,
    pub stats: Stats,
}

impl Computation {
    pub fn class(&self, label: &[u64]) -> Option<&ClassResult> {
        self.classes.iter().find(|c| c.label == label)
    }

    pub fn canonical(&self) -> &ClassResult {
        let zero = self.group.zero();
        self.class(&zero).expect("canonical class is always computed")
    }
}

fn lexicographic_rep(group: &FiniteAbelian, c: &SpinClass) -> bool {
    let neg = group.neg(c);
    *c <= neg
}

/// Computes the per-class homology of the lifted knot with gradings relative to
/// the lift of the identity permutation.
pub fn compute(grid: &GridDiagram, m: usize, options: &ComputeOptions) -> Result<Computation, PipelineError> {
    compute_lifted(&LiftedDiagram::new(grid, m), options)
}

pub fn compute_lifted(lift: &LiftedDiagram, options: &ComputeOptions) -> Result<Computation, PipelineError> {
    let (n, m) = (lift.n(), lift.m);
    if options.mirror_conjugates && m != 2 {
        return Err(PipelineError::Unsupported("conjugate mirroring needs m = 2".into()));
    }
    if options.truncation != Truncation::None && !options.split_spin {
        return Err(PipelineError::Unsupported("truncation needs the spin^c splitting".into()));
    }
    let engine = ComplexEngine::new(lift);
    let model = GradingModel::new(&engine)?;
    let group = if options.split_spin { model.group().clone() } else { FiniteAbelian { factors: vec![] } };
    let order = group.order() as usize;

    let mut origin = vec![ClassOrigin::Computed; order];
    let mut self_check: Option<(usize, usize)> = None;
    if options.mirror_conjugates {
        for idx in 0..order {
            let c = group.element(idx);
            if !lexicographic_rep(&group, &c) {
                origin[idx] = ClassOrigin::Mirrored;
            }
        }
        // Compute one mirrored class directly as well, to test the mirroring.
        if let Some(idx) = (0..order).find(|&i| origin[i] == ClassOrigin::Mirrored) {
            let rep = group.index(&group.neg(&group.element(idx)));
            self_check = Some((idx, rep));
        }
    }
    let wanted: Vec<bool> = (0..order)
        .map(|i| origin[i] == ClassOrigin::Computed || self_check.is_some_and(|(c, _)| c == i))
        .collect();

    let window = options.window(n, m);

    let t0 = Instant::now();
    let mut store = BucketStore::new(options.memory_budget, options.spill_dir.clone());
    let mut per_class = vec![0u64; order];
    let mut total = 0u64;
    let mut io_error = None;
    engine.enumerate(window, |x, sum| {
        total += 1;
        let idx = if options.split_spin { model.spin_index(x) } else { 0 };
        if wanted[idx] && io_error.is_none() {
            per_class[idx] += 1;
            if let Err(e) = store.push((idx, engine.alexander_key_from_sum(sum)), x) {
                io_error = Some(e);
            }
        }
    });
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let seconds_enumerate = t0.elapsed().as_secs_f64();
    info!("enumerated {total} generators in {seconds_enumerate:.1}s, {} spilled", store.spilled());

    let t1 = Instant::now();
    let keys = store.keys();
    let mut raw: Vec<PoincarePolynomial> = vec![PoincarePolynomial::new(); order];
    let mut stats = Stats {
        generators: total,
        blocks: keys.len(),
        spilled: store.spilled(),
        seconds_enumerate,
        ..Stats::default()
    };
    for key in keys {
        let tb = Instant::now();
        let gens = store.take(key)?;
        let gradings: Vec<i64> = gens.iter().map(|&x| model.grading_scaled(x)).collect();
        let h = block_homology(&engine, &gens, &gradings, model.denom, options.check_d_squared)?;
        stats.largest_block = stats.largest_block.max(h.generators);
        stats.edges += h.edges as u64;
        let a = engine.key_to_alexander(key.1);
        debug!("class {} A = {a}: {} generators, {:.1}s", key.0, h.generators, tb.elapsed().as_secs_f64());
        for (&g, &rank) in &h.ranks {
            raw[key.0].add(Rational::new(g, model.denom), a, rank);
        }
    }
    stats.seconds_homology = t1.elapsed().as_secs_f64();

    let power = (n - 1) as u32;
    let zero = Rational::zero();
    let mut hfk: Vec<Option<PoincarePolynomial>> = vec![None; order];
    for idx in 0..order {
        if !wanted[idx] {
            continue;
        }
        let label = group.element(idx);
        let q = match options.truncation {
            Truncation::None => raw[idx].divide_v(power),
            Truncation::Top => raw[idx].divide_v_above(power, zero),
            Truncation::Bottom => raw[idx].divide_v_below(power, zero),
        }
        .map_err(|source| PipelineError::Division { label, source })?;
        hfk[idx] = Some(q);
    }

    let mirror_check = self_check.map(|(c, rep)| hfk[c] == hfk[rep]);
    for idx in 0..order {
        if origin[idx] == ClassOrigin::Mirrored {
            let rep = group.index(&group.neg(&group.element(idx)));
            hfk[idx] = hfk[rep].clone();
            raw[idx] = raw[rep].clone();
            per_class[idx] = per_class[rep];
        }
    }
    if options.truncation != Truncation::None {
        // The missing half of s is the conjugate of the computed half of -s.
        let half: Vec<PoincarePolynomial> = hfk.iter().map(|h| h.clone().unwrap()).collect();
        for idx in 0..order {
            let neg = group.index(&group.neg(&group.element(idx)));
            let other = match options.truncation {
                Truncation::Bottom => half[neg].restrict_alexander(|t| t < zero),
                _ => half[neg].restrict_alexander(|t| t > zero),
            };
            hfk[idx] = Some(half[idx].union(&other.conjugate()));
        }
    }

    let classes = (0..order)
        .map(|idx| ClassResult {
            label: group.element(idx),
            origin: origin[idx],
            raw: raw[idx].clone(),
            hfk: hfk[idx].clone().unwrap(),
            generators: per_class[idx],
        })
        .collect();
    Ok(Computation {
        n,
        m,
        group,
        classes,
        options: options.clone(),
        mirror_check,
        denom: model.denom,
        stats,
    })
}

/// Downstairs knot Floer homology with absolute gradings.
#[derive(Clone, Debug)]
pub struct Downstairs {
    pub hfk: PoincarePolynomial,
    pub genus: i64,
    pub alexander: AlexanderPolynomial,
}

pub fn downstairs(grid: &GridDiagram) -> Result<Downstairs, PipelineError> {
    let comp = compute(grid, 1, &ComputeOptions::default())?;
    Ok(downstairs_from(grid, &comp))
}

/// Absolute downstairs homology from an existing `m = 1` computation of `grid`.
pub fn downstairs_from(grid: &GridDiagram, comp: &Computation) -> Downstairs {
    assert_eq!(comp.m, 1, "downstairs data needs the m = 1 complex");
    let identity: Vec<usize> = (0..grid.size()).collect();
    let shift = Rational::from_integer(downstairs_maslov(&identity, grid));
    let hfk = comp.canonical().hfk.shift_maslov(shift);
    let genus = hfk.max_alexander().map_or(0, |a| a.to_integer());
    let chi = hfk.euler_characteristic().expect("downstairs gradings are integers");
    let coeffs: BTreeMap<i64, i64> = chi.into_iter().map(|(a, c)| (a.to_integer(), c)).collect();
    Downstairs { hfk, genus, alexander: AlexanderPolynomial::from_coefficients(coeffs) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaslovMode {
    Absolute,
    Relative,
}

/// Outcome of anchoring the canonical class at `A = g(K)`, `M = g(K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub mode: MaslovMode,
    pub shift: Rational,
    pub reason: Option<String>,
}

pub fn normalization(comp: &Computation, genus: i64) -> Normalization {
    let g = Rational::from_integer(genus);
    let levels = comp.canonical().hfk.maslov_levels_at(g);
    match levels.as_slice() {
        [level] => Normalization { mode: MaslovMode::Absolute, shift: g - level, reason: None },
        [] => Normalization {
            mode: MaslovMode::Relative,
            shift: Rational::zero(),
            reason: Some(format!("canonical class has no homology at Alexander grading {genus}")),
        },
        _ => Normalization {
            mode: MaslovMode::Relative,
            shift: Rational::zero(),
            reason: Some(format!("canonical class at Alexander grading {genus} spans several Maslov levels")),
        },
    }
}

/// Per-class polynomials with the normalization applied.
pub fn normalized_classes(comp: &Computation, norm: &Normalization) -> Vec<(SpinClass, PoincarePolynomial)> {
    comp.classes.iter().map(|c| (c.label.clone(), c.hfk.shift_maslov(norm.shift))).collect()
}
