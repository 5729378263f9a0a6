//! One knot, one cover: the computation plus the data needed to report it.

use std::time::Instant;

use hfk_core::cover::SpinClass;
use hfk_core::grading::downstairs_maslov;
use hfk_core::pipeline::{self, ComputeOptions, Computation, Downstairs, MaslovMode, Normalization, Truncation};
use hfk_core::{GridDiagram, PoincarePolynomial, Rational};
use num_traits::Zero;

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub m: usize,
    pub compute: ComputeOptions,
    /// Keep gradings relative to the lifted identity generator.
    pub relative_maslov: bool,
}

impl RunOptions {
    pub fn auto(grid: &GridDiagram, m: usize) -> Self {
        RunOptions { m, compute: ComputeOptions::for_grid(grid, m), relative_maslov: false }
    }

    pub fn without_spin_split(mut self) -> Self {
        self.compute.split_spin = false;
        self.compute.truncation = Truncation::None;
        self.compute.mirror_conjugates = false;
        self
    }
}

#[derive(Clone, Debug)]
pub struct KnotRun {
    pub grid: GridDiagram,
    pub m: usize,
    pub downstairs: Downstairs,
    pub comp: Computation,
    pub normalization: Normalization,
    /// Per-class polynomials with the normalization applied, sorted by label.
    pub classes: Vec<(SpinClass, PoincarePolynomial)>,
    pub seconds: f64,
}

impl KnotRun {
    pub fn class(&self, label: &[u64]) -> Option<&PoincarePolynomial> {
        self.classes.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }
}

pub fn run(grid: &GridDiagram, options: &RunOptions) -> Result<KnotRun, HarnessError> {
    if options.m == 0 {
        return Err(HarnessError::Usage("m must be at least 1".into()));
    }
    let start = Instant::now();
    let base = pipeline::compute(grid, 1, &ComputeOptions::default())?;
    let downstairs = pipeline::downstairs_from(grid, &base);
    let comp = if options.m == 1 { base } else { pipeline::compute(grid, options.m, &options.compute)? };

    let normalization = if options.relative_maslov {
        Normalization { mode: MaslovMode::Relative, shift: Rational::zero(), reason: Some("requested".into()) }
    } else if options.m == 1 {
        let identity: Vec<usize> = (0..grid.size()).collect();
        let shift = Rational::from_integer(downstairs_maslov(&identity, grid));
        Normalization { mode: MaslovMode::Absolute, shift, reason: None }
    } else {
        pipeline::normalization(&comp, downstairs.genus)
    };
    let classes = pipeline::normalized_classes(&comp, &normalization);
    Ok(KnotRun {
        grid: grid.clone(),
        m: options.m,
        downstairs,
        comp,
        normalization,
        classes,
        seconds: start.elapsed().as_secs_f64(),
    })
}
