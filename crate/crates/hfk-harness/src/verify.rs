//! Consistency checks on one (grid, m) pair. Failures are results, not errors.

use hfk_core::complex::AlexanderWindow;
use hfk_core::cover::{cut_basis_presentation, SpinClass};
use hfk_core::grading::{epsilon, find_domain, lipshitz_index, relative_maslov, BigRational, DomainChain};
use hfk_core::homology::{cyclic_norm, h1_order_check};
use hfk_core::pipeline::{self, ClassOrigin, Computation, ComputeOptions};
use hfk_core::{ComplexEngine, CwSurface, Generator, GradingModel, GridDiagram, LiftedDiagram, PoincarePolynomial};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name, passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random generator pairs and triples per sampled check.
    pub samples: usize,
    pub seed: u64,
    /// Differentials are checked directly on at most this many generators; beyond
    /// that, an evenly spaced subset is used.
    pub direct_limit: u64,
    pub compute: Option<ComputeOptions>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 50, seed: 1, direct_limit: 200_000, compute: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{} {:<24} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }
}

/// Rejection-samples a generator from per-sheet random permutations.
pub fn random_generator(engine: &ComplexEngine, rng: &mut impl Rng) -> Option<Generator> {
    let (n, m) = (engine.n(), engine.m());
    for _ in 0..100_000 {
        let perms: Vec<Vec<u8>> = (0..m)
            .map(|_| {
                let mut p: Vec<u8> = (0..n as u8).collect();
                p.shuffle(rng);
                p
            })
            .collect();
        let rows: Vec<u8> = (0..n * m).map(|s| perms[s % m][s / m]).collect();
        let x = Generator::from_rows(&rows);
        if engine.is_generator(x) {
            return Some(x);
        }
    }
    None
}

/// Counts of differential failures over the checked generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifferentialAudit {
    pub generators: u64,
    pub checked: u64,
    pub edges: u64,
    pub key_changes: u64,
    pub bad_drops: u64,
    pub d_squared: u64,
}

pub fn audit_differentials(
    engine: &ComplexEngine,
    model: &GradingModel,
    window: AlexanderWindow,
    direct_limit: u64,
) -> DifferentialAudit {
    let mut total = 0u64;
    engine.enumerate(window, |_, _| total += 1);
    let stride = total.div_ceil(direct_limit.max(1)).max(1);
    let mut audit = DifferentialAudit { generators: total, ..Default::default() };
    let mut dx = Vec::new();
    let mut ddx = Vec::new();
    let mut dy = Vec::new();
    let mut index = 0u64;
    engine.enumerate(window, |x, _| {
        index += 1;
        if (index - 1) % stride != 0 {
            return;
        }
        audit.checked += 1;
        engine.differentials_from(x, &mut dx);
        let (kx, sx, gx) = (engine.alexander_key(x), model.spin_index(x), model.grading_scaled(x));
        ddx.clear();
        for &y in &dx {
            audit.edges += 1;
            if engine.alexander_key(y) != kx || model.spin_index(y) != sx {
                audit.key_changes += 1;
            }
            if gx - model.grading_scaled(y) != model.denom {
                audit.bad_drops += 1;
            }
            engine.differentials_from(y, &mut dy);
            ddx.extend_from_slice(&dy);
        }
        ddx.sort_unstable();
        if ddx.chunk_by(|a, b| a == b).any(|run| run.len() % 2 == 1) {
            audit.d_squared += 1;
        }
    });
    audit
}

/// `mu(D) - 2 n_w(D)` over `d`, for a domain with arbitrary multiplicities.
fn index_over_d(engine: &ComplexEngine, surface: &CwSurface, dom: &DomainChain, x: Generator, y: Generator) -> BigRational {
    let mu = lipshitz_index(engine, surface, dom, x, y);
    let n_w: BigInt = surface
        .faces
        .iter()
        .zip(&dom.multiplicities)
        .filter(|(f, _)| f.basepoint == Some(hfk_core::cover::Basepoint::W))
        .map(|(_, a)| a.clone())
        .sum();
    (mu - BigRational::from_integer(BigInt::from(2) * n_w)) / BigRational::from_integer(dom.d.clone())
}

/// Adds random combinations of periodic domains to the solved domain and checks
/// that the index is unchanged; also compares with the closed-form grading.
fn maslov_independence(
    engine: &ComplexEngine,
    model: &GradingModel,
    samples: &[(Generator, Generator)],
    rng: &mut impl Rng,
) -> (usize, Vec<String>) {
    let surface = &model.surface;
    let snf = model.h1.solver.snf();
    let nf = surface.faces.len();
    let kernel: Vec<usize> = (snf.rank..snf.v.cols()).collect();
    let mut bad = Vec::new();
    for &(x, y) in samples {
        let Ok(dom) = find_domain(engine, surface, &model.h1, x, y) else {
            bad.push(format!("{x:?} {y:?}: no domain"));
            continue;
        };
        let base = index_over_d(engine, surface, &dom, x, y);
        let mut alt = dom.clone();
        for _ in 0..3 {
            let Some(&col) = kernel.choose(rng) else { break };
            let c = BigInt::from(rng.gen_range(-3i64..=3));
            for f in 0..nf {
                let v = snf.v.get(f, col);
                if !v.is_zero() {
                    alt.multiplicities[f] += &c * v;
                }
            }
        }
        let other = index_over_d(engine, surface, &alt, x, y);
        let closed = BigRational::new(BigInt::from(model.grading_scaled(x) - model.grading_scaled(y)), BigInt::from(model.denom));
        if base != other || base != closed {
            bad.push(format!("{x:?} {y:?}: {base} vs {other} vs {closed}"));
        }
    }
    (samples.len(), bad)
}

fn class_ranks_conjugate(group: &hfk_core::FiniteAbelian, classes: &[(SpinClass, PoincarePolynomial)]) -> Vec<String> {
    let mut bad = Vec::new();
    for (label, p) in classes {
        let neg = group.neg(label);
        let Some((_, q)) = classes.iter().find(|(l, _)| *l == neg) else { continue };
        if &p.conjugate() != q {
            bad.push(format!("{label:?}"));
        }
    }
    bad
}

/// Every check on the standard lift of `grid`.
pub fn verify(grid: &GridDiagram, m: usize, options: &VerifyOptions) -> VerifyReport {
    verify_lifted(&LiftedDiagram::new(grid, m), options)
}

pub fn verify_lifted(lift: &LiftedDiagram, options: &VerifyOptions) -> VerifyReport {
    verify_with(lift, options, None)
}

/// Like [`verify_lifted`], reusing `computed` for the homology checks instead of
/// running the pipeline again. It must come from the same lift.
pub fn verify_with(lift: &LiftedDiagram, options: &VerifyOptions, computed: Option<&Computation>) -> VerifyReport {
    let grid = &lift.grid;
    let (n, m) = (lift.n(), lift.m);
    let mut checks = Vec::new();
    let mut rng = StdRng::seed_from_u64(options.seed);

    let walk = lift.sheet_walk_mismatch();
    checks.push(Check::new(
        "sheet_walk",
        walk.is_none(),
        walk.map_or("alpha lifts agree with the cut walk".into(), |p| format!("mismatch at {p:?}")),
    ));

    let surface = CwSurface::new(lift);
    let chi = surface.euler_characteristic();
    let expected = 2 - 2 * surface.expected_genus();
    checks.push(Check::new(
        "euler_characteristic",
        chi == expected && surface.boundaries_closed(),
        format!("chi = {chi}, genus formula gives {expected}"),
    ));

    let engine = ComplexEngine::new(lift);
    let model = match GradingModel::new(&engine) {
        Ok(model) => model,
        Err(e) => {
            checks.push(Check::new("grading_model", false, e.to_string()));
            return VerifyReport { checks };
        }
    };
    let group = model.group().clone();

    let downstairs = pipeline::downstairs(grid);
    match &downstairs {
        Ok(ds) => {
            let norm = cyclic_norm(&ds.alexander, m);
            let ok = h1_order_check(&ds.alexander, m, &group) && (m != 2 || group.order() % 2 == 1);
            checks.push(Check::new("h1_order", ok, format!("|H1| = {}, norm of Alexander polynomial = {norm}", group.order())));
        }
        Err(e) => checks.push(Check::new("h1_order", false, format!("downstairs computation failed: {e}"))),
    }
    if m == 2 {
        let fig = cut_basis_presentation(grid);
        checks.push(Check::new(
            "cut_basis_presentation",
            fig == group,
            format!("cut basis {:?}, cell complex {:?}", fig.factors, group.factors),
        ));
    }

    let compute = match computed {
        Some(c) => c.options.clone(),
        None => options.compute.clone().unwrap_or_else(|| ComputeOptions::for_grid(grid, m)),
    };
    let window = compute.window(n, m);
    let audit = audit_differentials(&engine, &model, window, options.direct_limit);
    let scope = format!("{} of {} generators, {} differentials", audit.checked, audit.generators, audit.edges);
    checks.push(Check::new("d_squared", audit.d_squared == 0, format!("{} failures; {scope}", audit.d_squared)));
    checks.push(Check::new("block_key", audit.key_changes == 0, format!("{} failures; {scope}", audit.key_changes)));
    checks.push(Check::new("maslov_drop", audit.bad_drops == 0, format!("{} failures; {scope}", audit.bad_drops)));

    let samples: Vec<Generator> = (0..options.samples * 3).filter_map(|_| random_generator(&engine, &mut rng)).collect();
    let mut eps_bad = 0;
    let zero = group.zero();
    for t in samples.chunks_exact(3) {
        let e = |a, b| epsilon(&engine, &surface, &model.h1, a, b);
        if e(t[0], t[2]) != group.add(&e(t[0], t[1]), &e(t[1], t[2])) || e(t[0], t[0]) != zero {
            eps_bad += 1;
        }
    }
    checks.push(Check::new(
        "epsilon_additive",
        eps_bad == 0 && !samples.is_empty(),
        format!("{eps_bad} failures in {} triples", samples.len() / 3),
    ));
    let pairs: Vec<(Generator, Generator)> = samples.chunks_exact(2).take(options.samples).map(|p| (p[0], p[1])).collect();
    let (count, bad) = maslov_independence(&engine, &model, &pairs, &mut rng);
    checks.push(Check::new(
        "maslov_solution_independent",
        bad.is_empty() && count > 0,
        bad.first().cloned().unwrap_or_else(|| format!("{count} pairs")),
    ));
    let mut class_bad = 0;
    for &(x, y) in &pairs {
        let d = relative_maslov(&engine, &surface, &model.h1, x, y);
        let same = model.spin_class(x) == model.spin_class(y);
        if let Ok(r) = d {
            if same && !r.is_integer() {
                class_bad += 1;
            }
            let exponent = group.factors.last().copied().unwrap_or(1);
            let scaled = r * BigRational::from_integer(BigInt::from(exponent));
            if !scaled.is_integer() {
                class_bad += 1;
            }
        }
    }
    checks.push(Check::new(
        "maslov_denominators",
        class_bad == 0,
        format!("{class_bad} pairs with a denominator outside the exponent of H1"),
    ));

    let fresh;
    let comp = match computed {
        Some(c) => Ok(c),
        None => {
            fresh = pipeline::compute_lifted(lift, &compute);
            fresh.as_ref()
        }
    };
    match comp {
        Ok(comp) => {
            checks.push(Check::new(
                "v_divisibility",
                true,
                format!("{} classes divided by (1 + q^-1 t^-1)^{}", comp.classes.len(), n - 1),
            ));
            let classes: Vec<(SpinClass, PoincarePolynomial)> =
                comp.classes.iter().map(|c| (c.label.clone(), c.hfk.clone())).collect();
            if m == 2 {
                let bad = class_ranks_conjugate(&group, &classes);
                let mirrored = comp.classes.iter().filter(|c| c.origin == ClassOrigin::Mirrored).count();
                let mirror_ok = comp.mirror_check != Some(false);
                let detail = if mirrored > 0 {
                    format!(
                        "{} classes, {mirrored} copied from their conjugates; direct recomputation agreed: {:?}",
                        classes.len(),
                        comp.mirror_check
                    )
                } else {
                    format!("{} classes computed independently", classes.len())
                };
                checks.push(Check::new("conjugation_symmetry", bad.is_empty() && mirror_ok, detail));
            }
            let odd: Vec<&SpinClass> =
                comp.classes.iter().filter(|c| c.hfk.euler_at_one().map(i64::abs) != Some(1)).map(|c| &c.label).collect();
            checks.push(Check::new(
                "class_euler_characteristic",
                odd.is_empty(),
                match odd.first() {
                    None => format!("|chi| = 1 in all {} classes", comp.classes.len()),
                    Some(l) => format!("{} classes with |chi| != 1, first {l:?}", odd.len()),
                },
            ));
            let empty: Vec<&SpinClass> = comp.classes.iter().filter(|c| c.hfk.is_zero()).map(|c| &c.label).collect();
            checks.push(Check::new(
                "classes_realized",
                comp.classes.iter().all(|c| c.generators > 0),
                format!("{} classes, {} with zero homology", comp.classes.len(), empty.len()),
            ));
        }
        Err(e) => {
            let name = match &e {
                pipeline::PipelineError::Division { .. } => "v_divisibility",
                _ => "pipeline",
            };
            checks.push(Check::new(name, false, e.to_string()));
        }
    }
    VerifyReport { checks }
}

/// Whether the canonical class of the double branched cover has the same bigraded
/// ranks as the knot downstairs, up to one Maslov shift. Expected for two-bridge knots.
pub fn two_bridge_check(grid: &GridDiagram) -> Check {
    let run = match crate::run::run(grid, &crate::run::RunOptions::auto(grid, 2)) {
        Ok(run) => run,
        Err(e) => return Check::new("two_bridge", false, e.to_string()),
    };
    let up = run.class(&run.comp.group.zero()).cloned().unwrap_or_default();
    let down = &run.downstairs.hfk;
    let shift = match (up.max_alexander(), down.max_alexander()) {
        (Some(a), Some(b)) if a == b => {
            let qa = up.maslov_levels_at(a).into_iter().max();
            let qb = down.maslov_levels_at(b).into_iter().max();
            qa.zip(qb).map(|(x, y)| x - y)
        }
        _ => None,
    };
    match shift {
        Some(s) if down.shift_maslov(s) == up => {
            Check::new("two_bridge", true, format!("canonical class = downstairs shifted by q^{s}"))
        }
        _ => Check::new("two_bridge", false, format!("canonical class {up}, downstairs {down}")),
    }
}
