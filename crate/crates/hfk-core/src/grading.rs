//! Relative Maslov gradings on the lifted diagram.
//!
//! For generators `x, y`, the 1-cycle `gamma(x, y)` runs along alpha arcs from
//! `x` to `y` and along beta arcs from `y` to `x`. A 2-chain `D` whose boundary is
//! `d * gamma` plus lifted circles gives `M(x, y) = (mu(D) - 2 n_w(D)) / d`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::complex::{ComplexEngine, Generator};
use crate::cover::{Basepoint, CwSurface, FiniteAbelian, H1Presentation, SpinClass};
use crate::grid::GridDiagram;
use crate::Rational;

pub type BigRational = Ratio<BigInt>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradingError {
    #[error("no multiple of gamma bounds a domain; the cover is not a rational homology sphere")]
    NoDomain,
    #[error("grading table entries overflow 64-bit integers")]
    Overflow,
}

/// Integer multiplicities on the faces of the lifted surface, bounding `d * gamma(x, y)`
/// up to lifted circles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainChain {
    pub multiplicities: Vec<BigInt>,
    pub d: BigInt,
    pub n_w: BigInt,
    pub n_z: BigInt,
}

/// Everything needed to grade generators of one lifted diagram.
#[derive(Clone, Debug)]
pub struct GradingModel {
    pub surface: CwSurface,
    pub h1: H1Presentation,
    pub reference: Generator,
    n: usize,
    m: usize,
    /// Gradings are stored as integers in units of `1 / denom`.
    pub denom: i64,
    constant: i64,
    linear: Vec<i64>,
    quadratic: Vec<i64>,
    class_vectors: Vec<Vec<i64>>,
    reference_class: Vec<i64>,
}

fn vertex_of(n: usize, m: usize, slot: usize, row: usize) -> usize {
    let (i, k) = (slot / m, slot % m);
    (i * n + row) * m + k
}

/// Signed edge chain of `beta_i^k` from row 0 up to the point, minus the alpha arc
/// from column 0 of its alpha lift to the point.
fn point_chain(surface: &CwSurface, engine: &ComplexEngine, i: usize, j: usize, k: usize) -> Vec<(u32, i64)> {
    let l = engine.alpha_lift(i, j, k);
    let mut chain: Vec<(u32, i64)> = surface.beta_arc(i, k, j).into_iter().map(|e| (e, 1)).collect();
    let (alpha, _) = surface.alpha_arc(j, l, i);
    chain.extend(alpha.into_iter().map(|e| (e, -1)));
    chain
}

fn dense(chain: &[(u32, i64)], len: usize) -> Vec<BigInt> {
    let mut v = vec![0i64; len];
    for &(e, s) in chain {
        v[e as usize] += s;
    }
    v.into_iter().map(BigInt::from).collect()
}

/// `gamma(x, y)` as a dense edge vector.
pub fn gamma_chain(engine: &ComplexEngine, surface: &CwSurface, x: Generator, y: Generator) -> Vec<i64> {
    let (n, m) = (engine.n(), engine.m());
    let mut v = vec![0i64; surface.num_edges()];
    for (g, sign) in [(x, 1), (y, -1)] {
        for s in 0..n * m {
            for (e, c) in point_chain(surface, engine, s / m, g.row(s), s % m) {
                v[e as usize] += sign * c;
            }
        }
    }
    v
}

/// Spin^c difference of `x` and `y`.
pub fn epsilon(engine: &ComplexEngine, surface: &CwSurface, h1: &H1Presentation, x: Generator, y: Generator) -> SpinClass {
    let g = gamma_chain(engine, surface, x, y);
    let sparse: Vec<(u32, i64)> = g.iter().enumerate().filter(|(_, &c)| c != 0).map(|(e, &c)| (e as u32, c)).collect();
    h1.project(&sparse)
}

fn domain_counts(surface: &CwSurface, mult: &[BigInt]) -> (BigInt, BigInt) {
    let mut n_w = BigInt::zero();
    let mut n_z = BigInt::zero();
    for (f, a) in surface.faces.iter().zip(mult) {
        match f.basepoint {
            Some(Basepoint::W) => n_w += a,
            Some(Basepoint::Z) => n_z += a,
            None => {}
        }
    }
    (n_w, n_z)
}

/// Smallest multiple of `gamma(x, y)` bounding a domain, and that domain.
pub fn find_domain(
    engine: &ComplexEngine,
    surface: &CwSurface,
    h1: &H1Presentation,
    x: Generator,
    y: Generator,
) -> Result<DomainChain, GradingError> {
    let g = gamma_chain(engine, surface, x, y);
    let b: Vec<BigInt> = g.into_iter().map(BigInt::from).collect();
    let (d, u) = h1.solver.minimal_multiple(&b).ok_or(GradingError::NoDomain)?;
    let multiplicities = u[..surface.faces.len()].to_vec();
    let (n_w, n_z) = domain_counts(surface, &multiplicities);
    Ok(DomainChain { multiplicities, d, n_w, n_z })
}

/// Sum of the four corner multiplicities at the point `(i, j, k)`.
fn corner_sum<T: Clone + Zero>(surface: &CwSurface, mult: &[T], i: usize, j: usize, k: usize) -> T {
    surface
        .corner_faces(i, j, k)
        .iter()
        .fold(T::zero(), |acc, &f| acc + mult[f as usize].clone())
}

fn point_term(engine: &ComplexEngine, surface: &CwSurface, mult: &[BigInt], x: Generator) -> BigRational {
    let m = engine.m();
    let total = (0..engine.slots()).fold(BigInt::zero(), |acc, s| {
        acc + corner_sum(surface, mult, s / m, x.row(s), s % m)
    });
    BigRational::new(total, BigInt::from(4))
}

fn euler_term(surface: &CwSurface, mult: &[BigInt]) -> BigInt {
    surface
        .faces
        .iter()
        .zip(mult)
        .fold(BigInt::zero(), |acc, (f, a)| acc + a * f.euler)
}

/// `mu(D) = e(D) + p_x(D) + p_y(D)`.
pub fn lipshitz_index(
    engine: &ComplexEngine,
    surface: &CwSurface,
    domain: &DomainChain,
    x: Generator,
    y: Generator,
) -> BigRational {
    let mult = &domain.multiplicities;
    BigRational::from_integer(euler_term(surface, mult))
        + point_term(engine, surface, mult, x)
        + point_term(engine, surface, mult, y)
}

/// `M(x) - M(y)` computed from a freshly solved domain.
pub fn relative_maslov(
    engine: &ComplexEngine,
    surface: &CwSurface,
    h1: &H1Presentation,
    x: Generator,
    y: Generator,
) -> Result<BigRational, GradingError> {
    let dom = find_domain(engine, surface, h1, x, y)?;
    let mu = lipshitz_index(engine, surface, &dom, x, y);
    Ok((mu - BigRational::from_integer(BigInt::from(2) * &dom.n_w)) / BigRational::from_integer(dom.d))
}

fn to_i64(r: &BigRational, denom: &BigInt) -> Result<i64, GradingError> {
    let scaled = r * BigRational::from_integer(denom.clone());
    debug_assert!(scaled.is_integer());
    scaled.to_integer().to_i64().ok_or(GradingError::Overflow)
}

impl GradingModel {
    /// Precomputes a rational domain for every lifted intersection point, which turns
    /// the relative grading against the reference generator into a quadratic form in
    /// the points of a generator.
    pub fn new(engine: &ComplexEngine) -> Result<Self, GradingError> {
        let surface = CwSurface::new(&engine.lift);
        let h1 = H1Presentation::new(&surface);
        Self::with_surface(engine, surface, h1)
    }

    pub fn with_surface(engine: &ComplexEngine, surface: CwSurface, h1: H1Presentation) -> Result<Self, GradingError> {
        let (n, m) = (engine.n(), engine.m());
        let nv = surface.num_vertices();
        let ne = surface.num_edges();
        let nf = surface.faces.len();
        let tree = surface.tree_paths();
        let reference = engine.canonical_reference();

        let mut class_vectors = Vec::with_capacity(nv);
        let mut domains: Vec<Vec<BigRational>> = Vec::with_capacity(nv);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    let l = engine.alpha_lift(i, j, k);
                    let mut chain = point_chain(&surface, engine, i, j, k);
                    let rb = surface.vertex(i, 0, k);
                    let ra = surface.vertex(0, j, l);
                    chain.extend(tree[rb].iter().map(|&(e, s)| (e, s as i64)));
                    chain.extend(tree[ra].iter().map(|&(e, s)| (e, -(s as i64))));
                    let raw = h1.project(&chain);
                    class_vectors.push(raw.iter().map(|&c| c as i64).collect());
                    let sol = h1.solver.solve_rational(&dense(&chain, ne)).ok_or(GradingError::NoDomain)?;
                    domains.push(sol[..nf].to_vec());
                }
            }
        }

        let ref_vertices: Vec<usize> = (0..n * m).map(|s| vertex_of(n, m, s, reference.row(s))).collect();
        let mut d0 = vec![BigRational::zero(); nf];
        for &p in &ref_vertices {
            for (a, b) in d0.iter_mut().zip(&domains[p]) {
                *a += b;
            }
        }

        let coords: Vec<(usize, usize, usize)> =
            (0..nv).map(|v| (v / (n * m), (v / m) % n, v % m)).collect();
        let avg = |dom: &[BigRational], q: usize| -> BigRational {
            let (i, j, k) = coords[q];
            corner_sum(&surface, dom, i, j, k) / BigRational::from_integer(BigInt::from(4))
        };
        let euler = |dom: &[BigRational]| -> BigRational {
            surface
                .faces
                .iter()
                .zip(dom)
                .fold(BigRational::zero(), |acc, (f, a)| acc + a * BigRational::from_integer(BigInt::from(f.euler)))
        };
        let n_w = |dom: &[BigRational]| -> BigRational {
            surface
                .faces
                .iter()
                .zip(dom)
                .filter(|(f, _)| f.basepoint == Some(Basepoint::W))
                .fold(BigRational::zero(), |acc, (_, a)| acc + a)
        };
        let two = BigRational::from_integer(BigInt::from(2));
        let base_value = |dom: &[BigRational]| -> BigRational {
            let px0 = ref_vertices.iter().fold(BigRational::zero(), |acc, &q| acc + avg(dom, q));
            euler(dom) + px0 - two.clone() * n_w(dom)
        };

        let constant = base_value(&d0);
        let linear: Vec<BigRational> = (0..nv).map(|p| avg(&d0, p) - base_value(&domains[p])).collect();
        let mut quadratic = Vec::with_capacity(nv * nv);
        for q in 0..nv {
            for p in 0..nv {
                quadratic.push(-avg(&domains[p], q));
            }
        }

        let mut denom = BigInt::one();
        for r in std::iter::once(&constant).chain(&linear).chain(&quadratic) {
            denom = denom.lcm(r.denom());
        }
        // Gradings are stored as minus the relative grading from the reference.
        let neg = |r: &BigRational| -> Result<i64, GradingError> { to_i64(&-r.clone(), &denom) };
        let model = GradingModel {
            reference,
            n,
            m,
            denom: denom.to_i64().ok_or(GradingError::Overflow)?,
            constant: neg(&constant)?,
            linear: linear.iter().map(neg).collect::<Result<_, _>>()?,
            quadratic: quadratic.iter().map(neg).collect::<Result<_, _>>()?,
            reference_class: {
                let mut acc = vec![0i64; h1.group.factors.len()];
                for &p in &ref_vertices {
                    for (a, b) in acc.iter_mut().zip(&class_vectors[p]) {
                        *a += b;
                    }
                }
                acc
            },
            class_vectors,
            surface,
            h1,
        };
        debug_assert_eq!(model.grading_scaled(model.reference), 0);
        Ok(model)
    }

    pub fn group(&self) -> &FiniteAbelian {
        &self.h1.group
    }

    #[inline]
    fn vertices(&self, x: Generator, out: &mut [usize]) {
        for (s, v) in out.iter_mut().enumerate() {
            *v = vertex_of(self.n, self.m, s, x.row(s));
        }
    }

    /// `M(x) - M(reference)` in units of `1 / denom`.
    pub fn grading_scaled(&self, x: Generator) -> i64 {
        let slots = self.n * self.m;
        let mut vs = [0usize; crate::complex::MAX_SLOTS];
        self.vertices(x, &mut vs[..slots]);
        let nv = self.n * self.n * self.m;
        let mut total = self.constant;
        for &q in &vs[..slots] {
            total += self.linear[q];
            let row = &self.quadratic[q * nv..(q + 1) * nv];
            for &p in &vs[..slots] {
                total += row[p];
            }
        }
        total
    }

    pub fn grading(&self, x: Generator) -> Rational {
        Rational::new(self.grading_scaled(x), self.denom)
    }

    /// Spin^c class of `x` relative to the reference generator.
    pub fn spin_class(&self, x: Generator) -> SpinClass {
        let slots = self.n * self.m;
        let mut acc: Vec<i64> = self.reference_class.iter().map(|v| -v).collect();
        for s in 0..slots {
            let v = vertex_of(self.n, self.m, s, x.row(s));
            for (a, b) in acc.iter_mut().zip(&self.class_vectors[v]) {
                *a += b;
            }
        }
        self.h1.group.reduce(&acc)
    }

    /// Mixed-radix index of [`Self::spin_class`].
    pub fn spin_index(&self, x: Generator) -> usize {
        let slots = self.n * self.m;
        let factors = &self.h1.group.factors;
        let mut acc = [0i64; 8];
        let r = factors.len();
        assert!(r <= acc.len());
        for (a, b) in acc.iter_mut().zip(&self.reference_class) {
            *a = -b;
        }
        for s in 0..slots {
            let v = vertex_of(self.n, self.m, s, x.row(s));
            for (a, b) in acc.iter_mut().zip(&self.class_vectors[v]) {
                *a += b;
            }
        }
        acc[..r]
            .iter()
            .zip(factors)
            .fold(0u64, |idx, (&a, &d)| idx * d + a.rem_euclid(d as i64) as u64) as usize
    }
}

/// Absolute Maslov grading of a downstairs generator, by pair counting on the planar
/// fundamental domain: `M(x) = J(x - O, x - O) + 1`.
pub fn downstairs_maslov(perm: &[usize], grid: &GridDiagram) -> i64 {
    let n = grid.size();
    let xs: Vec<(i64, i64)> = (0..n).map(|i| (2 * i as i64, 2 * perm[i] as i64)).collect();
    let os: Vec<(i64, i64)> = (0..n).map(|c| (2 * c as i64 + 1, 2 * grid.o_row(c) as i64 + 1)).collect();
    let i_count = |p: &[(i64, i64)], q: &[(i64, i64)]| -> i64 {
        p.iter().map(|a| q.iter().filter(|b| a.0 < b.0 && a.1 < b.1).count() as i64).sum()
    };
    // 2J(P, Q) = I(P, Q) + I(Q, P)
    let j2 = |p: &[(i64, i64)], q: &[(i64, i64)]| i_count(p, q) + i_count(q, p);
    let twice = j2(&xs, &xs) - 2 * j2(&xs, &os) + j2(&os, &os);
    debug_assert!(twice % 2 == 0);
    twice / 2 + 1
}

/// Whether a rational has a denominator dividing `e`.
pub fn denominator_divides(r: &Rational, e: i64) -> bool {
    e % r.denom().abs() == 0
}

pub fn big_to_rational(r: &BigRational) -> Option<Rational> {
    Some(Rational::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::LiftedDiagram;

    #[test]
    fn unknot_mos_grading_of_identity_is_zero() {
        let g = GridDiagram::parse("n 2\nX 0 1\nO 1 0").unwrap();
        assert_eq!(downstairs_maslov(&[0, 1], &g), 0);
        assert_eq!(downstairs_maslov(&[1, 0], &g), -1);
    }

    #[test]
    fn model_grades_reference_at_zero() {
        let g = GridDiagram::parse("n 5\nX 4 0 1 2 3\nO 1 2 3 4 0").unwrap();
        let e = ComplexEngine::new(&LiftedDiagram::new(&g, 2));
        let model = GradingModel::new(&e).unwrap();
        assert_eq!(model.grading_scaled(model.reference), 0);
        assert!(model.spin_class(model.reference).iter().all(|&c| c == 0));
    }
}
