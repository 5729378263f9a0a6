//! Bigraded Poincaré polynomials in `q` (Maslov) and `t` (Alexander) with rational exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by (1 + q^-1 t^-1)^{power} leaves a remainder")]
    NotDivisible { power: u32 },
    #[error("quotient has a negative coefficient at q^{q} t^{t}")]
    Negative { q: Rational, t: Rational },
    #[error("cannot parse polynomial at `{0}`")]
    Parse(String),
}

/// Finitely supported map `(maslov, alexander) -> rank`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PoincarePolynomial {
    terms: BTreeMap<(Rational, Rational), u64>,
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn frac_part(r: Rational) -> Rational {
    r - r.floor()
}

impl PoincarePolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(q: Rational, t: Rational, coeff: u64) -> Self {
        let mut p = Self::new();
        p.add(q, t, coeff);
        p
    }

    pub fn add(&mut self, q: Rational, t: Rational, coeff: u64) {
        if coeff == 0 {
            return;
        }
        *self.terms.entry((q, t)).or_insert(0) += coeff;
    }

    pub fn coeff(&self, q: Rational, t: Rational) -> u64 {
        self.terms.get(&(q, t)).copied().unwrap_or(0)
    }

    /// Terms as `((maslov, alexander), coefficient)` in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, Rational, u64)> + '_ {
        self.terms.iter().map(|(&(q, t), &c)| (q, t, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_rank(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn shift_maslov(&self, delta: Rational) -> Self {
        self.map_exponents(|q, t| (q + delta, t))
    }

    pub fn map_exponents(&self, f: impl Fn(Rational, Rational) -> (Rational, Rational)) -> Self {
        let mut out = Self::new();
        for (q, t, c) in self.terms() {
            let (q2, t2) = f(q, t);
            out.add(q2, t2, c);
        }
        out
    }

    /// `(i, j) -> (-i, j - 2i)` in Alexander `i`, Maslov `j`.
    pub fn conjugate(&self) -> Self {
        self.map_exponents(|q, t| (q - t * Rational::from_integer(2), -t))
    }

    pub fn restrict_alexander(&self, keep: impl Fn(Rational) -> bool) -> Self {
        let mut out = Self::new();
        for (q, t, c) in self.terms() {
            if keep(t) {
                out.add(q, t, c);
            }
        }
        out
    }

    pub fn max_alexander(&self) -> Option<Rational> {
        self.terms().map(|(_, t, _)| t).max()
    }

    /// Maslov levels carrying rank at Alexander grading `a`.
    pub fn maslov_levels_at(&self, a: Rational) -> Vec<Rational> {
        self.terms().filter(|&(_, t, _)| t == a).map(|(q, _, _)| q).collect()
    }

    /// Distinct values of `maslov - alexander`.
    pub fn diagonals(&self) -> Vec<Rational> {
        let mut d: Vec<Rational> = self.terms().map(|(q, t, _)| q - t).collect();
        d.sort();
        d.dedup();
        d
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (q, t, c) in other.terms() {
            out.add(q, t, c);
        }
        out
    }

    /// Product with `(1 + q^-1 t^-1)^power`.
    pub fn times_v(&self, power: u32) -> Self {
        let mut out = Self::new();
        let one = Rational::from_integer(1);
        for (q, t, c) in self.terms() {
            for k in 0..=power {
                let kk = one * Rational::from_integer(k as i64);
                out.add(q - kk, t - kk, c * binomial(power, k) as u64);
            }
        }
        out
    }

    /// Signed coefficients grouped by diagonal: `(maslov - alexander, alexander) -> coefficient`.
    fn by_diagonal(&self) -> BTreeMap<(Rational, Rational), i64> {
        self.terms().map(|(q, t, c)| ((q - t, t), c as i64)).collect()
    }

    fn from_diagonal(map: &BTreeMap<(Rational, Rational), i64>) -> Result<Self, PolyError> {
        let mut out = Self::new();
        for (&(d, t), &c) in map {
            if c < 0 {
                return Err(PolyError::Negative { q: d + t, t });
            }
            out.add(d + t, t, c as u64);
        }
        Ok(out)
    }

    /// Top-down synthetic division along each diagonal. Only Alexander gradings
    /// `>= floor` of the quotient are produced when `floor` is given.
    fn divide_diagonals(&self, power: u32, floor: Option<Rational>) -> BTreeMap<(Rational, Rational), i64> {
        let raw = self.by_diagonal();
        let mut quotient: BTreeMap<(Rational, Rational), i64> = BTreeMap::new();
        let mut lines: BTreeMap<(Rational, Rational), Vec<Rational>> = BTreeMap::new();
        for &(d, t) in raw.keys() {
            lines.entry((d, frac_part(t))).or_default().push(t);
        }
        for ((d, _), ts) in lines {
            let top = *ts.iter().max().unwrap();
            let bottom = match floor {
                Some(f) => f,
                None => *ts.iter().min().unwrap() + Rational::from_integer(power as i64),
            };
            let mut a = top;
            while a >= bottom {
                let mut c = raw.get(&(d, a)).copied().unwrap_or(0);
                for k in 1..=power {
                    let above = a + Rational::from_integer(k as i64);
                    c -= binomial(power, k) * quotient.get(&(d, above)).copied().unwrap_or(0);
                }
                if c != 0 {
                    quotient.insert((d, a), c);
                }
                a -= Rational::from_integer(1);
            }
        }
        quotient
    }

    /// Exact quotient by `(1 + q^-1 t^-1)^power`.
    pub fn divide_v(&self, power: u32) -> Result<Self, PolyError> {
        let q = Self::from_diagonal(&self.divide_diagonals(power, None))?;
        if q.times_v(power) != *self {
            return Err(PolyError::NotDivisible { power });
        }
        Ok(q)
    }

    /// Quotient restricted to Alexander gradings `>= floor`, given this polynomial
    /// is known exactly on that range.
    pub fn divide_v_above(&self, power: u32, floor: Rational) -> Result<Self, PolyError> {
        Self::from_diagonal(&self.divide_diagonals(power, Some(floor)))
    }

    /// Quotient restricted to Alexander gradings `<= ceiling`, given this polynomial
    /// is known exactly on gradings `<= ceiling - power`.
    pub fn divide_v_below(&self, power: u32, ceiling: Rational) -> Result<Self, PolyError> {
        // Reversing both gradings turns V into (qt)^power V.
        let p = Rational::from_integer(power as i64);
        let reversed = self.map_exponents(|q, t| (-q - p, -t - p));
        let q = reversed.divide_v_above(power, -ceiling)?;
        Ok(q.map_exponents(|q, t| (-q, -t)))
    }

    /// Graded Euler characteristic `sum (-1)^M rank t^A`; requires integer Maslov gradings.
    pub fn euler_characteristic(&self) -> Option<BTreeMap<Rational, i64>> {
        let mut out: BTreeMap<Rational, i64> = BTreeMap::new();
        for (q, t, c) in self.terms() {
            if !q.is_integer() {
                return None;
            }
            let sign = if q.to_integer().is_even() { 1 } else { -1 };
            *out.entry(t).or_insert(0) += sign * c as i64;
        }
        out.retain(|_, c| *c != 0);
        Some(out)
    }

    /// Signed total rank `sum (-1)^(M - f) rank`, with `f` the common fractional
    /// Maslov offset; `None` when there is no common offset.
    pub fn euler_at_one(&self) -> Option<i64> {
        let f = if self.is_zero() { Rational::zero() } else { self.common_maslov_fraction()? };
        Some(self.terms().map(|(q, _, c)| if (q - f).to_integer().is_even() { c as i64 } else { -(c as i64) }).sum())
    }

    /// Common fractional part of all Maslov exponents, if there is one.
    pub fn common_maslov_fraction(&self) -> Option<Rational> {
        let mut it = self.terms().map(|(q, _, _)| frac_part(q));
        let first = it.next()?;
        it.all(|f| f == first).then_some(first)
    }
}

fn fmt_exp(r: Rational) -> String {
    if r.is_integer() {
        let v = r.to_integer();
        if (0..10).contains(&v) {
            v.to_string()
        } else {
            format!("{{{v}}}")
        }
    } else {
        format!("{{{}/{}}}", r.numer(), r.denom())
    }
}

fn fmt_monomial(q: Rational, t: Rational, c: u64) -> String {
    let mut s = String::new();
    let one = Rational::from_integer(1);
    if !q.is_zero() {
        s.push('q');
        if q != one {
            s.push('^');
            s.push_str(&fmt_exp(q));
        }
    }
    if !t.is_zero() {
        s.push('t');
        if t != one {
            s.push('^');
            s.push_str(&fmt_exp(t));
        }
    }
    match (c, s.is_empty()) {
        (1, true) => "1".into(),
        (1, false) => s,
        (c, _) => format!("{c}{s}"),
    }
}

impl fmt::Display for PoincarePolynomial {
    /// Terms in increasing Alexander then Maslov order. A fractional Maslov offset
    /// is factored out as `q^{p/r}(...)`, taken along the diagonal when all terms
    /// lie on one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut diagonals = self.terms().map(|(q, t, _)| q - t);
        let first = diagonals.next().unwrap();
        let offset = if diagonals.all(|d| d == first) {
            Some(first).filter(|d| !d.is_integer())
        } else {
            self.common_maslov_fraction().filter(|o| !o.is_zero())
        };
        let shift = offset.unwrap_or_else(Rational::zero);
        let mut terms: Vec<(Rational, Rational, u64)> = self.terms().collect();
        terms.sort_by_key(|&(q, t, _)| (t, q));
        let body = terms
            .iter()
            .map(|&(q, t, c)| fmt_monomial(q - shift, t, c))
            .collect::<Vec<_>>()
            .join(" + ");
        match offset {
            Some(o) if body == "1" => write!(f, "q^{}", fmt_exp(o)),
            Some(o) => write!(f, "q^{}({})", fmt_exp(o), body),
            None => write!(f, "{body}"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self) -> PolyError {
        PolyError::Parse(String::from_utf8_lossy(&self.s[self.pos.min(self.s.len())..]).into_owned())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).ok()?;
        if txt.is_empty() || txt == "-" {
            self.pos = start;
            return None;
        }
        txt.parse().ok()
    }

    fn exponent(&mut self) -> Result<Rational, PolyError> {
        if !self.eat(b'^') {
            return Ok(Rational::from_integer(1));
        }
        if self.eat(b'{') {
            let num = self.integer().ok_or_else(|| self.err())?;
            let den = if self.eat(b'/') { self.integer().ok_or_else(|| self.err())? } else { 1 };
            if !self.eat(b'}') {
                return Err(self.err());
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(self.integer().ok_or_else(|| self.err())?))
        }
    }

    fn term(&mut self) -> Result<(Rational, Rational, u64), PolyError> {
        let coeff = self.integer();
        let mut q = Rational::zero();
        let mut t = Rational::zero();
        let mut any = coeff.is_some();
        if self.eat(b'q') {
            q = self.exponent()?;
            any = true;
        }
        if self.eat(b't') {
            t = self.exponent()?;
            any = true;
        }
        if !any {
            return Err(self.err());
        }
        let c = coeff.unwrap_or(1);
        if c < 0 {
            return Err(self.err());
        }
        Ok((q, t, c as u64))
    }

    fn sum(&mut self, into: &mut PoincarePolynomial, shift: Rational) -> Result<(), PolyError> {
        loop {
            let (q, t, c) = self.term()?;
            into.add(q + shift, t, c);
            if !self.eat(b'+') {
                return Ok(());
            }
        }
    }
}

impl FromStr for PoincarePolynomial {
    type Err = PolyError;

    /// Accepts the table notation, e.g. `q^{2/3}(q^{-1}t^{-1} + 1 + qt)` or
    /// `q^{-3}t^{-3} + q^{-2}t^{-2} + q + q^2t^2 + q^3t^3`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let mut out = PoincarePolynomial::new();
        let save = p.pos;
        let mut shift = None;
        if p.eat(b'q') {
            if let Ok(e) = p.exponent() {
                if p.eat(b'(') {
                    shift = Some(e);
                }
            }
        }
        match shift {
            Some(e) => {
                p.sum(&mut out, e)?;
                if !p.eat(b')') {
                    return Err(p.err());
                }
            }
            None => {
                p.pos = save;
                p.sum(&mut out, Rational::zero())?;
            }
        }
        if p.peek().is_some() {
            return Err(p.err());
        }
        Ok(out)
    }
}

/// Symmetric Laurent polynomial in `t` with `Δ(1) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlexanderPolynomial {
    pub coeffs: BTreeMap<i64, i64>,
}

impl AlexanderPolynomial {
    /// Normalizes sign so the value at `t = 1` is positive, and centers the exponents.
    pub fn from_coefficients(coeffs: BTreeMap<i64, i64>) -> Self {
        let mut c: BTreeMap<i64, i64> = coeffs.into_iter().filter(|(_, v)| *v != 0).collect();
        let (Some(&lo), Some(&hi)) = (c.keys().next(), c.keys().next_back()) else {
            return AlexanderPolynomial { coeffs: c };
        };
        let sum: i64 = c.values().sum();
        let sign = if sum < 0 { -1 } else { 1 };
        if (lo + hi) % 2 == 0 {
            let mid = (lo + hi) / 2;
            c = c.into_iter().map(|(e, v)| (e - mid, sign * v)).collect();
        } else {
            c = c.into_iter().map(|(e, v)| (e, sign * v)).collect();
        }
        AlexanderPolynomial { coeffs: c }
    }

    pub fn value_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(e, v)| self.coeffs.get(&-e) == Some(v))
    }

    /// `|Δ(-1)|`.
    pub fn determinant(&self) -> i64 {
        self.coeffs.iter().map(|(e, v)| if e.rem_euclid(2) == 0 { *v } else { -v }).sum::<i64>().abs()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }
}

impl fmt::Display for AlexanderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &v) in &self.coeffs {
            let sign = if v < 0 { "-" } else { "+" };
            if first {
                if v < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = v.abs();
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => write!(f, "t^{e}")?,
                _ => write!(f, "{a}t^{e}")?,
            }
        }
        Ok(())
    }
}
