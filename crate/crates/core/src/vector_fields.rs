//! Polynomial vector fields and differential operators on `ℝ^N` with exact
//! rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::basis_change::hoffman_log_letter;
use crate::error::{Error, Result};
use crate::prelie_trees::{magnus_components, DecoratedTree, PreLie};
use crate::series::{binomial, factorial, Rational, Series};
use crate::word_algebra::{Letter, LetterString, Word};

/// Exponent vector of a monomial, or a derivative multi-index.
pub type MultiIndex = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: Series<MultiIndex>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: Series::zero(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Polynomial {
            n,
            terms: Series::term(vec![0; n], c),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    /// The coordinate `x_{i+1}` (zero-based `i`).
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Polynomial {
            n,
            terms: Series::basis(e),
        }
    }

    pub fn monomial(exponent: MultiIndex, c: Rational) -> Self {
        Polynomial {
            n: exponent.len(),
            terms: Series::term(exponent, c),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn terms(&self) -> &Series<MultiIndex> {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: &self.terms + &other.terms,
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: &self.terms - &other.terms,
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.scale(c),
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &Polynomial) {
        self.terms.add_scaled(c, &other.terms);
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.bilinear(&other.terms, |a, b| {
                Series::basis(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        (0..k).fold(Polynomial::one(self.n), |acc, _| acc.mul(self))
    }

    /// `∂_j`, zero-based.
    pub fn partial(&self, j: usize) -> Polynomial {
        let mut out = Series::zero();
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[j] -= 1;
            out.add_term(d, c * Rational::from_integer(BigInt::from(e[j])));
        }
        Polynomial { n: self.n, terms: out }
    }

    /// `∂^α`.
    pub fn partial_multi(&self, alpha: &[u32]) -> Polynomial {
        let mut out = Series::zero();
        'terms: for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut d = e.clone();
            for (j, &a) in alpha.iter().enumerate() {
                if e[j] < a {
                    continue 'terms;
                }
                // falling factorial e!/(e-a)!
                for k in 0..a {
                    coeff *= Rational::from_integer(BigInt::from(e[j] - k));
                }
                d[j] -= a;
            }
            out.add_term(d, coeff);
        }
        Polynomial { n: self.n, terms: out }
    }

    /// The value when `self` is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        constant_value(self)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let m = e.iter().zip(x).fold(Rational::one(), |m, (&k, xi)| {
                m * num_traits::pow::pow(xi.clone(), k as usize)
            });
            acc + c * m
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    /// Parses `+ - * ^ ( )` over rationals (`3`, `0.25`, `1/3`) and the
    /// variables `x1..xN`; `x` and `y` also name the coordinate when `N = 1`.
    pub fn parse(n: usize, s: &str) -> Result<Polynomial> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0, n };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("unexpected input in polynomial `{s}`")));
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |e: &MultiIndex| {
            e.iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, k)
                    }
                })
                .collect::<Vec<_>>()
                .join("*")
        };
        f.write_str(&crate::series::format_terms(&self.terms, show))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Var(usize),
    Op(char),
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow::pow(BigInt::from(10), frac.len());
    Some(Rational::new(num, den))
}

fn tokenize(s: &str) -> Result<Vec<(Tok, String)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let v = parse_decimal(&lit).ok_or_else(|| Error::Parse(format!("bad number `{lit}`")))?;
            out.push((Tok::Num(v), lit));
        } else if c == 'x' || c == 'y' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let idx = if name.len() == 1 {
                0
            } else if c == 'x' {
                name[1..].parse::<usize>().map_err(|_| Error::Parse(format!("bad variable `{name}`")))?
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse("variables are numbered from x1".into()))?
            } else {
                return Err(Error::Parse(format!("bad variable `{name}`")));
            };
            out.push((Tok::Var(idx), name));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), c.to_string()));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, String)>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = constant_value(&d)
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| Error::Parse("division by a non-constant or zero".into()))?;
                acc = acc.scale(&(Rational::one() / c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if self.eat('-') {
            return Ok(self.unary()?.scale(&-Rational::one()));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some((Tok::Num(k), lit)) if k.is_integer() => {
                    self.pos += 1;
                    let k = k.to_integer().to_u32().ok_or_else(|| Error::Parse(format!("bad exponent `{lit}`")))?;
                    return Ok(base.pow(k));
                }
                _ => return Err(Error::Parse("exponent must be a nonnegative integer".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let (tok, lit) = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of polynomial".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Polynomial::constant(self.n, v)),
            Tok::Var(i) if i < self.n => Ok(Polynomial::var(self.n, i)),
            Tok::Var(_) => Err(Error::Parse(format!("variable `{lit}` exceeds dimension {}", self.n))),
            Tok::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(inner)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }
}

pub(crate) fn constant_value(p: &Polynomial) -> Option<Rational> {
    match p.terms.len() {
        0 => Some(Rational::zero()),
        1 => {
            let (e, c) = p.terms.iter().next()?;
            e.iter().all(|&k| k == 0).then(|| c.clone())
        }
        _ => None,
    }
}

/// A vector field `Σ V^j ∂_j` with polynomial components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    comps: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(comps: Vec<Polynomial>) -> Result<Self> {
        let n = comps.len();
        if let Some(bad) = comps.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch(bad.dim(), n));
        }
        Ok(PolyVectorField { comps })
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField {
            comps: vec![Polynomial::zero(n); n],
        }
    }

    pub fn parse(comps: &[&str]) -> Result<Self> {
        let n = comps.len();
        Self::new(comps.iter().map(|s| Polynomial::parse(n, s)).collect::<Result<_>>()?)
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyVectorField {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        PolyVectorField {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PolyVectorField {
            comps: self.comps.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// `Σ_j V^j ∂_j f`.
    pub fn lie_derivative(&self, f: &Polynomial) -> Polynomial {
        self.comps
            .iter()
            .enumerate()
            .fold(Polynomial::zero(self.dim()), |acc, (j, v)| acc.add(&v.mul(&f.partial(j))))
    }

    /// `(V ▷ W)^i = Σ_j V^j ∂_j W^i`.
    pub fn prelie(&self, w: &Self) -> Result<Self> {
        if self.dim() != w.dim() {
            return Err(Error::DimensionMismatch(self.dim(), w.dim()));
        }
        Ok(PolyVectorField {
            comps: w.comps.iter().map(|wi| self.lie_derivative(wi)).collect(),
        })
    }

    /// `[V, W] = V ▷ W − W ▷ V`.
    pub fn lie_bracket(&self, w: &Self) -> Result<Self> {
        Ok(self.prelie(w)?.sub(&w.prelie(self)?))
    }

    pub fn as_operator(&self) -> DiffOperator {
        let n = self.dim();
        let mut terms = BTreeMap::new();
        for (j, v) in self.comps.iter().enumerate() {
            if !v.is_zero() {
                let mut alpha = vec![0; n];
                alpha[j] = 1;
                terms.insert(alpha, v.clone());
            }
        }
        DiffOperator { n, terms }
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval_f64(x)).collect()
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl PreLie for PolyVectorField {
    fn zero_like(&self) -> Self {
        PolyVectorField::zero(self.dim())
    }
    fn add_scaled(&mut self, c: &Rational, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_scaled(c, b);
        }
    }
    fn prelie(&self, other: &Self) -> Self {
        PolyVectorField::prelie(self, other).expect("fields of one dimension")
    }
}

/// `Σ_α a_α ∂^α` with `|α| ≥ 1`; no stored zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOperator {
    n: usize,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

/// Multi-indices of length `n` and total order `m`.
pub fn multi_indices(n: usize, m: u32) -> Vec<MultiIndex> {
    if n == 0 {
        return if m == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=m).rev() {
        for mut rest in multi_indices(n - 1, m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn alpha_factorial(alpha: &[u32]) -> BigInt {
    alpha.iter().map(|&a| factorial(a as usize)).product()
}

impl DiffOperator {
    pub fn zero(n: usize) -> Self {
        DiffOperator {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Polynomial> {
        &self.terms
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Polynomial {
        self.terms.get(alpha).cloned().unwrap_or_else(|| Polynomial::zero(self.n))
    }

    fn add_term(&mut self, alpha: MultiIndex, p: Polynomial) {
        debug_assert!(alpha.iter().sum::<u32>() >= 1);
        let entry = self.terms.entry(alpha.clone()).or_insert_with(|| Polynomial::zero(p.dim()));
        *entry = entry.add(&p);
        if entry.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &DiffOperator) {
        for (alpha, p) in &other.terms {
            self.add_term(alpha.clone(), p.scale(c));
        }
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest `|α|` with a nonzero coefficient.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    /// The vector field when every term has `|α| = 1`.
    pub fn as_vector_field(&self) -> Option<PolyVectorField> {
        if self.order() > 1 {
            return None;
        }
        let mut comps = vec![Polynomial::zero(self.n); self.n];
        for (alpha, p) in &self.terms {
            let j = alpha.iter().position(|&a| a == 1)?;
            comps[j] = p.clone();
        }
        Some(PolyVectorField { comps })
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, f.dim()));
        }
        Ok(self.apply_unchecked(f))
    }

    fn apply_unchecked(&self, f: &Polynomial) -> Polynomial {
        self.terms
            .iter()
            .fold(Polynomial::zero(self.n), |acc, (alpha, a)| {
                acc.add(&a.mul(&f.partial_multi(alpha)))
            })
    }

    /// `(A ∘ B) f = A(B f)`, expanded with the Leibniz rule.
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let mut out = DiffOperator::zero(self.n);
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                // ∂^α (b ∂^β) = Σ_{γ ≤ α} binom(α, γ) ∂^γ b ∂^{α-γ+β}
                for gamma in sub_indices(alpha) {
                    let c: BigInt = alpha
                        .iter()
                        .zip(&gamma)
                        .map(|(&x, &g)| binomial(x as usize, g as usize))
                        .product();
                    let coeff = a.mul(&b.partial_multi(&gamma)).scale(&Rational::from_integer(c));
                    let idx: MultiIndex = alpha
                        .iter()
                        .zip(&gamma)
                        .zip(beta)
                        .map(|((&x, &g), &y)| x - g + y)
                        .collect();
                    out.add_term(idx, coeff);
                }
            }
        }
        Ok(out)
    }

    /// True iff `A(fg) = A(f) g + f A(g)` for every pair.
    pub fn is_derivation(&self, pairs: &[(Polynomial, Polynomial)]) -> bool {
        pairs.iter().all(|(f, g)| {
            let lhs = self.apply_unchecked(&f.mul(g));
            let rhs = self.apply_unchecked(f).mul(g).add(&f.mul(&self.apply_unchecked(g)));
            lhs == rhs
        })
    }
}

fn sub_indices(alpha: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |g| {
                    let mut v = prefix.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
    }
    out
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(alpha, p)| {
                let d: Vec<String> = alpha
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(j, &a)| if a == 1 { format!("∂{}", j + 1) } else { format!("∂{}^{}", j + 1, a) })
                    .collect();
                format!("({}) {}", p, d.join(""))
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `D_{i^(m)} = Σ_{|α|=m} (1/α!) V^α ∂^α`.
pub fn diff_op_d(v: &PolyVectorField, m: u32) -> DiffOperator {
    let n = v.dim();
    let mut out = DiffOperator::zero(n);
    for alpha in multi_indices(n, m) {
        let coeff = alpha
            .iter()
            .enumerate()
            .fold(Polynomial::one(n), |acc, (j, &a)| acc.mul(&v.comps[j].pow(a)));
        let coeff = coeff.scale(&Rational::new(BigInt::one(), alpha_factorial(&alpha)));
        if !coeff.is_zero() {
            out.add_term(alpha, coeff);
        }
    }
    out
}

/// `D_w = D_{a1} ∘ … ∘ D_{an}`; letter `i^(m)` uses `fields[i]`.
pub fn word_operator(w: &Word, fields: &[PolyVectorField]) -> Result<DiffOperator> {
    let mut acc: Option<DiffOperator> = None;
    for a in w.letters().iter().rev() {
        let v = fields.get(a.base as usize).ok_or(Error::UnknownDecoration(a.base))?;
        let d = diff_op_d(v, a.power);
        acc = Some(match acc {
            None => d,
            Some(prev) => d.compose(&prev)?,
        });
    }
    acc.ok_or(Error::EmptyWord)
}

/// `D_w f = D_{a1}(D_{a2}(… D_{an} f))`; `f` itself for the empty word.
pub fn apply_word(w: &Word, fields: &[PolyVectorField], f: &Polynomial) -> Result<Polynomial> {
    let mut g = f.clone();
    for a in w.letters().iter().rev() {
        if g.is_zero() {
            break;
        }
        let v = fields.get(a.base as usize).ok_or(Error::UnknownDecoration(a.base))?;
        g = diff_op_d(v, a.power).apply(&g)?;
    }
    Ok(g)
}

/// `Ω_n^▷(V)`.
pub fn renormalised_vf(v: &PolyVectorField, n: usize) -> PolyVectorField {
    magnus_components(v, n).pop().unwrap_or_else(|| PolyVectorField::zero(v.dim()))
}

/// `μ̄((ī^(m))⁰)`: the alternating sum over compositions of `D_{i^(j)}`.
pub fn renormalised_op_from_words(v: &PolyVectorField, m: u32) -> Result<DiffOperator> {
    let fields = [PolyVectorField::zero(v.dim()), v.clone()];
    renormalised_letter_operator(&Letter::jump(1, m), &fields)
}

/// `V_a = μ̄(ā⁰)` for any letter, as a differential operator.
pub fn renormalised_letter_operator(a: &Letter, fields: &[PolyVectorField]) -> Result<DiffOperator> {
    let n = fields.first().map(PolyVectorField::dim).unwrap_or(0);
    let mut out = DiffOperator::zero(n);
    for (w, c) in &hoffman_log_letter(a) {
        out.add_scaled(c, &word_operator(w, fields)?);
    }
    Ok(out)
}

/// `V^{(k)}(U_1, …, U_k)` computed by peeling off one directional derivative
/// at a time, so the arguments are never differentiated.
fn multilinear(v: &PolyVectorField, args: &[PolyVectorField]) -> PolyVectorField {
    match args.split_first() {
        None => v.clone(),
        Some((u, rest)) => {
            let n = v.dim();
            let mut out = PolyVectorField::zero(n);
            for j in 0..n {
                let uj = &u.comps[j];
                if uj.is_zero() {
                    continue;
                }
                let dv = PolyVectorField {
                    comps: v.comps.iter().map(|c| c.partial(j)).collect(),
                };
                if dv.is_zero() {
                    continue;
                }
                let inner = multilinear(&dv, rest);
                for (o, p) in out.comps.iter_mut().zip(&inner.comps) {
                    *o = o.add(&uj.mul(p));
                }
            }
            out
        }
    }
}

/// `F(B⁺_i(τ1…τk)) = V_i^{(k)}(F(τ1), …, F(τk))`, `F(•_i) = V_i`.
pub fn elementary_differential(t: &DecoratedTree, fields: &[PolyVectorField]) -> Result<PolyVectorField> {
    let v = fields
        .get(t.decoration() as usize)
        .ok_or(Error::UnknownDecoration(t.decoration()))?;
    let args = t
        .children()
        .iter()
        .map(|c| elementary_differential(c, fields))
        .collect::<Result<Vec<_>>>()?;
    Ok(multilinear(v, &args))
}

/// Linear extension of [`elementary_differential`].
pub fn elementary_differential_series(
    s: &crate::prelie_trees::TreeSeries,
    fields: &[PolyVectorField],
) -> Result<PolyVectorField> {
    let n = fields.first().map(PolyVectorField::dim).unwrap_or(0);
    let mut out = PolyVectorField::zero(n);
    for (t, c) in s {
        out.add_scaled(c, &elementary_differential(t, fields)?);
    }
    Ok(out)
}
