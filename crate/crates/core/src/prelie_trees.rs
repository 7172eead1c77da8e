//! Free pre-Lie algebra on decorated non-planar rooted trees.
//!
//! Trees are kept canonical (children sorted), so structural equality is
//! isomorphism. Forests are commutative monomials of trees and carry the
//! Guin–Oudom extension of grafting and the Grossman–Larson product.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{binomial, factorial, q, Rational, Series};

/// Canonical non-planar rooted tree. Field order matters: the derived `Ord`
/// compares size first, so children sort by size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DecoratedTree {
    size: usize,
    decoration: u32,
    children: Vec<DecoratedTree>,
}

impl DecoratedTree {
    pub fn leaf(decoration: u32) -> Self {
        DecoratedTree {
            size: 1,
            decoration,
            children: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn decoration(&self) -> u32 {
        self.decoration
    }

    pub fn children(&self) -> &[DecoratedTree] {
        &self.children
    }

    /// `n` vertices in a chain.
    pub fn ladder(n: usize, decoration: u32) -> Self {
        let mut t = Self::leaf(decoration);
        for _ in 1..n {
            t = b_plus(&Forest::new(vec![t]), decoration);
        }
        t
    }

    /// A root with `k` leaf children.
    pub fn star(k: usize, decoration: u32) -> Self {
        b_plus(&Forest::new(vec![Self::leaf(decoration); k]), decoration)
    }

    fn with_children(decoration: u32, mut children: Vec<DecoratedTree>) -> Self {
        children.sort();
        DecoratedTree {
            size: 1 + children.iter().map(|c| c.size).sum::<usize>(),
            decoration,
            children,
        }
    }

    /// Nested-bracket notation, e.g. `[i[i][i[i]]]`.
    pub fn notation<F: Fn(u32) -> String + Copy>(&self, label: F) -> String {
        let mut s = String::from("[");
        s.push_str(&label(self.decoration));
        for c in &self.children {
            s.push_str(&c.notation(label));
        }
        s.push(']');
        s
    }

    /// Parses nested-bracket notation. An empty label or `i` means
    /// decoration 0; numeric labels are taken literally.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_tree(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input in tree `{s}`")));
        }
        Ok(t)
    }

    fn vertices_preorder(&self, out: &mut Vec<u32>) {
        out.push(self.decoration);
        for c in &self.children {
            c.vertices_preorder(out);
        }
    }

    pub fn decorations(&self) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.size);
        self.vertices_preorder(&mut v);
        v
    }
}

fn parse_tree(chars: &[char], pos: &mut usize) -> Result<DecoratedTree> {
    let err = |msg: &str| Error::Parse(format!("tree notation: {msg}"));
    if chars.get(*pos) != Some(&'[') {
        return Err(err("expected `[`"));
    }
    *pos += 1;
    let start = *pos;
    while *pos < chars.len() && chars[*pos] != '[' && chars[*pos] != ']' {
        *pos += 1;
    }
    let label: String = chars[start..*pos].iter().collect();
    let decoration = match label.as_str() {
        "" | "i" => 0,
        l => l.parse().map_err(|_| err("bad decoration"))?,
    };
    let mut children = Vec::new();
    while chars.get(*pos) == Some(&'[') {
        children.push(parse_tree(chars, pos)?);
    }
    if chars.get(*pos) != Some(&']') {
        return Err(err("expected `]`"));
    }
    *pos += 1;
    Ok(DecoratedTree::with_children(decoration, children))
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation(|d| d.to_string()))
    }
}

/// Commutative monomial of trees; the empty forest is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Forest(Vec<DecoratedTree>);

impl Forest {
    pub fn new(mut trees: Vec<DecoratedTree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn single(t: DecoratedTree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[DecoratedTree] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|t| t.size).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Forest::new(v)
    }
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("𝟏");
        }
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

pub type TreeSeries = Series<DecoratedTree>;
pub type ForestSeries = Series<Forest>;

pub fn b_plus(f: &Forest, decoration: u32) -> DecoratedTree {
    DecoratedTree::with_children(decoration, f.0.clone())
}

/// Grafts every tree of `xs` onto some vertex of `t`, summed over all
/// assignments of trees to vertices.
fn graft_multi(xs: &[DecoratedTree], t: &DecoratedTree) -> TreeSeries {
    if xs.is_empty() {
        return TreeSeries::basis(t.clone());
    }
    let k = t.children.len();
    let slots = k + 1;
    let mut out = TreeSeries::zero();
    let mut assign = vec![0usize; xs.len()];
    loop {
        // slot k is the root itself
        let mut root_new: Vec<DecoratedTree> = Vec::new();
        let mut per_child: Vec<Vec<DecoratedTree>> = vec![Vec::new(); k];
        for (x, &s) in xs.iter().zip(&assign) {
            if s == k {
                root_new.push(x.clone());
            } else {
                per_child[s].push(x.clone());
            }
        }
        let mut partial: Series<Vec<DecoratedTree>> = Series::basis(root_new);
        for (child, extra) in t.children.iter().zip(&per_child) {
            let grafted = graft_multi(extra, child);
            partial = partial.bilinear(&grafted, |acc, g| {
                let mut v = acc.clone();
                v.push(g.clone());
                Series::basis(v)
            });
        }
        for (children, c) in &partial {
            out.add_term(DecoratedTree::with_children(t.decoration, children.clone()), c.clone());
        }
        // next assignment in base `slots`
        let mut i = 0;
        loop {
            if i == assign.len() {
                return out;
            }
            assign[i] += 1;
            if assign[i] < slots {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// `t1 ↷ t2`: attach the root of `t1` under each vertex of `t2`.
pub fn graft(t1: &DecoratedTree, t2: &DecoratedTree) -> TreeSeries {
    graft_multi(std::slice::from_ref(t1), t2)
}

pub fn graft_series(a: &TreeSeries, b: &TreeSeries) -> TreeSeries {
    a.bilinear(b, graft)
}

/// Guin–Oudom extension `X ▷ Y`: each tree of `X` is grafted onto some
/// vertex of `Y`, summed over all such maps. `X ▷ 𝟏 = ε(X)`.
pub fn go_extend(x: &Forest, y: &Forest) -> ForestSeries {
    if y.is_unit() {
        return if x.is_unit() {
            ForestSeries::basis(Forest::unit())
        } else {
            ForestSeries::zero()
        };
    }
    let xs = x.trees();
    let ys = y.trees();
    let k = ys.len();
    let mut out = ForestSeries::zero();
    let mut assign = vec![0usize; xs.len()];
    loop {
        let mut groups: Vec<Vec<DecoratedTree>> = vec![Vec::new(); k];
        for (t, &s) in xs.iter().zip(&assign) {
            groups[s].push(t.clone());
        }
        let mut partial = ForestSeries::basis(Forest::unit());
        for (target, group) in ys.iter().zip(&groups) {
            let grafted = graft_multi(group, target);
            partial = partial.bilinear(&grafted, |f, t| ForestSeries::basis(f.mul(&Forest::single(t.clone()))));
        }
        out += &partial;
        let mut i = 0;
        loop {
            if i == assign.len() {
                return out;
            }
            assign[i] += 1;
            if assign[i] < k {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

pub fn go_extend_series(a: &ForestSeries, b: &ForestSeries) -> ForestSeries {
    a.bilinear(b, go_extend)
}

/// Unshuffle coproduct on forests: sum over sub-multisets by position.
pub fn forest_unshuffle(x: &Forest) -> Vec<(Forest, Forest)> {
    let n = x.0.len();
    (0u64..(1u64 << n))
        .map(|mask| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (i, t) in x.0.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a.push(t.clone());
                } else {
                    b.push(t.clone());
                }
            }
            (Forest::new(a), Forest::new(b))
        })
        .collect()
}

/// `X ∗ Y = X′·(X″ ▷ Y)`.
pub fn grossman_larson_forests(x: &Forest, y: &Forest) -> ForestSeries {
    let mut out = ForestSeries::zero();
    for (x1, x2) in forest_unshuffle(x) {
        let right = go_extend(&x2, y);
        for (f, c) in &right {
            out.add_term(x1.mul(f), c.clone());
        }
    }
    out
}

pub fn grossman_larson(a: &ForestSeries, b: &ForestSeries) -> ForestSeries {
    a.bilinear(b, grossman_larson_forests)
}

fn gl_truncated(a: &ForestSeries, b: &ForestSeries, max_degree: usize) -> ForestSeries {
    let mut out = ForestSeries::zero();
    for (x, cx) in a {
        for (y, cy) in b {
            if x.degree() + y.degree() > max_degree {
                continue;
            }
            out.add_scaled(&(cx * cy), &grossman_larson_forests(x, y));
        }
    }
    out
}

/// Symmetric-algebra power `x^n` of a single vertex: the forest of `n` leaves.
pub fn vertex_power(n: usize, decoration: u32) -> Forest {
    Forest::new(vec![DecoratedTree::leaf(decoration); n])
}

/// `exp(x) = Σ x^n/n!` with symmetric-algebra powers, through `max_degree`.
pub fn gl_exp(decoration: u32, max_degree: usize) -> ForestSeries {
    (0..=max_degree)
        .map(|n| (vertex_power(n, decoration), Rational::new(BigInt::one(), factorial(n))))
        .collect()
}

/// `exp∗(Y) = Σ Y^{∗k}/k!` for `Y` without unit term, through `max_degree`.
pub fn gl_exp_star(y: &ForestSeries, max_degree: usize) -> Result<ForestSeries> {
    if !y.coeff(&Forest::unit()).is_zero() {
        return Err(Error::NotAugmented);
    }
    let mut out = ForestSeries::basis(Forest::unit());
    let mut power = ForestSeries::basis(Forest::unit());
    for k in 1..=max_degree {
        power = gl_truncated(&power, y, max_degree);
        out.add_scaled(&Rational::new(BigInt::one(), factorial(k)), &power);
    }
    Ok(out)
}

/// `log∗(G) = Σ (-1)^{k-1}/k (G - 1)^{∗k}` through `max_degree`.
pub fn gl_log_star(g: &ForestSeries, max_degree: usize) -> Result<ForestSeries> {
    if !g.coeff(&Forest::unit()).is_one() {
        return Err(Error::MalformedUnit);
    }
    let h = g.filter(|f| !f.is_unit() && f.degree() <= max_degree);
    let mut out = ForestSeries::zero();
    let mut power = ForestSeries::basis(Forest::unit());
    for k in 1..=max_degree {
        power = gl_truncated(&power, &h, max_degree);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out.add_scaled(&q(sign, k as i64), &power);
    }
    Ok(out)
}

/// Degree-`n` part of a forest series.
pub fn degree_part(s: &ForestSeries, n: usize) -> ForestSeries {
    s.filter(|f| f.degree() == n)
}

/// `Σ_k Σ_{j1+…+jk=n} (-1)^{k-1}/k x^{j1} ∗ … ∗ x^{jk}`. With `divided` the
/// powers are the divided powers `x^j/j!`, which are the homogeneous parts of
/// `exp(x)`; without it they are plain symmetric-algebra powers.
pub fn log_exp_by_compositions(n: usize, decoration: u32, divided: bool) -> ForestSeries {
    let mut out = ForestSeries::zero();
    for c in crate::basis_change::compositions(n) {
        let k = c.len();
        let mut acc = ForestSeries::basis(Forest::unit());
        for &j in &c {
            let scale = if divided {
                Rational::new(BigInt::one(), factorial(j))
            } else {
                Rational::one()
            };
            let xj = ForestSeries::term(vertex_power(j, decoration), scale);
            acc = grossman_larson(&acc, &xj);
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out.add_scaled(&q(sign, k as i64), &acc);
    }
    out
}

/// Reads a forest series as a tree series; `None` if some term is not a
/// single tree.
pub fn as_tree_series(s: &ForestSeries) -> Option<TreeSeries> {
    let mut out = TreeSeries::zero();
    for (f, c) in s {
        match f.trees() {
            [t] => out.add_term(t.clone(), c.clone()),
            _ => return None,
        }
    }
    Some(out)
}

pub fn tree_series_as_forests(s: &TreeSeries) -> ForestSeries {
    s.map_keys(|t| Forest::single(t.clone()))
}

/// Minimal interface needed by the Magnus recursion.
pub trait PreLie: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, c: &Rational, other: &Self);
    fn prelie(&self, other: &Self) -> Self;
}

impl PreLie for TreeSeries {
    fn zero_like(&self) -> Self {
        TreeSeries::zero()
    }
    fn add_scaled(&mut self, c: &Rational, other: &Self) {
        Series::add_scaled(self, c, other);
    }
    fn prelie(&self, other: &Self) -> Self {
        graft_series(self, other)
    }
}

/// Bernoulli numbers with `B1 = -1/2`.
pub fn bernoulli(k: usize) -> Rational {
    let mut b: Vec<Rational> = Vec::with_capacity(k + 1);
    for n in 0..=k {
        if n == 0 {
            b.push(Rational::one());
            continue;
        }
        let s = (0..n).fold(Rational::zero(), |acc, j| {
            acc + Rational::from_integer(binomial(n + 1, j)) * &b[j]
        });
        b.push(-s / Rational::from_integer(BigInt::from(n + 1)));
    }
    b.swap_remove(k)
}

/// `Ω_1, …, Ω_n` of the pre-Lie Magnus expansion of `a` by the Bernoulli
/// recursion `Ω_n = Σ_k B_k/k! Σ_{i1+…+ik=n-1} Ω_{i1} ▷ (… (Ω_{ik} ▷ a))`.
pub fn magnus_components<T: PreLie>(a: &T, n: usize) -> Vec<T> {
    let mut omega: Vec<T> = Vec::with_capacity(n);
    if n == 0 {
        return omega;
    }
    omega.push(a.clone());
    // nested[k][m] = Σ_{i1+…+ik=m} Ω_{i1} ▷ (… (Ω_{ik} ▷ a)), of degree m+1
    let mut nested: Vec<Vec<T>> = vec![vec![a.zero_like(); n]; n];
    nested[0][0] = a.clone();
    for deg in 2..=n {
        let m = deg - 1;
        let mut total = a.zero_like();
        for k in 1..=m {
            let mut acc = a.zero_like();
            for i in 1..=m {
                let rest = m - i;
                let live = if k == 1 { rest == 0 } else { rest + 1 >= k };
                if live {
                    acc.add_scaled(&Rational::one(), &omega[i - 1].prelie(&nested[k - 1][rest]));
                }
            }
            let bk = bernoulli(k);
            if !bk.is_zero() {
                total.add_scaled(&(bk / Rational::from_integer(factorial(k))), &acc);
            }
            nested[k][m] = acc;
        }
        omega.push(total);
    }
    omega
}

/// `σ(•) = 1`, `σ(B⁺(τ1^{k1}…)) = Π k_i! σ(τ_i)^{k_i}`.
pub fn symmetry_factor(t: &DecoratedTree) -> BigInt {
    let mut out = BigInt::one();
    let mut i = 0;
    let ch = &t.children;
    while i < ch.len() {
        let mut j = i;
        while j < ch.len() && ch[j] == ch[i] {
            j += 1;
        }
        let k = j - i;
        let s = symmetry_factor(&ch[i]);
        out *= factorial(k);
        for _ in 0..k {
            out *= &s;
        }
        i = j;
    }
    out
}

/// All trees with `n` vertices, every vertex decorated by `decoration`.
pub fn trees_of_size(n: usize, decoration: u32) -> Vec<DecoratedTree> {
    let mut level: BTreeSet<DecoratedTree> = BTreeSet::new();
    if n == 0 {
        return Vec::new();
    }
    level.insert(DecoratedTree::leaf(decoration));
    let leaf = DecoratedTree::leaf(decoration);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for t in &level {
            for (g, _) in &graft(&leaf, t) {
                next.insert(g.clone());
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Magnus series through `max_degree` as `log∗(exp(x))`.
pub fn magnus_by_log_exp(decoration: u32, max_degree: usize) -> Result<ForestSeries> {
    gl_log_star(&gl_exp(decoration, max_degree), max_degree)
}

/// Magnus series through `max_degree` by solving `exp∗(Ω) = exp(x)` degree
/// by degree: the degree-`n` part of `exp∗(Ω_{<n})` differs from that of
/// `exp∗(Ω)` by exactly `Ω_n`.
pub fn magnus_by_backward_error(decoration: u32, max_degree: usize) -> Result<ForestSeries> {
    let target = gl_exp(decoration, max_degree);
    let mut omega = ForestSeries::zero();
    for n in 1..=max_degree {
        let partial = gl_exp_star(&omega, n)?;
        let defect = degree_part(&(&target - &partial), n);
        omega += &defect;
    }
    Ok(omega)
}

/// `c_τ`: the coefficient of `τ` in `log∗(exp(x))`.
pub fn tree_coefficient(t: &DecoratedTree) -> Result<Rational> {
    let n = t.size();
    let series = magnus_by_log_exp(t.decoration(), n)?;
    Ok(series.coeff(&Forest::single(t.clone())))
}

/// `Σ_τ c_τ τ` over all trees with at most `max_degree` vertices.
pub fn tree_sum(coefficient: impl Fn(&DecoratedTree) -> Rational, max_degree: usize) -> TreeSeries {
    (1..=max_degree)
        .flat_map(|n| trees_of_size(n, 0))
        .map(|t| {
            let c = coefficient(&t);
            (t, c)
        })
        .collect()
}
