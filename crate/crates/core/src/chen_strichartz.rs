//! Lie-series form of the flowmap logarithm: Eulerian coefficients, Dynkin
//! bracketing, and the truncated expansion in renormalised (J) and Itô (I)
//! integral coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::basis_change::{exp_h_dagger, zero_word_in_word_basis, ZeroWord};
use crate::error::{Error, Result};
use crate::quasi_shuffle_hopf::{conv_log_id, product, Product};
use crate::series::{binomial, factorial, Rational, Series};
use crate::word_algebra::{AlphabetSpec, Letter, LetterString, TensorSeries, Word, WordSeries};

/// A bijection of `{1..n}` stored as its one-line images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::InvalidPermutation(images));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        Permutation(inv)
    }

    /// Positional action: letter `a_{σ(i)}` goes to position `i`.
    pub fn act<W: LetterString>(&self, w: &W) -> W {
        W::from_letters(self.0.iter().map(|&s| w.letters()[s - 1]).collect())
    }

    /// All of `S_n` in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation(cur.clone()));
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i + 1);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn descents(p: &Permutation) -> usize {
    p.0.windows(2).filter(|w| w[0] > w[1]).count()
}

/// Word of `n` distinct letters used to read coefficients off the oracle.
fn distinct_word(n: usize) -> Word {
    Word::new((1..=n as u32).map(|b| Letter::jump(b, 1)).collect())
}

/// `c_σ` read from the Eulerian idempotent: the coefficient of `σ⁻¹(w)` in
/// `log^⧢(w)` for a word of distinct letters.
pub fn eulerian_coefficient(p: &Permutation) -> Rational {
    let w = distinct_word(p.len());
    conv_log_id(Product::Shuffle, &w).coeff(&p.inverse().act(&w))
}

/// Every `c_σ` of `S_n` from a single oracle evaluation.
pub fn eulerian_table(n: usize) -> BTreeMap<Permutation, Rational> {
    let w = distinct_word(n);
    let log = conv_log_id(Product::Shuffle, &w);
    Permutation::all(n)
        .into_iter()
        .map(|p| {
            let c = log.coeff(&p.inverse().act(&w));
            (p, c)
        })
        .collect()
}

/// `(-1)^d / (n · binom(n-1, d))`.
pub fn eulerian_classical(p: &Permutation) -> Rational {
    let (n, d) = (p.len(), descents(p));
    let sign = if d % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    Rational::new(sign, BigInt::from(n) * binomial(n - 1, d))
}

/// `(-1)^d / n · binom(n-1, d)`, with the binomial as a factor.
pub fn eulerian_binomial_factor(p: &Permutation) -> Rational {
    let (n, d) = (p.len(), descents(p));
    let sign = if d % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    Rational::new(sign * binomial(n - 1, d), BigInt::from(n))
}

/// `[a1 a2 … an]_L = [a1, [a2, … [a_{n-1}, a_n] …]]` in the concatenation
/// algebra.
pub fn left_bracketing(w: &Word) -> Result<WordSeries> {
    let ls = w.letters();
    let (last, rest) = ls.split_last().ok_or(Error::EmptyWord)?;
    let mut acc = WordSeries::basis(Word::letter(*last));
    for a in rest.iter().rev() {
        let a = Word::letter(*a);
        let mut next = WordSeries::zero();
        for (u, c) in &acc {
            next.add_term(a.concat(u), c.clone());
            next.add_term(u.concat(&a), -c);
        }
        acc = next;
    }
    Ok(acc)
}

fn left_bracketing_series(p: &WordSeries) -> Result<WordSeries> {
    let mut out = WordSeries::zero();
    for (w, c) in p {
        out.add_scaled(c, &left_bracketing(w)?);
    }
    Ok(out)
}

/// Dynkin–Specht–Wever: a length-`n` homogeneous `P` is Lie iff
/// `[P]_L = n P`.
pub fn dynkin_check(p: &WordSeries, n: usize) -> Result<bool> {
    if let Some(w) = p.keys().find(|w| w.len() != n) {
        return Err(Error::NotHomogeneous(w.len()));
    }
    if n == 0 {
        return Ok(p.is_zero());
    }
    let scaled = p.scale(&Rational::from_integer(BigInt::from(n)));
    Ok(left_bracketing_series(p)? == scaled)
}

/// Splits a series by word length.
pub fn length_components(p: &WordSeries) -> BTreeMap<usize, WordSeries> {
    let mut out: BTreeMap<usize, WordSeries> = BTreeMap::new();
    for (w, c) in p {
        out.entry(w.len()).or_default().add_term(w.clone(), c.clone());
    }
    out
}

/// Dynkin check on every length component.
pub fn is_lie_series(p: &WordSeries) -> bool {
    length_components(p)
        .iter()
        .all(|(n, comp)| dynkin_check(comp, *n).unwrap_or(false))
}

/// `ψ(w) = Σ_σ (1/n) c_σ [σ(w)]_L`, `n = |w|`.
pub fn psi(w: &Word) -> WordSeries {
    psi_with(w, &eulerian_table(w.len()))
}

fn psi_with(w: &Word, table: &BTreeMap<Permutation, Rational>) -> WordSeries {
    let n = w.len();
    if n == 0 {
        return WordSeries::zero();
    }
    let mut inner = WordSeries::zero();
    for (p, c) in table {
        inner.add_term(p.act(w), c.clone());
    }
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
    left_bracketing_series(&inner)
        .expect("nonempty words")
        .scale(&inv_n)
}

/// Caches `c_σ` tables by length so repeated `ψ` calls share oracle work.
struct EulerianCache(BTreeMap<usize, BTreeMap<Permutation, Rational>>);

impl EulerianCache {
    fn up_to(n: usize) -> Self {
        EulerianCache((1..=n).map(|k| (k, eulerian_table(k))).collect())
    }

    fn psi(&self, w: &Word) -> WordSeries {
        match self.0.get(&w.len()) {
            Some(t) => psi_with(w, t),
            None => psi(w),
        }
    }

    fn psi_series(&self, s: &WordSeries) -> WordSeries {
        let mut out = WordSeries::zero();
        for (w, c) in s {
            out.add_scaled(c, &self.psi(w));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Coordinates {
    /// Renormalised integrals `J_w`; the integral side multiplies by `⧢`.
    J,
    /// Itô integrals `I_w`; the integral side multiplies by `⋆`.
    I,
}

impl Coordinates {
    pub fn integral_product(self) -> Product {
        match self {
            Coordinates::J => Product::Shuffle,
            Coordinates::I => Product::QuasiShuffle,
        }
    }
}

impl fmt::Display for Coordinates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coordinates::J => "J",
            Coordinates::I => "I",
        })
    }
}

impl std::str::FromStr for Coordinates {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "J" | "j" => Ok(Coordinates::J),
            "I" | "i" => Ok(Coordinates::I),
            _ => Err(Error::Parse(format!("unknown basis `{s}`, expected I or J"))),
        }
    }
}

/// `log φ_t ≈ Σ_w X_w(t) V_{P(w)}` truncated at `max_grade`, where `X` is
/// `J` or `I` and `P(w)` is a Lie polynomial in the renormalised fields.
/// Letters on the operator side denote `V_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogFlowmap {
    pub basis: Coordinates,
    pub max_grade: usize,
    pub terms: BTreeMap<Word, WordSeries>,
}

impl LogFlowmap {
    pub fn as_tensor(&self) -> TensorSeries {
        let mut out = TensorSeries::zero();
        for (w, p) in &self.terms {
            for (v, c) in p {
                out.add_term((w.clone(), v.clone()), c.clone());
            }
        }
        out
    }

    /// Terms whose Lie polynomial is nonzero.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (&Word, &WordSeries)> {
        self.terms.iter().filter(|(_, p)| !p.is_zero())
    }

    pub fn all_lie(&self) -> bool {
        self.terms.values().all(is_lie_series)
    }
}

/// Builds the truncated logarithm. The J-basis term at `w` is `ψ(w)`. The
/// I-basis term is `ψ` applied to `exp_H†(w)`, the transport of the J form
/// through `J_v = Σ_u ⟨v⁰, u⟩ I_u`.
pub fn log_flowmap(basis: Coordinates, spec: &AlphabetSpec, max_grade: usize) -> LogFlowmap {
    let words = spec.words_up_to(max_grade);
    let max_len = words.iter().map(Word::len).max().unwrap_or(0);
    let cache = EulerianCache::up_to(max_len);
    let terms: Vec<(Word, WordSeries)> = words
        .par_iter()
        .map(|w| {
            let p = match basis {
                Coordinates::J => cache.psi(w),
                Coordinates::I => cache.psi_series(&zero_to_word(&exp_h_dagger(w))),
            };
            (w.clone(), p)
        })
        .collect();
    LogFlowmap {
        basis,
        max_grade,
        terms: terms.into_iter().collect(),
    }
}

fn zero_to_word(s: &Series<ZeroWord>) -> WordSeries {
    s.map_keys(ZeroWord::to_word)
}

/// `Σ_σ (1/|σ|) c_σ [exp_H†(σ(w))]_L` with the single prefactor `1/|w|`
/// applied to every bracketed length.
pub fn single_prefactor_term(w: &Word) -> WordSeries {
    let n = w.len();
    if n == 0 {
        return WordSeries::zero();
    }
    let mut inner = WordSeries::zero();
    for (p, c) in eulerian_table(n) {
        inner.add_scaled(&c, &zero_to_word(&exp_h_dagger(&p.act(w))));
    }
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
    left_bracketing_series(&inner).expect("nonempty words").scale(&inv_n)
}

/// Words where the single-prefactor form disagrees with the transported
/// I-basis term.
pub fn single_prefactor_mismatches(spec: &AlphabetSpec, max_grade: usize) -> Vec<(Word, WordSeries, WordSeries)> {
    let i_form = log_flowmap(Coordinates::I, spec, max_grade);
    i_form
        .terms
        .iter()
        .filter_map(|(w, p)| {
            let lit = single_prefactor_term(w);
            (lit != *p).then(|| (w.clone(), lit, p.clone()))
        })
        .collect()
}

/// Product on the tensor square: `p` on the integral side, concatenation
/// on the operator side, integral grades above `max_grade` dropped.
fn tensor_mixed(p: Product, a: &TensorSeries, b: &TensorSeries, max_grade: usize) -> TensorSeries {
    let mut out = TensorSeries::zero();
    for ((a1, a2), ca) in a {
        for ((b1, b2), cb) in b {
            if a1.grade() + b1.grade() > max_grade {
                continue;
            }
            let right = a2.concat(b2);
            let c = ca * cb;
            for (x, cx) in &product(p, a1, b1) {
                out.add_term((x.clone(), right.clone()), &c * cx);
            }
        }
    }
    out
}

fn unit_tensor() -> TensorSeries {
    TensorSeries::basis((Word::empty(), Word::empty()))
}

/// `exp(T) = Σ_k T^k/k!` in the mixed tensor algebra; `T` must have no
/// `𝟏⊗·` part.
pub fn tensor_exp(p: Product, t: &TensorSeries, max_grade: usize) -> Result<TensorSeries> {
    if t.keys().any(|(a, _)| a.is_empty()) {
        return Err(Error::NotAugmented);
    }
    let mut out = unit_tensor();
    let mut power = unit_tensor();
    for k in 1..=max_grade {
        power = tensor_mixed(p, &power, t, max_grade);
        if power.is_zero() {
            break;
        }
        out.add_scaled(&Rational::new(BigInt::one(), factorial(k)), &power);
    }
    Ok(out)
}

/// `log(G) = Σ_k (-1)^{k-1}/k (G - 𝟏⊗𝟏)^k`; `G` must start with `𝟏⊗𝟏`.
pub fn tensor_log(p: Product, g: &TensorSeries, max_grade: usize) -> Result<TensorSeries> {
    let unit = (Word::empty(), Word::empty());
    if !g.coeff(&unit).is_one() || g.keys().any(|(a, b)| a.is_empty() && !b.is_empty()) {
        return Err(Error::MalformedUnit);
    }
    let x = g - &unit_tensor();
    let mut out = TensorSeries::zero();
    let mut power = unit_tensor();
    for k in 1..=max_grade {
        power = tensor_mixed(p, &power, &x, max_grade);
        if power.is_zero() {
            break;
        }
        let sign: i64 = if k % 2 == 1 { 1 } else { -1 };
        out.add_scaled(&Rational::new(BigInt::from(sign), BigInt::from(k)), &power);
    }
    Ok(out)
}

/// The flowmap itself in the given coordinates: `Σ_w w⊗w` for J and
/// `Σ_w w⊗exp_H†(w)` for I, including `𝟏⊗𝟏`.
pub fn flowmap_tensor(basis: Coordinates, spec: &AlphabetSpec, max_grade: usize) -> TensorSeries {
    let mut out = unit_tensor();
    for w in spec.words_up_to(max_grade) {
        match basis {
            Coordinates::J => out.add_term((w.clone(), w), Rational::one()),
            Coordinates::I => {
                for (v, c) in &exp_h_dagger(&w) {
                    out.add_term((w.clone(), v.to_word()), c.clone());
                }
            }
        }
    }
    out
}

/// `exp(log φ) = φ` in the mixed tensor algebra.
pub fn verify_exp_of_log(basis: Coordinates, spec: &AlphabetSpec, max_grade: usize) -> bool {
    let log = log_flowmap(basis, spec, max_grade);
    match tensor_exp(basis.integral_product(), &log.as_tensor(), max_grade) {
        Ok(e) => e == flowmap_tensor(basis, spec, max_grade),
        Err(_) => false,
    }
}

/// `log φ` computed directly in the tensor algebra equals the ψ-built form.
pub fn verify_log_of_flowmap(basis: Coordinates, spec: &AlphabetSpec, max_grade: usize) -> bool {
    let log = log_flowmap(basis, spec, max_grade);
    match tensor_log(basis.integral_product(), &flowmap_tensor(basis, spec, max_grade), max_grade) {
        Ok(l) => l == log.as_tensor(),
        Err(_) => false,
    }
}

/// Transports the J form into I coordinates via `J_v = Σ_u ⟨v⁰,u⟩ I_u`.
pub fn transport_j_to_i(j: &LogFlowmap) -> LogFlowmap {
    let mut terms: BTreeMap<Word, WordSeries> = BTreeMap::new();
    for (v, p) in &j.terms {
        for (u, c) in &zero_word_in_word_basis(&ZeroWord::of(v)) {
            terms.entry(u.clone()).or_default().add_scaled(c, p);
        }
    }
    for w in j.terms.keys() {
        terms.entry(w.clone()).or_default();
    }
    LogFlowmap {
        basis: Coordinates::I,
        max_grade: j.max_grade,
        terms,
    }
}

/// `Σ_w log^⧢(w) ⊗ w`: the logarithm with the Eulerian idempotent on the
/// integral side.
pub fn log_in_word_coordinates(spec: &AlphabetSpec, max_grade: usize) -> TensorSeries {
    let mut out = TensorSeries::zero();
    for w in spec.words_up_to(max_grade) {
        for (u, c) in &conv_log_id(Product::Shuffle, &w) {
            out.add_term((u.clone(), w.clone()), c.clone());
        }
    }
    out
}

/// Lie polynomial as `Σ c [a1,[a2,…]]`, using `P = (1/n)[P]_L` per length and
/// antisymmetry of the innermost bracket to merge terms.
pub fn bracketed_form(p: &WordSeries) -> Series<Word> {
    let mut out = Series::zero();
    for (n, comp) in length_components(p) {
        let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
        for (w, c) in &comp {
            let ls = w.letters();
            let c = c * &inv_n;
            if n >= 2 {
                let (x, y) = (ls[n - 2], ls[n - 1]);
                if x == y {
                    continue;
                }
                if x > y {
                    let mut v = ls.to_vec();
                    v.swap(n - 2, n - 1);
                    out.add_term(Word::new(v), -c);
                    continue;
                }
            }
            out.add_term(w.clone(), c);
        }
    }
    out
}

fn nested_bracket(w: &Word, field: &dyn Fn(&Letter) -> String, open: &str, close: &str) -> String {
    let ls = w.letters();
    match ls.len() {
        0 => String::new(),
        1 => field(&ls[0]),
        n => {
            let mut s = field(&ls[n - 1]);
            for a in ls[..n - 1].iter().rev() {
                s = format!("{open}{},{s}{close}", field(a));
            }
            s
        }
    }
}

/// `V_a` label used in text output.
pub fn field_label(a: &Letter) -> String {
    if a.power == 1 {
        format!("V_{}", a.base)
    } else {
        format!("V_{}^({})", a.base, a.power)
    }
}

fn field_label_latex(a: &Letter) -> String {
    if a.power == 1 {
        format!("V_{{{}}}", a.base)
    } else {
        format!("V_{{{}^{{({})}}}}", a.base, a.power)
    }
}

fn word_latex(w: &Word) -> String {
    w.letters()
        .iter()
        .map(|a| {
            if a.power == 1 {
                a.base.to_string()
            } else {
                format!("{}^{{({})}}", a.base, a.power)
            }
        })
        .collect::<Vec<_>>()
        .join("")
}

/// `[V_a1,[V_a2,…]]` for the word `a1 a2 …`.
pub fn bracket_text(w: &Word) -> String {
    nested_bracket(w, &field_label, "[", "]")
}

pub fn format_bracketed_text(p: &WordSeries) -> String {
    crate::series::format_terms(&bracketed_form(p), |w| nested_bracket(w, &field_label, "[", "]"))
}

fn latex_rational(c: &Rational) -> String {
    let mag = c.abs();
    if mag.is_integer() {
        mag.to_integer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", mag.numer(), mag.denom())
    }
}

pub fn format_bracketed_latex(p: &WordSeries) -> String {
    let b = bracketed_form(p);
    if b.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (w, c)) in b.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !c.abs().is_one() {
            out.push_str(&latex_rational(c));
        }
        out.push_str(&nested_bracket(w, &field_label_latex, "[", "]"));
    }
    out
}

impl LogFlowmap {
    /// One line per nonzero term: `X_w : bracketed Lie polynomial`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, p) in self.nonzero_terms() {
            out.push_str(&format!("{}_{{{}}} : {}\n", self.basis, w, format_bracketed_text(p)));
        }
        out
    }

    /// An `align*` block summing `X_w(t) (…)`.
    pub fn to_latex(&self) -> String {
        let mut out = String::from("\\begin{align*}\n\\log\\varphi_t &=");
        let mut first = true;
        for (w, p) in self.nonzero_terms() {
            if !first {
                out.push_str(" \\\\\n  &\\quad +");
            }
            first = false;
            out.push_str(&format!(
                " {}_{{{}}}(t)\\left({}\\right)",
                self.basis,
                word_latex(w),
                format_bracketed_latex(p)
            ));
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\n\\end{align*}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::q;

    fn w(s: &str) -> Word {
        AlphabetSpec::new(0, 3, 6).unwrap().parse_word(s).unwrap()
    }

    #[test]
    fn descent_examples() {
        assert_eq!(descents(&Permutation::identity(3)), 0);
        assert_eq!(descents(&Permutation::new(vec![2, 1]).unwrap()), 1);
        assert_eq!(descents(&Permutation::new(vec![3, 1, 2]).unwrap()), 1);
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert_eq!(Permutation::all(4).len(), 24);
    }

    #[test]
    fn eulerian_examples() {
        assert_eq!(eulerian_coefficient(&Permutation::identity(1)), q(1, 1));
        assert_eq!(eulerian_coefficient(&Permutation::new(vec![2, 1]).unwrap()), q(-1, 2));
        assert_eq!(eulerian_coefficient(&Permutation::new(vec![2, 1, 3]).unwrap()), q(-1, 6));
    }

    #[test]
    fn bracketing_examples() {
        assert_eq!(left_bracketing(&w("1")).unwrap(), WordSeries::basis(w("1")));
        let ab = left_bracketing(&w("1 2")).unwrap();
        assert_eq!(ab, WordSeries::from_terms([(w("1 2"), q(1, 1)), (w("2 1"), q(-1, 1))]));
        let abc = left_bracketing(&w("1 2 3")).unwrap();
        let expect = WordSeries::from_terms([
            (w("1 2 3"), q(1, 1)),
            (w("1 3 2"), q(-1, 1)),
            (w("2 3 1"), q(-1, 1)),
            (w("3 2 1"), q(1, 1)),
        ]);
        assert_eq!(abc, expect);
        assert!(left_bracketing(&Word::empty()).is_err());
    }

    #[test]
    fn dynkin_examples() {
        let lie = WordSeries::from_terms([(w("1 2"), q(1, 1)), (w("2 1"), q(-1, 1))]);
        assert!(dynkin_check(&lie, 2).unwrap());
        assert!(!dynkin_check(&WordSeries::basis(w("1 2")), 2).unwrap());
        assert!(dynkin_check(&WordSeries::basis(w("1")), 2).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&w("1")), WordSeries::basis(w("1")));
        let expect = WordSeries::from_terms([(w("1 2"), q(1, 2)), (w("2 1"), q(-1, 2))]);
        assert_eq!(psi(&w("1 2")), expect);
        assert!(psi(&w("1 1")).is_zero());
    }

    #[test]
    fn bracketed_output() {
        assert_eq!(format_bracketed_text(&psi(&w("1 2"))), "1/2 [V_1,V_2]");
        assert_eq!(format_bracketed_latex(&psi(&w("1 2"))), "\\frac{1}{2}[V_{1},V_{2}]");
    }

    #[test]
    fn exp_log_round_trip_small() {
        let spec = AlphabetSpec::new(1, 2, 3).unwrap();
        for basis in [Coordinates::J, Coordinates::I] {
            assert!(verify_exp_of_log(basis, &spec, 3), "{basis}");
            assert!(verify_log_of_flowmap(basis, &spec, 3), "{basis}");
        }
    }
}
