//! Quasi-shuffle and shuffle products, the coproducts dual to them, and
//! convolution exponentials and logarithms of graded endomorphisms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{factorial, q, Rational, Series};
use crate::word_algebra::{bracket, Letter, LetterString};

/// Which commutative product sits on the integral side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Product {
    Shuffle,
    QuasiShuffle,
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Product::Shuffle => "shuffle",
            Product::QuasiShuffle => "quasi-shuffle",
        })
    }
}

fn append<W: LetterString>(s: &Series<W>, a: Letter) -> Series<W> {
    s.map_keys(|w| w.push(a))
}

/// Bottom-up evaluation of the recursive definition over prefix pairs:
/// `table[i][j]` holds `u[..i] ∘ v[..j]`, so each prefix pair is computed once.
fn merge_product<W: LetterString>(u: &W, v: &W, with_bracket: bool) -> Series<W> {
    let (ul, vl) = (u.letters(), v.letters());
    let (n, m) = (ul.len(), vl.len());
    let mut table: Vec<Vec<Series<W>>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row: Vec<Series<W>> = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let cell = if i == 0 {
                Series::basis(v.slice(0, j))
            } else if j == 0 {
                Series::basis(u.slice(0, i))
            } else {
                let (a, b) = (ul[i - 1], vl[j - 1]);
                let mut acc = append(&row[j - 1], b);
                acc += &append(&table[i - 1][j], a);
                if with_bracket {
                    if let Some(c) = bracket(&a, &b) {
                        acc += &append(&table[i - 1][j - 1], c);
                    }
                }
                acc
            };
            row.push(cell);
        }
        table.push(row);
    }
    table.pop().and_then(|mut r| r.pop()).unwrap_or_default()
}

/// `ua ⋆ vb = (u ⋆ vb)a + (ua ⋆ v)b + (u ⋆ v)[a,b]`.
pub fn quasi_shuffle<W: LetterString>(u: &W, v: &W) -> Series<W> {
    merge_product(u, v, true)
}

pub fn shuffle<W: LetterString>(u: &W, v: &W) -> Series<W> {
    merge_product(u, v, false)
}

pub fn product<W: LetterString>(p: Product, u: &W, v: &W) -> Series<W> {
    match p {
        Product::Shuffle => shuffle(u, v),
        Product::QuasiShuffle => quasi_shuffle(u, v),
    }
}

pub fn product_series<W: LetterString>(p: Product, a: &Series<W>, b: &Series<W>) -> Series<W> {
    a.bilinear(b, |u, v| product(p, u, v))
}

/// `Δ(a1…an) = Σ a1…ai ⊗ a(i+1)…an`.
pub fn deconcat<W: LetterString>(w: &W) -> Series<(W, W)> {
    (0..=w.len())
        .map(|i| ((w.slice(0, i), w.slice(i, w.len())), Rational::one()))
        .collect()
}

/// `δ(a) = a⊗𝟏 + 𝟏⊗a + Σ_{[a1,a2]=a} a1⊗a2`.
pub fn dequasishuffle_letter<W: LetterString>(a: &Letter) -> Series<(W, W)> {
    let one = || W::from_letters(Vec::new());
    let single = |x: Letter| W::from_letters(vec![x]);
    let mut out = Series::zero();
    out.add_term((single(*a), one()), Rational::one());
    out.add_term((one(), single(*a)), Rational::one());
    for j in 1..a.power {
        let (x, y) = (a.with_power(j), a.with_power(a.power - j));
        if bracket(&x, &y) == Some(*a) {
            out.add_term((single(x), single(y)), Rational::one());
        }
    }
    out
}

/// Componentwise concatenation in the tensor square.
pub fn tensor_concat<W: LetterString>(a: &Series<(W, W)>, b: &Series<(W, W)>) -> Series<(W, W)> {
    a.bilinear(b, |(a1, a2), (b1, b2)| Series::basis((a1.concat(b1), a2.concat(b2))))
}

/// Componentwise commutative product in the tensor square.
pub fn tensor_product<W: LetterString>(
    p: Product,
    a: &Series<(W, W)>,
    b: &Series<(W, W)>,
) -> Series<(W, W)> {
    a.bilinear(b, |(a1, a2), (b1, b2)| {
        let left = product(p, a1, b1);
        let right = product(p, a2, b2);
        left.bilinear(&right, |x, y| Series::basis((x.clone(), y.clone())))
    })
}

/// Multiplicative extension of [`dequasishuffle_letter`] over concatenation.
pub fn dequasishuffle<W: LetterString>(w: &W) -> Series<(W, W)> {
    let empty = W::from_letters(Vec::new());
    let mut acc = Series::basis((empty.clone(), empty));
    for a in w.letters() {
        acc = tensor_concat(&acc, &dequasishuffle_letter(a));
    }
    acc
}

/// Unshuffle coproduct `Σ_S w|S ⊗ w|S^c` over subsets of positions; letters
/// are primitive and the map is multiplicative for concatenation.
pub fn unshuffle<W: LetterString>(w: &W) -> Series<(W, W)> {
    let letters = w.letters();
    let n = letters.len();
    let mut out = Series::zero();
    for mask in 0u64..(1u64 << n) {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (i, a) in letters.iter().enumerate() {
            if mask >> i & 1 == 1 {
                left.push(*a);
            } else {
                right.push(*a);
            }
        }
        out.add_term((W::from_letters(left), W::from_letters(right)), Rational::one());
    }
    out
}

/// Linear extension of a coproduct to series.
pub fn coproduct_series<W: LetterString, F: Fn(&W) -> Series<(W, W)>>(
    s: &Series<W>,
    cop: F,
) -> Series<(W, W)> {
    s.linear_map(cop)
}

/// `⟨u, w⟩ = 1` iff the words coincide.
pub fn pairing<W: LetterString>(u: &W, w: &W) -> Rational {
    if u == w {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// `Σ_k c_k Σ_{w = w1…wk} g(w1)∘…∘g(wk)` with nonempty consecutive pieces,
/// evaluated by dynamic programming over prefixes.
fn piecewise_powers<W, G>(w: &W, g: G, p: Product, coeff: impl Fn(usize) -> Rational) -> Series<W>
where
    W: LetterString,
    G: Fn(&W) -> Series<W>,
{
    let n = w.len();
    if n == 0 {
        return Series::zero();
    }
    let pieces: Vec<Vec<Series<W>>> = (0..n)
        .map(|j| (0..=n).map(|i| if i > j { g(&w.slice(j, i)) } else { Series::zero() }).collect())
        .collect();
    // prev[i] = sum over splittings of w[..i] into k pieces
    let mut prev: Vec<Series<W>> = (0..=n).map(|i| if i == 0 { Series::zero() } else { pieces[0][i].clone() }).collect();
    let mut out = prev[n].scale(&coeff(1));
    for k in 2..=n {
        let mut next: Vec<Series<W>> = vec![Series::zero(); n + 1];
        for (i, slot) in next.iter_mut().enumerate().skip(k) {
            for j in (k - 1)..i {
                if prev[j].is_zero() || pieces[j][i].is_zero() {
                    continue;
                }
                *slot += &product_series(p, &prev[j], &pieces[j][i]);
            }
        }
        out.add_scaled(&coeff(k), &next[n]);
        prev = next;
    }
    out
}

fn log_coeff(k: usize) -> Rational {
    let sign = if k % 2 == 1 { 1 } else { -1 };
    q(sign, k as i64)
}

fn exp_coeff(k: usize) -> Rational {
    Rational::new(One::one(), factorial(k))
}

/// `log*(Id)(w)` in the convolution algebra built from deconcatenation and
/// the chosen product. For the shuffle this is the Eulerian idempotent.
pub fn conv_log_id<W: LetterString>(p: Product, w: &W) -> Series<W> {
    piecewise_powers(w, |u| Series::basis(u.clone()), p, log_coeff)
}

type Rule<W> = dyn Fn(&W) -> Series<W> + Send + Sync;

struct Inner<W: LetterString> {
    rule: Box<Rule<W>>,
    product: Product,
    max_grade: usize,
    memo: Mutex<HashMap<W, Series<W>>>,
}

/// Linear endomorphism given by its action on basis words, evaluated lazily
/// and truncated at `max_grade`. Cloning shares the memo table.
#[derive(Clone)]
pub struct Endomorphism<W: LetterString> {
    inner: Arc<Inner<W>>,
}

impl<W: LetterString + 'static> Endomorphism<W> {
    pub fn from_rule<F>(product: Product, max_grade: usize, rule: F) -> Self
    where
        F: Fn(&W) -> Series<W> + Send + Sync + 'static,
    {
        Endomorphism {
            inner: Arc::new(Inner {
                rule: Box::new(rule),
                product,
                max_grade,
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn identity(product: Product, max_grade: usize) -> Self {
        Self::from_rule(product, max_grade, |w: &W| Series::basis(w.clone()))
    }

    pub fn zero(product: Product, max_grade: usize) -> Self {
        Self::from_rule(product, max_grade, |_: &W| Series::zero())
    }

    /// `ε∘η`: keeps the empty word, kills the rest.
    pub fn unit_counit(product: Product, max_grade: usize) -> Self {
        Self::from_rule(product, max_grade, |w: &W| {
            if w.is_empty() {
                Series::basis(w.clone())
            } else {
                Series::zero()
            }
        })
    }

    /// The endomorphism `w ↦ Σ_{(w, v) ∈ t} c·v` read off a tensor.
    pub fn from_tensor(product: Product, max_grade: usize, t: &Series<(W, W)>) -> Self {
        let mut table: HashMap<W, Series<W>> = HashMap::new();
        for ((a, b), c) in t {
            table.entry(a.clone()).or_default().add_term(b.clone(), c.clone());
        }
        Self::from_rule(product, max_grade, move |w: &W| {
            table.get(w).cloned().unwrap_or_default()
        })
    }

    pub fn product(&self) -> Product {
        self.inner.product
    }

    pub fn max_grade(&self) -> usize {
        self.inner.max_grade
    }

    pub fn apply(&self, w: &W) -> Series<W> {
        if w.grade() > self.inner.max_grade {
            return Series::zero();
        }
        if let Some(hit) = self.inner.memo.lock().expect("memo poisoned").get(w) {
            return hit.clone();
        }
        let max = self.inner.max_grade;
        let value = (self.inner.rule)(w).filter(|v| v.grade() <= max);
        self.inner
            .memo
            .lock()
            .expect("memo poisoned")
            .insert(w.clone(), value.clone());
        value
    }

    pub fn apply_series(&self, s: &Series<W>) -> Series<W> {
        s.linear_map(|w| self.apply(w))
    }

    /// `(f * g)(w) = Σ f(w1) ∘ g(w2)` over deconcatenations `w = w1 w2`.
    pub fn convolve(&self, other: &Endomorphism<W>) -> Endomorphism<W> {
        let (f, g) = (self.clone(), other.clone());
        let p = self.product();
        Self::from_rule(p, self.max_grade().min(other.max_grade()), move |w: &W| {
            let mut acc = Series::zero();
            for i in 0..=w.len() {
                let left = f.apply(&w.slice(0, i));
                if left.is_zero() {
                    continue;
                }
                let right = g.apply(&w.slice(i, w.len()));
                acc += &product_series(p, &left, &right);
            }
            acc
        })
    }

    fn empty_value(&self) -> Series<W> {
        self.apply(&W::from_letters(Vec::new()))
    }

    /// `Σ_k f^{*k}/k!`; requires `f(𝟏) = 0`.
    pub fn conv_exp(&self) -> Result<Endomorphism<W>> {
        if !self.empty_value().is_zero() {
            return Err(Error::NotAugmented);
        }
        let f = self.clone();
        let p = self.product();
        Ok(Self::from_rule(p, self.max_grade(), move |w: &W| {
            if w.is_empty() {
                return Series::basis(w.clone());
            }
            piecewise_powers(w, |u| f.apply(u), p, exp_coeff)
        }))
    }

    /// `Σ_k (-1)^{k-1}/k (f - ε)^{*k}`; requires `f(𝟏) = 𝟏`.
    pub fn conv_log(&self) -> Result<Endomorphism<W>> {
        let one = W::from_letters(Vec::new());
        if self.empty_value() != Series::basis(one) {
            return Err(Error::MalformedUnit);
        }
        let f = self.clone();
        let p = self.product();
        Ok(Self::from_rule(p, self.max_grade(), move |w: &W| {
            piecewise_powers(w, |u| f.apply(u), p, log_coeff)
        }))
    }

    /// Agreement with `other` on every supplied word.
    pub fn agrees_on<'a, I: IntoIterator<Item = &'a W>>(&self, other: &Endomorphism<W>, words: I) -> bool
    where
        W: 'a,
    {
        words.into_iter().all(|w| self.apply(w) == other.apply(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{q, qi};
    use crate::word_algebra::{AlphabetSpec, Word};

    fn spec() -> AlphabetSpec {
        AlphabetSpec::new(1, 3, 5).unwrap()
    }

    fn w(s: &str) -> Word {
        spec().parse_word(s).unwrap()
    }

    fn series(terms: &[(&str, Rational)]) -> Series<Word> {
        terms.iter().map(|(s, c)| (w(s), c.clone())).collect()
    }

    #[test]
    fn quasi_shuffle_examples() {
        assert_eq!(quasi_shuffle(&Word::empty(), &w("1 2")), series(&[("1 2", qi(1))]));
        assert_eq!(
            quasi_shuffle(&w("1"), &w("2")),
            series(&[("1 2", qi(1)), ("2 1", qi(1))])
        );
        assert_eq!(
            quasi_shuffle(&w("1"), &w("1")),
            series(&[("1 1", qi(2)), ("1^(2)", qi(1))])
        );
        assert_eq!(
            quasi_shuffle(&w("3"), &w("3^(2)")),
            series(&[("3 3^(2)", qi(1)), ("3^(2) 3", qi(1)), ("3^(3)", qi(1))])
        );
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(shuffle(&w("2"), &w("2")), series(&[("2 2", qi(2))]));
        assert_eq!(
            shuffle(&w("1 2"), &w("3")),
            series(&[("1 2 3", qi(1)), ("1 3 2", qi(1)), ("3 1 2", qi(1))])
        );
        let total: Rational = shuffle(&w("1 2 3"), &w("1 2"))
            .iter()
            .map(|(_, c)| c.clone())
            .sum();
        assert_eq!(total, qi(10));
    }

    #[test]
    fn coproduct_examples() {
        assert_eq!(deconcat(&w("1 2 3")).len(), 4);
        assert_eq!(deconcat(&Word::empty()).len(), 1);
        let d3 = dequasishuffle_letter::<Word>(&spec().letter(3, 3).unwrap());
        assert_eq!(d3.len(), 4);
        assert_eq!(d3.coeff(&(w("3"), w("3^(2)"))), qi(1));
        assert_eq!(d3.coeff(&(w("3^(2)"), w("3"))), qi(1));
        let d1 = dequasishuffle_letter::<Word>(&spec().letter(2, 1).unwrap());
        assert_eq!(d1.len(), 2);
        let dw = dequasishuffle_letter::<Word>(&spec().letter(1, 2).unwrap());
        assert_eq!(dw.coeff(&(w("1"), w("1"))), qi(1));
        assert_eq!(unshuffle(&w("1 2")).len(), 4);
    }

    #[test]
    fn eulerian_log_examples() {
        assert_eq!(conv_log_id(Product::Shuffle, &w("2")), series(&[("2", qi(1))]));
        assert_eq!(
            conv_log_id(Product::Shuffle, &w("2 3")),
            series(&[("2 3", q(1, 2)), ("3 2", q(-1, 2))])
        );
        assert!(conv_log_id(Product::Shuffle, &w("2 2")).is_zero());
    }

    #[test]
    fn exp_of_log_is_identity() {
        let s = AlphabetSpec::new(1, 2, 4).unwrap();
        for p in [Product::Shuffle, Product::QuasiShuffle] {
            let id = Endomorphism::<Word>::identity(p, 4);
            let log = id.conv_log().unwrap();
            let back = log.conv_exp().unwrap();
            for word in s.words_up_to(4) {
                assert_eq!(back.apply(&word), Series::basis(word.clone()), "{p} {word}");
                assert_eq!(log.apply(&word), conv_log_id(p, &word));
            }
        }
    }

    #[test]
    fn exp_of_zero_is_unit_counit() {
        let zero = Endomorphism::<Word>::zero(Product::Shuffle, 3);
        let e = zero.conv_exp().unwrap();
        let uc = Endomorphism::unit_counit(Product::Shuffle, 3);
        let words: Vec<Word> = std::iter::once(Word::empty())
            .chain(spec().words_up_to(3))
            .collect();
        assert!(e.agrees_on(&uc, &words));
        let id = Endomorphism::<Word>::identity(Product::Shuffle, 3);
        assert!(matches!(id.conv_exp(), Err(Error::NotAugmented)));
    }
}
