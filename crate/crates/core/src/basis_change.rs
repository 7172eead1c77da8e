//! Change of basis between the word basis `𝔸*` and the zero basis `(𝔸⁰)*`
//! of the same Hopf algebra.
//!
//! On the integral side `w⁰` expands into words by contracting consecutive
//! blocks with the bracket, weighted by inverse factorials. On the operator
//! side the letters `ā⁰` are the primitive logarithms of `ā`. The two
//! expansions are transposes of each other, which is what makes
//! `Σ w⊗w̄ = Σ w⁰⊗w̄⁰`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{factorial, q, Rational, Series};
use crate::word_algebra::{
    bracket_fold, canonical_cmp, show_letters, AlphabetSpec, Letter, LetterString, TensorSeries,
    Word, WordSeries,
};

/// A word read in the zero basis. Same letters as [`Word`], different
/// meaning, so the two never mix without an explicit conversion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ZeroWord(Vec<Letter>);

impl ZeroWord {
    pub fn empty() -> Self {
        ZeroWord(Vec::new())
    }

    pub fn of(w: &Word) -> Self {
        ZeroWord(w.letters().to_vec())
    }

    pub fn to_word(&self) -> Word {
        Word::new(self.0.clone())
    }
}

impl LetterString for ZeroWord {
    fn letters(&self) -> &[Letter] {
        &self.0
    }
    fn from_letters(letters: Vec<Letter>) -> Self {
        ZeroWord(letters)
    }
}

impl Ord for ZeroWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        canonical_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for ZeroWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ZeroWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("𝟏");
        }
        write!(f, "({})⁰", show_letters(&self.0))
    }
}

pub type ZeroSeries = Series<ZeroWord>;

/// Compositions of `n` in colexicographic order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// Letter sequences of total power `a.power` on the driver of `a` whose
/// bracket fold is `a`.
fn bracket_decompositions(a: &Letter) -> Vec<Vec<Letter>> {
    compositions(a.power as usize)
        .into_iter()
        .map(|c| c.iter().map(|&j| a.with_power(j as u32)).collect::<Vec<_>>())
        .filter(|ls| bracket_fold(ls) == Some(*a))
        .collect()
}

fn alternating(n: usize) -> Rational {
    q(if n % 2 == 1 { 1 } else { -1 }, n as i64)
}

fn inverse_factorial(n: usize) -> Rational {
    Rational::new(BigInt::one(), factorial(n))
}

/// `ā⁰ = Σ_n (-1)^{n-1}/n Σ_{[a1,…,an]=a} ā1…ān`, in word coordinates.
pub fn hoffman_log_letter(a: &Letter) -> WordSeries {
    bracket_decompositions(a)
        .into_iter()
        .map(|ls| {
            let n = ls.len();
            (Word::new(ls), alternating(n))
        })
        .collect()
}

/// `ā = Σ_n 1/n! Σ_{[a1,…,an]=a} ā1⁰…ān⁰`, in zero-basis coordinates.
pub fn hoffman_exp_letter(a: &Letter) -> ZeroSeries {
    bracket_decompositions(a)
        .into_iter()
        .map(|ls| {
            let n = ls.len();
            (ZeroWord(ls), inverse_factorial(n))
        })
        .collect()
}

/// Bracket-folds consecutive blocks of `w` with the given sizes.
pub fn contract<W: LetterString>(c: &[usize], w: &W) -> Result<Series<W>> {
    let sum: usize = c.iter().sum();
    if sum != w.len() {
        return Err(Error::CompositionMismatch { sum, len: w.len() });
    }
    let mut letters = Vec::with_capacity(c.len());
    let mut at = 0;
    for &size in c {
        match bracket_fold(&w.letters()[at..at + size]) {
            Some(a) => letters.push(a),
            None => return Ok(Series::zero()),
        }
        at += size;
    }
    Ok(Series::basis(W::from_letters(letters)))
}

fn sum_over_compositions<W, V, F>(w: &W, weight: F) -> Series<V>
where
    W: LetterString,
    V: LetterString,
    F: Fn(&[usize]) -> Rational,
{
    let mut out = Series::zero();
    let as_target = V::from_letters(w.letters().to_vec());
    for c in compositions(w.len()) {
        let contracted = contract(&c, &as_target).expect("composition of the word length");
        out.add_scaled(&weight(&c), &contracted);
    }
    out
}

/// `w⁰ = Σ_c 1/(i1!⋯iℓ!) c∘w`.
pub fn zero_word_in_word_basis(w0: &ZeroWord) -> WordSeries {
    sum_over_compositions(w0, |c| {
        c.iter()
            .fold(Rational::one(), |acc, &i| acc * inverse_factorial(i))
    })
}

/// `w = Σ_c (-1)^{|w|-ℓ}/(i1⋯iℓ) c∘w⁰`.
pub fn word_in_zero_basis(w: &Word) -> ZeroSeries {
    let n = w.len();
    sum_over_compositions(w, |c| {
        let sign = if (n - c.len()).is_multiple_of(2) { 1 } else { -1 };
        let prod: i64 = c.iter().map(|&i| i as i64).product();
        q(sign, prod)
    })
}

pub fn zero_series_in_word_basis(s: &ZeroSeries) -> WordSeries {
    s.linear_map(zero_word_in_word_basis)
}

pub fn word_series_in_zero_basis(s: &WordSeries) -> ZeroSeries {
    s.linear_map(word_in_zero_basis)
}

/// Letterwise substitution `ā ↦ hoffman_exp_letter(a)`, multiplied by
/// concatenation: the operator-side word `w̄` in zero-basis coordinates.
pub fn exp_h_dagger(w: &Word) -> ZeroSeries {
    let mut acc = ZeroSeries::basis(ZeroWord::empty());
    for a in w.letters() {
        acc = crate::word_algebra::concat_product(&acc, &hoffman_exp_letter(a));
    }
    acc
}

/// Letterwise substitution `ā⁰ ↦ hoffman_log_letter(a)`: the operator-side
/// zero word `w̄⁰` in word coordinates. Inverse of [`exp_h_dagger`].
pub fn log_h_dagger(w0: &ZeroWord) -> WordSeries {
    let mut acc = WordSeries::basis(Word::empty());
    for a in w0.letters() {
        acc = crate::word_algebra::concat_product(&acc, &hoffman_log_letter(a));
    }
    acc
}

/// `Σ w⊗w̄` over words of grade `1..=max_grade`.
pub fn identity_tensor(spec: &AlphabetSpec, max_grade: usize) -> TensorSeries {
    spec.words_up_to(max_grade)
        .into_iter()
        .map(|w| ((w.clone(), w), Rational::one()))
        .collect()
}

/// `Σ w⁰⊗w̄⁰` with both slots expanded into word coordinates.
pub fn reexpanded_identity(spec: &AlphabetSpec, max_grade: usize) -> TensorSeries {
    let mut out = TensorSeries::zero();
    for w in spec.words_up_to(max_grade) {
        let w0 = ZeroWord::of(&w);
        let left = zero_word_in_word_basis(&w0);
        let right = log_h_dagger(&w0);
        for (u, a) in &left {
            for (v, b) in &right {
                out.add_term((u.clone(), v.clone()), a * b);
            }
        }
    }
    out
}

/// Checks `Σ w⁰⊗w̄⁰ = Σ w⊗w̄` through the given grade.
pub fn verify_id_reexpansion(spec: &AlphabetSpec, max_grade: usize) -> bool {
    reexpanded_identity(spec, max_grade) == identity_tensor(spec, max_grade)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasi_shuffle_hopf::{quasi_shuffle, shuffle};
    use crate::series::qi;

    fn spec() -> AlphabetSpec {
        AlphabetSpec::new(1, 3, 5).unwrap()
    }

    fn w(s: &str) -> Word {
        spec().parse_word(s).unwrap()
    }

    fn z(s: &str) -> ZeroWord {
        ZeroWord::of(&w(s))
    }

    #[test]
    fn composition_order() {
        assert_eq!(compositions(3), vec![vec![1, 1, 1], vec![2, 1], vec![1, 2], vec![3]]);
        assert_eq!(compositions(4).len(), 8);
    }

    #[test]
    fn letter_logarithms() {
        let s = spec();
        let i1 = s.letter(3, 1).unwrap();
        assert_eq!(hoffman_log_letter(&i1), WordSeries::basis(w("3")));
        let i2 = WordSeries::from_terms([(w("3^(2)"), qi(1)), (w("3 3"), q(-1, 2))]);
        assert_eq!(hoffman_log_letter(&i1.with_power(2)), i2);
        let i3 = WordSeries::from_terms([
            (w("3^(3)"), qi(1)),
            (w("3^(2) 3"), q(-1, 2)),
            (w("3 3^(2)"), q(-1, 2)),
            (w("3 3 3"), q(1, 3)),
        ]);
        assert_eq!(hoffman_log_letter(&i1.with_power(3)), i3);
        // the Wiener square has the same logarithm
        let wiener = s.letter(1, 2).unwrap();
        assert_eq!(hoffman_log_letter(&wiener).len(), 2);
    }

    #[test]
    fn letter_exponentials() {
        let i2 = spec().letter(2, 2).unwrap();
        let expect = ZeroSeries::from_terms([(z("2^(2)"), qi(1)), (z("2 2"), q(1, 2))]);
        assert_eq!(hoffman_exp_letter(&i2), expect);
        for a in spec().letters() {
            let back = log_h_dagger(&ZeroWord(vec![a]));
            let round = back.linear_map(exp_h_dagger);
            assert_eq!(round, ZeroSeries::basis(ZeroWord(vec![a])), "{a}");
        }
    }

    #[test]
    fn contractions() {
        assert_eq!(contract(&[1, 1], &w("2 3")).unwrap(), WordSeries::basis(w("2 3")));
        assert_eq!(contract(&[2], &w("1 1")).unwrap(), WordSeries::basis(w("1^(2)")));
        assert!(contract(&[2], &w("2 3")).unwrap().is_zero());
        assert!(contract(&[2], &w("2")).is_err());
    }

    #[test]
    fn word_level_changes() {
        assert_eq!(zero_word_in_word_basis(&z("2")), WordSeries::basis(w("2")));
        assert_eq!(
            zero_word_in_word_basis(&z("3 3")),
            WordSeries::from_terms([(w("3 3"), qi(1)), (w("3^(2)"), q(1, 2))])
        );
        assert_eq!(zero_word_in_word_basis(&z("2 3")), WordSeries::basis(w("2 3")));
        assert_eq!(
            word_in_zero_basis(&w("3 3")),
            ZeroSeries::from_terms([(z("3 3"), qi(1)), (z("3^(2)"), q(-1, 2))])
        );
    }

    #[test]
    fn round_trips_and_transposition() {
        let s = AlphabetSpec::new(1, 2, 4).unwrap();
        let words = s.words_up_to(4);
        for u in &words {
            let back = zero_series_in_word_basis(&word_in_zero_basis(u));
            assert_eq!(back, WordSeries::basis(u.clone()), "{u}");
        }
        for u in &words {
            let expanded = zero_word_in_word_basis(&ZeroWord::of(u));
            for v in &words {
                let dual = exp_h_dagger(v).coeff(&ZeroWord::of(u));
                assert_eq!(expanded.coeff(v), dual, "{u} / {v}");
            }
        }
    }

    #[test]
    fn exp_h_dagger_example() {
        let expect = ZeroSeries::from_terms([(z("3^(2) 1"), qi(1)), (z("3 3 1"), q(1, 2))]);
        assert_eq!(exp_h_dagger(&w("3^(2) 1")), expect);
    }

    #[test]
    fn identity_reexpansion() {
        let s = AlphabetSpec::new(1, 2, 3).unwrap();
        assert!(verify_id_reexpansion(&s, 1));
        assert!(verify_id_reexpansion(&s, 3));
    }

    #[test]
    fn quasi_shuffle_becomes_shuffle() {
        let s = AlphabetSpec::new(1, 2, 4).unwrap();
        let words = s.words_up_to(3);
        for u in &words {
            for v in &words {
                if u.grade() + v.grade() > 4 {
                    continue;
                }
                let (u0, v0) = (ZeroWord::of(u), ZeroWord::of(v));
                let lhs = zero_word_in_word_basis(&u0)
                    .bilinear(&zero_word_in_word_basis(&v0), quasi_shuffle);
                let lhs = word_series_in_zero_basis(&lhs);
                assert_eq!(lhs, shuffle(&u0, &v0), "{u0} ⧢ {v0}");
            }
        }
    }
}
