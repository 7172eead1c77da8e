//! Graded alphabet, words and word series.
//!
//! Letter `0` is time. Drivers `1..=d` are Wiener processes and carry the
//! letters `i` and `i^(2)`. Drivers `d+1..=l` are pure-jump processes and
//! carry every power `i^(m)`. The bracket product merges letters of the same
//! driver; it is the algebraic shadow of quadratic covariation.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DriverKind {
    Time,
    Wiener,
    Jump,
}

/// The symbol `base^(power)`. Construct through [`AlphabetSpec::letter`] so
/// that `kind` agrees with the driver partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub base: u32,
    pub power: u32,
    pub kind: DriverKind,
}

impl Letter {
    pub const TIME: Letter = Letter {
        base: 0,
        power: 1,
        kind: DriverKind::Time,
    };

    pub fn wiener(base: u32, power: u32) -> Letter {
        debug_assert!(base >= 1 && (1..=2).contains(&power));
        Letter {
            base,
            power,
            kind: DriverKind::Wiener,
        }
    }

    pub fn jump(base: u32, power: u32) -> Letter {
        debug_assert!(base >= 1 && power >= 1);
        Letter {
            base,
            power,
            kind: DriverKind::Jump,
        }
    }

    pub fn grade(&self) -> usize {
        self.power as usize
    }

    /// Same driver, different power.
    pub fn with_power(&self, power: u32) -> Letter {
        Letter { power, ..*self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power == 1 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}^({})", self.base, self.power)
        }
    }
}

/// The commutative associative bracket `[a, b]`; `None` is the scalar zero.
pub fn bracket(a: &Letter, b: &Letter) -> Option<Letter> {
    if a.base != b.base || a.kind == DriverKind::Time || b.kind == DriverKind::Time {
        return None;
    }
    match a.kind {
        DriverKind::Wiener => {
            if a.power == 1 && b.power == 1 {
                Some(a.with_power(2))
            } else {
                None
            }
        }
        DriverKind::Jump => Some(a.with_power(a.power + b.power)),
        DriverKind::Time => None,
    }
}

/// Right-nested fold `[a1, [a2, ...]]`.
pub fn bracket_fold(letters: &[Letter]) -> Option<Letter> {
    let (last, rest) = letters.split_last()?;
    rest.iter()
        .rev()
        .try_fold(*last, |acc, a| bracket(a, &acc))
}

/// Driver partition and truncation grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetSpec {
    pub d: u32,
    pub l: u32,
    pub max_grade: usize,
}

impl AlphabetSpec {
    pub fn new(d: u32, l: u32, max_grade: usize) -> Result<Self> {
        if d > l {
            return Err(Error::InvalidAlphabet(format!("d = {d} exceeds l = {l}")));
        }
        if max_grade == 0 {
            return Err(Error::InvalidAlphabet("maxGrade must be at least 1".into()));
        }
        Ok(AlphabetSpec { d, l, max_grade })
    }

    pub fn kind_of(&self, base: u32) -> Option<DriverKind> {
        match base {
            0 => Some(DriverKind::Time),
            b if b <= self.d => Some(DriverKind::Wiener),
            b if b <= self.l => Some(DriverKind::Jump),
            _ => None,
        }
    }

    pub fn letter(&self, base: u32, power: u32) -> Result<Letter> {
        let bad = |reason| Error::InvalidLetter {
            base,
            power,
            reason,
        };
        if power == 0 {
            return Err(bad("power must be at least 1"));
        }
        match self.kind_of(base) {
            None => Err(bad("driver index exceeds l")),
            Some(DriverKind::Time) if power != 1 => Err(bad("the time letter has no powers")),
            Some(DriverKind::Wiener) if power > 2 => Err(bad("Wiener drivers carry powers 1 and 2")),
            Some(kind) => Ok(Letter { base, power, kind }),
        }
    }

    /// Letters of exactly the given grade, ordered by (base, power).
    pub fn letters_of_grade(&self, grade: usize) -> Result<Vec<Letter>> {
        if grade == 0 || grade > self.max_grade {
            return Err(Error::GradeOutOfRange {
                grade,
                max: self.max_grade,
            });
        }
        Ok(self.letters_of_grade_unchecked(grade))
    }

    fn letters_of_grade_unchecked(&self, grade: usize) -> Vec<Letter> {
        let p = grade as u32;
        (0..=self.l)
            .filter_map(|base| self.letter(base, p).ok())
            .collect()
    }

    /// Every letter of grade at most `max_grade`.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = (1..=self.max_grade)
            .flat_map(|g| self.letters_of_grade_unchecked(g))
            .collect();
        out.sort();
        out
    }

    /// Words of exactly the given grade in canonical order.
    pub fn words_of_grade(&self, grade: usize) -> Vec<Word> {
        let mut table: Vec<Vec<Word>> = vec![vec![Word::empty()]];
        for g in 1..=grade {
            let mut here = Vec::new();
            for k in 1..=g {
                if k > self.max_grade {
                    break;
                }
                for a in self.letters_of_grade_unchecked(k) {
                    for tail in &table[g - k] {
                        let mut letters = Vec::with_capacity(tail.len() + 1);
                        letters.push(a);
                        letters.extend_from_slice(tail.letters());
                        here.push(Word::new(letters));
                    }
                }
            }
            table.push(here);
        }
        let mut out = table.swap_remove(grade);
        out.sort();
        out
    }

    /// Words of grade `1..=max` in canonical order.
    pub fn words_up_to(&self, max: usize) -> Vec<Word> {
        (1..=max).flat_map(|g| self.words_of_grade(g)).collect()
    }

    /// Parses a whitespace-separated word such as `1 3^(2) 0`.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        s.split_whitespace()
            .map(|tok| self.parse_letter(tok))
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }

    pub fn parse_letter(&self, tok: &str) -> Result<Letter> {
        let err = || Error::Parse(format!("bad letter `{tok}`"));
        let (base, power) = match tok.split_once('^') {
            None => (tok, "1"),
            Some((b, p)) => (
                b,
                p.strip_prefix('(')
                    .and_then(|p| p.strip_suffix(')'))
                    .unwrap_or(p),
            ),
        };
        let base = base.parse().map_err(|_| err())?;
        let power = power.parse().map_err(|_| err())?;
        self.letter(base, power)
    }
}

/// Common interface of [`Word`] and the zero-basis words of
/// [`crate::basis_change`]: both are letter sequences with the same ordering.
pub trait LetterString: Ord + Clone + std::hash::Hash + fmt::Debug + Send + Sync {
    fn letters(&self) -> &[Letter];
    fn from_letters(letters: Vec<Letter>) -> Self;

    fn len(&self) -> usize {
        self.letters().len()
    }

    fn is_empty(&self) -> bool {
        self.letters().is_empty()
    }

    fn grade(&self) -> usize {
        self.letters().iter().map(Letter::grade).sum()
    }

    fn concat(&self, other: &Self) -> Self {
        let mut v = self.letters().to_vec();
        v.extend_from_slice(other.letters());
        Self::from_letters(v)
    }

    fn slice(&self, from: usize, to: usize) -> Self {
        Self::from_letters(self.letters()[from..to].to_vec())
    }

    fn push(&self, a: Letter) -> Self {
        let mut v = self.letters().to_vec();
        v.push(a);
        Self::from_letters(v)
    }
}

/// Graded order, then length, then lexicographic on letters.
pub fn canonical_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    let ga: usize = a.iter().map(Letter::grade).sum();
    let gb: usize = b.iter().map(Letter::grade).sum();
    ga.cmp(&gb)
        .then(a.len().cmp(&b.len()))
        .then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(a: Letter) -> Self {
        Word(vec![a])
    }
}

impl LetterString for Word {
    fn letters(&self) -> &[Letter] {
        &self.0
    }
    fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Space-separated letters. The empty word prints as `𝟏`, never as `1`,
/// which is driver one.
pub fn show_letters(letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "𝟏".into();
    }
    letters
        .iter()
        .map(Letter::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show_letters(&self.0))
    }
}

pub type WordSeries = Series<Word>;
/// Pairs `(w, w̄)`: integral side first, operator side second.
pub type TensorSeries = Series<(Word, Word)>;

/// Bilinear concatenation product.
pub fn concat_product<W: LetterString>(u: &Series<W>, v: &Series<W>) -> Series<W> {
    u.bilinear(v, |a, b| Series::basis(a.concat(b)))
}

/// Drops every term of grade above `max_grade`.
pub fn truncate<W: LetterString>(s: &Series<W>, max_grade: usize) -> Series<W> {
    s.filter(|w| w.grade() <= max_grade)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    fn spec() -> AlphabetSpec {
        AlphabetSpec::new(1, 2, 6).unwrap()
    }

    #[test]
    fn gradings() {
        let s = spec();
        assert_eq!(Letter::TIME.grade(), 1);
        assert_eq!(Word::empty().grade(), 0);
        let w = AlphabetSpec::new(1, 3, 4).unwrap().parse_word("1 3^(2) 0").unwrap();
        assert_eq!(w.grade(), 4);
        assert!(s.parse_word("1^(3)").is_err());
        assert!(s.parse_word("0^(2)").is_err());
    }

    #[test]
    fn bracket_clauses() {
        let s = spec();
        let w = s.letter(1, 1).unwrap();
        let j = s.letter(2, 1).unwrap();
        assert_eq!(bracket(&Letter::TIME, &j), None);
        assert_eq!(bracket(&w, &w), Some(w.with_power(2)));
        assert_eq!(bracket(&w, &w.with_power(2)), None);
        assert_eq!(bracket(&j.with_power(2), &j.with_power(3)), Some(j.with_power(5)));
        assert_eq!(bracket(&w, &j), None);
        assert_eq!(bracket_fold(&[j]), Some(j));
        assert_eq!(bracket_fold(&[j, j, j]), Some(j.with_power(3)));
        assert_eq!(bracket_fold(&[w, w, w]), None);
    }

    #[test]
    fn letter_enumeration() {
        let s = AlphabetSpec::new(1, 2, 3).unwrap();
        let show = |g| {
            s.letters_of_grade(g)
                .unwrap()
                .iter()
                .map(Letter::to_string)
                .collect::<Vec<_>>()
        };
        assert_eq!(show(1), ["0", "1", "2"]);
        assert_eq!(show(2), ["1^(2)", "2^(2)"]);
        assert_eq!(show(3), ["2^(3)"]);
        let wiener_only = AlphabetSpec::new(1, 1, 3).unwrap();
        assert!(wiener_only.letters_of_grade(3).unwrap().is_empty());
        assert!(s.letters_of_grade(4).is_err());
        assert!(s.letters_of_grade(0).is_err());
    }

    #[test]
    fn word_enumeration_counts() {
        // two letters of grade 1 and one of every higher grade:
        // a(n) = 2 a(n-1) + a(n-2) + ... + a(0).
        let s = AlphabetSpec::new(0, 1, 6).unwrap();
        let counts: Vec<usize> = (1..=4).map(|g| s.words_of_grade(g).len()).collect();
        assert_eq!(counts, [2, 5, 13, 34]);
        let words = s.words_of_grade(3);
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn concat_and_truncate() {
        let s = spec();
        let a = WordSeries::basis(s.parse_word("1").unwrap());
        let b = WordSeries::basis(s.parse_word("2").unwrap());
        let c = WordSeries::basis(s.parse_word("0").unwrap());
        let lhs = concat_product(&(&a.scale(&qi(2)) + &b), &c);
        let expect = WordSeries::from_terms([
            (s.parse_word("1 0").unwrap(), qi(2)),
            (s.parse_word("2 0").unwrap(), qi(1)),
        ]);
        assert_eq!(lhs, expect);
        let ab = concat_product(&a, &b);
        let abc = concat_product(&ab, &c);
        assert_eq!(truncate(&(&ab + &abc), 2), ab);
    }
}
