use levy_lie::chen_strichartz::{
    single_prefactor_term, descents, dynkin_check, eulerian_coefficient, eulerian_table, format_bracketed_text,
    is_lie_series, left_bracketing, log_flowmap, psi, transport_j_to_i, Coordinates, Permutation,
};
use levy_lie::word_algebra::{AlphabetSpec, Letter, LetterString, Word, WordSeries};
use levy_lie::{q, Rational};
use proptest::prelude::*;

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    let letters = AlphabetSpec::new(1, 3, 3).unwrap().letters();
    prop::collection::vec(0..letters.len(), 1..=max_len)
        .prop_map(move |ix| Word::new(ix.into_iter().map(|i| letters[i]).collect()))
}

fn perm(v: &[usize]) -> Permutation {
    Permutation::new(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_lie(w in word(5)) {
        let p = psi(&w);
        prop_assert!(p.is_zero() || dynkin_check(&p, w.len()).unwrap());
    }

    #[test]
    fn left_bracketing_is_lie(w in word(5)) {
        let p = left_bracketing(&w).unwrap();
        prop_assert!(p.is_zero() || dynkin_check(&p, w.len()).unwrap());
    }

    #[test]
    fn eulerian_coefficients_depend_on_descents(n in 1usize..=5) {
        let table = eulerian_table(n);
        for (p, c) in &table {
            let same = table.iter().filter(|(r, _)| descents(r) == descents(p));
            for (_, d) in same {
                prop_assert_eq!(c, d);
            }
        }
    }
}

#[test]
fn eulerian_examples() {
    assert_eq!(eulerian_coefficient(&perm(&[1])), q(1, 1));
    assert_eq!(eulerian_coefficient(&perm(&[2, 1])), q(-1, 2));
    assert_eq!(eulerian_coefficient(&perm(&[2, 1, 3])), q(-1, 6));
    assert_eq!(eulerian_coefficient(&perm(&[1, 2, 3])), q(1, 3));
    assert_eq!(eulerian_coefficient(&perm(&[3, 2, 1])), q(1, 3));
    assert_eq!(eulerian_coefficient(&perm(&[2, 1, 4, 3])), q(1, 12));
    assert_eq!(descents(&perm(&[3, 1, 2])), 1);
    assert!(Permutation::new(vec![1, 1]).is_err());
}

#[test]
fn dynkin_examples() {
    let spec = AlphabetSpec::new(0, 2, 2).unwrap();
    let ab = spec.parse_word("1 2").unwrap();
    let ba = spec.parse_word("2 1").unwrap();
    let lie = WordSeries::from_terms([(ab.clone(), q(1, 1)), (ba, q(-1, 1))]);
    assert!(dynkin_check(&lie, 2).unwrap());
    assert!(!dynkin_check(&WordSeries::basis(ab.clone()), 2).unwrap());
    let mixed = &lie + &WordSeries::basis(spec.parse_word("1").unwrap());
    assert!(dynkin_check(&mixed, 2).is_err());
    assert!(left_bracketing(&Word::empty()).is_err());
    assert_eq!(psi(&ab), lie.scale(&q(1, 2)));
    assert!(psi(&spec.parse_word("1 1").unwrap()).is_zero());
}

#[test]
fn low_grade_terms() {
    let spec = AlphabetSpec::new(1, 2, 3).unwrap();
    let j = log_flowmap(Coordinates::J, &spec, 3);
    let w = |s: &str| spec.parse_word(s).unwrap();
    assert_eq!(j.terms[&w("0")], WordSeries::basis(w("0")));
    assert_eq!(format_bracketed_text(&j.terms[&w("0 1")]), "1/2 [V_0,V_1]");
    let i = log_flowmap(Coordinates::I, &spec, 3);
    // exp_H† moves the square-letter field onto the word 1^(2); 1 1 carries ψ(1 1) = 0
    assert_eq!(format_bracketed_text(&i.terms[&w("1^(2)")]), "V_1^(2)");
    assert!(i.terms.get(&w("1 1")).is_none_or(|p| p.is_zero()));
    assert_eq!(transport_j_to_i(&j), i);
    assert!(j.all_lie() && i.all_lie());
}

#[test]
fn single_prefactor_differs_on_mixed_lengths() {
    let spec = AlphabetSpec::new(1, 2, 3).unwrap();
    let w = spec.parse_word("0 1^(2)").unwrap();
    let i = log_flowmap(Coordinates::I, &spec, 3);
    assert_eq!(format_bracketed_text(&i.terms[&w]), "1/2 [V_0,V_1^(2)] - 1/12 [V_1,[V_0,V_1]]");
    assert_eq!(format_bracketed_text(&single_prefactor_term(&w)), "1/2 [V_0,V_1^(2)] + 1/8 [V_1,[V_0,V_1]]");
    assert!(is_lie_series(&single_prefactor_term(&w)));
}

#[test]
fn jump_letter_brackets_are_lie() {
    let a = Word::new(vec![Letter::jump(1, 2), Letter::jump(2, 1), Letter::jump(1, 1)]);
    assert!(is_lie_series(&psi(&a)));
    let total: Rational = psi(&a).iter().map(|(_, c)| c.clone()).sum();
    assert_eq!(total, q(0, 1));
}
