use levy_lie::prelie_trees::{
    b_plus, graft_series, grossman_larson, magnus_by_backward_error, magnus_by_log_exp, magnus_components,
    symmetry_factor, tree_coefficient, trees_of_size, DecoratedTree, Forest, ForestSeries, TreeSeries,
};
use levy_lie::{q, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

fn tree(max: usize) -> impl Strategy<Value = DecoratedTree> {
    (1..=max, any::<u64>(), prop::collection::vec(0u32..3, 8)).prop_map(|(n, pick, decs)| {
        let shapes = trees_of_size(n, 0);
        let shape = &shapes[(pick % shapes.len() as u64) as usize];
        let mut next = decs.into_iter().cycle();
        redecorate(shape, &mut next)
    })
}

fn redecorate(t: &DecoratedTree, decs: &mut impl Iterator<Item = u32>) -> DecoratedTree {
    let d = decs.next().unwrap_or(0);
    let children: Vec<_> = t.children().iter().map(|c| redecorate(c, decs)).collect();
    b_plus(&Forest::new(children), d)
}

fn basis(t: DecoratedTree) -> TreeSeries {
    TreeSeries::basis(t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grafting_is_left_prelie(a in tree(3), b in tree(2), c in tree(2)) {
        let (a, b, c) = (basis(a), basis(b), basis(c));
        let g = graft_series;
        let lhs = &g(&g(&a, &b), &c) - &g(&a, &g(&b, &c));
        let rhs = &g(&g(&b, &a), &c) - &g(&b, &g(&a, &c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn grafting_adds_sizes(a in tree(3), b in tree(3)) {
        let n = a.size() + b.size();
        // a ▷ b grafts a onto each vertex of b
        let s = graft_series(&basis(a), &basis(b.clone()));
        prop_assert!(s.keys().all(|t| t.size() == n));
        let total: Rational = s.iter().map(|(_, c)| c.clone()).sum();
        prop_assert_eq!(total, Rational::from_integer(BigInt::from(b.size())));
    }

    #[test]
    fn grossman_larson_associates(a in tree(2), b in tree(2), c in tree(2)) {
        let f = |t: DecoratedTree| ForestSeries::basis(Forest::single(t));
        let (a, b, c) = (f(a), f(b), f(c));
        prop_assert_eq!(
            grossman_larson(&grossman_larson(&a, &b), &c),
            grossman_larson(&a, &grossman_larson(&b, &c))
        );
    }

    #[test]
    fn grossman_larson_unit(a in tree(4)) {
        let one = ForestSeries::basis(Forest::unit());
        let a = ForestSeries::basis(Forest::single(a));
        prop_assert_eq!(grossman_larson(&one, &a), a.clone());
        prop_assert_eq!(grossman_larson(&a, &one), a);
    }
}

/// `c_τ = (−1)^(|τ|−1) ω(τ)/σ(τ)` applied to the reference ω/σ tables.
fn frozen_coefficients() -> Vec<(&'static str, Rational)> {
    vec![
        ("[]", q(1, 1)),
        ("[[]]", q(-1, 2)),
        ("[[[]]]", q(1, 3)),
        ("[[][]]", q(1, 12)),
        ("[[[][]]]", q(-1, 12)),
        ("[[[[]]]]", q(-1, 4)),
        ("[[][[]]]", q(-1, 12)),
        ("[[][][]]", q(0, 1)),
        ("[[][][][]]", q(-1, 720)),
        ("[[[][][]]]", q(1, 180)),
        ("[[[]][[]]]", q(1, 60)),
        ("[[][[][]]]", q(1, 120)),
        ("[[[[[]]]]]", q(1, 5)),
        ("[[][[[]]]]", q(1, 20)),
        ("[[[[][]]]]", q(3, 40)),
        ("[[[][[]]]]", q(1, 10)),
        ("[[][][[]]]", q(-1, 120)),
    ]
}

#[test]
fn magnus_tree_coefficients_through_degree_five() {
    for (s, c) in frozen_coefficients() {
        let t = DecoratedTree::parse(s).unwrap();
        assert_eq!(tree_coefficient(&t).unwrap(), c, "tree {s}");
    }
}

#[test]
fn magnus_routes_agree_through_degree_six() {
    let leaf = basis(DecoratedTree::leaf(0));
    let rec = magnus_components(&leaf, 6).into_iter().fold(TreeSeries::zero(), |a, c| &a + &c);
    let le = magnus_by_log_exp(0, 6).unwrap();
    let be = magnus_by_backward_error(0, 6).unwrap();
    assert_eq!(le, be);
    assert_eq!(levy_lie::prelie_trees::tree_series_as_forests(&rec), le);
}

#[test]
fn tree_counts_and_symmetry() {
    let counts: Vec<usize> = (1..=7).map(|n| trees_of_size(n, 0).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48]);
    assert_eq!(symmetry_factor(&DecoratedTree::star(4, 0)), BigInt::from(24));
    assert_eq!(symmetry_factor(&DecoratedTree::ladder(5, 0)), BigInt::from(1));
    assert_eq!(symmetry_factor(&DecoratedTree::parse("[[[]][[]]]").unwrap()), BigInt::from(2));
}

#[test]
fn decorations_distinguish_symmetry() {
    // two distinct leaves under one root have no automorphism
    let t = b_plus(&Forest::new(vec![DecoratedTree::leaf(1), DecoratedTree::leaf(2)]), 0);
    assert_eq!(symmetry_factor(&t), BigInt::from(1));
    let t = b_plus(&Forest::new(vec![DecoratedTree::leaf(1), DecoratedTree::leaf(1)]), 0);
    assert_eq!(symmetry_factor(&t), BigInt::from(2));
}
