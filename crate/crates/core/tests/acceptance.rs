//! One PASS/FAIL line per acceptance criterion, with the pinned tolerances
//! and time limits. Criteria listed in `KNOWN_RED` are expected to fail for
//! the documented reason; the target fails if any other criterion fails or
//! if a known-red criterion starts passing.

use std::time::{Duration, Instant};

use levy_lie::basis_change::hoffman_log_letter;
use levy_lie::chen_strichartz::{
    dynkin_check, eulerian_classical, eulerian_coefficient, length_components, log_flowmap, Coordinates, Permutation,
};
use levy_lie::levy_sim::{mc_compare, QuadraticVariation, SdeSpec, LINEAR_JUMP_DIFFUSION_TOML};
use levy_lie::prelie_trees::{
    graft_series, grossman_larson, magnus_components, tree_coefficient, tree_series_as_forests, DecoratedTree,
    ForestSeries, TreeSeries,
};
use levy_lie::vector_fields::{renormalised_op_from_words, PolyVectorField};
use levy_lie::verify::{self, Check, Status, VerifyConfig};
use levy_lie::word_algebra::{Letter, Word, WordSeries};
use levy_lie::q;

/// Reference degree-4 tree coefficients and the reference `V_{i^(4)}` list carry
/// the opposite sign of `log∗(exp(x))`; every other reference value matches.
const KNOWN_RED: &[u32] = &[3];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.pass = false;
            self.lines.push(format!("  miss: {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.lines.push(format!("  {}", what.into()));
    }

    fn checks(&mut self, checks: &[Check], names: &[&str]) {
        for name in names {
            match checks.iter().find(|c| c.name == *name) {
                Some(c) if c.status == Status::Pass => {}
                Some(c) => self.require(false, format!("{} {}: {}", c.status, c.name, c.detail)),
                None => self.require(false, format!("check {name} missing")),
            }
        }
    }
}

fn cfg() -> VerifyConfig {
    VerifyConfig::default()
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    let mut checks = Vec::new();
    verify::hopf_suite(&cfg(), &mut checks);
    o.checks(
        &checks,
        &[
            "quasi_shuffle_commutative",
            "quasi_shuffle_associative",
            "quasi_shuffle_associative_random",
            "coassociative",
            "bialgebra",
            "duality_quasi_shuffle",
            "duality_concatenation",
        ],
    );
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let mut checks = Vec::new();
    verify::basis_change_suite(&cfg(), &mut checks);
    o.checks(&checks, &["letter_primitive"]);
    o
}

fn leaf_series(dec: u32) -> TreeSeries {
    TreeSeries::basis(DecoratedTree::leaf(dec))
}

fn forest_mul(a: &ForestSeries, b: &ForestSeries) -> ForestSeries {
    a.bilinear(b, |x, y| ForestSeries::basis(x.mul(y)))
}

fn show_vf(v: &PolyVectorField) -> String {
    v.to_string()
}

fn c3() -> Outcome {
    let mut o = Outcome::new();

    // Hoffman letter logarithms through order 3
    let i = |m| Letter::jump(1, m);
    let w = |ls: &[u32]| Word::new(ls.iter().map(|&m| i(m)).collect());
    let reference: [(u32, WordSeries); 3] = [
        (1, WordSeries::basis(w(&[1]))),
        (2, WordSeries::from_terms([(w(&[2]), q(1, 1)), (w(&[1, 1]), q(-1, 2))])),
        (
            3,
            WordSeries::from_terms([
                (w(&[3]), q(1, 1)),
                (w(&[2, 1]), q(-1, 2)),
                (w(&[1, 2]), q(-1, 2)),
                (w(&[1, 1, 1]), q(1, 3)),
            ]),
        ),
    ];
    for (m, p) in &reference {
        let got = hoffman_log_letter(&i(*m));
        o.require(got == *p, format!("(i^({m}))⁰: computed {got}, reference {p}"));
    }

    // Magnus components through order 3, in the free pre-Lie algebra
    let a = leaf_series(0);
    let g = graft_series;
    let om = magnus_components(&a, 4);
    o.require(om[0] == a, "Ω₁ = a");
    o.require(om[1] == g(&a, &a).scale(&q(-1, 2)), "Ω₂ = −½ a▷a");
    let omega3 = &g(&g(&a, &a), &a).scale(&q(1, 4)) + &g(&a, &g(&a, &a)).scale(&q(1, 12));
    o.require(om[2] == omega3, "Ω₃ = ¼ (a▷a)▷a + 1/12 a▷(a▷a)");

    // reference tree coefficients
    let trees = [
        ("[]", q(1, 1)),
        ("[[]]", q(-1, 2)),
        ("[[[]]]", q(1, 3)),
        ("[[][]]", q(1, 12)),
        ("[[[[]]]]", q(1, 4)),
        ("[[[][]]]", q(1, 12)),
        ("[[][[]]]", q(1, 12)),
    ];
    for (s, reference) in &trees {
        let t = DecoratedTree::parse(s).expect("valid tree");
        let c = tree_coefficient(&t).expect("coefficient");
        o.require(c == *reference, format!("c_{s}: computed {c}, reference {reference}"));
    }

    // Grossman–Larson products of three distinct generators
    let (x, y, z) = (leaf_series(0), leaf_series(1), leaf_series(2));
    let fx = tree_series_as_forests(&x);
    let fy = tree_series_as_forests(&y);
    let fz = tree_series_as_forests(&z);
    let gl31 = &forest_mul(&fx, &fy) + &tree_series_as_forests(&g(&x, &y));
    o.require(grossman_larson(&fx, &fy) == gl31, "x∗y = x·y + x▷y");
    let mut gl32 = forest_mul(&forest_mul(&fx, &fy), &fz);
    gl32 += &forest_mul(&fx, &tree_series_as_forests(&g(&y, &z)));
    gl32 += &forest_mul(&fy, &tree_series_as_forests(&g(&x, &z)));
    gl32 += &tree_series_as_forests(&g(&x, &g(&y, &z)));
    gl32 -= &tree_series_as_forests(&g(&g(&x, &y), &z));
    o.require(
        grossman_larson(&forest_mul(&fx, &fy), &fz) == gl32,
        "(x·y)∗z = xyz + x(y▷z) + y(x▷z) + x▷(y▷z) − (x▷y)▷z",
    );

    // reference renormalised fields on sample polynomial fields
    let fields = verify::sample_fields(6, 7);
    for m in 2..=4u32 {
        let mut misses = Vec::new();
        for v in &fields {
            let p = |a: &PolyVectorField, b: &PolyVectorField| a.prelie(b).expect("same dimension");
            let vv = p(v, v);
            let reference = match m {
                2 => vv.scale(&q(-1, 2)),
                3 => p(&vv, v).scale(&q(1, 4)).add(&p(v, &vv).scale(&q(1, 12))),
                _ => p(v, &p(&vv, v))
                    .scale(&q(1, 24))
                    .add(&p(&vv, &vv).scale(&q(1, 24)))
                    .add(&p(&p(&vv, v), v).scale(&q(1, 8)))
                    .add(&p(&p(v, &vv), v).scale(&q(1, 24))),
            };
            let got = renormalised_op_from_words(v, m).ok().and_then(|op| op.as_vector_field());
            if got.as_ref() != Some(&reference) {
                let flipped = got.as_ref() == Some(&reference.scale(&q(-1, 1)));
                misses.push((v.clone(), got, reference, flipped));
            }
        }
        if let Some((v, got, reference, _)) = misses.iter().min_by_key(|(v, ..)| v.to_string().len()) {
            let all_flipped = misses.iter().all(|(.., f)| *f);
            let got = got.as_ref().map(show_vf).unwrap_or_else(|| "not a vector field".into());
            o.require(
                false,
                format!(
                    "V_i^({m}) on {}/{} fields{}; e.g. V = {v}: computed {got}, reference {}",
                    misses.len(),
                    fields.len(),
                    if all_flipped { ", opposite sign on each" } else { "" },
                    show_vf(reference)
                ),
            );
        }
    }
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    let mut checks = Vec::new();
    verify::prelie_suite(&cfg(), &mut checks);
    o.checks(&checks, &["omega_table_magnitudes", "symmetry_factor_brute_force"]);
    o.note(format!("{} table entries checked", verify::omega_table().len()));
    if let Some(c) = checks.iter().find(|c| c.name == "omega_table_signs") {
        o.note(format!("{}: {}", c.status, c.detail));
    }
    o
}

fn c5() -> Outcome {
    let mut o = Outcome::new();
    match verify::magnus_routes(5, false) {
        Ok((rec, le, ts)) => {
            o.require(rec == le, "recursion = log∗∘exp");
            o.require(le == ts, "log∗∘exp = tree sum");
            o.note(format!("{} trees through degree 5", ts.len()));
        }
        Err(e) => o.require(false, e.to_string()),
    }
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    let mut checks = Vec::new();
    verify::vector_fields_suite(&cfg(), &mut checks);
    o.checks(&checks, &["renormalised_operator_is_field"]);
    o
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let spec = verify::default_alphabet(4);
    for basis in [Coordinates::J, Coordinates::I] {
        let lf = log_flowmap(basis, &spec, 4);
        let mut components = 0;
        for (w, p) in &lf.terms {
            for (n, part) in length_components(p) {
                components += 1;
                o.require(dynkin_check(&part, n).unwrap_or(false), format!("{basis} term {w}, length {n}"));
            }
        }
        o.note(format!("{basis}: {} words, {components} graded components", lf.terms.len()));
    }
    let mut checks = Vec::new();
    verify::chen_strichartz_suite(&cfg(), &mut checks);
    o.checks(&checks, &["exp_of_log", "log_of_flowmap", "eulerian_oracle"]);
    let perm = |v: Vec<usize>| Permutation::new(v).expect("valid permutation");
    o.require(eulerian_coefficient(&perm(vec![1])) == q(1, 1), "c_(1) = 1");
    o.require(eulerian_coefficient(&perm(vec![2, 1])) == q(-1, 2), "c_(2,1) = −½");
    o.require(eulerian_coefficient(&perm(vec![2, 1, 3])) == q(-1, 6), "c_(2,1,3) = −1/6");
    let all_agree = (1..=4).all(|n| Permutation::all(n).iter().all(|p| eulerian_coefficient(p) == eulerian_classical(p)));
    o.require(all_agree, "oracle = (−1)^d/(n·binom(n−1,d)) for |σ| ≤ 4");
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::new();
    let mut checks = Vec::new();
    verify::basis_change_suite(&cfg(), &mut checks);
    o.checks(&checks, &["round_trips", "identity_reexpansion", "quasi_shuffle_is_shuffle_in_zero_basis"]);
    o
}

fn c9() -> Outcome {
    let mut o = Outcome::new();
    let pj = verify::pure_jump_spec();
    for coords in [Coordinates::I, Coordinates::J] {
        match verify::product_law_error(&pj, 1000, 9, 3, coords, QuadraticVariation::Realised) {
            Ok(e) => {
                o.require(e.max_relative < 1e-9, format!("pure jump {coords}: max relative {:.2e}", e.max_relative));
                o.note(format!("pure jump {coords}: {} products, max relative {:.2e}", e.comparisons, e.max_relative));
            }
            Err(e) => o.require(false, e.to_string()),
        }
    }
    let spec = verify::jump_diffusion_spec(1e-4);
    for (qv, gate) in [(QuadraticVariation::Realised, true), (QuadraticVariation::Calendar, false)] {
        match verify::product_law_error(&spec, 20, 9, 3, Coordinates::J, qv) {
            Ok(e) => {
                if gate {
                    o.require(e.rms_relative < 1e-3, format!("Wiener J-shuffle {qv:?}: {:.2e}", e.rms_relative));
                }
                o.note(format!(
                    "Wiener J-shuffle, {qv:?} bracket, h = 1e-4, T = 1: rms relative {:.2e}, max relative {:.2e}",
                    e.rms_relative, e.max_relative
                ));
            }
            Err(e) => o.require(false, e.to_string()),
        }
    }
    o
}

fn c10() -> Outcome {
    let mut o = Outcome::new();
    let spec = SdeSpec::from_toml_str(LINEAR_JUMP_DIFFUSION_TOML).expect("bundled spec");
    let f = spec.observable().expect("observable");
    let sim = &spec.simulation;
    let times = [0.05, 0.1];
    match mc_compare(&spec, &f, &[1, 2, 3, 4], 10_000, &times, sim.seed) {
        Ok(stats) => {
            for s in &stats {
                let rms: Vec<String> = s.per_grade.iter().map(|g| format!("{:.3e}", g.rms_error)).collect();
                o.note(format!("t = {}: rms by grade {}", s.time, rms.join(", ")));
            }
            let at = |t: f64| stats.iter().find(|s| (s.time - t).abs() < 1e-12).expect("time present");
            let full = at(0.1);
            let rms: Vec<f64> = full.per_grade.iter().map(|g| g.rms_error).collect();
            o.require(rms.windows(2).all(|w| w[1] < w[0]), "rms decreasing over grades 1→4 at t = 0.1");
            let ratio = full.per_grade[0].rms_error / at(0.05).per_grade[0].rms_error;
            o.note(format!("grade-1 rms ratio t=0.1 / t=0.05: {ratio:.3}"));
            o.require((1.2..=2.8).contains(&ratio), format!("ratio {ratio:.3} in [1.2, 2.8]"));
        }
        Err(e) => o.require(false, e.to_string()),
    }
    o
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "Hopf suite, grade ≤ 4 exhaustive, grade 5 random", Duration::from_secs(60), c1),
        (2, "primitivity of ā⁰, grade ≤ 5", Duration::from_secs(10), c2),
        (3, "reference expansions reproduced exactly", Duration::MAX, c3),
        (4, "ω/σ tables, |c_τ|σ(τ) = |ω(τ)|", Duration::from_secs(30), c4),
        (5, "three-route Magnus agreement, degree 5", Duration::from_secs(60), c5),
        (6, "renormalised operators are vector fields, m ≤ 4", Duration::from_secs(120), c6),
        (7, "Chen–Strichartz Lie series and exp/log, grade ≤ 4", Duration::from_secs(120), c7),
        (8, "basis round trips and identity re-expansion, grade 4", Duration::from_secs(30), c8),
        (9, "numerical shuffle laws", Duration::MAX, c9),
        (10, "strong truncation error, 10⁴ samples", Duration::from_secs(600), c10),
    ];
    let mut unexpected = Vec::new();
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > limit {
            outcome.require(false, format!("runtime {:.1}s over limit {}s", elapsed.as_secs_f64(), limit.as_secs()));
        }
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let known = KNOWN_RED.contains(&id);
        let tag = match (outcome.pass, known) {
            (false, true) => " (known red)",
            (true, true) => " (known red now passes)",
            _ => "",
        };
        println!("{status} criterion {id:>2}: {title} [{:.2}s]{tag}", elapsed.as_secs_f64());
        for line in &outcome.lines {
            println!("{line}");
        }
        if outcome.pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

