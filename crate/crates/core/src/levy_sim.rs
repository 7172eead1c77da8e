//! Finite-activity Lévy drivers, iterated Itô integrals over sample paths,
//! the truncated stochastic Taylor flowmap, and Monte Carlo comparison with
//! the Doléans–Dade solution of linear equations.
//!
//! Integrals are computed by an event-driven Chen recursion. Between events
//! every driver is a constant-rate drift, so `I_w` advances in closed form;
//! at an event `I_{ua} += I_u(τ−) ΔX^a`. Wiener drivers are sampled on their
//! own grid and enter as jumps at the right end of each cell, which is the
//! left-point Itô sum. Grids of different Wiener drivers are offset by
//! `(i−1)h/d` so no two drivers ever move at the same instant.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis_change::{exp_h_dagger, zero_word_in_word_basis, ZeroWord};
use crate::error::{Error, Result};
use crate::series::Rational;
use crate::vector_fields::{apply_word, renormalised_letter_operator, DiffOperator, PolyVectorField, Polynomial};
use crate::word_algebra::{AlphabetSpec, DriverKind, Letter, LetterString, Word, WordSeries};

/// Jump-size law of a compound Poisson driver; finitely supported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    /// `±1` with probability `½` each.
    TwoPoint,
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl JumpLaw {
    fn support(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            JumpLaw::TwoPoint => (vec![-1.0, 1.0], vec![0.5, 0.5]),
            JumpLaw::Discrete { values, probs } => (values.clone(), probs.clone()),
        }
    }

    fn validate(&self) -> Result<()> {
        let (v, p) = self.support();
        if v.is_empty() || v.len() != p.len() {
            return Err(Error::InvalidSpec("jump law needs matching nonempty values and probs".into()));
        }
        if p.iter().any(|&x| x.is_nan() || x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec("jump probabilities must be nonnegative and sum to 1".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec("jump sizes must be finite".into()));
        }
        Ok(())
    }

    /// `E[v^m]`.
    pub fn moment(&self, m: u32) -> f64 {
        let (v, p) = self.support();
        v.iter().zip(&p).map(|(x, q)| q * x.powi(m as i32)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let (v, p) = self.support();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (x, q) in v.iter().zip(&p) {
            acc += q;
            if u < acc {
                return *x;
            }
        }
        *v.last().expect("validated nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpDriver {
    pub rate: f64,
    pub law: JumpLaw,
}

/// How the letter `i^(2)` of a Wiener driver is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticVariation {
    /// `d[W]` is the realised `(ΔW)²` of the sampled path.
    #[default]
    Realised,
    /// `d[W] = dt`.
    Calendar,
}

/// Monte Carlo settings bundled with a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Evaluation times; each must lie in `(0, horizon]`.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default = "default_grades")]
    pub grades: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_observable")]
    pub observable: String,
}

fn default_samples() -> usize {
    1000
}
fn default_grades() -> Vec<usize> {
    vec![1, 2, 3, 4]
}
fn default_observable() -> String {
    "x1".into()
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            samples: default_samples(),
            times: Vec::new(),
            grades: default_grades(),
            seed: 0,
            observable: default_observable(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    dimension: usize,
    d: u32,
    l: u32,
    /// `V_0..V_l`, each a list of `dimension` polynomial strings.
    fields: Vec<Vec<String>>,
    #[serde(default)]
    jumps: Vec<JumpDriver>,
    horizon: f64,
    grid_step: f64,
    initial: Vec<String>,
    #[serde(default)]
    quadratic_variation: QuadraticVariation,
    #[serde(default)]
    simulation: SimulationConfig,
}

/// `dY = Σ_i V_i(Y) dX^i` with `X^0 = t`, Wiener `X^1..X^d` and compensated
/// compound Poisson `X^{d+1}..X^l`.
#[derive(Debug, Clone)]
pub struct SdeSpec {
    pub dimension: usize,
    pub alphabet: AlphabetSpec,
    pub fields: Vec<PolyVectorField>,
    pub jumps: Vec<JumpDriver>,
    pub horizon: f64,
    pub grid_step: f64,
    pub initial: Vec<Rational>,
    pub quadratic_variation: QuadraticVariation,
    pub simulation: SimulationConfig,
}

fn parse_rational(s: &str) -> Result<Rational> {
    Polynomial::parse(0, s)?
        .as_constant()
        .ok_or_else(|| Error::Parse(format!("`{s}` is not a number")))
}

impl SdeSpec {
    pub fn from_toml_str(s: &str) -> Result<SdeSpec> {
        let raw: RawSpec = toml::from_str(s)?;
        let n = raw.dimension;
        let alphabet = AlphabetSpec::new(raw.d, raw.l, 1)?;
        if raw.fields.len() != raw.l as usize + 1 {
            return Err(Error::InvalidSpec(format!(
                "expected {} vector fields V_0..V_{}, found {}",
                raw.l + 1,
                raw.l,
                raw.fields.len()
            )));
        }
        let fields = raw
            .fields
            .iter()
            .map(|comps| {
                if comps.len() != n {
                    return Err(Error::DimensionMismatch(comps.len(), n));
                }
                let strs: Vec<&str> = comps.iter().map(String::as_str).collect();
                PolyVectorField::parse(&strs)
            })
            .collect::<Result<Vec<_>>>()?;
        let initial = raw.initial.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if initial.len() != n {
            return Err(Error::DimensionMismatch(initial.len(), n));
        }
        let spec = SdeSpec {
            dimension: n,
            alphabet,
            fields,
            jumps: raw.jumps,
            horizon: raw.horizon,
            grid_step: raw.grid_step,
            initial,
            quadratic_variation: raw.quadratic_variation,
            simulation: raw.simulation,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<SdeSpec> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Self::from_toml_str(&s)
    }

    pub fn validate(&self) -> Result<()> {
        let n_jumps = (self.alphabet.l - self.alphabet.d) as usize;
        if self.jumps.len() != n_jumps {
            return Err(Error::InvalidSpec(format!(
                "{} jump drivers declared, alphabet needs {n_jumps}",
                self.jumps.len()
            )));
        }
        for j in &self.jumps {
            if !(j.rate > 0.0 && j.rate.is_finite()) {
                return Err(Error::InvalidSpec(format!("jump rate must be positive, got {}", j.rate)));
            }
            j.law.validate()?;
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidSpec(format!("horizon must be positive, got {}", self.horizon)));
        }
        check_step(self.horizon, self.grid_step)?;
        for &t in &self.simulation.times {
            if !(t > 0.0 && t <= self.horizon) {
                return Err(Error::InvalidSpec(format!("evaluation time {t} outside (0, {}]", self.horizon)));
            }
        }
        if self.simulation.samples == 0 {
            return Err(Error::InvalidSpec("samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn initial_f64(&self) -> Vec<f64> {
        self.initial.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn observable(&self) -> Result<Polynomial> {
        Polynomial::parse(self.dimension, &self.simulation.observable)
    }
}

fn check_step(horizon: f64, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite() && h <= horizon) {
        return Err(Error::InvalidStep(h));
    }
    let cells = horizon / h;
    if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
        return Err(Error::InvalidStep(h));
    }
    Ok(())
}

/// One driver moving at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub driver: u32,
    pub size: f64,
}

/// A sampled path: every driver increment as a time-ordered event, plus the
/// constant drift of each compensated jump driver.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyPath {
    pub horizon: f64,
    pub d: u32,
    pub l: u32,
    pub events: Vec<Event>,
    /// `−λ_i E[v]` indexed by driver; zero for time and Wiener drivers.
    pub compensator: Vec<f64>,
}

impl LevyPath {
    /// Builds a path from explicit events; `compensator` is indexed by driver.
    pub fn from_events(horizon: f64, d: u32, l: u32, mut events: Vec<Event>, compensator: Vec<f64>) -> Self {
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        LevyPath {
            horizon,
            d,
            l,
            events,
            compensator,
        }
    }

    pub fn events_of(&self, driver: u32) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.driver == driver)
    }

    pub fn jump_count(&self, driver: u32) -> usize {
        self.events_of(driver).count()
    }

    /// `X^i_t`: the sum of increments up to `t` plus the compensator drift.
    pub fn value(&self, driver: u32, t: f64) -> f64 {
        if driver == 0 {
            return t;
        }
        let drift = self.compensator.get(driver as usize).copied().unwrap_or(0.0) * t;
        drift + self.events_of(driver).filter(|e| e.time <= t).map(|e| e.size).sum::<f64>()
    }
}

fn rng_for(seed: u64, sample: u64, driver: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((sample << 16) | driver as u64);
    rng
}

/// Samples one path. Randomness is keyed by `(seed, sample, driver)`.
pub fn simulate_path(spec: &SdeSpec, seed: u64, sample: u64, h: f64) -> Result<LevyPath> {
    check_step(spec.horizon, h)?;
    let (d, l, horizon) = (spec.alphabet.d, spec.alphabet.l, spec.horizon);
    let mut events = Vec::new();
    for i in 1..=d {
        let mut rng = rng_for(seed, sample, i);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let offset = (i - 1) as f64 * h / d as f64;
        let first = if offset > 0.0 { 0 } else { 1 };
        let mut left = 0.0;
        for k in first.. {
            let r = offset + k as f64 * h;
            let right = if r >= horizon * (1.0 - 1e-12) { horizon } else { r };
            let z: f64 = normal.sample(&mut rng);
            events.push(Event {
                time: right,
                driver: i,
                size: z * (right - left).sqrt(),
            });
            left = right;
            if right == horizon {
                break;
            }
        }
    }
    let mut compensator = vec![0.0; l as usize + 1];
    for (k, jd) in spec.jumps.iter().enumerate() {
        let i = d + 1 + k as u32;
        compensator[i as usize] = -jd.rate * jd.law.mean();
        let mut rng = rng_for(seed, sample, i);
        let count = Poisson::new(jd.rate * horizon)
            .map_err(|e| Error::InvalidSpec(e.to_string()))?
            .sample(&mut rng) as usize;
        for _ in 0..count {
            let time = rng.random::<f64>() * horizon;
            let size = jd.law.sample(&mut rng);
            events.push(Event { time, driver: i, size });
        }
    }
    let mut path = LevyPath::from_events(horizon, d, l, events, compensator);
    resolve_collisions(&mut path, seed, sample);
    Ok(path)
}

/// Re-draws the time of any jump that coincides with another event.
fn resolve_collisions(path: &mut LevyPath, seed: u64, sample: u64) {
    let mut rng = rng_for(seed, sample, u16::MAX as u32);
    loop {
        let clash = path
            .events
            .windows(2)
            .position(|w| w[0].time == w[1].time || w[0].time <= 0.0);
        let Some(i) = clash else { return };
        let idx = if path.events[i].driver > path.d { i } else { i + 1 };
        path.events[idx].time = rng.random::<f64>() * path.horizon;
        path.events.sort_by(|a, b| a.time.total_cmp(&b.time));
    }
}

/// `[X^i]^{(m)}_t`. For `m = 1` the driver itself; for jump drivers and
/// `m ≥ 2` the sum of `m`-th powers of jumps; for Wiener drivers `[W]_t = t`.
pub fn power_bracket(path: &LevyPath, driver: u32, m: u32, t: f64) -> Result<f64> {
    if m == 0 || driver > path.l {
        return Err(Error::InvalidLetter {
            base: driver,
            power: m,
            reason: "no such driver or power",
        });
    }
    if driver == 0 {
        return if m == 1 {
            Ok(t)
        } else {
            Err(Error::InvalidLetter {
                base: 0,
                power: m,
                reason: "time has only power 1",
            })
        };
    }
    if m == 1 {
        return Ok(path.value(driver, t));
    }
    if driver <= path.d {
        return if m == 2 { Ok(t) } else { Err(Error::WienerPower { driver, power: m }) };
    }
    Ok(path
        .events_of(driver)
        .filter(|e| e.time <= t)
        .map(|e| e.size.powi(m as i32))
        .sum())
}

/// Prefix-closed set of words with precomputed update rules.
#[derive(Debug, Clone)]
pub struct IntegralPlan {
    words: Vec<Word>,
    index: BTreeMap<Word, usize>,
    /// parent (prefix) index and last letter, for every nonempty word
    parent: Vec<Option<(usize, Letter)>>,
    /// indices ordered by decreasing length
    order: Vec<usize>,
    by_driver: Vec<Vec<usize>>,
    drift: Vec<Vec<(usize, f64)>>,
}

fn drift_rate(path: &LevyPath, a: &Letter, qv: QuadraticVariation) -> f64 {
    match (a.kind, a.power) {
        (DriverKind::Time, _) => 1.0,
        (DriverKind::Wiener, 2) if qv == QuadraticVariation::Calendar => 1.0,
        (DriverKind::Jump, 1) => path.compensator[a.base as usize],
        _ => 0.0,
    }
}

fn event_increment(a: &Letter, size: f64, qv: QuadraticVariation) -> f64 {
    if a.kind == DriverKind::Wiener && a.power == 2 && qv == QuadraticVariation::Calendar {
        0.0
    } else {
        size.powi(a.power as i32)
    }
}

impl IntegralPlan {
    /// Closes `targets` under prefixes and orders updates.
    pub fn new<'a, I: IntoIterator<Item = &'a Word>>(targets: I) -> Self {
        let mut set: std::collections::BTreeSet<Word> = std::collections::BTreeSet::new();
        set.insert(Word::empty());
        for w in targets {
            for k in 1..=w.len() {
                set.insert(w.slice(0, k));
            }
        }
        let words: Vec<Word> = set.into_iter().collect();
        let index: BTreeMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let parent = words
            .iter()
            .map(|w| {
                let ls = w.letters();
                ls.split_last().map(|(a, _)| (index[&w.slice(0, ls.len() - 1)], *a))
            })
            .collect();
        let mut order: Vec<usize> = (0..words.len()).filter(|&i| !words[i].is_empty()).collect();
        order.sort_by(|&a, &b| words[b].len().cmp(&words[a].len()).then(a.cmp(&b)));
        IntegralPlan {
            words,
            index,
            parent,
            order,
            by_driver: Vec::new(),
            drift: Vec::new(),
        }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    fn bind(&mut self, path: &LevyPath, qv: QuadraticVariation) {
        self.by_driver = vec![Vec::new(); path.l as usize + 1];
        for &i in &self.order {
            if let Some((_, a)) = self.parent[i] {
                if a.base <= path.l {
                    self.by_driver[a.base as usize].push(i);
                }
            }
        }
        // drift[i] = [(prefix, Π rates of the removed suffix / j!)] for j = 1..
        self.drift = vec![Vec::new(); self.words.len()];
        for &i in &self.order {
            let mut chain = Vec::new();
            let mut cur = i;
            let mut prod = 1.0;
            let mut j = 0;
            while let Some((p, a)) = self.parent[cur] {
                let r = drift_rate(path, &a, qv);
                if r == 0.0 {
                    break;
                }
                j += 1;
                prod *= r / j as f64;
                chain.push((p, prod));
                cur = p;
            }
            self.drift[i] = chain;
        }
    }

    fn advance(&self, state: &mut [f64], dt: f64) {
        if dt <= 0.0 {
            return;
        }
        for &i in &self.order {
            let chain = &self.drift[i];
            if chain.is_empty() {
                continue;
            }
            let mut acc = 0.0;
            let mut pow = 1.0;
            for &(p, c) in chain {
                pow *= dt;
                acc += state[p] * c * pow;
            }
            state[i] += acc;
        }
    }

    fn jump(&self, state: &mut [f64], e: &Event, qv: QuadraticVariation) {
        for &i in &self.by_driver[e.driver as usize] {
            let (p, a) = self.parent[i].expect("nonempty");
            state[i] += state[p] * event_increment(&a, e.size, qv);
        }
    }

    /// `I_w(t)` for every planned word at each of the increasing `times`.
    pub fn evaluate(&mut self, path: &LevyPath, times: &[f64], qv: QuadraticVariation) -> Vec<Vec<f64>> {
        self.bind(path, qv);
        let mut state = vec![0.0; self.words.len()];
        state[self.index[&Word::empty()]] = 1.0;
        let mut now = 0.0;
        let mut next_event = 0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            while next_event < path.events.len() && path.events[next_event].time <= t {
                let e = path.events[next_event];
                self.advance(&mut state, e.time - now);
                now = e.time;
                self.jump(&mut state, &e, qv);
                next_event += 1;
            }
            self.advance(&mut state, t - now);
            now = t;
            out.push(state.clone());
        }
        out
    }
}

/// `I_w(t)` along the path, left-point convention.
pub fn iterated_ito(w: &Word, path: &LevyPath, t: f64, qv: QuadraticVariation) -> f64 {
    let mut plan = IntegralPlan::new([w]);
    let idx = plan.index_of(w).expect("planned");
    plan.evaluate(path, &[t], qv)[0][idx]
}

/// `J_w = μ(w⁰)` as a combination of Itô integrals.
pub fn j_expansion(w: &Word) -> WordSeries {
    zero_word_in_word_basis(&ZeroWord::of(w))
}

pub fn j_process(w: &Word, path: &LevyPath, t: f64, qv: QuadraticVariation) -> f64 {
    let exp = j_expansion(w);
    let mut plan = IntegralPlan::new(exp.keys());
    let vals = plan.evaluate(path, &[t], qv).remove(0);
    exp.iter()
        .map(|(u, c)| c.to_f64().unwrap_or(f64::NAN) * vals[plan.index_of(u).expect("planned")])
        .sum()
}

/// Words of grade `≤ max_grade` with `(D_w f)(y₀) ≠ 0`, with that value.
pub fn taylor_coefficients(spec: &SdeSpec, f: &Polynomial, max_grade: usize) -> Result<Vec<(Word, f64)>> {
    let alphabet = AlphabetSpec::new(spec.alphabet.d, spec.alphabet.l, max_grade.max(1))?;
    let mut out = vec![(Word::empty(), f.eval(&spec.initial).to_f64().unwrap_or(f64::NAN))];
    for w in alphabet.words_up_to(max_grade) {
        let g = apply_word(&w, &spec.fields, f)?;
        let c = g.eval(&spec.initial);
        if !c.is_zero() {
            out.push((w, c.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(out)
}

/// `Σ_{g(w) ≤ G} I_w(t) (D_w f)(y₀)` for each requested grade `G`.
#[derive(Debug, Clone)]
pub struct TaylorFlow {
    coefficients: Vec<(Word, f64)>,
    plan: IntegralPlan,
    qv: QuadraticVariation,
}

impl TaylorFlow {
    pub fn new(spec: &SdeSpec, f: &Polynomial, max_grade: usize) -> Result<Self> {
        let coefficients = taylor_coefficients(spec, f, max_grade)?;
        let plan = IntegralPlan::new(coefficients.iter().map(|(w, _)| w));
        Ok(TaylorFlow {
            coefficients,
            plan,
            qv: spec.quadratic_variation,
        })
    }

    pub fn coefficients(&self) -> &[(Word, f64)] {
        &self.coefficients
    }

    /// Values indexed `[time][grade]` for grades `0..=max`.
    pub fn evaluate(&self, path: &LevyPath, times: &[f64], max_grade: usize) -> Vec<Vec<f64>> {
        let mut plan = self.plan.clone();
        let states = plan.evaluate(path, times, self.qv);
        states
            .iter()
            .map(|state| {
                let mut by_grade = vec![0.0; max_grade + 1];
                for (w, c) in &self.coefficients {
                    let g = w.grade();
                    if g <= max_grade {
                        by_grade[g] += c * state[plan.index_of(w).expect("planned")];
                    }
                }
                let mut acc = 0.0;
                by_grade
                    .iter()
                    .map(|v| {
                        acc += v;
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn taylor_flow(spec: &SdeSpec, f: &Polynomial, path: &LevyPath, t: f64, max_grade: usize) -> Result<f64> {
    let tf = TaylorFlow::new(spec, f, max_grade)?;
    Ok(tf.evaluate(path, &[t], max_grade)[0][max_grade])
}

/// `Σ_w I_w(t) Σ_v ⟨exp_H†(w), v⁰⟩ (V_v f)(y₀)`: the flowmap rebuilt from
/// the renormalised fields, term by term in Itô coordinates.
pub fn renormalised_flow(spec: &SdeSpec, f: &Polynomial, path: &LevyPath, t: f64, max_grade: usize) -> Result<f64> {
    let alphabet = AlphabetSpec::new(spec.alphabet.d, spec.alphabet.l, max_grade.max(1))?;
    let mut ops: BTreeMap<Letter, DiffOperator> = BTreeMap::new();
    for a in alphabet.letters() {
        ops.insert(a, renormalised_letter_operator(&a, &spec.fields)?);
    }
    let mut coeffs = vec![(Word::empty(), f.eval(&spec.initial).to_f64().unwrap_or(f64::NAN))];
    for w in alphabet.words_up_to(max_grade) {
        let mut c = Rational::zero();
        for (v, k) in &exp_h_dagger(&w) {
            let mut g = f.clone();
            for a in v.letters().iter().rev() {
                g = ops[a].apply(&g)?;
            }
            c += k * g.eval(&spec.initial);
        }
        if !c.is_zero() {
            coeffs.push((w, c.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let mut plan = IntegralPlan::new(coeffs.iter().map(|(w, _)| w));
    let state = plan.evaluate(path, &[t], spec.quadratic_variation).remove(0);
    Ok(coeffs
        .iter()
        .map(|(w, c)| c * state[plan.index_of(w).expect("planned")])
        .sum())
}

/// Slopes `k_i` of a scalar spec with `V_i = k_i x`.
pub fn linear_slopes(spec: &SdeSpec) -> Result<Vec<f64>> {
    if spec.dimension != 1 {
        return Err(Error::NotLinear(format!("dimension {} is not scalar", spec.dimension)));
    }
    spec.fields
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let p = &v.components()[0];
            let ok = p.terms().keys().all(|e| e[0] == 1);
            if !ok {
                return Err(Error::NotLinear(format!("V_{i} = {p} is not of the form k·x")));
            }
            Ok(p.terms().coeff(&vec![1]).to_f64().unwrap_or(f64::NAN))
        })
        .collect()
}

/// Doléans–Dade solution of the scalar linear equation on the sampled path:
/// `y₀ exp((k₀ + Σ_j k_j c_j) t + Σ_i (k_i W^i_t − ½ k_i² t)) Π (1 + k_j ΔX^j)`
/// with `c_j` the compensator drift.
pub fn exact_linear_solution(spec: &SdeSpec, path: &LevyPath, t: f64) -> Result<f64> {
    let k = linear_slopes(spec)?;
    let y0 = spec.initial_f64()[0];
    let d = spec.alphabet.d;
    let mut exponent = k[0] * t;
    let mut product = 1.0;
    for i in 1..=spec.alphabet.l {
        let ki = k[i as usize];
        if i <= d {
            exponent += ki * path.value(i, t) - 0.5 * ki * ki * t;
        } else {
            exponent += ki * path.compensator[i as usize] * t;
            for e in path.events_of(i).filter(|e| e.time <= t) {
                product *= 1.0 + ki * e.size;
            }
        }
    }
    Ok(y0 * exponent.exp() * product)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeStatistics {
    pub grade: usize,
    pub mean_abs_error: f64,
    pub rms_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStatistics {
    pub samples: usize,
    pub time: f64,
    pub per_grade: Vec<GradeStatistics>,
}

/// Per-grade strong error of the truncated Taylor flowmap of `f` against
/// `f` of the exact linear solution, at each of the increasing `times`
/// using the same paths.
pub fn mc_compare(
    spec: &SdeSpec,
    f: &Polynomial,
    grades: &[usize],
    samples: usize,
    times: &[f64],
    seed: u64,
) -> Result<Vec<PathStatistics>> {
    if samples == 0 {
        return Err(Error::InvalidSpec("samples must be at least 1".into()));
    }
    linear_slopes(spec)?;
    let max_grade = grades.iter().copied().max().unwrap_or(0);
    let flow = TaylorFlow::new(spec, f, max_grade)?;
    let mut sorted_times = times.to_vec();
    sorted_times.sort_by(f64::total_cmp);
    let errors: Vec<Vec<Vec<f64>>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| -> Result<Vec<Vec<f64>>> {
            let path = simulate_path(spec, seed, s, spec.grid_step)?;
            let approx = flow.evaluate(&path, &sorted_times, max_grade);
            sorted_times
                .iter()
                .zip(&approx)
                .map(|(&t, by_grade)| {
                    let y = exact_linear_solution(spec, &path, t)?;
                    let exact = f.eval_f64(&[y]);
                    Ok(grades.iter().map(|&g| by_grade[g] - exact).collect())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    // aggregation runs in sample order so results do not depend on scheduling
    Ok(sorted_times
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let per_grade = grades
                .iter()
                .enumerate()
                .map(|(gi, &g)| {
                    let (mut abs, mut sq) = (0.0, 0.0);
                    for e in &errors {
                        abs += e[ti][gi].abs();
                        sq += e[ti][gi] * e[ti][gi];
                    }
                    GradeStatistics {
                        grade: g,
                        mean_abs_error: abs / samples as f64,
                        rms_error: (sq / samples as f64).sqrt(),
                    }
                })
                .collect();
            PathStatistics { samples, time: t, per_grade }
        })
        .collect())
}

/// The bundled linear jump-diffusion example.
pub const LINEAR_JUMP_DIFFUSION_TOML: &str = include_str!("../specs/linear_jump_diffusion.toml");
