//! One check per acceptance criterion. The topical test files and the
//! acceptance summary both call these; each returns a one-line summary on
//! success and the first failure otherwise.

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration as WallTime, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use zsynth::bounds::{bound_k, bound_series_parallel, BoundReport, BoundValue, EXACT_BITS};
use zsynth::broadcast::{is_broadcast, is_broadcast_by_definition};
use zsynth::classify::{classify_series_parallel, SpTree};
use zsynth::cli::{run, Outcome};
use zsynth::shortcut::{
    find_useless_threads, plays_correspond, reduce, shortcut_is_distributed, take_shortcut,
    ThreadSearch,
};
use zsynth::synth::{certify, synthesize, SynthesisConfig};
use zsynth::zgame::{parse_game, write_game};
use zsynth::zstrat::{parse_strategy, write_strategy};
use zsynth::{
    fixtures, DependencyAlphabet, Duration, Game, Letter, LetterSet, ProcId, ProcSet, Strategy,
    Trace, Verdict, ViewSemantics,
};

use super::brute::{brute_force, BruteResult};

pub type Check = Result<String, String>;

pub fn fixture_path(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

pub fn golden_path(name: &str) -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests");
    p.push("golden");
    p.push(name);
    p
}

pub fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("zsynth").chain(args.iter().copied()))
}

fn fixture_games() -> Vec<(&'static str, Game)> {
    vec![
        ("G1", fixtures::g1()),
        ("G2", fixtures::g2()),
        ("G3", fixtures::g3()),
        ("G4", fixtures::g4()),
    ]
}

fn all_pools(g: &Game) -> Vec<ProcSet> {
    let n = g.num_processes();
    (0u64..1 << n).map(ProcSet).collect()
}

// ---------------------------------------------------------------- traces

pub const TRACE_LAW_INSTANCES: u64 = 10_000;

pub fn trace_laws(instances: u64) -> Check {
    let start = Instant::now();
    for seed in 0..instances {
        let inst = super::random_instance(seed ^ 0xacce_97ed);
        super::check_instance(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    let t = start.elapsed();
    if t > WallTime::from_secs(60) {
        return Err(format!("{instances} instances took {t:?}"));
    }
    Ok(format!("{instances} instances, 0 failures, {t:.2?}"))
}

fn t1() -> Arc<DependencyAlphabet> {
    fixtures::g1().alphabet().clone()
}

/// Under literal views, the `A_2`-view of "ab" over the G1 alphabet is
/// "ab", which is not prime.
pub fn literal_view_not_prime() -> Check {
    let t = t1();
    let ab = Trace::parse(t.clone(), "a b").map_err(|e| e.to_string())?;
    let v = ab.process_view(ProcId(1), ViewSemantics::Literal);
    if v.compact() == "ab" && !v.is_prime() {
        Ok("literal view_A2(ab) = ab, not prime".into())
    } else {
        Err(format!("literal view_A2(ab) = {v}, prime {}", v.is_prime()))
    }
}

/// Under causal views the same view is "b", which is prime.
pub fn causal_view_prime() -> Check {
    let t = t1();
    let ab = Trace::parse(t.clone(), "a b").map_err(|e| e.to_string())?;
    let v = ab.process_view(ProcId(1), ViewSemantics::Causal);
    if v.compact() == "b" && (v.is_empty() || v.is_prime()) {
        Ok("causal view_A2(ab) = b, prime".into())
    } else {
        Err(format!("causal view_A2(ab) = {v}, prime {}", v.is_prime()))
    }
}

// ------------------------------------------------------------- broadcasts

/// Failure tallies over the broadcast population.
#[derive(Debug, Default)]
pub struct BroadcastTally {
    pub instances: usize,
    pub disagreements: Vec<String>,
    /// Per claim: maximal action's domain, all of `P`, complement
    /// symmetry, singleton pools.
    pub claim_failures: [Vec<String>; 4],
}

pub const CLAIM_NAMES: [&str; 4] = [
    "dom(b)-broadcast",
    "P-broadcast",
    "Q iff P\\Q",
    "singleton pools",
];

/// Prime plays up to `max_len` of G1-G4, every pool, extension bounds
/// `1..=v_max`. The four claims are evaluated at `v_max`.
pub fn broadcast_population(max_len: usize, v_max: usize) -> BroadcastTally {
    let mut tally = BroadcastTally::default();
    for (name, g) in fixture_games() {
        let all = g.all_processes();
        let pools = all_pools(&g);
        for u in g.enumerate_plays(max_len) {
            if !u.trace.is_prime() {
                continue;
            }
            let at = |q: ProcSet, v: usize| is_broadcast(&g, &u, q, v).expect("prime play");
            for &q in &pools {
                for v in 1..=v_max {
                    tally.instances += 1;
                    let def = is_broadcast_by_definition(&g, &u, q, v).expect("prime play");
                    if def != at(q, v) {
                        tally.disagreements.push(format!(
                            "{name} u={} Q={} vcap={v}",
                            u.trace.compact(),
                            g.alphabet().fmt_process_set(q)
                        ));
                    }
                }
            }
            let b = u.trace.last_letter().expect("prime");
            let mut fail = |i: usize, q: ProcSet| {
                tally.claim_failures[i].push(format!(
                    "{name} u={} Q={}",
                    u.trace.compact(),
                    g.alphabet().fmt_process_set(q)
                ))
            };
            let dom_b = g.alphabet().domain(b);
            if !at(dom_b, v_max) {
                fail(0, dom_b);
            }
            if !at(all, v_max) {
                fail(1, all);
            }
            for &q in &pools {
                if at(q, v_max) != at(all.difference(q), v_max) {
                    fail(2, q);
                }
                if q.len() == 1 && !at(q, v_max) {
                    fail(3, q);
                }
            }
        }
    }
    tally
}

pub fn broadcast_coherence() -> Check {
    let t = broadcast_population(4, 5);
    if let Some(d) = t.disagreements.first() {
        return Err(format!("{} disagreements, first {d}", t.disagreements.len()));
    }
    for (i, f) in t.claim_failures.iter().enumerate() {
        if let Some(first) = f.first() {
            return Err(format!(
                "claim '{}' fails on {} instances, first {first}",
                CLAIM_NAMES[i],
                f.len()
            ));
        }
    }
    Ok(format!("{} instances agree, all four claims hold", t.instances))
}

// -------------------------------------------------------------- shortcuts

/// A G3-like game: one or two processes, each with self loops in state
/// `s` and an exit to the final state `f`. With two processes the exit is
/// either local to each process or a joint action.
pub struct LoopGame {
    pub text: String,
    pub game: Arc<Game>,
    /// Loop letters per process.
    pub loops: Vec<Vec<Letter>>,
    /// Exit letter per process (shared when the exit is joint).
    pub exits: Vec<Letter>,
}

pub fn loop_game(r: &mut impl Rng) -> LoopGame {
    let np = r.gen_range(1..=2);
    let joint = np == 2 && r.gen_bool(0.5);
    let loop_names = [["a", "b"], ["c", "d"]];
    let mut text = String::new();
    for p in 1..=np {
        text.push_str(&format!("process {p} states s f init s final f\n"));
    }
    let mut trans = String::new();
    let mut names: Vec<(Vec<&str>, &str)> = Vec::new();
    for p in 1..=np {
        let k = r.gen_range(1..=2);
        let ls = &loop_names[p - 1][..k];
        for l in ls {
            text.push_str(&format!("action {l} dom {p} ctrl\n"));
            trans.push_str(&format!("trans {l} {p}:s -> {p}:s\n"));
        }
        let exit = if joint { "x" } else if p == 1 { "t" } else { "u" };
        if !joint {
            text.push_str(&format!("action {exit} dom {p} ctrl\n"));
            trans.push_str(&format!("trans {exit} {p}:s -> {p}:f\n"));
        }
        names.push((ls.to_vec(), exit));
    }
    if joint {
        text.push_str("action x dom 1 2 ctrl\n");
        trans.push_str("trans x 1:s 2:s -> 1:f 2:f\n");
    }
    text.push_str(&trans);
    let game = Arc::new(parse_game(&text).unwrap_or_else(|e| panic!("{e}\n{text}")));
    let al = game.alphabet().clone();
    let letter = |n: &str| al.letter(n).expect("declared");
    LoopGame {
        loops: names.iter().map(|(ls, _)| ls.iter().map(|l| letter(l)).collect()).collect(),
        exits: names.iter().map(|(_, e)| letter(e)).collect(),
        text,
        game,
    }
}

/// A winning strategy that has each process `p` play the word `words[p]`
/// of loop letters and then its exit. Decisions depend on the number of
/// `p`-letters in the view only.
pub fn scripted_strategy(lg: &LoopGame, words: &[Vec<Letter>]) -> Strategy {
    let g = &lg.game;
    let al = g.alphabet();
    let sem = ViewSemantics::Literal;
    let decide = |p: ProcId, view: &Trace| -> LetterSet {
        let own = view
            .letters()
            .iter()
            .filter(|&&a| al.domain(a).contains(p))
            .count();
        let w = &words[p.index()];
        match own.cmp(&w.len()) {
            std::cmp::Ordering::Less => LetterSet::singleton(w[own]),
            std::cmp::Ordering::Equal => LetterSet::singleton(lg.exits[p.index()]),
            std::cmp::Ordering::Greater => LetterSet::default(),
        }
    };
    let mut s = Strategy::new(g.clone(), sem);
    let mut queue = VecDeque::from([g.initial_play()]);
    let mut seen = BTreeSet::new();
    while let Some(u) = queue.pop_front() {
        if !seen.insert(u.trace.clone()) {
            continue;
        }
        for p in g.processes() {
            let view = u.trace.process_view(p, sem);
            s.set_decision(p, view.clone(), decide(p, &view)).expect("valid key");
        }
        for (a, w) in g.successors(&u) {
            if al.domain(a).iter().all(|p| decide(p, &u.trace.process_view(p, sem)).contains(a)) {
                queue.push_back(w);
            }
        }
    }
    s
}

/// Loop words `pre·B·B·B`: after `pre·B` and after `pre·B·B` the process
/// takes the same next step, so `(pre·B, B)` is a candidate useless thread.
/// Blocks have length 1 when two processes share the game.
pub fn redundant_word(r: &mut impl Rng, loops: &[Letter], max_block: usize) -> Vec<Letter> {
    let pick = |r: &mut _, n: usize| -> Vec<Letter> { (0..n).map(|_| *loops.choose(r).unwrap()).collect() };
    let pre_len = r.gen_range(0..=1);
    let pre = pick(r, pre_len);
    let block_len = r.gen_range(1..=max_block);
    let block = pick(r, block_len);
    [pre, block.clone(), block.clone(), block].concat()
}

#[derive(Debug, Default)]
pub struct ShortcutTally {
    pub strategies: usize,
    pub certificates: usize,
}

pub const SHORTCUT_STRATEGIES: u64 = 120;

/// Extension bound for the broadcast conditions in the shortcut suite.
/// The default `3M` makes two-process loop games take seconds each; the
/// shortcut properties are re-checked independently of this bound.
pub const SHORTCUT_VCAP: usize = 6;

pub fn shortcut_population(n: u64) -> Result<ShortcutTally, String> {
    let mut tally = ShortcutTally::default();
    for seed in 0..n {
        let mut r = super::rng(seed ^ 0x0540_7c07);
        let lg = loop_game(&mut r);
        let max_block = if lg.loops.len() == 1 { 2 } else { 1 };
        let words: Vec<Vec<Letter>> = lg.loops.iter().map(|ls| redundant_word(&mut r, ls, max_block)).collect();
        let s = scripted_strategy(&lg, &words);
        let cap = words.iter().map(|w| w.len() + 1).sum::<usize>();
        let ctx = |what: &str| format!("seed {seed}: {what}\n{}{}", lg.text, write_strategy(&s));
        let x = s.explore(cap);
        let Duration::Finite(before) = x.duration() else {
            return Err(ctx("generated strategy has no finite duration"));
        };
        if x.verdict != Verdict::Winning {
            return Err(ctx("generated strategy is not winning"));
        }
        tally.strategies += 1;
        let mut opts = ThreadSearch::new(cap);
        opts.v_cap = Some(SHORTCUT_VCAP);
        let certs = find_useless_threads(&s, opts).map_err(|e| ctx(&e.to_string()))?;
        for c in certs {
            tally.certificates += 1;
            let at = |what: &str| ctx(&format!("x={} y={} {what}", c.x.compact(), c.y.compact()));
            let t = take_shortcut(&s, &c).map_err(|e| at(&e.to_string()))?;
            if !shortcut_is_distributed(&s, &c.x, &c.y, cap) {
                return Err(at("shortcut is not distributed"));
            }
            let tx = t.explore(cap);
            if tx.verdict != Verdict::Winning {
                return Err(at(&format!("shortcut verdict {:?}", tx.verdict)));
            }
            match tx.duration() {
                Duration::Finite(d) if d < before => {}
                d => return Err(at(&format!("duration {before} -> {d}"))),
            }
            if !plays_correspond(&s, &t, &c.x, &c.y, cap) {
                return Err(at("plays do not correspond"));
            }
        }
    }
    Ok(tally)
}

/// The six-play strategy on G3 reduces in one step from 4 to 3.
pub fn sigma6_reduction() -> Check {
    let g = Arc::new(fixtures::g3());
    let text = std::fs::read_to_string(fixture_path("sigma6_g3.zstrat")).map_err(|e| e.to_string())?;
    let s = parse_strategy(g, &text).map_err(|e| e.to_string())?;
    let (t, log) = reduce(&s, ThreadSearch::new(10)).map_err(|e| e.to_string())?;
    let steps: Vec<(u64, u64)> = log.iter().map(|st| (st.before, st.after)).collect();
    if steps != [(4, 3)] || t.duration(10) != Duration::Finite(3) {
        return Err(format!("steps {steps:?}, final duration {}", t.duration(10)));
    }
    Ok("sigma6 4 -> 3".into())
}

pub fn shortcut_suite() -> Check {
    let t = shortcut_population(SHORTCUT_STRATEGIES)?;
    if t.strategies < 100 || t.certificates < 100 {
        return Err(format!("only {} strategies and {} certificates", t.strategies, t.certificates));
    }
    let s6 = sigma6_reduction()?;
    Ok(format!("{} strategies, {} certificates, {s6}", t.strategies, t.certificates))
}

// -------------------------------------------------------- classification

/// Golden classify reports: (golden file, fixture, extra arguments).
pub const CLASSIFY_GOLDENS: [(&str, &str, &[&str]); 4] = [
    ("classify_g4.txt", "g4.zgame", &[]),
    ("classify_g1.txt", "g1.zgame", &["--k", "1", "--kcap", "4"]),
    ("classify_path4.txt", "path4.zgame", &[]),
    ("classify_triangle.txt", "triangle.zgame", &[]),
];

/// Lines each golden report must contain, as a guard on the goldens.
const CLASSIFY_EXPECT: [(&str, &str); 5] = [
    ("classify_g4.txt", "broadcast-game N=1 "),
    ("classify_g1.txt", "series-parallel yes tree=sync(par(a,b),c)\n"),
    ("classify_g1.txt", "k-communicating k=1 counterexample "),
    ("classify_path4.txt", "series-parallel no\n"),
    ("classify_triangle.txt", "triangulated yes\n"),
];

pub fn classify_output(fixture: &str, extra: &[&str]) -> Outcome {
    let path = fixture_path(fixture);
    let mut args = vec!["classify", path.as_str()];
    args.extend_from_slice(extra);
    cli(&args)
}

pub fn classification_goldens() -> Check {
    for (golden, fixture, extra) in CLASSIFY_GOLDENS {
        let out = classify_output(fixture, extra);
        if out.code != 0 {
            return Err(format!("{fixture}: exit {} {}", out.code, out.stderr));
        }
        let want = std::fs::read_to_string(golden_path(golden)).map_err(|e| format!("{golden}: {e}"))?;
        if out.stdout != want {
            return Err(format!("{fixture} differs from {golden}:\n{}", out.stdout));
        }
    }
    for (golden, line) in CLASSIFY_EXPECT {
        let text = std::fs::read_to_string(golden_path(golden)).map_err(|e| e.to_string())?;
        if !text.contains(line) {
            return Err(format!("{golden} lacks `{}`", line.trim_end()));
        }
    }
    Ok(format!("{} reports byte-exact", CLASSIFY_GOLDENS.len()))
}

// ----------------------------------------------------------------- bounds

/// A second evaluator for the bound formulas, working on game parameters
/// directly. `None` stands for a value wider than `EXACT_BITS` bits.
pub mod reference {
    use super::*;

    pub type Val = Option<BigUint>;

    fn fits(n: BigUint) -> Val {
        (n.bits() <= EXACT_BITS).then_some(n)
    }

    fn mul(a: &Val, b: &Val) -> Val {
        match (a, b) {
            (Some(x), _) | (_, Some(x)) if x.is_zero() => Some(BigUint::zero()),
            (Some(x), Some(y)) => fits(x * y),
            _ => None,
        }
    }

    fn pow(b: &Val, e: &Val) -> Val {
        match (b, e) {
            (_, Some(e)) if e.is_zero() => Some(BigUint::one()),
            (Some(b), _) if b.is_zero() || b.is_one() => Some(b.clone()),
            (Some(b), Some(e)) => {
                let e = e.to_u64()?;
                if (b.bits() - 1).saturating_mul(e) > EXACT_BITS {
                    return None;
                }
                fits(b.pow(e as u32))
            }
            _ => None,
        }
    }

    fn n(x: usize) -> Val {
        Some(BigUint::from(x))
    }

    /// `K_A` over a series-parallel tree.
    pub fn k_tree(t: &SpTree, q: &BigUint, p: usize) -> Val {
        match t {
            SpTree::Leaf(_) => Some(q.clone()),
            SpTree::Parallel(l, r) => match (k_tree(l, q, p), k_tree(r, q, p)) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
            SpTree::Synchronized(l, r) => {
                let term = |sub: &SpTree| {
                    let k = k_tree(sub, q, p);
                    let a = sub.letters().len();
                    let qp = pow(&Some(q.clone()), &n(p));
                    mul(&mul(&mul(&k, &pow(&n(2), &pow(&n(a), &k))), &n(a)), &qp)
                };
                match (term(l), term(r)) {
                    (Some(a), Some(b)) => fits(a + b),
                    _ => None,
                }
            }
        }
    }

    /// `K_Q` for a pool of `size` processes; by symmetry of the formula it
    /// depends on the pool only through its size.
    pub fn k_pool(size: usize, q: &BigUint, nb: u64, a: usize, p: usize) -> Val {
        if size == 0 {
            return Some(BigUint::zero());
        }
        let inner = k_pool(size - 1, q, nb, a, p);
        let qv = Some(q.clone());
        let m = pow(&n(2), &n(size));
        let rn = mul(
            &mul(&mul(&mul(&Some(BigUint::from(nb)), &pow(&n(2), &n(a))), &n(a)), &pow(&qv, &n(p))),
            &pow(&n(2), &pow(&n(a), &inner)),
        );
        mul(&qv, &pow(&m, &mul(&m, &rn)))
    }
}

fn same(report: &BoundValue, reference: &reference::Val) -> bool {
    match (report, reference) {
        (BoundValue::Exact(a), Some(b)) => a == b,
        (BoundValue::Huge(_), None) => true,
        _ => false,
    }
}

fn walk(r: &Arc<BoundReport>, out: &mut Vec<Arc<BoundReport>>) {
    out.push(r.clone());
    for c in &r.children {
        walk(c, out);
    }
}

/// Games the bound checks run over: the fixtures and some random games.
pub fn bound_games() -> Vec<(String, Game)> {
    let mut out: Vec<(String, Game)> = fixture_games()
        .into_iter()
        .map(|(n, g)| (n.to_string(), g))
        .collect();
    for f in ["path4.zgame", "triangle.zgame"] {
        let text = std::fs::read_to_string(fixture_path(f)).expect("fixture");
        out.push((f.to_string(), parse_game(&text).expect("fixture parses")));
    }
    for seed in 0..20 {
        let (_, g) = super::random_game(seed ^ 0xb0_u64, 3, 3, 4);
        out.push((format!("random {seed}"), g));
    }
    out
}

pub fn bounds_suite() -> Check {
    let mut checked = 0;
    // The singleton case on its own: one letter over a four-state process.
    let one = parse_game(
        "process 1 states s0 s1 s2 s3 init s0 final s3\naction a dom 1 ctrl\ntrans a 1:s0 -> 1:s1\n",
    )
    .map_err(|e| e.to_string())?;
    let tree = classify_series_parallel(one.alphabet()).ok_or("one letter is series-parallel")?;
    let k = bound_series_parallel(&tree, &one);
    if k.value != BoundValue::from_u64(4) {
        return Err(format!("singleton K = {}, want |Q| = 4", k.value));
    }
    for (name, g) in bound_games() {
        let q = g.global_state_count_big();
        let (a, p) = (g.alphabet().num_letters(), g.num_processes());
        let empty = bound_k(&g, ProcSet::default(), 1);
        if empty.value != BoundValue::from_u64(0) {
            return Err(format!("{name}: K_empty = {}", empty.value));
        }
        let mut reports = Vec::new();
        if let Some(t) = classify_series_parallel(g.alphabet()) {
            let r = bound_series_parallel(&t, &g);
            if !same(&r.value, &reference::k_tree(&t, &q, p)) {
                return Err(format!("{name}: K_A = {} disagrees with the reference", r.value));
            }
            walk(&r, &mut reports);
        }
        for nb in 1..=3u64 {
            for pool in all_pools(&g) {
                let r = bound_k(&g, pool, nb);
                if !same(&r.value, &reference::k_pool(pool.len(), &q, nb, a, p)) {
                    return Err(format!("{name}: K{pool:?} N={nb} = {} disagrees", r.value));
                }
                walk(&r, &mut reports);
            }
        }
        for r in &reports {
            if !r.recompute() {
                return Err(format!("{name}: {} does not recompute", r.label));
            }
            if r.children.is_empty() && r.label.starts_with("K{") && r.value != BoundValue::Exact(q.clone()) {
                return Err(format!("{name}: leaf {} = {}, want |Q|", r.label, r.value));
            }
        }
        checked += reports.len();
    }
    Ok(format!("{checked} report nodes recompute and match the reference"))
}

// -------------------------------------------------------------- synthesis

pub const CORPUS_SIZE: usize = 60;

pub fn synthesis_equivalence() -> Check {
    let start = Instant::now();
    let (mut found, mut absent) = (0, 0);
    for c in super::synthesis_corpus(CORPUS_SIZE) {
        let ours = synthesize(c.game.clone(), SynthesisConfig::new(c.cap));
        if let Some(s) = &ours {
            if certify(s, c.cap) != Verdict::Winning {
                return Err(format!("seed {}: synthesized strategy does not certify", c.seed));
            }
        }
        let brute = brute_force(c.game.clone(), c.cap, super::BRUTE_BUDGET);
        match brute.found() {
            None => return Err(format!("seed {}: brute force over budget", c.seed)),
            Some(b) if b != ours.is_some() => {
                return Err(format!(
                    "seed {} cap {}: synthesize {} brute {}\n{}",
                    c.seed,
                    c.cap,
                    ours.is_some(),
                    b,
                    c.text
                ))
            }
            Some(true) => found += 1,
            Some(false) => absent += 1,
        }
    }
    let g1 = Arc::new(fixtures::g1());
    if synthesize(g1.clone(), SynthesisConfig::new(3)).is_none()
        || brute_force(g1, 3, super::BRUTE_BUDGET) == BruteResult::TooMany
    {
        return Err("G1 not found at cap 3".into());
    }
    let g2 = Arc::new(fixtures::g2());
    if synthesize(g2.clone(), SynthesisConfig::new(4)).is_some()
        || brute_force(g2, 1, super::BRUTE_BUDGET).found() != Some(false)
    {
        return Err("G2 not absent".into());
    }
    let t = start.elapsed();
    if t > WallTime::from_secs(300) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{found} found, {absent} absent, all agree; G1 found, G2 absent; {t:.2?}"))
}

// -------------------------------------------------------------------- cli

fn strategy_round_trip(s: &Strategy) -> Result<(), String> {
    let text = write_strategy(s);
    let back = parse_strategy(s.game().clone(), &text).map_err(|e| format!("{e}\n{text}"))?;
    if back != *s || write_strategy(&back) != text {
        return Err(format!("strategy changed on round trip\n{text}"));
    }
    Ok(())
}

fn game_round_trip(name: &str, g: &Game) -> Result<(), String> {
    let text = write_game(g);
    let back = parse_game(&text).map_err(|e| format!("{name}: {e}\n{text}"))?;
    if back != *g || write_game(&back) != text {
        return Err(format!("{name}: game changed on round trip\n{text}"));
    }
    Ok(())
}

/// One invocation per exit status.
pub fn exit_code_table() -> Vec<(Vec<String>, i32)> {
    let f = fixture_path;
    let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        (v(&["synthesize", &f("g1.zgame"), "--cap", "3"]), 0),
        (v(&["check", &f("g1.zgame"), &f("sigma_star_g1.zstrat")]), 0),
        (v(&["broadcast", &f("g4.zgame"), "--play", "m", "--pool", "1,2"]), 0),
        (v(&["classify", &f("g4.zgame")]), 0),
        (v(&["check", &f("g2.zgame"), &f("any_g2.zstrat"), "--cap", "10"]), 1),
        (v(&["synthesize", &f("g2.zgame"), "--cap", "2"]), 1),
        (v(&["broadcast", &f("g4.zgame"), "--play", "a", "--pool", "1,2"]), 1),
        (v(&["check", &f("missing.zgame"), &f("any_g2.zstrat")]), 2),
        (v(&["check", &f("g1.zgame"), &f("g1.zgame")]), 2),
        (v(&["broadcast", &f("g4.zgame"), "--play", "an", "--pool", "1"]), 2),
        (v(&["synthesize", &f("g1.zgame")]), 2),
        (v(&["frobnicate"]), 2),
        (v(&["check", &f("g3.zgame"), &f("loop_g3.zstrat"), "--cap", "5"]), 3),
    ]
}

pub fn cli_round_trips() -> Check {
    let mut games = bound_games();
    for seed in 0..30 {
        let (_, g) = super::random_game(seed ^ 0x7e57, 2, 3, 4);
        games.push((format!("corpus {seed}"), g));
    }
    for (name, g) in &games {
        game_round_trip(name, g)?;
    }
    let mut strategies = 0;
    for c in super::synthesis_corpus(20) {
        if let Some(s) = synthesize(c.game.clone(), SynthesisConfig::new(c.cap)) {
            strategy_round_trip(&s).map_err(|e| format!("seed {}: {e}", c.seed))?;
            strategies += 1;
        }
    }
    // Emitted artifacts: synthesize and reduce output, re-read from disk.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let emitted = [
        (vec!["synthesize".to_string(), fixture_path("g1.zgame"), "--cap".into(), "3".into()], "g1.zgame"),
        (
            vec!["reduce".to_string(), fixture_path("g3.zgame"), fixture_path("sigma6_g3.zstrat")],
            "g3.zgame",
        ),
    ];
    for (i, (args, game)) in emitted.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = cli(&args);
        if out.code != 0 {
            return Err(format!("{args:?}: exit {}", out.code));
        }
        let path = dir.path().join(format!("emitted{i}.zstrat"));
        std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
        let g = Arc::new(parse_game(&std::fs::read_to_string(fixture_path(game)).unwrap()).unwrap());
        let s = parse_strategy(g, &out.stdout).map_err(|e| e.to_string())?;
        strategy_round_trip(&s)?;
        let chk = cli(&["check", &fixture_path(game), path.to_str().unwrap()]);
        if chk.code != 0 {
            return Err(format!("emitted strategy from {args:?} does not check: {}", chk.stdout));
        }
        strategies += 1;
    }
    let table = exit_code_table();
    for (args, want) in &table {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = cli(&args);
        if first.code != *want {
            return Err(format!("{args:?}: exit {} want {want}\n{}", first.code, first.stderr));
        }
        if cli(&args) != first {
            return Err(format!("{args:?}: repeated run differs"));
        }
    }
    Ok(format!(
        "{} games and {strategies} strategies round-trip, {} exit codes match, runs repeat",
        games.len(),
        table.len()
    ))
}
