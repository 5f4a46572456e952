//! Mazurkiewicz traces in lexicographic normal form.
//!
//! A [`Trace`] stores the least linearization of its class under the
//! alphabet's letter order, so equality and hashing are plain sequence
//! operations. All operations work on the event poset implied by
//! that sequence: event `i` precedes event `j` when `i < j` and their
//! letters are dependent.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{AlphabetError, DependencyAlphabet, Letter, LetterSet, ProcId, ProcSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("traces are over different alphabets")]
    AlphabetMismatch,
    #[error("trace of length {len} exceeds cap {cap}")]
    TooLong { len: usize, cap: usize },
}

/// How a `B`-view of a trace is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ViewSemantics {
    /// Shortest prefix whose residual is independent of every letter of `B`.
    #[default]
    Literal,
    /// Least prefix containing every event labelled by a letter of `B`.
    Causal,
}

impl ViewSemantics {
    pub fn as_str(self) -> &'static str {
        match self {
            ViewSemantics::Literal => "literal",
            ViewSemantics::Causal => "causal",
        }
    }
}

impl std::str::FromStr for ViewSemantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(ViewSemantics::Literal),
            "causal" => Ok(ViewSemantics::Causal),
            other => Err(format!("unknown view semantics `{other}`")),
        }
    }
}

impl fmt::Display for ViewSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A Mazurkiewicz trace over a [`DependencyAlphabet`].
#[derive(Clone)]
pub struct Trace {
    alphabet: Arc<DependencyAlphabet>,
    letters: Vec<Letter>,
}

/// Lexicographically least linearization of the class of `word`.
///
/// At each step the removable letters are the first occurrences not preceded
/// by a dependent letter; picking the smallest of them is always safe since
/// every removable letter can start some linearization of the remainder.
pub(crate) fn normal_form(alpha: &DependencyAlphabet, word: &[Letter]) -> Vec<Letter> {
    let mut rest: Vec<Letter> = word.to_vec();
    let mut out = Vec::with_capacity(word.len());
    while !rest.is_empty() {
        let mut blocked = LetterSet::EMPTY;
        let mut best: Option<(u8, usize)> = None;
        for (i, &l) in rest.iter().enumerate() {
            if !blocked.contains(l) {
                let r = alpha.rank(l);
                if best.is_none_or(|(br, _)| r < br) {
                    best = Some((r, i));
                }
            }
            blocked = blocked.union(alpha.dependents(l));
            if blocked == alpha.all_letters() {
                break;
            }
        }
        let (_, i) = best.expect("the first letter is always removable");
        out.push(rest.remove(i));
    }
    out
}

/// Removes the first occurrence of `a` if no dependent letter precedes it.
fn remove_front(alpha: &DependencyAlphabet, rest: &mut Vec<Letter>, a: Letter) -> bool {
    let mut blocked = LetterSet::EMPTY;
    for i in 0..rest.len() {
        let l = rest[i];
        if l == a {
            if blocked.contains(a) {
                return false;
            }
            rest.remove(i);
            return true;
        }
        blocked = blocked.union(alpha.dependents(l));
        if blocked.contains(a) {
            return false;
        }
    }
    false
}

impl Trace {
    pub fn empty(alphabet: Arc<DependencyAlphabet>) -> Self {
        Trace {
            alphabet,
            letters: Vec::new(),
        }
    }

    /// The trace whose class contains `word`.
    pub fn from_word(alphabet: Arc<DependencyAlphabet>, word: &[Letter]) -> Self {
        let letters = normal_form(&alphabet, word);
        Trace { alphabet, letters }
    }

    /// Parses and normalizes a word of letter names (see
    /// [`DependencyAlphabet::parse_word`]).
    pub fn parse(alphabet: Arc<DependencyAlphabet>, text: &str) -> Result<Self, TraceError> {
        let word = alphabet
            .parse_word(text)
            .map_err(|e| match e {
                AlphabetError::UnknownLetter(l) => TraceError::UnknownLetter(l),
                other => TraceError::UnknownLetter(other.to_string()),
            })?;
        Ok(Trace::from_word(alphabet, &word))
    }

    pub fn alphabet(&self) -> &Arc<DependencyAlphabet> {
        &self.alphabet
    }

    /// The normal form.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_alphabet(&self, other: &Trace) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || *self.alphabet == *other.alphabet
    }

    fn check_alphabet(&self, other: &Trace) -> Result<(), TraceError> {
        if self.same_alphabet(other) {
            Ok(())
        } else {
            Err(TraceError::AlphabetMismatch)
        }
    }

    /// `alphabet(u)`: the set of letters occurring in the trace.
    pub fn letter_set(&self) -> LetterSet {
        self.letters.iter().copied().collect()
    }

    /// `dom(u)`: union of the domains of the letters.
    pub fn domain(&self) -> ProcSet {
        self.alphabet.domain_of_set(self.letter_set())
    }

    /// `|u|_p`: number of letters whose domain contains `p`.
    pub fn letter_count(&self, p: ProcId) -> Result<usize, TraceError> {
        if p.index() >= self.alphabet.num_processes() {
            return Err(TraceError::UnknownProcess(p.0.to_string()));
        }
        Ok(self.count_unchecked(p))
    }

    pub(crate) fn count_unchecked(&self, p: ProcId) -> usize {
        self.letters
            .iter()
            .filter(|&&l| self.alphabet.domain(l).contains(p))
            .count()
    }

    pub fn concat(&self, other: &Trace) -> Result<Trace, TraceError> {
        self.check_alphabet(other)?;
        let mut w = self.letters.clone();
        w.extend_from_slice(&other.letters);
        Ok(Trace::from_word(self.alphabet.clone(), &w))
    }

    /// `u·a`.
    pub fn push(&self, a: Letter) -> Trace {
        let mut w = self.letters.clone();
        w.push(a);
        Trace::from_word(self.alphabet.clone(), &w)
    }

    /// If `self ⊑ v`, the unique `w` with `self·w = v`.
    pub fn residual_in(&self, v: &Trace) -> Result<Option<Trace>, TraceError> {
        self.check_alphabet(v)?;
        Ok(self.residual_unchecked(v))
    }

    pub(crate) fn residual_unchecked(&self, v: &Trace) -> Option<Trace> {
        if self.len() > v.len() {
            return None;
        }
        let mut rest = v.letters.clone();
        for &a in &self.letters {
            if !remove_front(&self.alphabet, &mut rest, a) {
                return None;
            }
        }
        Some(Trace::from_word(self.alphabet.clone(), &rest))
    }

    /// `self ⊑ v`.
    pub fn is_prefix_of(&self, v: &Trace) -> bool {
        self.same_alphabet(v) && self.residual_unchecked(v).is_some()
    }

    /// Marks every event below some event whose letter lies in `targets`.
    fn downward_closure(&self, targets: LetterSet) -> Vec<bool> {
        let n = self.letters.len();
        let mut marked = vec![false; n];
        for j in (0..n).rev() {
            if targets.contains(self.letters[j]) {
                marked[j] = true;
            }
            if marked[j] {
                let dep = self.alphabet.dependents(self.letters[j]);
                for (m, &a) in marked[..j].iter_mut().zip(&self.letters[..j]) {
                    if dep.contains(a) {
                        *m = true;
                    }
                }
            }
        }
        marked
    }

    fn sub_trace(&self, keep: &[bool]) -> Trace {
        let w: Vec<Letter> = self
            .letters
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(&l, _)| l)
            .collect();
        Trace::from_word(self.alphabet.clone(), &w)
    }

    /// `view_B(u)` under the given semantics.
    pub fn view(&self, b: LetterSet, semantics: ViewSemantics) -> Trace {
        let targets = match semantics {
            ViewSemantics::Literal => self.alphabet.dependents_of_set(b),
            ViewSemantics::Causal => b,
        };
        self.sub_trace(&self.downward_closure(targets))
    }

    /// `view_p(u) = view_{A_p}(u)`.
    pub fn process_view(&self, p: ProcId, semantics: ViewSemantics) -> Trace {
        self.view(self.alphabet.process_letters(p), semantics)
    }

    /// Positions of the maximal events of the normal form.
    pub fn maximal_positions(&self) -> Vec<usize> {
        let n = self.letters.len();
        let mut later = LetterSet::EMPTY;
        let mut out = Vec::new();
        for i in (0..n).rev() {
            let l = self.letters[i];
            if !later.contains(l) {
                out.push(i);
            }
            later = later.union(self.alphabet.dependents(l));
        }
        out.reverse();
        out
    }

    /// Letters of the maximal events (each letter labels at most one).
    pub fn maximal_letters(&self) -> LetterSet {
        self.maximal_positions()
            .into_iter()
            .map(|i| self.letters[i])
            .collect()
    }

    /// A single maximal event. The empty trace is not prime.
    pub fn is_prime(&self) -> bool {
        self.maximal_positions().len() == 1
    }

    /// The label of the maximal event of a prime trace.
    pub fn last_letter(&self) -> Option<Letter> {
        match self.maximal_positions()[..] {
            [i] => Some(self.letters[i]),
            _ => None,
        }
    }

    /// Every linearization ends with a letter of `b`. False on the empty
    /// trace.
    pub fn is_prime_for(&self, b: LetterSet) -> bool {
        !self.is_empty() && self.maximal_letters().is_subset(b)
    }

    /// The trace with its maximal event at position `i` removed.
    pub fn without_event(&self, i: usize) -> Trace {
        let mut keep = vec![true; self.len()];
        keep[i] = false;
        self.sub_trace(&keep)
    }

    /// All traces `v` with `v ⊑ self`, in shortlex order.
    pub fn prefixes(&self) -> Vec<Trace> {
        let mut seen: HashSet<Vec<Letter>> = HashSet::new();
        let mut out = Vec::new();
        let mut layer = vec![(Trace::empty(self.alphabet.clone()), self.letters.clone())];
        seen.insert(Vec::new());
        while !layer.is_empty() {
            let mut next = Vec::new();
            for (p, rest) in layer {
                let mut blocked = LetterSet::EMPTY;
                let mut tried = LetterSet::EMPTY;
                for (i, &l) in rest.iter().enumerate() {
                    if !blocked.contains(l) && !tried.contains(l) {
                        tried.insert(l);
                        let q = p.push(l);
                        if seen.insert(q.letters.clone()) {
                            let mut r = rest.clone();
                            r.remove(i);
                            next.push((q, r));
                        }
                    }
                    blocked = blocked.union(self.alphabet.dependents(l));
                }
                out.push(p);
            }
            layer = next;
        }
        out.sort();
        out
    }

    /// Every word in the class of the trace.
    pub fn linearizations(&self, cap: usize) -> Result<BTreeSet<Vec<Letter>>, TraceError> {
        if self.len() > cap {
            return Err(TraceError::TooLong {
                len: self.len(),
                cap,
            });
        }
        let mut out = BTreeSet::new();
        let mut prefix = Vec::with_capacity(self.len());
        self.topological_sorts(self.letters.clone(), &mut prefix, &mut out);
        Ok(out)
    }

    fn topological_sorts(
        &self,
        rest: Vec<Letter>,
        prefix: &mut Vec<Letter>,
        out: &mut BTreeSet<Vec<Letter>>,
    ) {
        if rest.is_empty() {
            out.insert(prefix.clone());
            return;
        }
        let mut blocked = LetterSet::EMPTY;
        for (i, &l) in rest.iter().enumerate() {
            if !blocked.contains(l) {
                let mut r = rest.clone();
                r.remove(i);
                prefix.push(l);
                self.topological_sorts(r, prefix, out);
                prefix.pop();
            }
            blocked = blocked.union(self.alphabet.dependents(l));
        }
    }

    /// Ranks of the normal form, for lexicographic comparisons.
    pub fn rank_key(&self) -> Vec<u8> {
        self.letters.iter().map(|&l| self.alphabet.rank(l)).collect()
    }

    /// Compares normal forms lexicographically under the letter order
    /// (without the length-first rule of [`Ord`]).
    pub fn lex_cmp(&self, other: &Trace) -> Ordering {
        self.rank_key().cmp(&other.rank_key())
    }

    /// Single-token rendering: letters concatenated when every letter name
    /// is one character, joined by `.` otherwise; `-` for the empty trace.
    pub fn compact(&self) -> String {
        let short = self
            .letters
            .iter()
            .all(|&l| self.alphabet.letter_name(l).chars().count() == 1);
        self.render(if short { "" } else { "." })
    }

    /// Renders letter names joined by `sep`, `-` for the empty trace.
    pub fn render(&self, sep: &str) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        self.letters
            .iter()
            .map(|&l| self.alphabet.letter_name(l))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl PartialEq for Trace {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && self.same_alphabet(other)
    }
}

impl Eq for Trace {}

impl Hash for Trace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

/// Shortlex: shorter traces first, then lexicographic by letter rank.
impl Ord for Trace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Trace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Space separated normal form, `-` for the empty trace.
impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(" "))
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Trace({})", self.render(" "))
    }
}
