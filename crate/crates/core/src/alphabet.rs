//! Dependency alphabets: letters with process domains, and the dependency
//! relation they induce.
//!
//! Letters and processes are small dense indices. Sets of either are stored
//! as 64-bit masks, which bounds alphabets and process sets to 64 members.

use std::fmt;

use thiserror::Error;

/// Maximum number of letters or processes in one alphabet.
pub const MAX_MEMBERS: usize = 64;

/// Index of a letter in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

/// Index of a process in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcId(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ProcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

macro_rules! bitset {
    ($name:ident, $elem:ident) => {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(pub u64);

        impl $name {
            pub const EMPTY: $name = $name(0);

            pub fn singleton(e: $elem) -> Self {
                $name(1u64 << e.0)
            }

            /// The set `{0, .., n-1}`.
            pub fn full(n: usize) -> Self {
                if n >= 64 {
                    $name(u64::MAX)
                } else {
                    $name((1u64 << n) - 1)
                }
            }

            pub fn contains(self, e: $elem) -> bool {
                self.0 & (1u64 << e.0) != 0
            }

            pub fn insert(&mut self, e: $elem) {
                self.0 |= 1u64 << e.0;
            }

            pub fn remove(&mut self, e: $elem) {
                self.0 &= !(1u64 << e.0);
            }

            pub fn with(mut self, e: $elem) -> Self {
                self.insert(e);
                self
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn union(self, other: Self) -> Self {
                $name(self.0 | other.0)
            }

            pub fn intersection(self, other: Self) -> Self {
                $name(self.0 & other.0)
            }

            pub fn difference(self, other: Self) -> Self {
                $name(self.0 & !other.0)
            }

            pub fn intersects(self, other: Self) -> bool {
                self.0 & other.0 != 0
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            /// Members in increasing index order.
            pub fn iter(self) -> impl Iterator<Item = $elem> {
                let mut bits = self.0;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        None
                    } else {
                        let i = bits.trailing_zeros();
                        bits &= bits - 1;
                        Some($elem(i as u8))
                    }
                })
            }

            /// Smallest member by index.
            pub fn first(self) -> Option<$elem> {
                self.iter().next()
            }
        }

        impl FromIterator<$elem> for $name {
            fn from_iter<I: IntoIterator<Item = $elem>>(iter: I) -> Self {
                let mut s = $name::EMPTY;
                for e in iter {
                    s.insert(e);
                }
                s
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter().map(|e| e.0)).finish()
            }
        }
    };
}

bitset!(LetterSet, Letter);
bitset!(ProcSet, ProcId);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("duplicate process `{0}`")]
    DuplicateProcess(String),
    #[error("letter `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("letter order must list every letter exactly once")]
    BadOrder,
    #[error("too many members (at most {MAX_MEMBERS} letters and {MAX_MEMBERS} processes)")]
    TooLarge,
    #[error("reserved or malformed name `{0}`")]
    BadName(String),
}

/// Letters with process domains, plus the total letter order used for
/// normal forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyAlphabet {
    processes: Vec<String>,
    letters: Vec<String>,
    domains: Vec<ProcSet>,
    rank: Vec<u8>,
    by_rank: Vec<Letter>,
    dependent: Vec<LetterSet>,
}

/// Names that would clash with the text formats.
pub(crate) fn is_reserved(name: &str) -> bool {
    name.is_empty()
        || name == "-"
        || name == "allow"
        || name == "->"
        || name.contains([':', ',', '{', '}', '=', '#'])
        || name.chars().any(char::is_whitespace)
}

impl DependencyAlphabet {
    /// Builds an alphabet. `letters` pairs each letter name with the names
    /// of the processes in its domain. `order`, when given, lists all
    /// letters from smallest to largest; otherwise declaration order is used.
    pub fn new<S: AsRef<str>>(
        processes: &[S],
        letters: &[(S, Vec<S>)],
        order: Option<&[S]>,
    ) -> Result<Self, AlphabetError> {
        if processes.len() > MAX_MEMBERS || letters.len() > MAX_MEMBERS {
            return Err(AlphabetError::TooLarge);
        }
        let mut proc_names: Vec<String> = Vec::with_capacity(processes.len());
        for p in processes {
            let p = p.as_ref();
            if is_reserved(p) {
                return Err(AlphabetError::BadName(p.to_string()));
            }
            if proc_names.iter().any(|q| q == p) {
                return Err(AlphabetError::DuplicateProcess(p.to_string()));
            }
            proc_names.push(p.to_string());
        }
        let mut names: Vec<String> = Vec::with_capacity(letters.len());
        let mut domains = Vec::with_capacity(letters.len());
        for (name, dom) in letters {
            let name = name.as_ref();
            if is_reserved(name) {
                return Err(AlphabetError::BadName(name.to_string()));
            }
            if names.iter().any(|n| n == name) {
                return Err(AlphabetError::DuplicateLetter(name.to_string()));
            }
            let mut d = ProcSet::EMPTY;
            for p in dom {
                let p = p.as_ref();
                let idx = proc_names
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| AlphabetError::UnknownProcess(p.to_string()))?;
                d.insert(ProcId(idx as u8));
            }
            if d.is_empty() {
                return Err(AlphabetError::EmptyDomain(name.to_string()));
            }
            names.push(name.to_string());
            domains.push(d);
        }
        let by_rank: Vec<Letter> = match order {
            None => (0..names.len()).map(|i| Letter(i as u8)).collect(),
            Some(order) => {
                if order.len() != names.len() {
                    return Err(AlphabetError::BadOrder);
                }
                let mut seen = LetterSet::EMPTY;
                let mut out = Vec::with_capacity(order.len());
                for o in order {
                    let o = o.as_ref();
                    let idx = names
                        .iter()
                        .position(|n| n == o)
                        .ok_or_else(|| AlphabetError::UnknownLetter(o.to_string()))?;
                    let l = Letter(idx as u8);
                    if seen.contains(l) {
                        return Err(AlphabetError::BadOrder);
                    }
                    seen.insert(l);
                    out.push(l);
                }
                out
            }
        };
        let mut rank = vec![0u8; names.len()];
        for (r, l) in by_rank.iter().enumerate() {
            rank[l.index()] = r as u8;
        }
        let dependent = domains
            .iter()
            .map(|d| {
                domains
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| d.intersects(**e))
                    .map(|(j, _)| Letter(j as u8))
                    .collect()
            })
            .collect();
        Ok(DependencyAlphabet {
            processes: proc_names,
            letters: names,
            domains,
            rank,
            by_rank,
            dependent,
        })
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn num_processes(&self) -> usize {
        self.processes.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letters.len()).map(|i| Letter(i as u8))
    }

    /// Letters from smallest to largest in the normal-form order.
    pub fn letters_by_rank(&self) -> &[Letter] {
        &self.by_rank
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcId> + '_ {
        (0..self.processes.len()).map(|i| ProcId(i as u8))
    }

    pub fn all_letters(&self) -> LetterSet {
        LetterSet::full(self.letters.len())
    }

    pub fn all_processes(&self) -> ProcSet {
        ProcSet::full(self.processes.len())
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.letters
            .iter()
            .position(|n| n == name)
            .map(|i| Letter(i as u8))
    }

    pub fn process(&self, name: &str) -> Option<ProcId> {
        self.processes
            .iter()
            .position(|n| n == name)
            .map(|i| ProcId(i as u8))
    }

    pub fn letter_name(&self, l: Letter) -> &str {
        &self.letters[l.index()]
    }

    pub fn process_name(&self, p: ProcId) -> &str {
        &self.processes[p.index()]
    }

    pub fn rank(&self, l: Letter) -> u8 {
        self.rank[l.index()]
    }

    pub fn domain(&self, l: Letter) -> ProcSet {
        self.domains[l.index()]
    }

    /// Union of the domains of a set of letters.
    pub fn domain_of_set(&self, b: LetterSet) -> ProcSet {
        b.iter().fold(ProcSet::EMPTY, |acc, l| acc.union(self.domain(l)))
    }

    /// `D(a, b)`: the domains intersect.
    pub fn depends(&self, a: Letter, b: Letter) -> bool {
        self.dependent[a.index()].contains(b)
    }

    pub fn independent(&self, a: Letter, b: Letter) -> bool {
        !self.depends(a, b)
    }

    /// All letters dependent on `a` (including `a`).
    pub fn dependents(&self, a: Letter) -> LetterSet {
        self.dependent[a.index()]
    }

    /// All letters dependent on at least one letter of `b`.
    pub fn dependents_of_set(&self, b: LetterSet) -> LetterSet {
        b.iter()
            .fold(LetterSet::EMPTY, |acc, l| acc.union(self.dependents(l)))
    }

    /// `A_p`: the letters whose domain contains `p`.
    pub fn process_letters(&self, p: ProcId) -> LetterSet {
        self.letters()
            .filter(|&l| self.domain(l).contains(p))
            .collect()
    }

    /// Letters whose domain lies entirely inside `pool`.
    pub fn letters_within(&self, pool: ProcSet) -> LetterSet {
        self.letters()
            .filter(|&l| self.domain(l).is_subset(pool))
            .collect()
    }

    /// Parses a whitespace separated letter list; `-` (or empty text) is
    /// the empty word. A single token that is not a letter is split into
    /// characters when every character names a letter.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>, AlphabetError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() || tokens == ["-"] {
            return Ok(Vec::new());
        }
        if tokens.len() == 1 && self.letter(tokens[0]).is_none() {
            let chars: Option<Vec<Letter>> = tokens[0]
                .chars()
                .map(|c| self.letter(c.encode_utf8(&mut [0; 4])))
                .collect();
            if let Some(word) = chars {
                return Ok(word);
            }
        }
        tokens
            .iter()
            .map(|t| {
                self.letter(t)
                    .ok_or_else(|| AlphabetError::UnknownLetter(t.to_string()))
            })
            .collect()
    }

    /// Parses a letter set given as names separated by commas or spaces.
    pub fn parse_letter_set(&self, text: &str) -> Result<LetterSet, AlphabetError> {
        let mut s = LetterSet::EMPTY;
        for t in text.split([',', ' ']).filter(|t| !t.is_empty() && *t != "-") {
            s.insert(
                self.letter(t)
                    .ok_or_else(|| AlphabetError::UnknownLetter(t.to_string()))?,
            );
        }
        Ok(s)
    }

    /// Parses a process set given as names separated by commas or spaces.
    pub fn parse_process_set(&self, text: &str) -> Result<ProcSet, AlphabetError> {
        let mut s = ProcSet::EMPTY;
        let text = text.trim().trim_start_matches('{').trim_end_matches('}');
        for t in text.split([',', ' ']).filter(|t| !t.is_empty() && *t != "-") {
            s.insert(
                self.process(t)
                    .ok_or_else(|| AlphabetError::UnknownProcess(t.to_string()))?,
            );
        }
        Ok(s)
    }

    /// Renders a process set as `{1,2}`.
    pub fn fmt_process_set(&self, s: ProcSet) -> String {
        let names: Vec<&str> = s.iter().map(|p| self.process_name(p)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Renders a letter set in letter order, comma separated, `-` if empty.
    pub fn fmt_letter_set(&self, s: LetterSet) -> String {
        let mut ls: Vec<Letter> = s.iter().collect();
        ls.sort_by_key(|&l| self.rank(l));
        if ls.is_empty() {
            return "-".to_string();
        }
        ls.iter()
            .map(|&l| self.letter_name(l))
            .collect::<Vec<_>>()
            .join(",")
    }
}
