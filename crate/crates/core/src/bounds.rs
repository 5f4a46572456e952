//! Strategy-length bounds: the series-parallel `K_A` recursion and the
//! pool bound `K_Q`, in exact arithmetic where it fits.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::alphabet::ProcSet;
use crate::classify::SpTree;
use crate::game::Game;

/// Values wider than this many bits are kept symbolic.
pub const EXACT_BITS: u64 = 4096;

/// A nonnegative bound: exact, or a symbolic expression known to exceed
/// `2^EXACT_BITS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Exact(BigUint),
    Huge(String),
}

impl BoundValue {
    pub fn from_u64(n: u64) -> Self {
        BoundValue::Exact(BigUint::from(n))
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            BoundValue::Exact(n) => Some(n),
            BoundValue::Huge(_) => None,
        }
    }

    fn wrap(n: BigUint, expr: impl FnOnce() -> String) -> Self {
        if n.bits() > EXACT_BITS {
            BoundValue::Huge(expr())
        } else {
            BoundValue::Exact(n)
        }
    }

    /// Short text for use inside symbolic expressions.
    fn term(&self) -> String {
        match self {
            BoundValue::Exact(n) => short(n),
            BoundValue::Huge(s) => format!("({s})"),
        }
    }

    pub fn mul(&self, other: &BoundValue) -> BoundValue {
        match (self, other) {
            (BoundValue::Exact(a), _) | (_, BoundValue::Exact(a)) if a.is_zero() => {
                BoundValue::Exact(BigUint::zero())
            }
            (BoundValue::Exact(a), BoundValue::Exact(b)) => {
                if a.bits() + b.bits() > EXACT_BITS + 1 {
                    BoundValue::Huge(format!("{}*{}", self.term(), other.term()))
                } else {
                    Self::wrap(a * b, || format!("{}*{}", self.term(), other.term()))
                }
            }
            _ => BoundValue::Huge(format!("{}*{}", self.term(), other.term())),
        }
    }

    pub fn add(&self, other: &BoundValue) -> BoundValue {
        match (self, other) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => {
                Self::wrap(a + b, || format!("{}+{}", self.term(), other.term()))
            }
            _ => BoundValue::Huge(format!("{}+{}", self.term(), other.term())),
        }
    }

    /// Exact values never exceed `2^EXACT_BITS`, so any symbolic value is
    /// larger than any exact one.
    pub fn max(&self, other: &BoundValue) -> BoundValue {
        match (self, other) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => BoundValue::Exact(a.max(b).clone()),
            (BoundValue::Huge(_), BoundValue::Exact(_)) => self.clone(),
            (BoundValue::Exact(_), BoundValue::Huge(_)) => other.clone(),
            (BoundValue::Huge(a), BoundValue::Huge(b)) if a == b => self.clone(),
            _ => BoundValue::Huge(format!("max({},{})", self.term(), other.term())),
        }
    }

    /// `self^exp`.
    pub fn pow(&self, exp: &BoundValue) -> BoundValue {
        let sym = || format!("{}^{}", self.term(), exp.term());
        match (self, exp) {
            (_, BoundValue::Exact(e)) if e.is_zero() => BoundValue::from_u64(1),
            (BoundValue::Exact(b), _) if b.is_zero() || b.is_one() => self.clone(),
            (BoundValue::Exact(b), BoundValue::Exact(e)) => {
                // bits(b^e) ≥ (bits(b) - 1)·e + 1
                let lower = (b.bits() - 1).saturating_mul(e.to_u64().unwrap_or(u64::MAX));
                match e.to_u32() {
                    Some(e32) if lower <= EXACT_BITS => Self::wrap(b.pow(e32), sym),
                    _ => BoundValue::Huge(sym()),
                }
            }
            _ => BoundValue::Huge(sym()),
        }
    }
}

fn short(n: &BigUint) -> String {
    let s = n.to_string();
    if s.len() <= 40 {
        return s;
    }
    let bits = n.bits();
    if n.count_ones() == 1 {
        format!("2^{}", bits - 1)
    } else {
        format!("[{bits}-bit]")
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(n) => write!(f, "{n}"),
            BoundValue::Huge(s) => write!(f, "huge {s}"),
        }
    }
}

/// How a node's value is obtained from its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// `K = |Q|`.
    Singleton { q: BigUint },
    /// `K = max(K_{A_0}, K_{A_1})`.
    Parallel,
    /// `K = Σ_i K_{A_i}·2^{|A_i|^{K_{A_i}}}·|A_i|·|Q|^{|P|}`.
    Synchronized {
        a0: usize,
        a1: usize,
        q: BigUint,
        p: usize,
    },
    /// `K_∅ = 0`.
    EmptyPool,
    /// `K_Q = |Q|·R(2^{|pool|}, N·2^{|A|}·|A|·|Q|^{|P|}·2^{|A|^{max K_{Q'}}})`,
    /// with `R(m, n) ≤ m^{m·n}`. Here `|Q|` is the number of global states
    /// and `|pool|` the number of processes in the pool.
    Pool {
        pool_size: usize,
        q: BigUint,
        n_broadcast: u64,
        a: usize,
        p: usize,
        inner_max: BoundValue,
        ramsey_m: BoundValue,
        ramsey_n: BoundValue,
    },
}

/// A bound with the formula and sub-reports it was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub label: String,
    pub value: BoundValue,
    pub formula: Formula,
    pub children: Vec<Arc<BoundReport>>,
}

fn big(n: usize) -> BoundValue {
    BoundValue::Exact(BigUint::from(n))
}

fn two() -> BoundValue {
    BoundValue::from_u64(2)
}

fn sync_term(k: &BoundValue, a: usize, q: &BigUint, p: usize) -> BoundValue {
    let qv = BoundValue::Exact(q.clone());
    k.mul(&two().pow(&big(a).pow(k)))
        .mul(&big(a))
        .mul(&qv.pow(&big(p)))
}

fn ramsey_upper(m: &BoundValue, n: &BoundValue) -> BoundValue {
    m.pow(&m.mul(n))
}

fn pool_parts(
    pool_size: usize,
    q: &BigUint,
    n_broadcast: u64,
    a: usize,
    p: usize,
    inner_max: &BoundValue,
) -> (BoundValue, BoundValue, BoundValue) {
    let qv = BoundValue::Exact(q.clone());
    let ramsey_m = two().pow(&big(pool_size));
    let ramsey_n = BoundValue::from_u64(n_broadcast)
        .mul(&two().pow(&big(a)))
        .mul(&big(a))
        .mul(&qv.pow(&big(p)))
        .mul(&two().pow(&big(a).pow(inner_max)));
    let value = qv.mul(&ramsey_upper(&ramsey_m, &ramsey_n));
    (ramsey_m, ramsey_n, value)
}

impl BoundReport {
    /// Re-evaluates this node from its formula and its children's values.
    pub fn evaluate(&self) -> BoundValue {
        match &self.formula {
            Formula::Singleton { q } => BoundValue::Exact(q.clone()),
            Formula::Parallel => self.children[0].value.max(&self.children[1].value),
            Formula::Synchronized { a0, a1, q, p } => {
                sync_term(&self.children[0].value, *a0, q, *p)
                    .add(&sync_term(&self.children[1].value, *a1, q, *p))
            }
            Formula::EmptyPool => BoundValue::from_u64(0),
            Formula::Pool {
                pool_size,
                q,
                n_broadcast,
                a,
                p,
                inner_max,
                ..
            } => pool_parts(*pool_size, q, *n_broadcast, *a, *p, inner_max).2,
        }
    }

    /// Every node recomputes to its recorded value, and pool nodes record
    /// the maximum of their sub-pools.
    pub fn recompute(&self) -> bool {
        let here = self.evaluate() == self.value;
        let inner = match &self.formula {
            Formula::Pool {
                pool_size,
                q,
                n_broadcast,
                a,
                p,
                inner_max,
                ramsey_m,
                ramsey_n,
            } => {
                let folded = self
                    .children
                    .iter()
                    .fold(BoundValue::from_u64(0), |m, c| m.max(&c.value));
                let (rm, rn, _) = pool_parts(*pool_size, q, *n_broadcast, *a, *p, inner_max);
                folded == *inner_max && rm == *ramsey_m && rn == *ramsey_n
            }
            _ => true,
        };
        here && inner && self.children.iter().all(|c| c.recompute())
    }

    /// One line per distinct node, children first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut done = BTreeSet::new();
        self.render_into(&mut out, &mut done);
        out
    }

    fn render_into(&self, out: &mut String, done: &mut BTreeSet<String>) {
        if !done.insert(self.label.clone()) {
            return;
        }
        for c in &self.children {
            c.render_into(out, done);
        }
        let kids: Vec<&str> = self.children.iter().map(|c| c.label.as_str()).collect();
        let how = match &self.formula {
            Formula::Singleton { q } => format!("singleton |Q|={q}"),
            Formula::Parallel => format!("parallel max({})", kids.join(",")),
            Formula::Synchronized { a0, a1, q, p } => format!(
                "synchronized {}:|A0|={a0} {}:|A1|={a1} |Q|={q} |P|={p}",
                kids[0], kids[1]
            ),
            Formula::EmptyPool => "empty pool".to_string(),
            Formula::Pool {
                pool_size,
                q,
                n_broadcast,
                a,
                p,
                inner_max,
                ramsey_m,
                ramsey_n,
            } => format!(
                "pool |pool|={pool_size} |Q|={q} N={n_broadcast} |A|={a} |P|={p} maxK={} R({},{})<=m^(m*n)",
                inner_max.term(),
                ramsey_m.term(),
                ramsey_n.term()
            ),
        };
        out.push_str(&format!("{} = {} [{}]\n", self.label, self.value, how));
    }
}

/// `K_A` for the series-parallel decomposition `tree` of `g`'s alphabet.
pub fn bound_series_parallel(tree: &SpTree, g: &Game) -> Arc<BoundReport> {
    let q = g.global_state_count_big();
    let p = g.num_processes();
    let al = g.alphabet();
    fn go(
        t: &SpTree,
        q: &BigUint,
        p: usize,
        al: &crate::alphabet::DependencyAlphabet,
    ) -> Arc<BoundReport> {
        let label = format!("K{{{}}}", al.fmt_letter_set(t.letters()));
        let report = match t {
            SpTree::Leaf(_) => BoundReport {
                label,
                value: BoundValue::Exact(q.clone()),
                formula: Formula::Singleton { q: q.clone() },
                children: vec![],
            },
            SpTree::Parallel(l, r) | SpTree::Synchronized(l, r) => {
                let children = vec![go(l, q, p, al), go(r, q, p, al)];
                let formula = if matches!(t, SpTree::Parallel(..)) {
                    Formula::Parallel
                } else {
                    Formula::Synchronized {
                        a0: l.letters().len(),
                        a1: r.letters().len(),
                        q: q.clone(),
                        p,
                    }
                };
                let mut rep = BoundReport {
                    label,
                    value: BoundValue::from_u64(0),
                    formula,
                    children,
                };
                rep.value = rep.evaluate();
                rep
            }
        };
        Arc::new(report)
    }
    go(tree, &q, p, al)
}

/// `K_Q` for `pool`, recursing over proper sub-pools (memoized).
pub fn bound_k(g: &Game, pool: ProcSet, n_broadcast: u64) -> Arc<BoundReport> {
    let mut memo: HashMap<ProcSet, Arc<BoundReport>> = HashMap::new();
    pool_report(g, pool, n_broadcast.max(1), &mut memo)
}

fn pool_report(
    g: &Game,
    pool: ProcSet,
    n_broadcast: u64,
    memo: &mut HashMap<ProcSet, Arc<BoundReport>>,
) -> Arc<BoundReport> {
    if let Some(r) = memo.get(&pool) {
        return r.clone();
    }
    let label = format!("K_Q{}", g.alphabet().fmt_process_set(pool));
    let report = if pool.is_empty() {
        BoundReport {
            label,
            value: BoundValue::from_u64(0),
            formula: Formula::EmptyPool,
            children: vec![],
        }
    } else {
        // Proper sub-pools: drop one or more members. K is monotone in
        // the pool, so maximal proper sub-pools suffice for the maximum,
        // but all are recorded through the recursion.
        let children: Vec<Arc<BoundReport>> = pool
            .iter()
            .map(|r| pool_report(g, pool.difference(ProcSet::singleton(r)), n_broadcast, memo))
            .collect();
        let inner_max = children
            .iter()
            .fold(BoundValue::from_u64(0), |m, c| m.max(&c.value));
        let q = g.global_state_count_big();
        let a = g.alphabet().num_letters();
        let p = g.num_processes();
        let (ramsey_m, ramsey_n, value) = pool_parts(pool.len(), &q, n_broadcast, a, p, &inner_max);
        BoundReport {
            label,
            value,
            formula: Formula::Pool {
                pool_size: pool.len(),
                q,
                n_broadcast,
                a,
                p,
                inner_max,
                ramsey_m,
                ramsey_n,
            },
            children,
        }
    };
    let r = Arc::new(report);
    memo.insert(pool, r.clone());
    r
}
