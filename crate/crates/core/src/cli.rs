//! Command-line front end. `run` is pure apart from reading input files,
//! so tests drive it directly.

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::alphabet::ProcId;
use crate::bounds::{bound_k, bound_series_parallel};
use crate::broadcast::{broadcast_witness, decide_broadcast_game, default_vcap, BroadcastCaps, BroadcastError};
use crate::classify::{
    check_k_communicating, check_triangulated, classify_series_parallel, communication_graph, KVerdict,
};
use crate::error::Error;
use crate::game::Game;
use crate::ordering::{check_dag_condition, check_process_ordering, declared, ProcessOrdering};
use crate::shortcut::{reduce, ShortcutError, StepDisplay, ThreadSearch};
use crate::strategy::{Strategy, Verdict};
use crate::synth::{synthesize, SynthesisConfig};
use crate::trace::{Trace, ViewSemantics};
use crate::zgame::parse_game;
use crate::zstrat::{parse_strategy, write_strategy};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

/// Largest process count for which `classify` searches all orderings.
const ORDER_SEARCH_LIMIT: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "zsynth", version, about = "Distributed synthesis for Zielonka games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SemanticsArg {
    Literal,
    Causal,
}

impl From<SemanticsArg> for ViewSemantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Literal => ViewSemantics::Literal,
            SemanticsArg::Causal => ViewSemantics::Causal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TraceOp {
    Normalize,
    Concat,
    Residual,
    View,
    Prime,
    Count,
    Linearizations,
    Play,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report the structural classes the game belongs to.
    Classify {
        game: String,
        /// Ordering override, e.g. `1<=2,3<=2` (`-` for the discrete order).
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        ucap: Option<usize>,
        #[arg(long)]
        vcap: Option<usize>,
        #[arg(long)]
        wcap: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        kcap: usize,
    },
    /// Decide whether a prime play is a broadcast for a pool.
    Broadcast {
        game: String,
        #[arg(long)]
        play: String,
        #[arg(long)]
        pool: String,
        #[arg(long)]
        vcap: Option<usize>,
    },
    /// Explore a strategy and report its verdict.
    Check {
        game: String,
        strategy: String,
        #[arg(long, default_value_t = 10)]
        cap: usize,
    },
    /// Remove useless threads from a winning strategy.
    Reduce {
        game: String,
        strategy: String,
        #[arg(long, default_value_t = 10)]
        cap: usize,
        #[arg(long)]
        vcap: Option<usize>,
    },
    /// Search for a winning strategy with plays of bounded length.
    Synthesize {
        game: String,
        #[arg(long)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Literal)]
        semantics: SemanticsArg,
    },
    /// Strategy-length bounds.
    Bounds {
        game: String,
        #[arg(long)]
        pool: Option<String>,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
    },
    /// Trace operations over the game's alphabet.
    Trace {
        game: String,
        #[arg(long, value_enum)]
        op: TraceOp,
        #[arg(long, default_value = "-")]
        u: String,
        #[arg(long)]
        v: Option<String>,
        /// Letter set for `view` and `prime`.
        #[arg(long)]
        letters: Option<String>,
        /// Process for `view` and `count`.
        #[arg(long)]
        proc: Option<String>,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Literal)]
        semantics: SemanticsArg,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
    },
}

/// Exit status with the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, body: String) -> Self {
        Outcome {
            code,
            stdout: format!("format 1\n{body}"),
            stderr: String::new(),
        }
    }

    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_POSITIVE,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(o) => o,
        Err(e) => Outcome::input_error(e),
    }
}

fn load_game(path: &str) -> Result<Arc<Game>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    Ok(Arc::new(parse_game(&text)?))
}

fn load_strategy(game: &Arc<Game>, path: &str) -> Result<Strategy, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    Ok(parse_strategy(game.clone(), &text)?)
}

/// Parses `1<=2,3<=2`; `-` is the discrete order.
pub fn parse_ordering(g: &Game, text: &str) -> Result<ProcessOrdering, Error> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|t| !t.is_empty() && *t != "-") {
        let (p, q) = item
            .split_once("<=")
            .ok_or_else(|| Error::Usage(format!("bad ordering pair `{item}`")))?;
        pairs.push((g.process(p.trim())?, g.process(q.trim())?));
    }
    Ok(ProcessOrdering::from_pairs(g.num_processes(), &pairs)?)
}

fn caps_text(c: &BroadcastCaps) -> String {
    format!("caps u={},v={},w={}", c.u_cap, c.v_cap, c.witness_cap)
}

/// The classify line for broadcast games, and whether `N` was found.
fn broadcast_line(g: &Game, fixed: Option<ProcessOrdering>, caps: BroadcastCaps) -> Result<(bool, String), Error> {
    let al = g.alphabet();
    let candidates: Vec<ProcessOrdering> = match fixed {
        Some(o) => vec![o],
        None if g.num_processes() <= ORDER_SEARCH_LIMIT => ProcessOrdering::enumerate_all(g.num_processes())
            .into_iter()
            .filter(|o| check_process_ordering(g, o).unwrap_or(false))
            .collect(),
        None => {
            let order: Vec<ProcId> = g.processes().collect();
            vec![ProcessOrdering::total(&order)]
        }
    };
    let mut best: Option<(usize, ProcessOrdering)> = None;
    let mut first_valid: Option<ProcessOrdering> = None;
    for o in candidates {
        let report = match decide_broadcast_game(g, &o, caps) {
            Ok(r) => r,
            Err(BroadcastError::Ordering(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        first_valid.get_or_insert_with(|| o.clone());
        if let Some(n) = report.n {
            if best.as_ref().is_none_or(|(b, _)| n < *b) {
                best = Some((n, o));
                if n == 1 {
                    break;
                }
            }
        }
    }
    Ok(match (best, first_valid) {
        (Some((n, o)), _) => (
            true,
            format!("broadcast-game N={n} ({}) order={}", caps_text(&caps), o.render(al)),
        ),
        (None, Some(o)) => (
            false,
            format!("broadcast-game no ({}) order={}", caps_text(&caps), o.render(al)),
        ),
        (None, None) => (false, format!("broadcast-game no ({}) order=none", caps_text(&caps))),
    })
}

fn dag_holds(g: &Game, fixed: Option<&ProcessOrdering>) -> bool {
    let ok = |o: &ProcessOrdering| check_dag_condition(g, o).unwrap_or(false);
    match fixed {
        Some(o) => ok(o),
        None if g.num_processes() <= ORDER_SEARCH_LIMIT => {
            ProcessOrdering::enumerate_all(g.num_processes()).iter().any(ok)
        }
        None => {
            let order: Vec<ProcId> = g.processes().collect();
            ok(&ProcessOrdering::total(&order))
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict_line(v: &Verdict) -> (i32, String) {
    match v {
        Verdict::Winning => (EXIT_POSITIVE, "verdict winning".into()),
        Verdict::Losing(w) => (EXIT_NEGATIVE, format!("verdict losing witness={}", w.trace.compact())),
        Verdict::BoundExceeded(w) => (
            EXIT_BOUND,
            format!("verdict bound-exceeded witness={}", w.trace.compact()),
        ),
    }
}

fn execute(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Classify {
            game,
            order,
            ucap,
            vcap,
            wcap,
            k,
            kcap,
        } => {
            let g = load_game(&game)?;
            let al = g.alphabet();
            let fixed = match order {
                Some(t) => Some(parse_ordering(&g, &t)?),
                None => declared(&g),
            };
            let d = BroadcastCaps::defaults(&g);
            let caps = BroadcastCaps {
                u_cap: ucap.unwrap_or(d.u_cap),
                v_cap: vcap.unwrap_or(d.v_cap),
                witness_cap: wcap.unwrap_or(d.witness_cap),
            };
            let mut out = String::new();
            match classify_series_parallel(al) {
                Some(t) => writeln!(out, "series-parallel yes tree={}", t.display(al)),
                None => writeln!(out, "series-parallel no"),
            }
            .expect("string write");
            let (is_game, line) = broadcast_line(&g, fixed.clone(), caps)?;
            out.push_str(&line);
            out.push('\n');
            writeln!(out, "dag {}", yes_no(dag_holds(&g, fixed.as_ref()))).expect("string write");
            let tri = check_triangulated(&g, &communication_graph(&g));
            writeln!(out, "triangulated {}", yes_no(tri)).expect("string write");
            match check_k_communicating(&g, k, kcap) {
                KVerdict::HoldsWithinCap => writeln!(out, "k-communicating k={k} holds-within-cap"),
                KVerdict::Counterexample(c) => writeln!(
                    out,
                    "k-communicating k={k} counterexample u={} v={} w={} p={} q={}",
                    c.u.compact(),
                    c.v.compact(),
                    c.w.compact(),
                    al.process_name(c.p),
                    al.process_name(c.q)
                ),
            }
            .expect("string write");
            let code = if is_game { EXIT_POSITIVE } else { EXIT_NEGATIVE };
            Ok(Outcome::report(code, out))
        }
        Command::Broadcast {
            game,
            play,
            pool,
            vcap,
        } => {
            let g = load_game(&game)?;
            let u = g.parse_play(&play)?;
            let q = g.alphabet().parse_process_set(&pool)?;
            let vcap = vcap.unwrap_or_else(|| default_vcap(&g));
            Ok(match broadcast_witness(&g, &u, q, vcap)? {
                None => Outcome::report(EXIT_POSITIVE, format!("broadcast yes vcap={vcap}\n")),
                Some(v) => Outcome::report(
                    EXIT_NEGATIVE,
                    format!("broadcast no vcap={vcap} witness={}\n", v.compact()),
                ),
            })
        }
        Command::Check { game, strategy, cap } => {
            let g = load_game(&game)?;
            let s = load_strategy(&g, &strategy)?;
            let x = s.explore(cap);
            let (code, line) = verdict_line(&x.verdict);
            Ok(Outcome::report(
                code,
                format!(
                    "{line}\ncap {cap}\nplays {}\nmaximal {}\nduration {}\n",
                    x.plays.len(),
                    x.maximal.len(),
                    x.duration()
                ),
            ))
        }
        Command::Reduce {
            game,
            strategy,
            cap,
            vcap,
        } => {
            let g = load_game(&game)?;
            let s = load_strategy(&g, &strategy)?;
            let mut opts = ThreadSearch::new(cap);
            opts.v_cap = vcap;
            match reduce(&s, opts) {
                Ok((t, log)) => {
                    let mut err = String::new();
                    for step in &log {
                        writeln!(err, "{}", StepDisplay(step, &g)).expect("string write");
                    }
                    writeln!(err, "steps {}", log.len()).expect("string write");
                    Ok(Outcome {
                        code: EXIT_POSITIVE,
                        stdout: write_strategy(&t),
                        stderr: err,
                    })
                }
                Err(ShortcutError::BoundExceeded(c)) => Ok(Outcome {
                    code: EXIT_BOUND,
                    stdout: String::new(),
                    stderr: format!("strategy exceeds the play-length cap {c}\n"),
                }),
                Err(e) => Ok(Outcome {
                    code: EXIT_NEGATIVE,
                    stdout: String::new(),
                    stderr: format!("{e}\n"),
                }),
            }
        }
        Command::Synthesize {
            game,
            cap,
            semantics,
        } => {
            let g = load_game(&game)?;
            let cfg = SynthesisConfig {
                cap,
                semantics: semantics.into(),
            };
            Ok(match synthesize(g, cfg) {
                Some(s) => Outcome {
                    code: EXIT_POSITIVE,
                    stdout: write_strategy(&s),
                    stderr: String::new(),
                },
                None => Outcome::report(EXIT_NEGATIVE, format!("none within bound {cap}\n")),
            })
        }
        Command::Bounds { game, pool, n } => {
            let g = load_game(&game)?;
            let al = g.alphabet();
            let mut out = String::new();
            match &pool {
                Some(text) => {
                    let q = al.parse_process_set(text)?;
                    out.push_str(&bound_k(&g, q, n).render());
                }
                None => {
                    match classify_series_parallel(al) {
                        Some(t) => out.push_str(&bound_series_parallel(&t, &g).render()),
                        None => out.push_str("series-parallel no\n"),
                    }
                    out.push_str(&bound_k(&g, g.all_processes(), n).render());
                }
            }
            Ok(Outcome::report(EXIT_POSITIVE, out))
        }
        Command::Trace {
            game,
            op,
            u,
            v,
            letters,
            proc,
            semantics,
            cap,
        } => {
            let g = load_game(&game)?;
            trace_op(&g, op, &u, v.as_deref(), letters.as_deref(), proc.as_deref(), semantics.into(), cap)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn trace_op(
    g: &Game,
    op: TraceOp,
    u: &str,
    v: Option<&str>,
    letters: Option<&str>,
    proc: Option<&str>,
    semantics: ViewSemantics,
    cap: usize,
) -> Result<Outcome, Error> {
    let al = g.alphabet().clone();
    let tu = Trace::parse(al.clone(), u)?;
    let need_v = || -> Result<Trace, Error> {
        let v = v.ok_or_else(|| Error::Usage("--v is required for this op".into()))?;
        Ok(Trace::parse(al.clone(), v)?)
    };
    let need_proc = || -> Result<ProcId, Error> {
        let p = proc.ok_or_else(|| Error::Usage("--proc is required for this op".into()))?;
        Ok(g.process(p)?)
    };
    let (code, line) = match op {
        TraceOp::Normalize => (EXIT_POSITIVE, format!("trace {}", tu.compact())),
        TraceOp::Concat => (EXIT_POSITIVE, format!("trace {}", tu.concat(&need_v()?)?.compact())),
        TraceOp::Residual => match tu.residual_in(&need_v()?)? {
            Some(r) => (EXIT_POSITIVE, format!("residual {}", r.compact())),
            None => (EXIT_NEGATIVE, "residual none".to_string()),
        },
        TraceOp::View => {
            let b = match (letters, proc) {
                (Some(l), _) => al.parse_letter_set(l)?,
                (None, Some(_)) => al.process_letters(need_proc()?),
                (None, None) => return Err(Error::Usage("view needs --letters or --proc".into())),
            };
            (EXIT_POSITIVE, format!("view {}", tu.view(b, semantics).compact()))
        }
        TraceOp::Prime => {
            let yes = match letters {
                Some(l) => tu.is_prime_for(al.parse_letter_set(l)?),
                None => tu.is_prime(),
            };
            (if yes { EXIT_POSITIVE } else { EXIT_NEGATIVE }, format!("prime {}", yes_no(yes)))
        }
        TraceOp::Count => (EXIT_POSITIVE, format!("count {}", tu.letter_count(need_proc()?)?)),
        TraceOp::Linearizations => {
            let words = tu.linearizations(cap)?;
            let mut s = format!("linearizations {}", words.len());
            for w in words {
                let names: Vec<&str> = w.iter().map(|&l| al.letter_name(l)).collect();
                write!(s, "\n{}", if names.is_empty() { "-".to_string() } else { names.join(" ") })
                    .expect("string write");
            }
            (EXIT_POSITIVE, s)
        }
        TraceOp::Play => match g.play(&tu) {
            Ok(p) => {
                let states: Vec<String> = g
                    .processes()
                    .map(|q| format!("{}:{}", al.process_name(q), g.state_name(q, p.state[q.index()])))
                    .collect();
                (EXIT_POSITIVE, format!("play yes state={}", states.join(",")))
            }
            Err(_) => (EXIT_NEGATIVE, "play no".to_string()),
        },
    };
    Ok(Outcome::report(code, format!("{line}\n")))
}
