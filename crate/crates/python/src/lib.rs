use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use zsynth::broadcast::{default_vcap, is_broadcast};
use zsynth::shortcut::{reduce, StepDisplay, ThreadSearch};
use zsynth::synth::SynthesisConfig;
use zsynth::zgame::{parse_game, write_game};
use zsynth::zstrat::{parse_strategy, write_strategy};
use zsynth::{Duration, Verdict, ViewSemantics};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn semantics(name: &str) -> PyResult<ViewSemantics> {
    match name {
        "literal" => Ok(ViewSemantics::Literal),
        "causal" => Ok(ViewSemantics::Causal),
        other => Err(value_error(format!("unknown semantics `{other}`"))),
    }
}

/// A game parsed from `.zgame` text.
#[pyclass(frozen, module = "pyzsynth")]
struct Game {
    inner: Arc<zsynth::Game>,
}

#[pymethods]
impl Game {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let g = parse_game(text).map_err(value_error)?;
        Ok(Game { inner: Arc::new(g) })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(value_error)?;
        Self::new(&text)
    }

    #[getter]
    fn processes(&self) -> Vec<String> {
        let al = self.inner.alphabet();
        al.processes().map(|p| al.process_name(p).to_string()).collect()
    }

    #[getter]
    fn letters(&self) -> Vec<String> {
        let al = self.inner.alphabet();
        al.letters().map(|a| al.letter_name(a).to_string()).collect()
    }

    fn write(&self) -> String {
        write_game(&self.inner)
    }

    /// Normal form of a play, in compact letter notation.
    fn normalize(&self, play: &str) -> PyResult<String> {
        Ok(self.inner.parse_play(play).map_err(value_error)?.trace.compact())
    }

    #[pyo3(signature = (play, pool, v_cap=None))]
    fn is_broadcast(&self, play: &str, pool: &str, v_cap: Option<usize>) -> PyResult<bool> {
        let g = &self.inner;
        let u = g.parse_play(play).map_err(value_error)?;
        let q = g.alphabet().parse_process_set(pool).map_err(value_error)?;
        is_broadcast(g, &u, q, v_cap.unwrap_or_else(|| default_vcap(g))).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(processes={}, letters={})",
            self.inner.num_processes(),
            self.inner.alphabet().num_letters()
        )
    }
}

/// Result of exploring a strategy up to a play-length cap.
#[pyclass(frozen, get_all, module = "pyzsynth")]
struct Check {
    verdict: String,
    witness: Option<String>,
    duration: Option<u64>,
    plays: usize,
}

#[pyclass(frozen, module = "pyzsynth")]
struct Strategy {
    inner: zsynth::Strategy,
}

#[pymethods]
impl Strategy {
    #[new]
    fn new(game: &Game, text: &str) -> PyResult<Self> {
        let s = parse_strategy(game.inner.clone(), text).map_err(value_error)?;
        Ok(Strategy { inner: s })
    }

    fn write(&self) -> String {
        write_strategy(&self.inner)
    }

    fn check(&self, cap: usize) -> Check {
        let x = self.inner.explore(cap);
        let (verdict, witness) = match &x.verdict {
            Verdict::Winning => ("winning", None),
            Verdict::Losing(w) => ("losing", Some(w.trace.compact())),
            Verdict::BoundExceeded(w) => ("bound-exceeded", Some(w.trace.compact())),
        };
        Check {
            verdict: verdict.to_string(),
            witness,
            duration: match x.duration() {
                Duration::Finite(d) => Some(d),
                Duration::Unbounded => None,
            },
            plays: x.plays.len(),
        }
    }

    /// Applies shortcuts until none remains; returns the reduced strategy
    /// and one log line per step.
    #[pyo3(signature = (cap, v_cap=None))]
    fn reduce(&self, cap: usize, v_cap: Option<usize>) -> PyResult<(Strategy, Vec<String>)> {
        let mut opts = ThreadSearch::new(cap);
        opts.v_cap = v_cap;
        let (t, log) = reduce(&self.inner, opts).map_err(value_error)?;
        let g = self.inner.game();
        let lines = log.iter().map(|s| StepDisplay(s, g).to_string()).collect();
        Ok((Strategy { inner: t }, lines))
    }
}

/// Least winning strategy within `cap`, or `None`.
#[pyfunction]
#[pyo3(signature = (game, cap, semantics="literal"))]
fn synthesize(py: Python<'_>, game: &Game, cap: usize, semantics: &str) -> PyResult<Option<Strategy>> {
    let cfg = SynthesisConfig {
        cap,
        semantics: self::semantics(semantics)?,
    };
    let g = game.inner.clone();
    let found = py.detach(move || zsynth::synth::synthesize(g, cfg));
    Ok(found.map(|s| Strategy { inner: s }))
}

/// Runs the command line with `args` (without the program name) and
/// returns `(exit code, stdout, stderr)`.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let out = py.detach(move || {
        zsynth::cli::run(std::iter::once("zsynth".to_string()).chain(args))
    });
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn pyzsynth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_class::<Strategy>()?;
    m.add_class::<Check>()?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
