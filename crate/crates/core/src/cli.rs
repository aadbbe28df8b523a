//! Request/report layer behind the `finstoch` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::disintegration::{bayes_invert, inversion_section_check, verify_disintegration};
use crate::dot::support_graph_dot;
use crate::dynamics::{
    enumerate_ergodic, invariant_sigma, is_invariant_set, left_invariance_violation, zigzag_quotient, DynSystem,
};
use crate::error::Error;
use crate::io;
use crate::kernel::{compose, is_deterministic, is_zero_one, Kernel};
use crate::laws;
use crate::rational;
use crate::space::FinSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    InvSigma,
    Quotient,
    CheckErgodic,
    Decompose,
    EnumerateErgodic,
    CheckAxioms,
    Invert,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::InvSigma => "inv-sigma",
            Command::Quotient => "quotient",
            Command::CheckErgodic => "check-ergodic",
            Command::Decompose => "decompose",
            Command::EnumerateErgodic => "enumerate-ergodic",
            Command::CheckAxioms => "check-axioms",
            Command::Invert => "invert",
        }
    }

    pub fn needs_measure(self) -> bool {
        matches!(self, Command::CheckErgodic | Command::Decompose | Command::Invert)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisRequest {
    pub command: Command,
    /// The system file; for `invert`, a kernel file.
    pub system_path: PathBuf,
    pub measure_path: Option<PathBuf>,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisReport {
    pub command: String,
    pub verdicts: BTreeMap<String, bool>,
    pub artifacts: BTreeMap<String, Value>,
    pub diagnostics: Vec<String>,
    /// Graph export, when the command has one.
    pub dot: Option<String>,
}

impl AnalysisReport {
    fn new(command: Command) -> Self {
        AnalysisReport { command: command.name().to_string(), ..Default::default() }
    }

    /// Records a verdict; a false verdict must come with a witness.
    fn verdict(&mut self, name: &str, holds: bool, witness: impl FnOnce() -> String) {
        self.verdicts.insert(name.to_string(), holds);
        if !holds {
            self.diagnostics.push(format!("{name}: {}", witness()));
        }
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_hold() {
            0
        } else {
            EXIT_VERDICT_FALSE
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "verdicts": self.verdicts,
            "artifacts": self.artifacts,
            "diagnostics": self.diagnostics,
        })
    }
}

pub const EXIT_VERDICT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_SPACE_MISMATCH: i32 = 4;
pub const EXIT_NOT_INVARIANT: i32 = 5;
pub const EXIT_UNSUPPORTED: i32 = 6;
pub const EXIT_NOT_DETERMINISTIC_SYSTEM: i32 = 7;
pub const EXIT_IO: i32 = 8;
pub const EXIT_OTHER: i32 = 9;

pub const EXIT_CODES_HELP: &str = "\
Exit status:
  0  every verdict in the report holds
  1  some verdict is false (witnesses under \"diagnostics\")
  2  usage error (bad flags, missing --measure)
  3  parse error (malformed JSON, bad rational, non-stochastic row, invalid space)
  4  space mismatch between loaded objects
  5  measure is not invariant under the dynamics
  6  unsupported generators for enumerate-ergodic
  7  system has a non-deterministic generator where a deterministic one is required
  8  file could not be read or written
  9  any other library error";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Lib(e) => match e {
                Error::Parse(_) | Error::InvalidSpace(_) | Error::InvalidKernel(_) => EXIT_PARSE,
                Error::SpaceMismatch(_) => EXIT_SPACE_MISMATCH,
                Error::NotInvariant(_) => EXIT_NOT_INVARIANT,
                Error::UnsupportedGenerators(_) => EXIT_UNSUPPORTED,
                Error::NotDeterministicSystem => EXIT_NOT_DETERMINISTIC_SYSTEM,
                _ => EXIT_OTHER,
            },
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(io::parse_json(&text, &path.display().to_string())?)
}

fn with_location<T>(path: &Path, result: crate::error::Result<T>) -> Result<T, CliError> {
    result.map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())).into(),
        other => Error::Parse(format!("{}: {other}", path.display())).into(),
    })
}

fn load_system(path: &Path) -> Result<DynSystem, CliError> {
    let value = read_json(path)?;
    with_location(path, io::system_from_json(&value))
}

fn load_state(path: &Path, space: &Arc<FinSpace>) -> Result<Kernel, CliError> {
    let value = read_json(path)?;
    with_location(path, io::state_from_json(&value, space, "measure"))
}

fn measure_path(req: &AnalysisRequest) -> Result<&Path, CliError> {
    req.measure_path
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("{} needs --measure", req.command.name())))
}

fn atom_labels(space: &FinSpace) -> Value {
    Value::Array(
        space
            .atoms()
            .iter()
            .map(|atom| Value::Array(atom.iter().map(|&p| Value::String(space.label(p).to_string())).collect()))
            .collect(),
    )
}

/// Executes one analysis and collects its verdicts and artifacts.
pub fn run(req: &AnalysisRequest) -> Result<AnalysisReport, CliError> {
    if req.command.needs_measure() {
        measure_path(req)?;
    }
    let mut report = AnalysisReport::new(req.command);
    match req.command {
        Command::Invert => run_invert(req, &mut report)?,
        _ => {
            let sys = load_system(&req.system_path)?;
            match req.command {
                Command::InvSigma => run_inv_sigma(&sys, &mut report)?,
                Command::Quotient => run_quotient(&sys, &mut report)?,
                Command::CheckErgodic => run_check_ergodic(req, &sys, &mut report)?,
                Command::Decompose => run_decompose(req, &sys, &mut report)?,
                Command::EnumerateErgodic => run_enumerate(&sys, &mut report)?,
                Command::CheckAxioms => run_check_axioms(req, &sys, &mut report)?,
                Command::Invert => unreachable!(),
            }
        }
    }
    Ok(report)
}

fn run_inv_sigma(sys: &DynSystem, report: &mut AnalysisReport) -> Result<(), CliError> {
    let sigma = invariant_sigma(sys);
    let space = sys.space();
    report.artifacts.insert("quotient_space".into(), io::space_to_json(sigma.quotient_space()));
    report.artifacts.insert("cocone".into(), io::kernel_to_json(sigma.cocone()));
    report.artifacts.insert("invariant_atoms".into(), atom_labels(sigma.quotient_space()));

    let cocone = sigma.cocone();
    report.verdict("cocone_deterministic", is_deterministic(cocone), || "cocone has a fractional entry".into());
    let moved = sys
        .generators()
        .iter()
        .find(|(_, m)| compose(cocone, m).map(|c| c != *cocone).unwrap_or(true))
        .map(|(name, _)| name.clone());
    report.verdict("cocone_right_invariant", moved.is_none(), || {
        format!("r∘{} ≠ r", moved.clone().unwrap_or_default())
    });
    let mut bad_atom = None;
    for atom in sigma.quotient_space().atoms() {
        if !is_invariant_set(atom, sys)? {
            bad_atom = Some(space.set_label(atom));
            break;
        }
    }
    report.verdict("atoms_invariant", bad_atom.is_none(), || format!("{} is not invariant", bad_atom.unwrap_or_default()));
    report.dot = Some(support_graph_dot(&sigma));
    Ok(())
}

fn run_quotient(sys: &DynSystem, report: &mut AnalysisReport) -> Result<(), CliError> {
    let sigma = invariant_sigma(sys);
    report.artifacts.insert("cocone".into(), io::kernel_to_json(sigma.cocone()));
    report.artifacts.insert("invariant_atoms".into(), atom_labels(sigma.quotient_space()));
    if sys.is_deterministic() {
        let z = zigzag_quotient(&sigma)?;
        report.artifacts.insert("orbit_space".into(), io::space_to_json(&z.orbit_space));
        report.artifacts.insert("orbit_map".into(), io::kernel_to_json(&z.descended));
        report.artifacts.insert("orbit_inverse".into(), io::kernel_to_json(&z.inverse));
        let left = compose(&z.inverse, &z.descended)? == Kernel::identity(sigma.quotient_space());
        let right = compose(&z.descended, &z.inverse)? == Kernel::identity(&z.orbit_space);
        report.verdict("orbit_inverse_left", left, || "h∘q̃ is not the identity on X_inv".into());
        report.verdict("orbit_inverse_right", right, || "q̃∘h is not the identity on X/M".into());
        report.verdict("orbit_maps_zero_one", is_zero_one(&z.descended) && is_zero_one(&z.inverse), || {
            "orbit maps have fractional entries".into()
        });
    } else {
        report.diagnostics.push("note: stochastic generators; orbit-space isomorphism not applicable".into());
    }
    report.dot = Some(support_graph_dot(&sigma));
    Ok(())
}

fn run_check_ergodic(req: &AnalysisRequest, sys: &DynSystem, report: &mut AnalysisReport) -> Result<(), CliError> {
    let p = load_state(measure_path(req)?, sys.space())?;
    let space = sys.space();
    let sigma = invariant_sigma(sys);
    let violation = left_invariance_violation(&p, sys)?;
    let invariant = violation.is_none();
    report.verdict("left_invariant", invariant, || {
        let (name, atom, before, after) = violation.clone().expect("witness present when false");
        format!(
            "generator {name} moves mass at {}: p = {}, {name}∘p = {}",
            space.atom_label(atom),
            rational::format(&before),
            rational::format(&after)
        )
    });
    let masses = sigma.component_masses(&p);
    report.artifacts.insert(
        "invariant_atom_masses".into(),
        Value::Array(masses.iter().map(io::rational_to_json).collect()),
    );
    let ergodic = sigma.is_ergodic(&p)?;
    report.verdict("ergodic", ergodic, || {
        if !invariant {
            return "state is not invariant".into();
        }
        let c = masses.iter().position(|m| !m.is_zero() && !m.is_one()).expect("split mass when not ergodic");
        format!(
            "invariant set {} has mass {}",
            sigma.quotient_space().atom_label(c),
            rational::format(&masses[c])
        )
    });
    Ok(())
}

fn run_decompose(req: &AnalysisRequest, sys: &DynSystem, report: &mut AnalysisReport) -> Result<(), CliError> {
    let p = load_state(measure_path(req)?, sys.space())?;
    let sigma = invariant_sigma(sys);
    let d = sigma.decompose(&p)?;
    report.artifacts.insert("decomposition".into(), io::decomposition_to_json(&d));
    let recovers = compose(d.k(), d.q())? == p;
    report.verdict("composition_recovers_p", recovers, || "k∘q differs from p".into());
    let as_ergodic = sigma.is_as_ergodic(d.k(), d.q())?;
    report.verdict("k_almost_surely_ergodic", as_ergodic, || {
        let bad = d
            .q()
            .support()
            .into_iter()
            .find(|&y| {
                let row = Kernel::state(Arc::clone(d.k().cod()), d.k().row(y).to_vec()).expect("row of a kernel");
                !sigma.is_ergodic(&row).unwrap_or(false)
            })
            .unwrap_or(0);
        format!("row {} of k is not ergodic", sigma.quotient_space().atom_label(bad))
    });
    Ok(())
}

fn run_enumerate(sys: &DynSystem, report: &mut AnalysisReport) -> Result<(), CliError> {
    let states = enumerate_ergodic(sys)?;
    let sigma = invariant_sigma(sys);
    report.artifacts.insert("space".into(), io::space_to_json(sys.space()));
    report.artifacts.insert(
        "ergodic_states".into(),
        Value::Array(states.iter().map(|s| io::rows_to_json(s)[0].clone()).collect()),
    );
    let mut failing = None;
    for (i, s) in states.iter().enumerate() {
        if !sigma.is_ergodic(s)? {
            failing = Some(i);
            break;
        }
    }
    report.verdict("each_ergodic", failing.is_none(), || format!("state {} is not ergodic", failing.unwrap_or(0)));
    Ok(())
}

fn run_check_axioms(req: &AnalysisRequest, sys: &DynSystem, report: &mut AnalysisReport) -> Result<(), CliError> {
    let measure = match &req.measure_path {
        Some(path) => Some(load_state(path, sys.space())?),
        None => None,
    };
    for law in laws::check_all(sys, measure.as_ref(), req.seed)? {
        let detail = law.detail.clone();
        report.verdict(&law.name, law.holds, || detail.unwrap_or_default());
    }
    report.artifacts.insert("seed".into(), json!(req.seed));
    Ok(())
}

fn run_invert(req: &AnalysisRequest, report: &mut AnalysisReport) -> Result<(), CliError> {
    let value = read_json(&req.system_path)?;
    let f = with_location(&req.system_path, io::kernel_from_json(&value, None, None, "kernel"))?;
    let p = load_state(measure_path(req)?, f.dom())?;
    let inverse = bayes_invert(&f, &p)?;
    let pushed = compose(&f, &p)?;
    report.artifacts.insert("inverse".into(), io::kernel_to_json(&inverse));
    report.artifacts.insert("pushforward".into(), io::kernel_to_json(&pushed));
    report.verdict("disintegration_holds", verify_disintegration(&f, &p, &inverse)?, || {
        "joint equation fails for the computed inverse".into()
    });
    if is_deterministic(&f) {
        report.verdict("section_almost_surely_identity", inversion_section_check(&f, &p)?, || {
            "f∘f⁺ is not almost surely the identity".into()
        });
    }
    Ok(())
}

fn text_kernel(out: &mut String, title: &str, k: &Kernel, order: &[usize]) {
    let _ = writeln!(out, "{title}:");
    for &i in order {
        let entries: Vec<String> = k.row(i).iter().map(rational::format).collect();
        let _ = writeln!(out, "  {}: [{}]", k.dom().atom_label(i), entries.join(", "));
    }
}

fn render_text(report: &AnalysisReport) -> String {
    let mut out = format!("command: {}\n", report.command);
    for (name, holds) in &report.verdicts {
        let _ = writeln!(out, "{} {name}", if *holds { "PASS" } else { "FAIL" });
    }
    for (name, value) in &report.artifacts {
        let decoded = match name.as_str() {
            "decomposition" => decomposition_text(value),
            _ => None,
        };
        match decoded {
            Some(text) => out.push_str(&text),
            None => {
                let _ = writeln!(out, "{name}: {}", serde_json::to_string(value).unwrap_or_default());
            }
        }
    }
    for line in &report.diagnostics {
        let _ = writeln!(out, "! {line}");
    }
    out
}

/// Rows of `k` with positive `q` mass first, then the null rows.
fn decomposition_text(value: &Value) -> Option<String> {
    let q = io::kernel_from_json(value.get("q")?, None, None, "q").ok()?;
    let k = io::kernel_from_json(value.get("k")?, None, None, "k").ok()?;
    let support = q.support();
    let nulls: Vec<usize> = (0..k.rows().len()).filter(|y| !support.contains(y)).collect();
    let mut out = String::new();
    text_kernel(&mut out, "q", &q, &[0]);
    text_kernel(&mut out, "k (q-charged rows)", &k, &support);
    if !nulls.is_empty() {
        text_kernel(&mut out, "k (null rows)", &k, &nulls);
    }
    Some(out)
}

/// Renders a report in the requested format.
pub fn render(report: &AnalysisReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(io::to_canonical_string(&report.to_json())),
        Format::Text => Ok(render_text(report)),
        Format::Dot => report
            .dot
            .clone()
            .ok_or_else(|| CliError::Usage(format!("{} has no dot output", report.command))),
    }
}

/// Runs, renders and writes a request; returns the process exit code.
pub fn execute(req: &AnalysisRequest) -> i32 {
    let outcome = run(req).and_then(|report| {
        let text = render(&report, req.format)?;
        match &req.output {
            Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?,
            None => print!("{text}"),
        }
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
