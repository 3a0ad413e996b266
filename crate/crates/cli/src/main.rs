use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use qincompat::chsh::{chsh_norm_bound, optimal_alice_settings, AliceSettings};
use qincompat::correlations::{pm_behavior, CorrelatorKind, CorrelatorTable};
use qincompat::gallery::{
    constants, pauli_eigenstate_ensemble, pauli_set, planar_set, snub_cube_set, Axis, SnubFrame,
};
use qincompat::jm::{jm_feasibility, JmVerdict};
use qincompat::pmbell::{
    certify_incompatibility, check_correlator_equality, seesaw_with_restarts, CertificationReport, CertifyOptions,
    SeesawOptions,
};
use qincompat::polytope::{
    fw_membership, BellOracle, FwOptions, FwStats, MembershipVerdict, PmOracle, PmShape, PmStrategy, SignAssignment,
    DEFAULT_BUDGET,
};
use qincompat::qcore::{validate_assemblage, validate_ensemble, Assemblage, Ensemble, QubitOperator};
use qincompat::VERSION;

const FORMATS: &str = "\
FILE FORMATS (JSON)
  operator      {\"s\": f64, \"v\": [f64, f64, f64]}   meaning s*I + v.sigma
  state         an operator with s = 1/2 and |v| <= 1/2
  measurement   the operator B_0 of the POVM {B_0, I - B_0}
  ensemble      [state, ...]
  assemblage    [measurement, ...]
  correlators   {\"kind\": \"full\", \"shape\": [rows, cols], \"data\": [f64, ...]}
                row-major C_xy in [-1, 1]

REPORTS
  Every report is a JSON object with \"version\", \"command\" and \"parameters\"
  (an echo of the inputs), plus:
  verdict       {\"verdict\": \"inside\", \"vertices\", \"weights\", \"reconstruction_error\"}
              | {\"verdict\": \"outside\", \"witness\": {\"M\": [f64], \"L\": f64, \"Q\": f64}}
              | {\"verdict\": \"undecided\", \"distance_lower\", \"distance_upper\"}
                PM vertices are {\"f\": [a per x], \"g\": [[b per y] per a]};
                Bell vertices are {\"alpha\": [+-1], \"beta\": [+-1]}.
  jm verdict    {\"verdict\": \"jm\", \"mother\": {\"effects\", \"responses\"}, ...}
              | {\"verdict\": \"undecided\", \"residual\", \"iterations\"}

EXIT STATUS
  0 success, 1 a requested certification is undecided, 2 malformed input";

#[derive(Parser)]
#[command(name = "qincompat", version, about = "Qubit measurement incompatibility in prepare-and-measure and Bell scenarios")]
#[command(after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Serialize)]
struct FwArgs {
    /// Inside when the distance to the polytope falls below this
    #[arg(long, default_value_t = FwOptions::default().eps_in)]
    eps_in: f64,
    /// Outside when the unit witness separates by more than this
    #[arg(long, default_value_t = FwOptions::default().eps_out)]
    eps_out: f64,
    /// Frank-Wolfe iteration cap
    #[arg(long, default_value_t = FwOptions::default().max_iter)]
    fw_iter: usize,
    /// Maximum number of assignments an oracle call may enumerate
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl FwArgs {
    fn options(&self) -> FwOptions {
        FwOptions { eps_in: self.eps_in, eps_out: self.eps_out, max_iter: self.fw_iter, ..FwOptions::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide joint measurability of an assemblage
    JmCheck {
        #[arg(long)]
        assemblage: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Test the behaviour of an ensemble and assemblage against PM_d
    PmMembership {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        assemblage: PathBuf,
        /// Message dimension d
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        fw: FwArgs,
    },
    /// Test a full-correlator table against the Bell-local polytope
    BellMembership {
        #[arg(long)]
        correlators: PathBuf,
        #[command(flatten)]
        fw: FwArgs,
    },
    /// Certify incompatibility through PM_d and, for d = 2, a Bell inequality
    Certify {
        #[arg(long)]
        assemblage: PathBuf,
        /// State ensemble; by default CHSH-optimal states (unbiased assemblages) or Pauli eigenstates
        #[arg(long)]
        ensemble: Option<PathBuf>,
        #[arg(long)]
        dim: usize,
        /// Search for a violating ensemble with this many seesaw rounds per restart
        #[arg(long, value_name = "ROUNDS")]
        seesaw: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seesaw restarts
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Number of seesaw states
        #[arg(long, default_value_t = 8)]
        states: usize,
        /// Record wall-clock time (output is then not reproducible)
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        fw: FwArgs,
    },
    /// CHSH norm bound for two observables, optionally with attaining settings
    ChshBound {
        /// Observable B_0 as an operator
        #[arg(long)]
        b0: PathBuf,
        #[arg(long)]
        b1: PathBuf,
        #[arg(long)]
        attain: bool,
    },
    /// Emit a named scenario
    Gallery {
        name: GalleryName,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        /// Number of planar directions
        #[arg(long)]
        n: Option<usize>,
        /// Point-inverted snub cube
        #[arg(long)]
        mirror: bool,
        #[arg(long, value_enum, default_value_t = Frame::Twisted)]
        frame: Frame,
        /// Pauli axes, e.g. xz
        #[arg(long, default_value = "xyz")]
        axes: String,
    },
    /// Maximum deviation between PM single correlators and Bell correlators on phi+
    EqualityCheck {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        assemblage: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GalleryName {
    /// Noisy Pauli measurements (assemblage)
    Pauli,
    /// Equally spaced x-z plane measurements (assemblage)
    Planar,
    /// Snub-cube vertex measurements (assemblage)
    SnubCube,
    /// The six Pauli eigenstates (ensemble)
    PauliStates,
    /// Threshold constants
    Constants,
}

#[derive(Clone, Copy, ValueEnum)]
enum Frame {
    Aligned,
    Twisted,
}

impl From<Frame> for SnubFrame {
    fn from(f: Frame) -> Self {
        match f {
            Frame::Aligned => SnubFrame::Aligned,
            Frame::Twisted => SnubFrame::Twisted,
        }
    }
}

#[derive(Serialize)]
struct Report<P, R> {
    version: &'static str,
    command: &'static str,
    parameters: P,
    #[serde(flatten)]
    result: R,
}

#[derive(Serialize)]
struct Membership<V> {
    verdict: MembershipVerdict<V>,
    stats: FwStats,
}

#[derive(Serialize)]
struct SeesawSummary {
    rounds: usize,
    restarts: usize,
    states: usize,
    seed: u64,
    rounds_run: usize,
    best_gap: Option<f64>,
    certified: bool,
}

#[derive(Serialize)]
struct Certified {
    seesaw: Option<SeesawSummary>,
    report: CertificationReport,
}

#[derive(Serialize)]
struct Chsh {
    bound: f64,
    settings: Option<AliceSettings>,
}

enum Outcome {
    Decided,
    Undecided,
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} {}", path.display()))
}

fn read_ensemble(path: &Path) -> anyhow::Result<Ensemble> {
    let e: Ensemble = read_json(path, "ensemble")?;
    validate_ensemble(&e).with_context(|| format!("ensemble {}", path.display()))?;
    Ok(e)
}

fn read_assemblage(path: &Path) -> anyhow::Result<Assemblage> {
    let a: Assemblage = read_json(path, "assemblage")?;
    validate_assemblage(&a).with_context(|| format!("assemblage {}", path.display()))?;
    Ok(a)
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(io::stdout().lock(), "{text}") {
        // a closed reader (e.g. `| head`) is not an input error
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn outcome<V>(v: &MembershipVerdict<V>) -> Outcome {
    match v {
        MembershipVerdict::Undecided { .. } => Outcome::Undecided,
        _ => Outcome::Decided,
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::JmCheck { assemblage, max_iter, tol } => {
            let a = read_assemblage(&assemblage)?;
            let verdict = jm_feasibility(&a, max_iter, tol)?;
            let out = match verdict {
                JmVerdict::Undecided { .. } => Outcome::Undecided,
                _ => Outcome::Decided,
            };
            emit(&Report {
                version: VERSION,
                command: "jm-check",
                parameters: serde_json::json!({ "assemblage": a, "max_iter": max_iter, "tol": tol }),
                result: serde_json::json!({ "result": verdict }),
            })?;
            Ok(out)
        }
        Command::PmMembership { ensemble, assemblage, dim, fw } => {
            let e = read_ensemble(&ensemble)?;
            let a = read_assemblage(&assemblage)?;
            if dim == 0 || e.is_empty() || a.is_empty() {
                bail!("need --dim >= 1, at least one state and at least one measurement");
            }
            let point = pm_behavior(&e, &a);
            let oracle = PmOracle { d: dim, shape: PmShape::dichotomic(e.len(), a.len()), budget: fw.budget };
            let (verdict, stats): (MembershipVerdict<PmStrategy>, _) =
                fw_membership(&point.data, &oracle, &fw.options())?;
            let out = outcome(&verdict);
            emit(&Report {
                version: VERSION,
                command: "pm-membership",
                parameters: serde_json::json!({ "ensemble": e, "assemblage": a, "dim": dim, "fw": fw }),
                result: serde_json::json!({ "behavior": point, "result": Membership { verdict, stats } }),
            })?;
            Ok(out)
        }
        Command::BellMembership { correlators, fw } => {
            let c: CorrelatorTable = read_json(&correlators, "correlator table")?;
            c.check()?;
            if c.kind != CorrelatorKind::Full {
                bail!("Bell membership needs full correlators, got kind {:?}", c.kind);
            }
            let oracle = BellOracle { rows: c.rows(), cols: c.cols(), budget: fw.budget };
            let (verdict, stats): (MembershipVerdict<SignAssignment>, _) =
                fw_membership(&c.data, &oracle, &fw.options())?;
            let out = outcome(&verdict);
            emit(&Report {
                version: VERSION,
                command: "bell-membership",
                parameters: serde_json::json!({ "correlators": c, "fw": fw }),
                result: serde_json::json!({ "result": Membership { verdict, stats } }),
            })?;
            Ok(out)
        }
        Command::Certify { assemblage, ensemble, dim, seesaw, seed, restarts, states, timing, fw } => {
            let a = read_assemblage(&assemblage)?;
            let mut e = ensemble.as_deref().map(read_ensemble).transpose()?;
            if dim == 0 {
                bail!("--dim must be at least 1");
            }
            let mut summary = None;
            if let Some(rounds) = seesaw {
                let opts = SeesawOptions { rounds, fw: fw.options(), budget: fw.budget };
                let r = seesaw_with_restarts(&a, dim, states, restarts, seed, &opts)?;
                let certified = r.certified();
                if certified {
                    e = Some(r.ensemble.clone());
                }
                summary = Some(SeesawSummary {
                    rounds,
                    restarts,
                    states,
                    seed,
                    rounds_run: r.rounds_run,
                    best_gap: r.best_gap,
                    certified,
                });
            }
            let opts = CertifyOptions { fw: fw.options(), budget: fw.budget, record_timing: timing };
            let report = certify_incompatibility(&a, e.as_ref(), dim, &opts)?;
            let out = outcome(&report.pm);
            emit(&Report {
                version: VERSION,
                command: "certify",
                parameters: serde_json::json!({
                    "assemblage": assemblage,
                    "ensemble": ensemble,
                    "dim": dim,
                    "seesaw": seesaw,
                    "seed": seed,
                    "restarts": restarts,
                    "states": states,
                    "timing": timing,
                }),
                result: Certified { seesaw: summary, report },
            })?;
            Ok(out)
        }
        Command::ChshBound { b0, b1, attain } => {
            let o0: QubitOperator = read_json(&b0, "observable")?;
            let o1: QubitOperator = read_json(&b1, "observable")?;
            let settings = if attain { Some(optimal_alice_settings(&o0, &o1)?) } else { None };
            emit(&Report {
                version: VERSION,
                command: "chsh-bound",
                parameters: serde_json::json!({ "b0": o0, "b1": o1, "attain": attain }),
                result: Chsh { bound: chsh_norm_bound(&o0, &o1), settings },
            })?;
            Ok(Outcome::Decided)
        }
        Command::Gallery { name, eta, n, mirror, frame, axes } => {
            match name {
                GalleryName::Pauli => emit(&pauli_set(&Axis::parse_set(&axes)?, eta)?)?,
                GalleryName::Planar => {
                    let n = n.context("planar needs --n")?;
                    emit(&planar_set(n, eta)?)?
                }
                GalleryName::SnubCube => emit(&snub_cube_set(eta, mirror, frame.into())?)?,
                GalleryName::PauliStates => emit(&pauli_eigenstate_ensemble())?,
                GalleryName::Constants => emit(&constants())?,
            }
            Ok(Outcome::Decided)
        }
        Command::EqualityCheck { ensemble, assemblage } => {
            let e = read_ensemble(&ensemble)?;
            let a = read_assemblage(&assemblage)?;
            let deviation = check_correlator_equality(&e, &a)?;
            emit(&Report {
                version: VERSION,
                command: "equality-check",
                parameters: serde_json::json!({ "ensemble": e, "assemblage": a }),
                result: serde_json::json!({ "max_deviation": deviation }),
            })?;
            Ok(Outcome::Decided)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Decided) => ExitCode::SUCCESS,
        Ok(Outcome::Undecided) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
