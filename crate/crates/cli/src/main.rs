use clap::{Args, Parser, Subcommand, ValueEnum};
use mcld::construct::{amplify, point_functions, product_class, threshold_pair};
use mcld::repdim::ProbabilisticRepresentation;
use mcld::scalar::parse_rational;
use mcld::trees::InputLabeledTree;
use mcld::{Distribution, Error, HypothesisClass, Label, Rational};
use mcld_cli::commands::{self, DpMode, LearnerChoice, Mechanism, PsiChoice, RepdimOptions};
use mcld_cli::config::caps_from_env;
use mcld_cli::recipes::{self, random_classes};
use mcld_cli::{Report, RunConfig};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exact verification of multiclass Littlestone-type dimensions, covers,
/// online learners and private learning on finite classes.
///
/// Resource caps can be overridden with MCLD_MAX_CLASS_SIZE,
/// MCLD_MAX_FAMILY_SIZE, MCLD_MAX_NODES, MCLD_MAX_DEPTH,
/// MCLD_MAX_ITERATIONS, MCLD_MAX_GAME_LEAVES and MCLD_MAX_OUTCOMES.
///
/// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse
/// error, 3 nothing failed but a cap was hit or a verdict was undecided.
#[derive(Parser)]
#[command(name = "mcld", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a constructed class as JSON.
    Construct {
        #[arg(long, value_name = "K")]
        threshold_pair: Option<Label>,
        /// FILE and the number of copies.
        #[arg(long, num_args = 2, value_names = ["FILE", "L"])]
        amplify: Option<Vec<String>>,
        /// d and m: all d-point indicators over m points.
        #[arg(long, num_args = 2, value_names = ["D", "M"])]
        point: Option<Vec<usize>>,
        /// Binary classes to combine bit-wise (needs --k).
        #[arg(long, num_args = 1.., value_name = "FILES")]
        product: Option<Vec<PathBuf>>,
        #[arg(long)]
        k: Option<Label>,
    },
    /// Dimensions of a class and the inequalities between them.
    Dims {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = PsiArg::All)]
        psi: PsiArg,
        #[arg(long)]
        uniform: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Build (and optionally minimize) a 0-cover.
    Covers {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Input-labeled tree JSON; defaults to the canonical tree of --depth.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
        /// Write the cover certificate here.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Play an online learner on a realizable sequence.
    Online {
        file: PathBuf,
        #[arg(long, value_enum)]
        learner: LearnerArg,
        #[arg(long)]
        horizon: usize,
        /// Use the worst sequence found by exhaustive search.
        #[arg(long)]
        adversary: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check differential privacy over all neighbors of a dataset.
    DpVerify {
        file: PathBuf,
        /// Dataset JSON: [[x, y], ...] or {"points": [...]}.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = MechArg::Exp)]
        mechanism: MechArg,
        /// Draws per dataset in sampled mode.
        #[arg(long, default_value_t = 20_000)]
        draws: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the bit-wise private reduction on a sample.
    Learn {
        /// Required; the reduction is the only learner.
        #[arg(long)]
        reduction: bool,
        file: PathBuf,
        sample: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        concept: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Probabilistic representations: validity, brute force, experiment.
    Repdim {
        file: PathBuf,
        #[arg(long)]
        check: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, default_value_t = 0.125)]
        beta: f64,
        #[arg(long)]
        bruteforce: bool,
        #[arg(long)]
        wm_experiment: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Every check on a class file, a constructed class or random classes.
    VerifyAll {
        file: Option<PathBuf>,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, num_args = 2, value_names = ["KIND", "K"])]
        construct: Option<Vec<String>>,
        #[command(flatten)]
        common: Common,
    },
    /// Tightness constructions for k labels and dimension d.
    Tightness {
        #[arg(long)]
        k: Label,
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Sample, learn privately, and verify accuracy and privacy.
    EndToEnd {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        concept: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        eps: f64,
        /// JSON list of "num/den" point probabilities; uniform if absent.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiArg {
    N,
    Bin,
    B,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Soa,
    Bitwise,
    Wm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechArg {
    Exp,
    Reduction,
}

/// Failure before a report exists.
enum Failure {
    Usage(String),
    Cap(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            Error::Unrealizable { .. } | Error::BoundViolated { .. } | Error::ToleranceNotReached { .. } => {
                Failure::Other(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, s: &str) -> Result<(), Failure> {
    std::fs::write(path, s).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn load_class(path: &Path) -> Result<HypothesisClass, Failure> {
    Ok(HypothesisClass::from_json(&read(path)?)?)
}

fn config(command: &str, common: &Common) -> Result<RunConfig, Failure> {
    let mut c = RunConfig::new(command, common.seed, caps_from_env()?);
    c.output = common.report.as_ref().map(|p| p.display().to_string());
    Ok(c)
}

fn emit(report: &Report, common: &Common) -> Result<u8, Failure> {
    let json = report.to_json();
    // a closed pipe downstream is not an error of the run
    let _ = writeln!(std::io::stdout(), "{json}");
    if let Some(p) = &common.report {
        write(p, &json)?;
    }
    Ok(report.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Construct { threshold_pair: tp, amplify: amp, point, product, k } => {
            let h = match (tp, amp, point, product) {
                (Some(k), None, None, None) => threshold_pair(k)?,
                (None, Some(a), None, None) => {
                    let copies: usize = a[1].parse().map_err(|_| Failure::Usage(format!("bad copy count {:?}", a[1])))?;
                    let base = load_class(Path::new(&a[0]))?;
                    amplify(&base, copies, caps_from_env()?.max_class_size)?
                }
                (None, None, Some(p), None) => point_functions(p[0], p[1])?,
                (None, None, None, Some(files)) => {
                    let k = k.ok_or_else(|| Failure::Usage("--product needs --k".into()))?;
                    let parts = files.iter().map(|f| load_class(f)).collect::<Result<Vec<_>, _>>()?;
                    product_class(&parts, k, caps_from_env()?.max_class_size)?
                }
                _ => return Err(Failure::Usage("choose exactly one constructor".into())),
            };
            let _ = writeln!(std::io::stdout(), "{}", h.to_json());
            Ok(0)
        }
        Command::Dims { file, psi, uniform, common } => {
            let h = load_class(&file)?;
            let c = config("dims", &common)?.flag("file", file.display()).flag("uniform", uniform);
            let psi = match psi {
                PsiArg::N => PsiChoice::N,
                PsiArg::Bin => PsiChoice::Bin,
                PsiArg::B => PsiChoice::B,
                PsiArg::All => PsiChoice::All,
            };
            emit(&commands::cmd_dims(c, &h, psi, uniform)?, &common)
        }
        Command::Covers { file, depth, tree, exact, witness, common } => {
            let h = load_class(&file)?;
            let tree = match &tree {
                Some(p) => {
                    let v: serde_json::Value =
                        serde_json::from_str(&read(p)?).map_err(|e| Failure::Usage(e.to_string()))?;
                    Some(InputLabeledTree::from_json(&v)?)
                }
                None => None,
            };
            let c = config("covers", &common)?.flag("file", file.display()).flag("depth", depth).flag("exact", exact);
            let (report, cert) = commands::cmd_covers(c, &h, tree, depth, exact)?;
            if let Some(w) = &witness {
                write(w, &serde_json::to_string_pretty(&cert).expect("json"))?;
            }
            emit(&report, &common)
        }
        Command::Online { file, learner, horizon, adversary, common } => {
            let h = load_class(&file)?;
            let choice = match learner {
                LearnerArg::Soa => LearnerChoice::Soa,
                LearnerArg::Bitwise => LearnerChoice::Bitwise,
                LearnerArg::Wm => LearnerChoice::Wm,
            };
            let c = config("online", &common)?
                .flag("file", file.display())
                .flag("learner", format!("{choice:?}"))
                .flag("horizon", horizon)
                .flag("adversary", adversary);
            emit(&commands::cmd_online(c, &h, choice, horizon, adversary)?, &common)
        }
        Command::DpVerify { file, data, eps, delta, mode, mechanism, draws, common } => {
            let h = load_class(&file)?;
            let sample = commands::parse_sample(&read(&data)?, &h)?;
            let mode = match mode {
                ModeArg::Exact => DpMode::Exact,
                ModeArg::Mc => DpMode::MonteCarlo { draws },
            };
            let mech = match mechanism {
                MechArg::Exp => Mechanism::Exp,
                MechArg::Reduction => Mechanism::Reduction,
            };
            let c = config("dp-verify", &common)?
                .flag("file", file.display())
                .flag("data", data.display())
                .flag("eps", eps)
                .flag("delta", delta)
                .flag("mode", format!("{mode:?}"))
                .flag("mechanism", format!("{mech:?}"));
            emit(&commands::cmd_dp_verify(c, &h, &sample, mech, eps, delta, mode)?, &common)
        }
        Command::Learn { reduction, file, sample, eps, concept, common } => {
            if !reduction {
                return Err(Failure::Usage("learn needs --reduction".into()));
            }
            let h = load_class(&file)?;
            let s = commands::parse_sample(&read(&sample)?, &h)?;
            let c = config("learn", &common)?.flag("file", file.display()).flag("sample", sample.display()).flag("eps", eps);
            emit(&commands::cmd_learn(c, &h, &s, eps, concept)?, &common)
        }
        Command::Repdim { file, check, alpha, beta, bruteforce, wm_experiment, trials, common } => {
            let h = load_class(&file)?;
            let check = match &check {
                Some(p) => Some((ProbabilisticRepresentation::from_json(&read(p)?)?, alpha, beta)),
                None => None,
            };
            let c = config("repdim", &common)?
                .flag("file", file.display())
                .flag("alpha", alpha)
                .flag("beta", beta)
                .flag("bruteforce", bruteforce)
                .flag("wm_experiment", wm_experiment)
                .flag("trials", trials);
            let opts = RepdimOptions { check, bruteforce, wm_trials: wm_experiment.then_some(trials) };
            emit(&commands::cmd_repdim(c, &h, opts)?, &common)
        }
        Command::VerifyAll { file, random, construct, common } => {
            let mut c = config("verify-all", &common)?;
            let classes: Vec<(String, HypothesisClass)> = match (file, random, construct) {
                (Some(f), None, None) => {
                    c = c.flag("file", f.display());
                    vec![("file".to_string(), load_class(&f)?)]
                }
                (None, Some(n), None) => {
                    c = c.flag("random", n);
                    random_classes(n, common.seed)?.into_iter().map(|h| ("random".to_string(), h)).collect()
                }
                (None, None, Some(choice)) if choice[0] == "threshold-pair" => {
                    let k: Label = choice[1].parse().map_err(|_| Failure::Usage(format!("bad k {:?}", choice[1])))?;
                    c = c.flag("construct", format!("threshold-pair {k}"));
                    vec![(format!("threshold-pair({k})"), threshold_pair(k)?)]
                }
                (None, None, Some(choice)) => return Err(Failure::Usage(format!("unknown construction {:?}", choice[0]))),
                _ => return Err(Failure::Usage("give a class file, --random N or --construct KIND K".into())),
            };
            emit(&recipes::cmd_verify_all(c, &classes), &common)
        }
        Command::Tightness { k, d, common } => {
            let c = config("tightness", &common)?.flag("k", k).flag("d", d);
            emit(&recipes::cmd_tightness(c, k, d), &common)
        }
        Command::EndToEnd { file, concept, n, eps, dist, common } => {
            let h = load_class(&file)?;
            let dist = match &dist {
                Some(p) => {
                    let raw: Vec<String> =
                        serde_json::from_str(&read(p)?).map_err(|e| Failure::Usage(format!("distribution: {e}")))?;
                    let probs = raw.iter().map(|s| parse_rational(s)).collect::<Result<Vec<Rational>, _>>()?;
                    Some(Distribution::new((0..probs.len()).collect(), probs)?)
                }
                None => None,
            };
            let c = config("end-to-end", &common)?
                .flag("file", file.display())
                .flag("concept", concept)
                .flag("n", n)
                .flag("eps", eps);
            emit(&recipes::cmd_end_to_end(c, &h, concept, n, eps, dist.as_ref()), &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("cap exceeded: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
