//! `pointproc`: simulate, evaluate, fit and check temporal point process
//! models from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error,
//! 3 numerical failure. Failures print one line on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pointproc_core::io::{format_number, parse_events, write_events};
use pointproc_core::{
    fit_mle, log_likelihood, residual_report, simulate_batch, Algorithm, Error, FitConfig,
    ModelFamily, ModelSpec, ObservationWindow, PointPattern, SimConfig, TerminationReason,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "pointproc",
    version,
    about = "Temporal point processes by conditional intensity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate replicates and write one event file per replicate.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Inverse)]
        algorithm: AlgorithmArg,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// Files are written to `<out>_<k>.csv`, k = 0, 1, ...
        #[arg(long)]
        out: String,
    },
    /// Print the exact log-likelihood of an event file.
    Loglik {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        t_end: f64,
    },
    /// Fit a model family by maximum likelihood.
    Fit {
        #[arg(long)]
        family: String,
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        t_end: f64,
        /// Comma-separated starting values in the family's parameter order.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        init: Vec<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Comma-separated breakpoints (piecewise_poisson only).
        #[arg(long, value_delimiter = ',')]
        breakpoints: Vec<f64>,
        /// Event cap (stop_after_n only).
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Time-rescaling residual report.
    Residuals {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Inverse,
    Thinning,
}

enum Failure {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("pointproc: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pointproc: {}", f.message().replace('\n', " "));
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Simulate {
            model,
            t_end,
            seed,
            algorithm,
            replicates,
            out,
        } => cmd_simulate(&model, t_end, seed, algorithm, replicates, &out),
        Command::Loglik {
            model,
            events,
            t_end,
        } => cmd_loglik(&model, &events, t_end),
        Command::Fit {
            family,
            events,
            t_end,
            init,
            max_iter,
            breakpoints,
            n_max,
        } => cmd_fit(&family, &events, t_end, init, max_iter, breakpoints, n_max),
        Command::Residuals {
            model,
            events,
            t_end,
            out,
        } => cmd_residuals(&model, &events, t_end, &out),
    }
}

fn window(t_end: f64) -> Result<ObservationWindow, Failure> {
    ObservationWindow::new(t_end)
        .map_err(|_| Failure::Usage(format!("--t-end must be positive and finite, got {t_end}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelSpec, Failure> {
    ModelSpec::from_json(&read(path)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_events(path: &Path, t_end: f64) -> Result<PointPattern, Failure> {
    window(t_end)?;
    parse_events(&read(path)?, t_end).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn cmd_simulate(
    model: &Path,
    t_end: f64,
    seed: u64,
    algorithm: AlgorithmArg,
    replicates: usize,
    out: &str,
) -> Outcome {
    let window = window(t_end)?;
    if replicates == 0 {
        return Err(Failure::Usage("--replicates must be at least 1".into()));
    }
    let model = load_model(model)?;
    let algorithm = match algorithm {
        AlgorithmArg::Inverse => Algorithm::Inverse,
        AlgorithmArg::Thinning => Algorithm::Thinning,
    };
    let config = SimConfig::new(algorithm, window, seed).with_replicates(replicates);
    let patterns = simulate_batch(&model, &config)?;
    for (k, pattern) in patterns.iter().enumerate() {
        write(Path::new(&format!("{out}_{k}.csv")), &write_events(pattern))?;
    }
    Ok(())
}

fn cmd_loglik(model: &Path, events: &Path, t_end: f64) -> Outcome {
    let model = load_model(model)?;
    let pattern = load_events(events, t_end)?;
    let ll = log_likelihood(&model, &pattern)?;
    println!("{}", format_number(ll));
    Ok(())
}

struct FitDocument {
    family: &'static str,
    params: Vec<(String, f64)>,
    log_likelihood: f64,
    converged: bool,
    iterations: usize,
    termination_reason: TerminationReason,
}

fn parse_family(
    tag: &str,
    breakpoints: Vec<f64>,
    n_max: Option<usize>,
) -> Result<ModelFamily, Failure> {
    let family = match tag {
        "hom_poisson" => ModelFamily::HomPoisson,
        "piecewise_poisson" => {
            if breakpoints.is_empty() {
                return Err(Failure::Usage(
                    "piecewise_poisson needs --breakpoints".into(),
                ));
            }
            ModelFamily::PiecewisePoisson { breakpoints }
        }
        "renewal_gamma" => ModelFamily::RenewalGamma,
        "hawkes_exp" => ModelFamily::HawkesExp,
        "self_correcting" => ModelFamily::SelfCorrecting,
        "etas_exp" => ModelFamily::EtasExp,
        "stop_after_n" => ModelFamily::StopAfterN {
            n_max: n_max.ok_or_else(|| Failure::Usage("stop_after_n needs --n-max".into()))?,
        },
        other => return Err(Failure::Usage(format!("unknown family {other:?}"))),
    };
    Ok(family)
}

fn cmd_fit(
    family: &str,
    events: &Path,
    t_end: f64,
    init: Vec<f64>,
    max_iter: Option<usize>,
    breakpoints: Vec<f64>,
    n_max: Option<usize>,
) -> Outcome {
    let family = parse_family(family, breakpoints, n_max)?;
    let pattern = load_events(events, t_end)?;
    let mut config = FitConfig::new(init);
    if let Some(n) = max_iter {
        config.max_iterations = n;
    }
    let fit = fit_mle(&family, &pattern, &config).map_err(|e| match e {
        Error::InvalidConfig(msg) => Failure::Usage(msg),
        other => other.into(),
    })?;
    let doc = FitDocument {
        family: family.tag(),
        params: family.param_names().into_iter().zip(fit.params()).collect(),
        log_likelihood: fit.log_likelihood,
        converged: fit.converged,
        iterations: fit.iterations,
        termination_reason: fit.termination_reason,
    };
    println!("{}", fit_json(&doc));
    Ok(())
}

// Parameters are written as an object in family order.
fn fit_json(doc: &FitDocument) -> String {
    let mut params = String::from("{");
    for (i, (name, value)) in doc.params.iter().enumerate() {
        if i > 0 {
            params.push_str(", ");
        }
        params.push_str(&format!("{}: {}", json(name), json(value)));
    }
    params.push('}');
    format!(
        "{{\n  \"family\": {},\n  \"params\": {},\n  \"log_likelihood\": {},\n  \"converged\": {},\n  \"iterations\": {},\n  \"termination_reason\": {}\n}}",
        json(&doc.family),
        params,
        json(&doc.log_likelihood),
        doc.converged,
        doc.iterations,
        json(&doc.termination_reason),
    )
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("value serializes")
}

fn cmd_residuals(model: &Path, events: &Path, t_end: f64, out: &Path) -> Outcome {
    let model = load_model(model)?;
    let pattern = load_events(events, t_end)?;
    let report = residual_report(&model, &pattern)?;
    write(out, &format!("{}\n", report.to_json()))?;
    let show = |v: Option<f64>| v.map(format_number).unwrap_or_else(|| "NA".into());
    println!(
        "n={} ks={} p={}",
        report.n,
        show(report.ks_statistic),
        show(report.ks_p_value)
    );
    Ok(())
}
