use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use mixnorm::blocks::{block_bracket, pairing};
use mixnorm::grid::text::{from_text, to_text};
use mixnorm::grid::{ExponentVector, SpaceParams, StepFunction};
use mixnorm::norms::{bm_norm, mixed_norm, morrey_norm, slice_norm};
use mixnorm::operators::{Operator, SingularKernel};
use mixnorm::util::format_sig;
use mixnorm::verify::{run_specs, run_suite, to_csv, ProbeReport, ProbeSpec, SuiteConfig};
use mixnorm::{Error, Result};

/// Mixed-norm Bourgain-Morrey computations on dyadic step functions.
#[derive(Parser)]
#[command(name = "mixnorm", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a norm of a step function.
    Norm {
        /// Input file (stdin when absent or `-`).
        input: Option<PathBuf>,
        #[command(flatten)]
        params: ParamFlags,
        /// mixed | bm | morrey | slice:<j>
        #[arg(long, default_value = "bm")]
        kind: String,
    },
    /// Apply an operator and print the result.
    Apply {
        input: Option<PathBuf>,
        /// ek:<k> | doob | mdya:<a1,..,an> | mit | ialpha:<alpha> | hilbert | riesz:<axis>:<eps> | conv:<file>
        #[arg(long)]
        op: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the pairing `int f g`.
    Pair { f: PathBuf, g: PathBuf },
    /// Print `lower upper ratio` for the block-space norm.
    BlockBracket {
        input: Option<PathBuf>,
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the upper-bound decomposition here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run one probe and print its CSV row.
    Probe {
        name: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "J")]
        j: Option<i32>,
        #[arg(long = "K")]
        k: Option<i32>,
        #[arg(long)]
        sparsity: Option<f64>,
        /// Extra levels between the generated input and the evaluation grid.
        #[arg(long)]
        refine: Option<i32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the probes selected by a config file and print the CSV report.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ParamFlags {
    /// Comma-separated exponents, e.g. `2,4` or `2,inf`.
    #[arg(long)]
    pbar: String,
    #[arg(long)]
    t: Option<f64>,
    /// `inf` selects the Morrey case.
    #[arg(long)]
    r: Option<f64>,
}

impl ParamFlags {
    fn pbar(&self) -> Result<ExponentVector> {
        ExponentVector::parse(&self.pbar)
    }

    /// Validated against the nontrivial regimes.
    fn space(&self, default_r: Option<f64>) -> Result<SpaceParams> {
        let t = self.t.ok_or_else(|| Error::InvalidParams("--t is required".into()))?;
        let r = self.r.or(default_r).ok_or_else(|| Error::InvalidParams("--r is required".into()))?;
        let p = SpaceParams::new(self.pbar()?, t, r)?;
        p.require_nontrivial()?;
        Ok(p)
    }
}

enum Failure {
    Invalid(Error),
    ProbeFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_function(path: Option<&Path>) -> Result<StepFunction> {
    from_text(&read_input(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_op(spec: &str) -> Result<Operator> {
    let bad = || Error::InvalidParams(format!("unknown operator {spec:?}"));
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    Ok(match head {
        "ek" => Operator::CondExpect(rest.parse().map_err(|_| bad())?),
        "doob" => Operator::Doob,
        "mit" => Operator::IteratedMaximal,
        "hilbert" => Operator::Singular(SingularKernel::Hilbert1D),
        "mdya" => {
            let digits: Vec<u8> = rest
                .chars()
                .filter(|c| *c != ',')
                .map(|c| c.to_digit(10).filter(|d| *d < 3).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<_>>()?;
            Operator::ShiftedMaximal(digits)
        }
        "ialpha" => Operator::FracIntegral(num(rest)?),
        "riesz" => {
            let (axis, eps) = rest.split_once(':').ok_or_else(bad)?;
            Operator::Singular(SingularKernel::TruncatedRiesz { axis: axis.parse().map_err(|_| bad())?, eps: num(eps)? })
        }
        "conv" => Operator::Convolve(read_function(Some(Path::new(rest)))?),
        _ => return Err(bad()),
    })
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("MIXNORM_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParams(format!("MIXNORM_THREADS={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn report(reports: &[ProbeReport], out: Option<&Path>) -> std::result::Result<(), Failure> {
    emit(out, &to_csv(reports))?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::ProbeFailed)
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.cmd {
        Cmd::Norm { input, params, kind } => {
            let f = read_function(input.as_deref())?;
            let v = match kind.as_str() {
                "mixed" => mixed_norm(&f, &params.pbar()?)?,
                "bm" => bm_norm(&f, &params.space(None)?)?,
                "morrey" => {
                    if params.r.is_some_and(|r| r.is_finite()) {
                        return Err(Error::InvalidParams("--kind morrey takes r = inf".into()).into());
                    }
                    morrey_norm(&f, &params.space(Some(f64::INFINITY))?)?
                }
                k => match k.strip_prefix("slice:").map(str::parse::<i32>) {
                    Some(Ok(j)) => slice_norm(&f, j, &params.space(None)?.dual()?)?,
                    _ => return Err(Error::InvalidParams(format!("unknown norm kind {k:?}")).into()),
                },
            };
            println!("{}", format_sig(v, 15));
        }
        Cmd::Apply { input, op, out } => {
            let f = read_function(input.as_deref())?;
            let g = parse_op(&op)?.apply(&f)?;
            emit(out.as_deref(), &to_text(&g))?;
        }
        Cmd::Pair { f, g } => {
            let v = pairing(&read_function(Some(&f))?, &read_function(Some(&g))?)?;
            println!("{}", format_sig(v, 15));
        }
        Cmd::BlockBracket { input, params, budget, seed, witness } => {
            let g = read_function(input.as_deref())?;
            let (b, dec) = block_bracket(&g, &params.space(None)?, budget, seed)?;
            println!("{} {} {}", format_sig(b.lower, 15), format_sig(b.upper, 15), format_sig(b.ratio(), 15));
            if let Some(w) = witness {
                std::fs::write(w, dec.to_text()).map_err(Error::from)?;
            }
        }
        Cmd::Probe { name, trials, seed, n, j, k, sparsity, refine, out } => {
            let mut spec = ProbeSpec::default_for(&name)?;
            spec.trials = trials.unwrap_or(spec.trials);
            spec.seed = seed.unwrap_or(spec.seed);
            spec.gen.n = n.unwrap_or(spec.gen.n);
            spec.gen.j = j.unwrap_or(spec.gen.j);
            spec.gen.k = k.unwrap_or(spec.gen.k);
            spec.gen.sparsity = sparsity.unwrap_or(spec.gen.sparsity);
            spec.refine = refine.unwrap_or(spec.refine);
            let reports = run_specs(&[spec], threads_from_env()?)?;
            report(&reports, out.as_deref())?;
        }
        Cmd::Suite { config, out } => {
            let cfg = SuiteConfig::parse(&read_input(Some(&config))?)?;
            let reports = run_suite(&cfg, threads_from_env()?)?;
            report(&reports, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::ProbeFailed) => ExitCode::from(2),
    }
}
