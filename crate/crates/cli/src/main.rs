use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdeform_cli::{run, Command, Format, JobSpec, Options};

/// Deformations of quantum polynomial rings from smoothing diagrams.
#[derive(Parser)]
#[command(name = "qdeform", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[arg(long, value_enum, default_value_t = OutFormat::Json, global = true)]
    format: OutFormat,
    /// Write the artifact here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Args)]
struct Input {
    /// Path to a system JSON file, or the JSON itself.
    input: String,
    /// Comma-separated first-order scalars, overriding the input file.
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Biresidue, genericity and smoothable weights.
    Analyze(Input),
    /// Smoothing diagram and its chain/cycle decomposition.
    Diagram(Input),
    /// Solve for the deformed relations along the input edges.
    Deform(Input),
    /// Certify confluence and the Hilbert function of the deformation.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 6)]
        dmax: usize,
        #[arg(long, default_value = "1")]
        eps: String,
    },
    /// Feigin-Odesskii relation coefficients and their degeneration.
    Fo {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0.07+0.02i")]
        z: String,
        #[arg(long, default_value = "12i")]
        tau: String,
        /// Modular parameters used to fit ε-orders.
        #[arg(long, value_delimiter = ',', default_value = "8i,10i,12i")]
        taus: Vec<String>,
    },
    /// Top Koszul syzygy and its cyclic twist at a rational point.
    Superpotential {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value = "2")]
        v0: String,
    },
}

fn read_input(i: &Input) -> Result<String, String> {
    if i.input.trim_start().starts_with('{') {
        Ok(i.input.clone())
    } else {
        std::fs::read_to_string(&i.input).map_err(|e| format!("cannot read {}: {e}", i.input))
    }
}

fn job(cli: &Cli) -> Result<JobSpec, String> {
    let mut options = Options::default();
    let (command, input) = match &cli.command {
        Cmd::Analyze(i) => (Command::Analyze, Some(i)),
        Cmd::Diagram(i) => (Command::Diagram, Some(i)),
        Cmd::Deform(i) => (Command::Deform, Some(i)),
        Cmd::Verify { input, dmax, eps } => {
            options.dmax = *dmax;
            options.eps = eps.clone();
            (Command::Verify, Some(input))
        }
        Cmd::Fo { n, k, z, tau, taus } => {
            options.n = Some(*n);
            options.k = Some(*k);
            options.z = z.clone();
            options.tau = tau.clone();
            options.taus = taus.clone();
            (Command::Fo, None)
        }
        Cmd::Superpotential { input, eps, v0 } => {
            options.eps = eps.clone();
            options.v0 = v0.clone();
            (Command::Superpotential, Some(input))
        }
    };
    if let Some(i) = input {
        options.gammas = i.gammas.clone();
    }
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Text => Format::Text,
    };
    Ok(JobSpec { command, input: input.map(read_input).transpose()?, format, options })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = std::env::var("QDEFORM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let spec = match job(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&spec) {
        Ok(outcome) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &outcome.output) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", outcome.output);
            }
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
