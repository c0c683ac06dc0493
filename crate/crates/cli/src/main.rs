use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctree_cli::{cmd_compare, cmd_generate, cmd_solve, Engine, Format, RunConfig, EXIT_ERROR};
use ctree_core::{Bounds, Step3Mode};

/// Checking-tree refutation lab: exact oracles versus the reconstructed
/// procedure on 3-CNF inputs.
///
/// Exit codes: 10 SAT, 20 UNSAT, 0 no divergence, 30 divergence, 1 error.
#[derive(Parser, Debug)]
#[command(name = "ctree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one DIMACS file.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Oracle)]
        engine: EngineArg,
        /// Literals assumed true: names, `~name`, or DIMACS integers.
        #[arg(long, value_delimiter = ',')]
        force: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run both engines on each file and report disagreements.
    Compare {
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[command(flatten)]
        common: Common,
    },
    /// Write family member `n` for `seed` as annotated DIMACS.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Step-3 mode: fixpoint, single or off.
    #[arg(long, default_value = "fixpoint")]
    step3: Step3Mode,
    /// Cap on the product of layer widths for path enumeration.
    #[arg(long, env = "CTREE_PATH_BOUND", default_value_t = Bounds::default().max_path_product,
          value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    /// Cap on the variable count for exhaustive search.
    #[arg(long, env = "CTREE_VAR_BOUND", default_value_t = Bounds::default().max_variables,
          value_parser = clap::value_parser!(u32).range(1..))]
    var_bound: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Oracle,
    Reconstructed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            step3: self.step3,
            bounds: Bounds {
                max_variables: self.var_bound,
                max_path_product: self.bound,
            },
            ..RunConfig::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Solve {
            file,
            engine,
            force,
            common,
        } => {
            let config = RunConfig {
                inputs: vec![file],
                engine: match engine {
                    EngineArg::Oracle => Engine::Oracle,
                    EngineArg::Reconstructed => Engine::Reconstructed,
                },
                force,
                ..common.config()
            };
            cmd_solve(&config, &mut out)
        }
        Command::Compare {
            files,
            format,
            common,
        } => {
            let config = RunConfig {
                inputs: files,
                engine: Engine::Both,
                format: match format {
                    FormatArg::Text => Format::Text,
                    FormatArg::Json => Format::Json,
                },
                ..common.config()
            };
            cmd_compare(&config, &mut out)
        }
        Command::Generate {
            n,
            seed,
            out: out_dir,
            common,
        } => {
            let config = RunConfig {
                n,
                seed,
                out_dir,
                ..common.config()
            };
            cmd_generate(&config, &mut out)
        }
    };
    let _ = out.flush();

    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ctree: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
