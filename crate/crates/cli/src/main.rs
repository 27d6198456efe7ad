use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use splforge_cli::commands::{self, CompareFormat, Outcome, EXIT_USAGE};
use splforge_cli::service;
use splforge_core::metrics::{DebtRules, MeasureOptions};

/// Feature models, product configuration, derivation and source metrics.
#[derive(Debug, Parser)]
#[command(name = "splforge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Kv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a total configuration; prints "valid" or the violations.
    Validate { model: PathBuf, config: PathBuf },
    /// Number of valid products.
    Count {
        model: PathBuf,
        /// Restrict the model to a release.
        #[arg(long)]
        version: Option<u32>,
    },
    /// List valid products in lexicographic order, one per line.
    Enumerate {
        model: PathBuf,
        #[arg(long)]
        version: Option<u32>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Print the decisions forced by a partial configuration.
    Propagate { model: PathBuf, config: PathBuf },
    /// Derive the product manifest of a configuration.
    Derive {
        model: PathBuf,
        config: PathBuf,
        /// Release to derive; defaults to the latest one in the model.
        #[arg(long)]
        version: Option<u32>,
        /// Product name; defaults to the configuration file name.
        #[arg(long)]
        name: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Core, dead and false-optional features.
    Analyze {
        model: PathBuf,
        #[arg(long)]
        version: Option<u32>,
    },
    /// Print a model in canonical form.
    Fmt { model: PathBuf },
    /// Measure a source tree and write a `.metrics` report.
    Measure {
        dir: PathBuf,
        #[arg(long, default_value = "**/*.gsrc")]
        glob: String,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
        min_dup_block: u64,
        /// Functions with more effective lines than this are long.
        #[arg(long, default_value_t = 30)]
        long_fn: usize,
        #[arg(long, default_value_t = 10)]
        complexity_cap: usize,
        #[arg(long, default_value_t = 4)]
        nesting_cap: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare a baseline, a product-line core and a derived product.
    Compare {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        spl: PathBuf,
        #[arg(long)]
        derived: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the configuration API for one model.
    Serve {
        model: PathBuf,
        #[arg(long, env = "SPLFORGE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Also serve static files (the browser configurator) from here.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn emit(o: Outcome) -> ExitCode {
    print!("{}", o.stdout);
    eprint!("{}", o.stderr);
    ExitCode::from(o.code as u8)
}

fn serve(model: PathBuf, addr: SocketAddr, static_dir: Option<PathBuf>) -> ExitCode {
    let loaded = match commands::load_model(&model) {
        Ok(l) => l,
        Err(o) => return emit(o),
    };
    eprint!("{}", loaded.warnings);
    let app = service::router(loaded.model, static_dir.as_deref());
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cannot start runtime: {e}");
            return ExitCode::from(1);
        }
    };
    runtime.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(addr).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("cannot bind {addr}: {e}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        };
        eprintln!("listening on http://{}", listener.local_addr().map_or(addr, |a| a));
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        match axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("server error: {e}");
                ExitCode::from(1)
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { model, config } => commands::validate(&model, &config),
        Command::Count { model, version } => commands::count(&model, version),
        Command::Enumerate { model, version, limit } => commands::enumerate(&model, version, limit),
        Command::Propagate { model, config } => commands::propagate(&model, &config),
        Command::Derive { model, config, version, name, output } => {
            commands::derive(&model, &config, version, name.as_deref(), output.as_deref())
        }
        Command::Analyze { model, version } => commands::analyze(&model, version),
        Command::Fmt { model } => commands::fmt(&model),
        Command::Measure { dir, glob, min_dup_block, long_fn, complexity_cap, nesting_cap, output } => {
            let options = MeasureOptions {
                min_block: min_dup_block as usize,
                rules: DebtRules {
                    long_function_lines: long_fn,
                    complexity_cap,
                    nesting_cap,
                    ..DebtRules::default()
                },
            };
            commands::measure(&dir, &glob, &options, output.as_deref())
        }
        Command::Compare { baseline, spl, derived, format, output } => {
            let format = match format {
                Format::Table => CompareFormat::Table,
                Format::Kv => CompareFormat::KeyValue,
            };
            commands::compare(&baseline, &spl, &derived, format, output.as_deref())
        }
        Command::Serve { model, port, host, static_dir } => return serve(model, SocketAddr::new(host, port), static_dir),
    };
    emit(outcome)
}
