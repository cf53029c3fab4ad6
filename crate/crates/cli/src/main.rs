use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use partition_asymptotics::numerics::{context_for_n, PrecisionContext};
use partition_asymptotics::table::{table_rows_with, TABLE1_NS, TABLE_ORDER};
use partition_asymptotics::{
    hardy_ramanujan, p_approx_full, p_approx_simple, partition_exact, verify_saddle_bounds,
};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "partitions", about = "Exact and asymptotic partition counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Simple,
    Full,
    Hr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact value p(n)
    Exact {
        n: u64,
        /// Write output to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an asymptotic approximation of p(n)
    Approx {
        n: u64,
        /// Truncation order N of the expansion
        #[arg(long, default_value_t = TABLE_ORDER)]
        order: u32,
        #[arg(long, value_enum, default_value = "simple")]
        kind: Kind,
        /// Override the automatic decimal working precision
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the exact-vs-approximate comparison table
    Table {
        /// Values of n; defaults to the published table
        n_list: Vec<u64>,
        #[arg(long, default_value_t = TABLE_ORDER)]
        order: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the saddle-point error bounds over a list of n
    Verify {
        n_list: Vec<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    match cli.command {
        Command::Exact { n, out } => {
            let p = partition_exact(n);
            emit(out.as_ref(), &format!("{p}\n")).map_err(io_err)?;
            Ok(())
        }
        Command::Approx {
            n,
            order,
            kind,
            digits,
            out,
        } => {
            if n == 0 {
                return Err((EXIT_NUMERIC, "approx requires n >= 1".into()));
            }
            let ctx = match digits {
                Some(d) => PrecisionContext::new(d),
                None => context_for_n(n, order),
            };
            let result = match kind {
                Kind::Simple => p_approx_simple(n, order, &ctx),
                Kind::Full => p_approx_full(n, order, &ctx),
                Kind::Hr => hardy_ramanujan(n, &ctx),
            }
            .map_err(num_err)?;
            let exact = partition_exact(n);
            let result = result.with_ratio_to_exact(&exact, &ctx);
            let text = format!("{}\n", serde_json::to_string_pretty(&result.to_json()).unwrap());
            emit(out.as_ref(), &text).map_err(io_err)?;
            Ok(())
        }
        Command::Table {
            n_list,
            order,
            format,
            digits,
            out,
        } => {
            let ns = if n_list.is_empty() {
                TABLE1_NS.to_vec()
            } else {
                n_list
            };
            if ns.iter().any(|&n| n == 0) {
                return Err((EXIT_NUMERIC, "table requires n >= 1".into()));
            }
            let rows =
                table_rows_with(&ns, order, digits, cfg!(feature = "parallel")).map_err(num_err)?;
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("n,p,p_bar,ratio\n");
                    for row in &rows {
                        s.push_str(&row.to_csv_line());
                        s.push('\n');
                    }
                    s
                }
                Format::Json => {
                    let items: Vec<_> = rows.iter().map(|r| r.to_json()).collect();
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&serde_json::Value::Array(items)).unwrap()
                    )
                }
            };
            emit(out.as_ref(), &text).map_err(io_err)?;
            Ok(())
        }
        Command::Verify { n_list, format, out } => {
            if n_list.iter().any(|&n| n == 0) {
                return Err((EXIT_NUMERIC, "verify requires n >= 1".into()));
            }
            let mut reports = Vec::with_capacity(n_list.len());
            for &n in &n_list {
                let ctx = context_for_n(n, 0);
                reports.push(verify_saddle_bounds(n, &ctx).map_err(num_err)?);
            }
            let all_ok = reports.iter().all(|r| r.all_within());
            let text = match format {
                Format::Json => {
                    let items: Vec<_> = reports.iter().map(|r| r.to_json()).collect();
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&serde_json::Value::Array(items)).unwrap()
                    )
                }
                Format::Csv => {
                    let mut s = String::from("n,bound,residual,envelope,ratio\n");
                    for r in &reports {
                        for (i, name) in partition_asymptotics::saddle::BOUND_NAMES
                            .iter()
                            .enumerate()
                        {
                            s.push_str(&format!(
                                "{},{},{:e},{:e},{:e}\n",
                                r.n,
                                name,
                                r.residuals[i].to_f64(),
                                r.envelopes[i].to_f64(),
                                r.ratios[i].to_f64()
                            ));
                        }
                    }
                    s
                }
            };
            emit(out.as_ref(), &text).map_err(io_err)?;
            if all_ok {
                Ok(())
            } else {
                Err((EXIT_VERIFY, "one or more residuals exceed their envelope".into()))
            }
        }
    }
}

fn num_err(e: partition_asymptotics::Error) -> (u8, String) {
    (EXIT_NUMERIC, e.to_string())
}

fn io_err(e: std::io::Error) -> (u8, String) {
    (EXIT_NUMERIC, format!("io error: {e}"))
}

fn main() -> ExitCode {
    // usage problems exit 1; clap's default would be 2, which is reserved
    // for numeric failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            let payload = serde_json::json!({ "error": msg });
            eprintln!("{payload}");
            ExitCode::from(code)
        }
    }
}
