use clap::{Args, Parser, Subcommand};
use rayforest_cli::commands::{
    self, cmd_cert_construct, cmd_cert_search, cmd_cert_verify, cmd_delta, cmd_k33, cmd_phi,
    cmd_poly, cmd_survey,
};
use rayforest_cli::CliError;

/// Exact spanning-forest Rayleigh differences and their sum-of-squares
/// certificates on multigraphs.
#[derive(Parser)]
#[command(name = "rayforest", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the report (or certificate) to a file instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Output format; only `text` exists.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the forest (and optionally spanning-tree) polynomial.
    Poly {
        #[arg(long)]
        graph: String,
        /// Also print the spanning-tree polynomial (requires a
        /// connected graph).
        #[arg(long)]
        trees: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Rayleigh difference of one edge pair, with sampled positivity.
    Delta {
        #[arg(long)]
        graph: String,
        /// Two comma-separated edge names.
        #[arg(long)]
        edges: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        trials: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// The operator (G^e − G_e)·G_e of one edge, with sampling.
    Phi {
        #[arg(long)]
        graph: String,
        /// One edge name.
        #[arg(long)]
        edges: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        trials: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Certificate construction, search and verification.
    Cert {
        #[command(subcommand)]
        action: CertAction,
    },
    /// Construct and verify certificates over many random
    /// series-parallel graphs.
    Survey {
        #[arg(long)]
        count: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        max_steps: u32,
        #[arg(long, default_value_t = 8)]
        trials: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// The negative-terms computation on the bond matroid of K3,3.
    K33 {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Subcommand)]
enum CertAction {
    /// Build the certificate recursively over the series-parallel
    /// structure; fails on graphs with a K4 minor.
    Construct {
        #[arg(long)]
        graph: String,
        /// `e,f` for a Δ certificate, `e` for a Φ certificate.
        #[arg(long)]
        edges: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exhaustive sign search with a node budget.
    Search {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        edges: String,
        #[arg(long, default_value_t = rayforest::cert::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Verify a certificate document against a graph.
    Verify {
        #[arg(long)]
        graph: String,
        /// Path to the certificate document.
        #[arg(long)]
        cert: String,
    },
}

fn emit(text: &str, output: &OutputOpts) -> Result<(), CliError> {
    if output.format != "text" {
        return Err(CliError::Usage(format!(
            "unknown format `{}`",
            output.format
        )));
    }
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write `{path}`: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Poly {
            graph,
            trees,
            output,
        } => {
            let report = cmd_poly(&graph, trees)?;
            emit(&report, &output)
        }
        Command::Delta {
            graph,
            edges,
            seed,
            trials,
            output,
        } => {
            let edges = commands::parse_edge_list(&edges);
            let report = cmd_delta(&graph, &edges, seed, trials)?;
            emit(&report, &output)
        }
        Command::Phi {
            graph,
            edges,
            seed,
            trials,
            output,
        } => {
            let edges = commands::parse_edge_list(&edges);
            let report = cmd_phi(&graph, &edges, seed, trials)?;
            emit(&report, &output)
        }
        Command::Cert { action } => match action {
            CertAction::Construct {
                graph,
                edges,
                output,
            } => {
                let edges = commands::parse_edge_list(&edges);
                let result = cmd_cert_construct(&graph, &edges)?;
                emit(&result.document, &output)?;
                println!("{}", result.verdict);
                Ok(())
            }
            CertAction::Search {
                graph,
                edges,
                budget,
                output,
            } => {
                let edges = commands::parse_edge_list(&edges);
                let result = cmd_cert_search(&graph, &edges, budget)?;
                emit(&result.document, &output)?;
                println!("{}", result.verdict);
                Ok(())
            }
            CertAction::Verify { graph, cert } => {
                let verdict = cmd_cert_verify(&graph, &cert)?;
                print!("{verdict}");
                Ok(())
            }
        },
        Command::Survey {
            count,
            seed,
            max_steps,
            trials,
            output,
        } => {
            let (report, all_ok) = cmd_survey(count, seed, max_steps, trials)?;
            emit(&report, &output)?;
            if all_ok {
                Ok(())
            } else {
                Err(CliError::Verification("survey had failing tasks".into()))
            }
        }
        Command::K33 {
            seed,
            trials,
            output,
        } => {
            let (report, ok) = cmd_k33(seed, trials)?;
            emit(&report, &output)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Verification(
                    "k33 reproduction did not match the expected counts".into(),
                ))
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
