//! `hermquot`: genus tables and verification reports for Hermitian curve
//! quotients. See the library crate for command semantics and exit codes.

use clap::{Parser, Subcommand};
use hermquot_cli::{cmd_semigroup, cmd_table, cmd_verify, Format, Outcome};

#[derive(Parser)]
#[command(
    name = "hermquot",
    about = "Genus tables and verification for quotients of the Hermitian curve"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the full genus-spectrum table for one q.
    Table {
        #[arg(long)]
        q: u64,
        /// Output format: json or csv.
        #[arg(long, default_value = "json")]
        format: String,
        /// Skip point counting over fields larger than 2^BITS elements.
        #[arg(long, default_value_t = 23)]
        max_ext_bits: u32,
        /// Worker threads for point enumeration (0 = automatic).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Verify one quotient case and print its report.
    Verify {
        /// Case label: I, II1, II2, III, IV1, IV2, or V.
        #[arg(long)]
        case: String,
        #[arg(long)]
        q: u64,
        /// Prime order of the covering group.
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 23)]
        max_ext_bits: u32,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Numerical-semigroup checks: s-filter, hyper-identity, or bounds.
    Semigroup {
        #[arg(long)]
        q: u64,
        /// Check to run: s-filter, hyper-identity, or bounds.
        #[arg(long)]
        kind: String,
        /// Divisor for the member filter (s-filter only).
        #[arg(long, default_value_t = 3)]
        n: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let out: Outcome = match cli.cmd {
        Cmd::Table {
            q,
            format,
            max_ext_bits,
            jobs,
        } => match format.parse::<Format>() {
            Ok(f) => cmd_table(q, f, max_ext_bits, jobs),
            Err(e) => Outcome {
                exit: 2,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            },
        },
        Cmd::Verify {
            case,
            q,
            d,
            max_ext_bits,
            jobs,
        } => cmd_verify(&case, q, d, max_ext_bits, jobs),
        Cmd::Semigroup { q, kind, n } => cmd_semigroup(q, &kind, n),
    };
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.exit);
}
