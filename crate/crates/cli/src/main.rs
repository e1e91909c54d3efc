use std::process::ExitCode;

use clap::{Parser, Subcommand};
use htoeplitz_cli::commands::{dispatch, Command};
use htoeplitz_cli::parse::parse_binding;

#[derive(Parser)]
#[command(name = "htoeplitz", version, about = "Toeplitz operators on the harmonic Bergman space")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mellin transform of a radial expression.
    Mellin {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Inverse Mellin transform of a rational function of z.
    Invmellin {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Apply T_f to a basis vector (z^n, zbar^n or 1).
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        v: String,
        /// Numeric binding for the oracle comparison, e.g. abar1=0.3+0.1i.
        #[arg(long, value_parser = parse_binding)]
        bind: Vec<(htoeplitz::Indeterminate, num_complex::Complex64)>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Commutator [T_f, T_u] on one basis vector.
    Commutator {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Decide whether T_f and T_u commute.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value_t = 20)]
        nmax: i64,
    },
    /// Derive every symbol commuting with T_u, u = z + sum_{l<=L} abar_l conj(z)^l.
    Derive {
        #[arg(long = "L", default_value_t = 1)]
        l: u32,
        #[arg(long = "N", default_value_t = 3)]
        n: i64,
        #[arg(long = "K", default_value_t = 4)]
        k: i64,
        /// JSON output (the default unless --pretty).
        #[arg(long)]
        json: bool,
    },
    /// Reproduce the printed lemma formulas and report discrepancies.
    VerifyPaper {
        #[arg(long)]
        lemma: Option<String>,
    },
    /// Randomized symbolic-versus-quadrature battery.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, env = "HTOEPLITZ_SEED", default_value_t = 20240601)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pretty = cli.pretty;
    let command = match cli.command {
        Cmd::Mellin { expr } => Command::Mellin { expr },
        Cmd::Invmellin { expr } => Command::InvMellin { expr },
        Cmd::Apply { f, v, bind, tol } => Command::Apply { f, v, bind, tol },
        Cmd::Commutator { f, u, v } => Command::Commutator { f, u, v },
        Cmd::Verify { f, u, nmax } => Command::Verify { f, u, n_max: nmax },
        Cmd::Derive { l, n, k, json } => {
            pretty &= !json;
            Command::Derive { l, n, k }
        }
        Cmd::VerifyPaper { lemma } => Command::VerifyPaper { lemma },
        Cmd::OracleCheck { cases, tol, seed } => Command::OracleCheck { cases, tol, seed },
    };
    let report = dispatch(&command);
    if pretty {
        print!("{}", report.text);
        if !report.text.ends_with('\n') {
            println!();
        }
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    } else {
        println!("{}", report.to_json(false));
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(report.exit_status as u8)
}
