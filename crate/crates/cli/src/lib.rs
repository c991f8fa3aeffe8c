//! The `ttdf` command: key lifecycle, threshold and revocation encryption,
//! share servers and timing runs.

pub mod artifact;
pub mod bench;
mod commands;
pub mod message;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ttdf_core::group::Level;
use ttdf_core::scheme::SchemeKind;

pub use commands::execute;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("artifact: {0}")]
    Artifact(String),
    #[error("config: {0}")]
    Config(String),
    #[error("bench: {0}")]
    Bench(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] ttdf_core::Error),
    #[error(transparent)]
    Net(#[from] ttdf_net::NetError),
}

impl CliError {
    /// 2 for usage errors (including an impossible threshold), 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use ttdf_core::Error::BadThreshold;
        match self {
            CliError::Usage(_) | CliError::Core(BadThreshold { .. }) => 2,
            CliError::Net(ttdf_net::NetError::Core(BadThreshold { .. })) => 2,
            _ => 1,
        }
    }
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|_| format!("expected one of ddh, lwe, ttdr; got {s:?}"))
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse().map_err(|_| format!("expected one of toy, 128, 256, 512; got {s:?}"))
}

#[derive(Debug, Parser)]
#[command(name = "ttdf", version, about = "Threshold trapdoor function toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a public key and master key.
    Keygen(KeygenArgs),
    /// Issue the secret key of one identity.
    Share {
        #[arg(long)]
        msk: PathBuf,
        #[arg(long)]
        id: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Threshold-encrypt a hex message.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        message: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a session key that the given revoked users cannot recover.
    RevokeEncrypt {
        #[arg(long)]
        pk: PathBuf,
        /// Secret keys of the revoked users, at most t - 1.
        #[arg(long, num_args = 0.., required = false)]
        revoked: Vec<PathBuf>,
        /// Needed when fewer than t - 1 users are revoked.
        #[arg(long)]
        msk: Option<PathBuf>,
        #[arg(long)]
        session: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute one decryption share.
    PartialDec {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combine t decryption shares and print the message.
    Combine {
        #[arg(long)]
        ct: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        shares: Vec<PathBuf>,
    },
    /// Recover a session key as a non-revoked user.
    RevokeDecrypt {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        ct: PathBuf,
    },
    /// Run a share server.
    Serve {
        /// JSON with `listen`, `key_file` and optionally `scheme`.
        #[arg(long)]
        config: PathBuf,
    },
    /// Decrypt through the share servers listed in a manifest.
    NetDecrypt {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
    },
    /// Time every operation and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: SchemeKind,
    #[arg(long, value_parser = parse_level)]
    pub level: Level,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub t: usize,
    /// DDH only; defaults to 128.
    #[arg(long)]
    pub message_bits: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_scheme, num_args = 1.., required = true)]
    pub scheme: Vec<SchemeKind>,
    #[arg(long, value_parser = parse_level, num_args = 1.., required = true)]
    pub level: Vec<Level>,
    #[arg(long, default_value_t = 4)]
    pub n: u64,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub csv: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("{}", line.trim());
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let text = e.to_string().replace('\n', " ");
            if code == 2 {
                eprintln!("usage error: {text}");
            } else {
                eprintln!("error: {text}");
            }
            code
        }
    }
}
