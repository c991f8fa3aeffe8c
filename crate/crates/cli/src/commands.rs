use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use ttdf_core::bits::BitString;
use ttdf_core::codec::Encode;
use ttdf_core::rpke::{self, RpkeCiphertext};
use ttdf_core::scheme::{self, SchemeKind};
use ttdf_core::tpke::{self, TpkeCiphertext, TpkePublicKey};
use ttdf_core::ttdf::Ttdf;
use ttdf_core::with_scheme;
use ttdf_net::{Manifest, ServerConfig};

use crate::artifact::{self, Kind};
use crate::bench::{self, BenchConfig};
use crate::{message, BenchArgs, CliError, Command, KeygenArgs};

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Keygen(args) => keygen(&args),
        Command::Share { msk, id, out } => {
            let (_, kind) = artifact::peek(&msk)?;
            with_scheme!(kind, T => share::<T>(kind, &msk, id, &out))
        }
        Command::Encrypt { pk, message, out } => {
            let (_, kind) = artifact::peek(&pk)?;
            with_scheme!(kind, T => encrypt::<T>(kind, &pk, &message, &out))
        }
        Command::RevokeEncrypt {
            pk,
            revoked,
            msk,
            session,
            out,
        } => {
            let (_, kind) = artifact::peek(&pk)?;
            with_scheme!(kind, T => revoke_encrypt::<T>(kind, &pk, &revoked, msk.as_deref(), &session, &out))
        }
        Command::PartialDec { sk, ct, out } => {
            let (_, kind) = artifact::peek(&ct)?;
            with_scheme!(kind, T => partial_dec::<T>(kind, &sk, &ct, &out))
        }
        Command::Combine { ct, shares } => {
            let (_, kind) = artifact::peek(&ct)?;
            let m = with_scheme!(kind, T => combine::<T>(kind, &ct, &shares))?;
            println!("{}", message::format(&m));
            Ok(())
        }
        Command::RevokeDecrypt { sk, ct } => {
            let (_, kind) = artifact::peek(&ct)?;
            let m = with_scheme!(kind, T => revoke_decrypt::<T>(kind, &sk, &ct))?;
            println!("{}", message::format(&m));
            Ok(())
        }
        Command::Serve { config } => serve(&config),
        Command::NetDecrypt {
            manifest,
            ct,
            t,
            timeout_ms,
        } => {
            let (_, kind) = artifact::peek(&ct)?;
            let manifest = Manifest::load(&manifest)?;
            if manifest.scheme()? != kind.name() {
                return Err(CliError::Usage(format!(
                    "manifest lists {} servers but the ciphertext is {kind}",
                    manifest.scheme()?
                )));
            }
            let timeout = Duration::from_millis(timeout_ms);
            let m = with_scheme!(kind, T => {
                let c: TpkeCiphertext<T> = read_ciphertext::<T>(kind, &ct)?;
                ttdf_net::combine_decrypt::<T>(&manifest.endpoints, &c, t, timeout)
            })?;
            println!("{}", message::format(&m));
            Ok(())
        }
        Command::Bench(args) => run_bench(&args),
    }
}

fn keygen(args: &KeygenArgs) -> Result<(), CliError> {
    if args.message_bits.is_some() && args.scheme != SchemeKind::Ddh {
        return Err(CliError::Usage("--message-bits applies to ddh only".into()));
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::Io(args.out.display().to_string(), e))?;
    let (n, t) = (args.n, args.t);
    let bits = match args.scheme {
        SchemeKind::Ddh => {
            let mb = args.message_bits.unwrap_or(scheme::DEFAULT_MESSAGE_BITS);
            write_keys(&scheme::ddh(args.level, mb, n, t)?, &args.out)?
        }
        SchemeKind::Lwe => write_keys(&scheme::lwe(args.level, n, t)?, &args.out)?,
        SchemeKind::Ttdr => write_keys(&scheme::ttdr(args.level, n, t)?, &args.out)?,
    };
    println!(
        "{} level {}: n = {n}, t = {t}, message bits = {bits}; wrote pk.bin, msk.bin",
        args.scheme, args.level
    );
    Ok(())
}

fn write_keys<T: Ttdf>(scheme: &T, dir: &Path) -> Result<usize, CliError> {
    let (pk, msk) = tpke::gen(scheme, &mut rand::rng())?;
    artifact::write(&dir.join("pk.bin"), Kind::PublicKey, &pk)?;
    artifact::write(&dir.join("msk.bin"), Kind::MasterKey, &msk)?;
    Ok(pk.message_bits())
}

fn share<T: Ttdf>(kind: SchemeKind, msk: &Path, id: u64, out: &Path) -> Result<(), CliError> {
    let msk: T::MasterTrapdoor = artifact::read(msk, Kind::MasterKey, kind)?;
    let sk = tpke::share::<T>(&msk, id)?;
    artifact::write(out, Kind::SecretKey, &sk)
}

fn encrypt<T: Ttdf>(kind: SchemeKind, pk: &Path, hex: &str, out: &Path) -> Result<(), CliError> {
    let pk: TpkePublicKey<T> = artifact::read(pk, Kind::PublicKey, kind)?;
    let m = message::parse(hex, pk.message_bits())?;
    let ct = tpke::enc(&pk, &m, &mut rand::rng())?;
    artifact::write(out, Kind::Ciphertext, &ct)
}

fn revoke_encrypt<T: Ttdf>(
    kind: SchemeKind,
    pk: &Path,
    revoked: &[PathBuf],
    msk: Option<&Path>,
    hex: &str,
    out: &Path,
) -> Result<(), CliError> {
    let pk: TpkePublicKey<T> = artifact::read(pk, Kind::PublicKey, kind)?;
    let need = pk.metadata().t - 1;
    if revoked.len() > need {
        return Err(CliError::Usage(format!(
            "at most t - 1 = {need} users can be revoked, got {}",
            revoked.len()
        )));
    }
    let keys = revoked
        .iter()
        .map(|p| artifact::read::<T::SharedTrapdoor>(p, Kind::SecretKey, kind))
        .collect::<Result<Vec<_>, _>>()?;
    let keys = match msk {
        Some(path) => {
            let msk: T::MasterTrapdoor = artifact::read(path, Kind::MasterKey, kind)?;
            rpke::pad_revoked(&pk, &msk, &keys)?
        }
        None if keys.len() == need => keys,
        None => {
            return Err(CliError::Usage(format!(
                "{} revoked keys given; pass --msk to pad to t - 1 = {need}",
                keys.len()
            )))
        }
    };
    let s = message::parse(hex, pk.message_bits())?;
    let ct = rpke::enc(&pk, &keys, &s, &mut rand::rng())?;
    artifact::write(out, Kind::RevocationCiphertext, &ct)
}

/// Reads either ciphertext kind; for a revocation ciphertext this is the
/// inner threshold ciphertext.
fn read_ciphertext<T: Ttdf>(kind: SchemeKind, path: &Path) -> Result<TpkeCiphertext<T>, CliError> {
    match artifact::peek(path)?.0 {
        Kind::RevocationCiphertext => {
            Ok(artifact::read::<RpkeCiphertext<T>>(path, Kind::RevocationCiphertext, kind)?.inner)
        }
        _ => artifact::read(path, Kind::Ciphertext, kind),
    }
}

fn partial_dec<T: Ttdf>(kind: SchemeKind, sk: &Path, ct: &Path, out: &Path) -> Result<(), CliError> {
    let sk: T::SharedTrapdoor = artifact::read(sk, Kind::SecretKey, kind)?;
    let ct = read_ciphertext::<T>(kind, ct)?;
    let share = tpke::dec(&sk, &ct, &mut rand::rng())?;
    artifact::write(out, Kind::Share, &share)
}

fn combine<T: Ttdf>(kind: SchemeKind, ct: &Path, shares: &[PathBuf]) -> Result<BitString, CliError> {
    let ct = read_ciphertext::<T>(kind, ct)?;
    let shares = shares
        .iter()
        .map(|p| artifact::read::<T::Share>(p, Kind::Share, kind))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(tpke::combine::<T>(&shares, &ct)?)
}

fn revoke_decrypt<T: Ttdf>(kind: SchemeKind, sk: &Path, ct: &Path) -> Result<BitString, CliError> {
    let sk: T::SharedTrapdoor = artifact::read(sk, Kind::SecretKey, kind)?;
    let ct: RpkeCiphertext<T> = artifact::read(ct, Kind::RevocationCiphertext, kind)?;
    Ok(rpke::dec(&sk, &ct, &mut rand::rng())?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServeFile {
    listen: String,
    /// Relative paths resolve against the config file's directory.
    key_file: PathBuf,
    #[serde(default)]
    scheme: Option<String>,
}

fn serve(config: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config).map_err(|e| CliError::Io(config.display().to_string(), e))?;
    let file: ServeFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
    let key_path = config
        .parent()
        .map_or_else(|| file.key_file.clone(), |dir| dir.join(&file.key_file));
    let (_, kind) = artifact::peek(&key_path)?;
    if let Some(name) = &file.scheme {
        let wanted: SchemeKind = name
            .parse()
            .map_err(|_| CliError::Config(format!("unknown scheme {name:?}")))?;
        if wanted != kind {
            return Err(CliError::Config(format!(
                "config names {wanted} but {} holds a {kind} key",
                key_path.display()
            )));
        }
    }
    let key = with_scheme!(kind, T => {
        artifact::read::<<T as Ttdf>::SharedTrapdoor>(&key_path, Kind::SecretKey, kind)?.to_bytes()
    });
    let config = ServerConfig {
        listen: file.listen,
        key,
        scheme: kind,
    };
    let server = ttdf_net::Server::bind(&config)?;
    println!("{kind} share server for id {} on {}", server.id(), server.local_addr());
    server.run();
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    let config = BenchConfig {
        schemes: args.scheme.clone(),
        levels: args.level.clone(),
        n: args.n,
        t: args.t,
        r: args.r,
        trials: args.trials,
        full_ddh: bench::full_ddh_from_env(),
    };
    let rows = bench::run(&config, &mut rand::rng())?;
    bench::write_csv(&args.csv, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.csv.display());
    Ok(())
}
