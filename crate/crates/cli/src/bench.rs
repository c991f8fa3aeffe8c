//! Mean and standard deviation of every operation, one CSV row each.
//!
//! Full DDH sizing at the real levels needs `l(l+1)` exponentiations per
//! key with `l` in the hundreds, which takes hours at 256 bits and days at
//! 512, so DDH keys above the toy level use `l = REDUCED_DDH_L` unless
//! `TTDF_FULL_BENCH=1`. Per-operation costs scale with `l` predictably.

use std::fs::File;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{CryptoRng, RngCore};
use serde::Serialize;
use ttdf_core::bits::BitString;
use ttdf_core::ddh::{DdhContext, DdhTtdf};
use ttdf_core::group::{group_gen, Level};
use ttdf_core::hardcore::{extractor_width, HashDesc, DEFAULT_EPSILON_LOG2};
use ttdf_core::rpke;
use ttdf_core::scheme::{self, SchemeKind};
use ttdf_core::tpke::{self, TpkePublicKey};
use ttdf_core::ttdf::Ttdf;

use crate::CliError;

pub const REDUCED_DDH_L: usize = 8;

pub const OPS: [&str; 7] = [
    "keygen",
    "share",
    "encrypt",
    "partial_dec",
    "combine",
    "revoke_encrypt",
    "dec",
];

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub schemes: Vec<SchemeKind>,
    pub levels: Vec<Level>,
    pub n: u64,
    pub t: usize,
    /// Revoked users per revocation ciphertext, at most `t - 1`.
    pub r: usize,
    pub trials: usize,
    pub full_ddh: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scheme: String,
    /// Security level for the group schemes, lattice dimension for LWE.
    pub level_or_d: String,
    pub op: String,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub trials: usize,
}

pub fn full_ddh_from_env() -> bool {
    std::env::var("TTDF_FULL_BENCH").is_ok_and(|v| v == "1")
}

pub fn run<R: RngCore + CryptoRng + ?Sized>(
    config: &BenchConfig,
    rng: &mut R,
) -> Result<Vec<BenchRow>, CliError> {
    let BenchConfig { n, t, r, trials, .. } = *config;
    if trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    if t < 2 || r > t - 1 || r as u64 > n {
        return Err(CliError::Usage(format!(
            "need 2 <= t and r <= min(t - 1, n); got t = {t}, r = {r}, n = {n}"
        )));
    }
    let mut rows = Vec::new();
    for &kind in &config.schemes {
        for &level in &config.levels {
            // Ids above n are reserved padding for revocation.
            let span = n + t as u64 - 1;
            let (label, times) = match kind {
                SchemeKind::Ddh => {
                    let s = if config.full_ddh || level == Level::Toy {
                        scheme::ddh(level, scheme::DEFAULT_MESSAGE_BITS, span, t)?
                    } else {
                        log::info!("ddh {level}: reduced input length {REDUCED_DDH_L}");
                        DdhTtdf::new(DdhContext::new(group_gen(level), REDUCED_DDH_L, span, t)?)?
                    };
                    (level.to_string(), time_ops(&s, n, r, trials, rng)?)
                }
                SchemeKind::Ttdr => (
                    level.to_string(),
                    time_ops(&scheme::ttdr(level, span, t)?, n, r, trials, rng)?,
                ),
                SchemeKind::Lwe => {
                    let s = scheme::lwe(level, span, t)?;
                    (s.params().d().to_string(), time_ops(&s, n, r, trials, rng)?)
                }
            };
            for (op, samples) in OPS.iter().zip(times) {
                let (mean_ms, stddev_ms) = stats(&samples);
                rows.push(BenchRow {
                    scheme: kind.to_string(),
                    level_or_d: label.clone(),
                    op: op.to_string(),
                    mean_ms,
                    stddev_ms,
                    trials,
                });
            }
        }
    }
    Ok(rows)
}

/// Like [`tpke::gen`] but keeps going with a one-bit extractor when the
/// sizing leaves no extractable entropy.
fn bench_keys<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    scheme: &T,
    rng: &mut R,
) -> Result<(TpkePublicKey<T>, T::MasterTrapdoor), CliError> {
    let (ek, msk) = scheme.gen(rng)?;
    let meta = T::metadata(&ek);
    let width = extractor_width(meta.lossiness, DEFAULT_EPSILON_LOG2).unwrap_or(0).max(1);
    let hc = HashDesc::sample(meta.encoded_bits, width, rng)?;
    Ok((TpkePublicKey { ek, hc }, msk))
}

fn timed<V>(samples: &mut Vec<Duration>, f: impl FnOnce() -> V) -> V {
    let start = Instant::now();
    let v = f();
    samples.push(start.elapsed());
    v
}

fn time_ops<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    scheme: &T,
    n: u64,
    r: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Duration>>, CliError> {
    let mut s: Vec<Vec<Duration>> = vec![Vec::with_capacity(trials); OPS.len()];

    let mut keys = None;
    for _ in 0..trials {
        keys = Some(timed(&mut s[0], || bench_keys(scheme, rng))?);
    }
    let (pk, msk) = keys.expect("at least one trial");
    let t = pk.metadata().t;

    for i in 0..trials {
        let id = 1 + i as u64 % n;
        timed(&mut s[1], || tpke::share::<T>(&msk, id))?;
    }
    let sks = (1..=n)
        .map(|id| tpke::share::<T>(&msk, id))
        .collect::<Result<Vec<_>, _>>()?;

    let width = pk.message_bits();
    let mut cts = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = BitString::random(width, rng);
        cts.push((timed(&mut s[2], || tpke::enc(&pk, &m, rng))?, m));
    }

    for (i, (ct, _)) in cts.iter().enumerate() {
        let sk = &sks[i % sks.len()];
        timed(&mut s[3], || tpke::dec(sk, ct, rng))?;
    }

    for (ct, m) in &cts {
        let shares = sks[..t]
            .iter()
            .map(|sk| tpke::dec(sk, ct, rng))
            .collect::<Result<Vec<_>, _>>()?;
        let got = timed(&mut s[4], || tpke::combine::<T>(&shares, ct))?;
        check(&got, m, "combine")?;
    }

    let revoked = &sks[..r];
    let mut rcts = Vec::with_capacity(trials);
    for _ in 0..trials {
        let key = BitString::random(width, rng);
        let ct = timed(&mut s[5], || {
            rpke::pad_revoked(&pk, &msk, revoked).and_then(|padded| rpke::enc(&pk, &padded, &key, rng))
        })?;
        rcts.push((ct, key));
    }

    let reader = &sks[r];
    for (ct, key) in &rcts {
        let got = timed(&mut s[6], || rpke::dec(reader, ct, rng))?;
        check(&got, key, "dec")?;
    }
    Ok(s)
}

fn check(got: &BitString, want: &BitString, op: &str) -> Result<(), CliError> {
    if got != want {
        return Err(CliError::Bench(format!("{op} returned a wrong message")));
    }
    Ok(())
}

/// Mean and sample standard deviation in milliseconds.
pub fn stats(samples: &[Duration]) -> (f64, f64) {
    let ms: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e3).collect();
    let k = ms.len() as f64;
    let mean = ms.iter().sum::<f64>() / k;
    if ms.len() < 2 {
        return (mean, 0.0);
    }
    let var = ms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(())
}
