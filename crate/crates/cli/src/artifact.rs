//! On-disk artifacts: `version (u16 BE) | kind | body`, where the body is
//! the core serialization and starts with the scheme tag.

use std::fs;
use std::path::Path;

use ttdf_core::codec::{Decode, Encode};
use ttdf_core::scheme::SchemeKind;

use crate::CliError;

pub const FORMAT_VERSION: u16 = 0x0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    PublicKey = 0x01,
    MasterKey = 0x02,
    SecretKey = 0x03,
    Ciphertext = 0x04,
    RevocationCiphertext = 0x05,
    Share = 0x06,
}

impl Kind {
    fn from_byte(b: u8) -> Option<Self> {
        use Kind::*;
        [PublicKey, MasterKey, SecretKey, Ciphertext, RevocationCiphertext, Share]
            .into_iter()
            .find(|k| *k as u8 == b)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::PublicKey => "public key",
            Kind::MasterKey => "master key",
            Kind::SecretKey => "secret key",
            Kind::Ciphertext => "ciphertext",
            Kind::RevocationCiphertext => "revocation ciphertext",
            Kind::Share => "decryption share",
        }
    }
}

pub fn to_bytes(kind: Kind, value: &impl Encode) -> Vec<u8> {
    let mut out = FORMAT_VERSION.to_be_bytes().to_vec();
    out.push(kind as u8);
    out.extend(value.to_bytes());
    out
}

/// Splits off the header; returns the kind, scheme and body.
pub fn split(bytes: &[u8]) -> Result<(Kind, SchemeKind, &[u8]), CliError> {
    if bytes.len() < 4 {
        return Err(CliError::Artifact("file too short".into()));
    }
    let version = u16::from_be_bytes([bytes[0], bytes[1]]);
    if version != FORMAT_VERSION {
        return Err(CliError::Artifact(format!("format version {version:#06x}")));
    }
    let kind = Kind::from_byte(bytes[2])
        .ok_or_else(|| CliError::Artifact(format!("artifact kind {:#04x}", bytes[2])))?;
    let scheme = SchemeKind::from_tag(bytes[3])?;
    Ok((kind, scheme, &bytes[3..]))
}

pub fn write(path: &Path, kind: Kind, value: &impl Encode) -> Result<(), CliError> {
    fs::write(path, to_bytes(kind, value)).map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn read_raw(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// The scheme and kind of a file without decoding the body.
pub fn peek(path: &Path) -> Result<(Kind, SchemeKind), CliError> {
    let bytes = read_raw(path)?;
    let (kind, scheme, _) = split(&bytes)?;
    Ok((kind, scheme))
}

pub fn decode<V: Decode>(bytes: &[u8], expected: Kind, scheme: SchemeKind) -> Result<V, CliError> {
    let (kind, found, body) = split(bytes)?;
    if kind != expected {
        return Err(CliError::Artifact(format!(
            "expected a {}, found a {}",
            expected.name(),
            kind.name()
        )));
    }
    if found != scheme {
        return Err(CliError::Artifact(format!(
            "expected a {scheme} artifact, found {found}"
        )));
    }
    Ok(V::from_bytes(body)?)
}

pub fn read<V: Decode>(path: &Path, expected: Kind, scheme: SchemeKind) -> Result<V, CliError> {
    decode(&read_raw(path)?, expected, scheme).map_err(|e| match e {
        CliError::Artifact(m) => CliError::Artifact(format!("{}: {m}", path.display())),
        other => other,
    })
}
