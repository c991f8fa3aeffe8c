//! Threshold decryption over TCP: each server holds one shared secret key
//! and answers share requests; the combiner fans out a ciphertext and
//! combines the first `t` distinct replies.

pub mod combiner;
pub mod manifest;
pub mod server;
pub mod wire;

pub use combiner::{combine_decrypt, request_share, DEFAULT_TIMEOUT};
pub use manifest::{Endpoint, Manifest};
pub use server::{serve, Server, ServerConfig, ServerHandle};

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("cannot bind {0}: {1}")]
    Bind(String, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{addr}: malformed reply: {detail}")]
    Protocol { addr: String, detail: String },
    #[error("{addr}: server error {code:#04x}: {detail}")]
    Remote { addr: String, code: u8, detail: String },
    #[error("only {got} of {need} shares arrived from {endpoints} endpoints")]
    InsufficientShares {
        got: usize,
        need: usize,
        endpoints: usize,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] ttdf_core::Error),
}
