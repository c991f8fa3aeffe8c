use std::collections::HashSet;
use std::io::BufReader;
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use ttdf_core::bits::BitString;
use ttdf_core::codec::{Decode, Encode, Reader};
use ttdf_core::tpke::{self, DecryptionShare, TpkeCiphertext};
use ttdf_core::ttdf::Ttdf;
use ttdf_core::Error;

use crate::manifest::Endpoint;
use crate::wire::{read_frame, Frame, MsgType, WireMessage};
use crate::NetError;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// Sends one share request and waits for the reply.
pub fn request_share<T: Ttdf>(
    addr: &str,
    c1: &T::Image,
    timeout: Duration,
) -> Result<DecryptionShare<T>, NetError> {
    let sock = addr
        .to_socket_addrs()
        .map_err(|e| NetError::Io(addr.to_string(), e))?
        .next()
        .ok_or_else(|| NetError::Io(addr.to_string(), std::io::ErrorKind::NotFound.into()))?;
    let io = |e| NetError::Io(addr.to_string(), e);
    let mut stream = TcpStream::connect_timeout(&sock, timeout).map_err(io)?;
    stream.set_read_timeout(Some(timeout)).map_err(io)?;
    stream.set_write_timeout(Some(timeout)).map_err(io)?;
    WireMessage::new(MsgType::ShareRequest, c1.to_bytes())
        .write_to(&mut stream)
        .map_err(io)?;
    let msg = match read_frame(&mut BufReader::new(&stream)).map_err(io)? {
        Frame::Message(m) => m,
        other => {
            return Err(NetError::Protocol {
                addr: addr.to_string(),
                detail: format!("{other:?}"),
            })
        }
    };
    if let Some((code, detail)) = msg.error_parts() {
        return Err(NetError::Remote {
            addr: addr.to_string(),
            code,
            detail,
        });
    }
    if msg.kind != MsgType::ShareResponse {
        return Err(NetError::Protocol {
            addr: addr.to_string(),
            detail: format!("unexpected {:?}", msg.kind),
        });
    }
    let mut r = Reader::new(&msg.payload);
    let id = r.u64()?;
    let share = T::Share::decode(&mut r)?;
    r.finish()?;
    if T::share_id(&share) != id {
        return Err(NetError::Protocol {
            addr: addr.to_string(),
            detail: format!("record id {id} disagrees with share"),
        });
    }
    Ok(share)
}

/// Requests shares from every endpoint concurrently and combines the first
/// `t` with distinct identities. Endpoints failing or exceeding `timeout`
/// are skipped.
pub fn combine_decrypt<T: Ttdf>(
    endpoints: &[Endpoint],
    c: &TpkeCiphertext<T>,
    t: usize,
    timeout: Duration,
) -> Result<BitString, NetError>
where
    T::Image: Send + Sync + 'static,
    T::Share: Send + 'static,
{
    if endpoints.len() < t {
        return Err(NetError::InsufficientShares {
            got: 0,
            need: t,
            endpoints: endpoints.len(),
        });
    }
    let (tx, rx) = mpsc::channel();
    let c1 = std::sync::Arc::new(c.c1.clone());
    for ep in endpoints {
        let (tx, c1, ep) = (tx.clone(), c1.clone(), ep.clone());
        thread::spawn(move || {
            let res = request_share::<T>(&ep.addr, &c1, timeout);
            let _ = tx.send((ep, res));
        });
    }
    drop(tx);

    // Connect and read timeouts bound each request; this bounds the whole.
    let deadline = Instant::now() + timeout * 2;
    let mut shares: Vec<DecryptionShare<T>> = Vec::with_capacity(t);
    let mut ids = HashSet::new();
    let mut duplicate = None;
    while shares.len() < t {
        let left = deadline.saturating_duration_since(Instant::now());
        let Ok((ep, res)) = rx.recv_timeout(left) else {
            break;
        };
        match res {
            Ok(share) => {
                let id = T::share_id(&share);
                if id != ep.id {
                    log::warn!("{} answered as id {id}, manifest says {}", ep.addr, ep.id);
                }
                if ids.insert(id) {
                    shares.push(share);
                } else {
                    log::warn!("{} repeats id {id}", ep.addr);
                    duplicate = Some(id);
                }
            }
            Err(e) => log::warn!("{}: {e}", ep.addr),
        }
    }
    if shares.len() < t {
        if let Some(id) = duplicate {
            return Err(Error::DuplicateNode(id).into());
        }
        return Err(NetError::InsufficientShares {
            got: shares.len(),
            need: t,
            endpoints: endpoints.len(),
        });
    }
    Ok(tpke::combine::<T>(&shares, c)?)
}
