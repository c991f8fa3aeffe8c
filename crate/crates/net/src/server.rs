use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use ttdf_core::codec::{Decode, Encode, Writer};
use ttdf_core::scheme::SchemeKind;
use ttdf_core::ttdf::Ttdf;
use ttdf_core::with_scheme;

use crate::wire::{read_frame, ErrorCode, Frame, MsgType, WireMessage};
use crate::NetError;

/// Idle connections are dropped after this long.
const IDLE_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub listen: String,
    /// Shared secret key in its core serialization.
    pub key: Vec<u8>,
    pub scheme: SchemeKind,
}

/// Turns a request payload into a response payload.
trait ShareService: Send + Sync {
    fn id(&self) -> u64;
    fn respond(&self, c1: &[u8]) -> Result<Vec<u8>, (ErrorCode, String)>;
}

struct Keyed<T: Ttdf> {
    sk: T::SharedTrapdoor,
}

impl<T: Ttdf> ShareService for Keyed<T>
where
    T::SharedTrapdoor: Send + Sync,
{
    fn id(&self) -> u64 {
        T::trapdoor_id(&self.sk)
    }

    fn respond(&self, c1: &[u8]) -> Result<Vec<u8>, (ErrorCode, String)> {
        let image = T::Image::from_bytes(c1).map_err(|e| (ErrorCode::BadPayload, e.to_string()))?;
        let share = T::invert_share(&self.sk, &image, &mut rand::rng())
            .map_err(|e| (ErrorCode::InversionFailed, e.to_string()))?;
        let mut w = Writer::default();
        w.u64(T::share_id(&share));
        share.encode(&mut w);
        Ok(w.into_bytes())
    }
}

fn service(config: &ServerConfig) -> Result<Arc<dyn ShareService>, NetError> {
    with_scheme!(config.scheme, T => {
        let sk = <T as Ttdf>::SharedTrapdoor::from_bytes(&config.key)?;
        Ok(Arc::new(Keyed::<T> { sk }) as Arc<dyn ShareService>)
    })
}

/// A bound share server.
pub struct Server {
    listener: TcpListener,
    service: Arc<dyn ShareService>,
    stop: Arc<AtomicBool>,
}

impl Server {
    pub fn bind(config: &ServerConfig) -> Result<Self, NetError> {
        let service = service(config)?;
        let addr = config
            .listen
            .to_socket_addrs()
            .map_err(|e| NetError::Bind(config.listen.clone(), e))?
            .next()
            .ok_or_else(|| NetError::Bind(config.listen.clone(), std::io::ErrorKind::NotFound.into()))?;
        let listener = TcpListener::bind(addr).map_err(|e| NetError::Bind(config.listen.clone(), e))?;
        Ok(Self {
            listener,
            service,
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound socket")
    }

    pub fn id(&self) -> u64 {
        self.service.id()
    }

    /// Accepts connections until stopped, one thread per connection.
    pub fn run(self) {
        log::info!("server {} listening on {}", self.id(), self.local_addr());
        for conn in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            match conn {
                Ok(stream) => {
                    let svc = Arc::clone(&self.service);
                    thread::spawn(move || {
                        if let Err(e) = handle(stream, svc.as_ref()) {
                            log::debug!("connection ended: {e}");
                        }
                    });
                }
                Err(e) => log::warn!("accept failed: {e}"),
            }
        }
    }

    /// Runs on a background thread.
    pub fn spawn(self) -> ServerHandle {
        let addr = self.local_addr();
        let stop = Arc::clone(&self.stop);
        let thread = thread::spawn(move || self.run());
        ServerHandle {
            addr,
            stop,
            thread: Some(thread),
        }
    }
}

/// Runs a server in the foreground until the process exits.
pub fn serve(config: &ServerConfig) -> Result<(), NetError> {
    Server::bind(config)?.run();
    Ok(())
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting and waits for the accept loop to exit. Connections
    /// already open finish on their own.
    pub fn shutdown(mut self) {
        self.stop_inner();
    }

    fn stop_inner(&mut self) {
        if let Some(t) = self.thread.take() {
            self.stop.store(true, Ordering::SeqCst);
            // Wake the blocking accept.
            let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_inner();
    }
}

fn handle(stream: TcpStream, svc: &dyn ShareService) -> std::io::Result<()> {
    stream.set_read_timeout(Some(IDLE_TIMEOUT))?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    loop {
        let reply = match read_frame(&mut reader)? {
            Frame::Closed => return Ok(()),
            Frame::Truncated(why) => {
                WireMessage::error(ErrorCode::Truncated, &why).write_to(&mut writer)?;
                return Ok(());
            }
            Frame::Rejected(code, why) => WireMessage::error(code, &why),
            Frame::Message(m) if m.kind == MsgType::ShareRequest => match svc.respond(&m.payload) {
                Ok(p) => WireMessage::new(MsgType::ShareResponse, p),
                Err((code, why)) => WireMessage::error(code, &why),
            },
            Frame::Message(m) => {
                WireMessage::error(ErrorCode::BadType, &format!("unexpected {:?}", m.kind))
            }
        };
        reply.write_to(&mut writer)?;
    }
}
