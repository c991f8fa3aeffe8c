//! Message framing: `"TTDF" | version | type | length (u32 BE) | payload`.

use std::io::{self, Read, Write};

pub const MAGIC: [u8; 4] = *b"TTDF";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 10;
/// Payloads above this are refused without being read.
pub const MAX_PAYLOAD: u32 = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsgType {
    ShareRequest = 0x01,
    ShareResponse = 0x02,
    Error = 0x03,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(MsgType::ShareRequest),
            0x02 => Some(MsgType::ShareResponse),
            0x03 => Some(MsgType::Error),
            _ => None,
        }
    }
}

/// Error codes carried as the first payload byte of an `Error` message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    BadMagic = 0x01,
    Truncated = 0x02,
    BadVersion = 0x03,
    BadType = 0x04,
    BadPayload = 0x05,
    InversionFailed = 0x06,
}

impl ErrorCode {
    pub fn from_byte(b: u8) -> Option<Self> {
        use ErrorCode::*;
        [BadMagic, Truncated, BadVersion, BadType, BadPayload, InversionFailed]
            .into_iter()
            .find(|c| *c as u8 == b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub kind: MsgType,
    pub payload: Vec<u8>,
}

impl WireMessage {
    pub fn new(kind: MsgType, payload: Vec<u8>) -> Self {
        Self { kind, payload }
    }

    pub fn error(code: ErrorCode, detail: &str) -> Self {
        let mut payload = vec![code as u8];
        payload.extend_from_slice(detail.as_bytes());
        Self::new(MsgType::Error, payload)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        w.write_all(&self.to_bytes())?;
        w.flush()
    }

    /// `(code, detail)` of an `Error` message.
    pub fn error_parts(&self) -> Option<(u8, String)> {
        if self.kind != MsgType::Error {
            return None;
        }
        let (code, rest) = self.payload.split_first()?;
        Some((*code, String::from_utf8_lossy(rest).into_owned()))
    }
}

/// Outcome of reading one frame.
#[derive(Debug)]
pub enum Frame {
    Message(WireMessage),
    /// A malformed frame that was consumed in full; the stream is still
    /// aligned on the next frame.
    Rejected(ErrorCode, String),
    /// A frame that ended early; nothing more can be read.
    Truncated(String),
    /// End of stream on a frame boundary.
    Closed,
}

/// Reads until `buf` is full or the stream ends; returns the bytes read.
fn read_full(r: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(k) => got += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(got)
}

pub fn read_frame(r: &mut impl Read) -> io::Result<Frame> {
    let mut header = [0u8; HEADER_LEN];
    let got = read_full(r, &mut header)?;
    if got == 0 {
        return Ok(Frame::Closed);
    }
    if got < HEADER_LEN {
        return Ok(Frame::Truncated(format!("header of {got} bytes")));
    }
    let len = u32::from_be_bytes(header[6..10].try_into().expect("4 bytes"));
    if len > MAX_PAYLOAD {
        return Ok(Frame::Truncated(format!("payload length {len} over limit")));
    }
    let mut payload = vec![0u8; len as usize];
    let got = read_full(r, &mut payload)?;
    if got < payload.len() {
        return Ok(Frame::Truncated(format!("payload of {got}/{len} bytes")));
    }
    if header[..4] != MAGIC {
        return Ok(Frame::Rejected(ErrorCode::BadMagic, "bad magic".into()));
    }
    if header[4] != VERSION {
        return Ok(Frame::Rejected(
            ErrorCode::BadVersion,
            format!("version {:#04x}", header[4]),
        ));
    }
    match MsgType::from_byte(header[5]) {
        Some(kind) => Ok(Frame::Message(WireMessage { kind, payload })),
        None => Ok(Frame::Rejected(
            ErrorCode::BadType,
            format!("type {:#04x}", header[5]),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let m = WireMessage::new(MsgType::ShareRequest, vec![0xaa, 0xbb]);
        assert_eq!(
            m.to_bytes(),
            [b'T', b'T', b'D', b'F', 0x01, 0x01, 0, 0, 0, 2, 0xaa, 0xbb]
        );
        let e = WireMessage::error(ErrorCode::Truncated, "x");
        assert_eq!(e.to_bytes()[5], 0x03);
        assert_eq!(e.error_parts(), Some((0x02, "x".into())));
    }

    #[test]
    fn frames_parse_and_reject() {
        let good = WireMessage::new(MsgType::ShareResponse, b"abc".to_vec());
        let mut bad_magic = good.to_bytes();
        bad_magic[0] = b'X';
        let mut bad_type = good.to_bytes();
        bad_type[5] = 0x09;
        let mut bad_version = good.to_bytes();
        bad_version[4] = 0x02;
        let mut stream: Vec<u8> = Vec::new();
        for f in [&bad_magic, &bad_type, &bad_version, &good.to_bytes()] {
            stream.extend_from_slice(f);
        }
        let mut r = stream.as_slice();
        let codes: Vec<_> = (0..3)
            .map(|_| match read_frame(&mut r).unwrap() {
                Frame::Rejected(c, _) => c,
                other => panic!("{other:?}"),
            })
            .collect();
        assert_eq!(codes, [ErrorCode::BadMagic, ErrorCode::BadType, ErrorCode::BadVersion]);
        assert!(matches!(read_frame(&mut r).unwrap(), Frame::Message(m) if m == good));
        assert!(matches!(read_frame(&mut r).unwrap(), Frame::Closed));

        let cut = &good.to_bytes()[..12];
        assert!(matches!(read_frame(&mut &cut[..]).unwrap(), Frame::Truncated(_)));
        assert!(matches!(read_frame(&mut &cut[..4]).unwrap(), Frame::Truncated(_)));
        for b in 1..=6 {
            assert_eq!(ErrorCode::from_byte(b).unwrap() as u8, b);
        }
    }
}
