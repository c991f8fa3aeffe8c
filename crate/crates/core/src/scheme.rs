//! Runtime scheme selection: tags, standard parameter sets per level, and
//! the [`with_scheme!`](crate::with_scheme) dispatch macro.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::ddh::DdhTtdf;
use crate::error::{Error, Result};
use crate::group::{group_gen, Level};
use crate::hardcore::DEFAULT_EPSILON_LOG2;
use crate::lwe::{LweParams, LweTtdf};
use crate::ttdf::Ttdf;
use crate::ttdr::DdhTtdr;

/// Default message width for the DDH function.
pub const DEFAULT_MESSAGE_BITS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Ddh,
    Lwe,
    Ttdr,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Ddh, SchemeKind::Lwe, SchemeKind::Ttdr];

    pub fn tag(self) -> u8 {
        match self {
            SchemeKind::Ddh => DdhTtdf::TAG,
            SchemeKind::Lwe => LweTtdf::TAG,
            SchemeKind::Ttdr => DdhTtdr::TAG,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == tag)
            .ok_or_else(|| Error::Decode(format!("unknown scheme tag {tag:#04x}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Ddh => DdhTtdf::NAME,
            SchemeKind::Lwe => LweTtdf::NAME,
            SchemeKind::Ttdr => DdhTtdr::NAME,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Decode(format!("unknown scheme {s:?}")))
    }
}

/// The DDH function sized to extract `message_bits` at distance `2^-80`.
pub fn ddh(level: Level, message_bits: usize, n: u64, t: usize) -> Result<DdhTtdf> {
    DdhTtdf::for_message(group_gen(level), message_bits, DEFAULT_EPSILON_LOG2, n, t)
}

/// The relation over the group of `level`. The toy group has too little
/// lossiness for encryption; use [`Level::L128`] or above there.
pub fn ttdr(level: Level, n: u64, t: usize) -> Result<DdhTtdr> {
    DdhTtdr::new(group_gen(level), n, t)
}

/// `(d, h, p)` for the lattice parameter sets: a small one for tests and
/// one per security level.
pub fn lwe_shape(level: Level) -> (usize, usize, u64) {
    match level {
        Level::Toy => (64, 192, 17),
        Level::L128 => (512, 2200, 2063),
        Level::L256 => (768, 3252, 6029),
        Level::L512 => (1024, 4420, 9859),
    }
}

pub fn lwe_params(level: Level, n: u64, t: usize) -> Result<Arc<LweParams>> {
    let (d, h, p) = lwe_shape(level);
    LweParams::from_shape(d, h, p, n, t)
}

pub fn lwe(level: Level, n: u64, t: usize) -> Result<LweTtdf> {
    Ok(LweTtdf::new(lwe_params(level, n, t)?))
}

/// Runs `$body` with `$T` bound to the [`Ttdf`] type of `$kind`.
///
/// ```
/// use ttdf_core::{scheme::SchemeKind, ttdf::Ttdf, with_scheme};
/// let name = with_scheme!(SchemeKind::Lwe, T => T::NAME);
/// assert_eq!(name, "lwe");
/// ```
#[macro_export]
macro_rules! with_scheme {
    ($kind:expr, $T:ident => $body:expr) => {
        match $kind {
            $crate::scheme::SchemeKind::Ddh => {
                type $T = $crate::ddh::DdhTtdf;
                $body
            }
            $crate::scheme::SchemeKind::Lwe => {
                type $T = $crate::lwe::LweTtdf;
                $body
            }
            $crate::scheme::SchemeKind::Ttdr => {
                type $T = $crate::ttdr::DdhTtdr;
                $body
            }
        }
    };
}
