//! Messages on the command line: a big-endian hex integer below
//! `2^width`, read into `width` bits most significant first.

use ttdf_core::bits::BitString;

use crate::CliError;

pub fn parse(hex_str: &str, width: usize) -> Result<BitString, CliError> {
    let digits = hex_str.trim().trim_start_matches("0x");
    let padded = if digits.len() % 2 == 1 {
        format!("0{digits}")
    } else {
        digits.to_string()
    };
    let bytes = hex::decode(&padded).map_err(|e| CliError::Usage(format!("message hex: {e}")))?;
    let nbytes = width.div_ceil(8);
    let significant: Vec<u8> = bytes.iter().copied().skip_while(|b| *b == 0).collect();
    if significant.len() > nbytes {
        return Err(CliError::Usage(format!(
            "message does not fit in {width} bits"
        )));
    }
    let mut full = vec![0u8; nbytes - significant.len()];
    full.extend(significant);
    let bits = BitString::from_packed(&full, nbytes * 8);
    let extra = nbytes * 8 - width;
    if bits.iter().take(extra).any(|b| b) {
        return Err(CliError::Usage(format!(
            "message does not fit in {width} bits"
        )));
    }
    Ok(bits.iter().skip(extra).collect())
}

pub fn format(bits: &BitString) -> String {
    let extra = bits.len().div_ceil(8) * 8 - bits.len();
    let full: BitString = std::iter::repeat_n(false, extra).chain(bits.iter()).collect();
    hex::encode(full.to_packed())
}
