//! Binary dump of a field sample for external visualization.
//!
//! Layout (little-endian): `u16 d`, `u16 ell`, `u32 n`, then `n` `f64`
//! node values in grid order.

use std::io::{Read, Write};

use super::FieldSample;

pub const HEADER_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub d: u16,
    pub ell: u16,
    pub values: Vec<f64>,
}

pub fn write_dump<W: Write>(sample: &FieldSample, mut out: W) -> std::io::Result<()> {
    let d = u16::try_from(sample.grid.d()).map_err(invalid)?;
    let ell = u16::try_from(sample.ell.ell).map_err(invalid)?;
    let n = u32::try_from(sample.values.len()).map_err(invalid)?;
    out.write_all(&d.to_le_bytes())?;
    out.write_all(&ell.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    for v in &sample.values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_dump<R: Read>(mut input: R) -> std::io::Result<FieldDump> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    let d = u16::from_le_bytes([header[0], header[1]]);
    let ell = u16::from_le_bytes([header[2], header[3]]);
    let n = u32::from_le_bytes([header[4], header[5], header[6], header[7]]) as usize;
    let mut values = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        input.read_exact(&mut buf)?;
        values.push(f64::from_le_bytes(buf));
    }
    Ok(FieldDump { d, ell, values })
}

fn invalid<E: std::error::Error + Send + Sync + 'static>(e: E) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidInput, e)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::{build_grid, simulate_s2};

    #[test]
    fn header_and_payload_layout() {
        let grid = Arc::new(build_grid(2, 4).unwrap());
        let sample = simulate_s2(3, &grid, 1).unwrap();
        let mut bytes = Vec::new();
        write_dump(&sample, &mut bytes).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 8 * 32);
        assert_eq!(&bytes[..8], &[2, 0, 3, 0, 32, 0, 0, 0]);
        assert_eq!(&bytes[8..16], &sample.values[0].to_le_bytes());
        let back = read_dump(bytes.as_slice()).unwrap();
        assert_eq!(back.values, sample.values);
        assert_eq!((back.d, back.ell), (2, 3));
    }

    #[test]
    fn truncated_input_is_an_error() {
        let bytes = [2u8, 0, 3, 0, 5, 0, 0, 0, 1, 2, 3];
        assert!(read_dump(&bytes[..]).is_err());
    }
}
