//! Tag-length-value encoding shared by protocol messages, proofs and the
//! keystore: 2-byte big-endian tag, 4-byte big-endian length, raw bytes.
//! Fields are written and read in a fixed order; unknown or out-of-order
//! tags are rejected rather than skipped.

use num_bigint::BigUint;

use crate::errors::Error;

/// Hard cap on a single field, matching the transport frame guard.
pub const MAX_FIELD_LEN: usize = 16 * 1024 * 1024;

pub fn put(buf: &mut Vec<u8>, tag: u16, value: &[u8]) {
    debug_assert!(value.len() <= MAX_FIELD_LEN);
    buf.extend_from_slice(&tag.to_be_bytes());
    buf.extend_from_slice(&(value.len() as u32).to_be_bytes());
    buf.extend_from_slice(value);
}

pub fn put_u8(buf: &mut Vec<u8>, tag: u16, v: u8) {
    put(buf, tag, &[v]);
}

pub fn put_u16(buf: &mut Vec<u8>, tag: u16, v: u16) {
    put(buf, tag, &v.to_be_bytes());
}

pub fn put_u32(buf: &mut Vec<u8>, tag: u16, v: u32) {
    put(buf, tag, &v.to_be_bytes());
}

pub fn put_u64(buf: &mut Vec<u8>, tag: u16, v: u64) {
    put(buf, tag, &v.to_be_bytes());
}

/// Big-endian minimal-length integer; zero encodes as an empty field.
pub fn put_uint(buf: &mut Vec<u8>, tag: u16, v: &BigUint) {
    put(buf, tag, &v.to_bytes_be());
}

pub struct TlvReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> TlvReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        TlvReader { data, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.data.len()
    }

    fn next(&mut self) -> Result<(u16, &'a [u8]), Error> {
        if self.data.len() - self.pos < 6 {
            return Err(Error::Malformed("truncated field header"));
        }
        let tag = u16::from_be_bytes([self.data[self.pos], self.data[self.pos + 1]]);
        let len = u32::from_be_bytes([
            self.data[self.pos + 2],
            self.data[self.pos + 3],
            self.data[self.pos + 4],
            self.data[self.pos + 5],
        ]) as usize;
        if len > MAX_FIELD_LEN {
            return Err(Error::Malformed("field too large"));
        }
        let start = self.pos + 6;
        let end = start.checked_add(len).ok_or(Error::Malformed("length overflow"))?;
        if end > self.data.len() {
            return Err(Error::Malformed("field exceeds buffer"));
        }
        self.pos = end;
        Ok((tag, &self.data[start..end]))
    }

    /// Reads the next field, which must carry `tag`.
    pub fn expect(&mut self, tag: u16) -> Result<&'a [u8], Error> {
        let (t, v) = self.next()?;
        if t != tag {
            return Err(Error::Malformed("unexpected field tag"));
        }
        Ok(v)
    }

    pub fn expect_u8(&mut self, tag: u16) -> Result<u8, Error> {
        let v = self.expect(tag)?;
        if v.len() != 1 {
            return Err(Error::Malformed("bad u8 length"));
        }
        Ok(v[0])
    }

    pub fn expect_u16(&mut self, tag: u16) -> Result<u16, Error> {
        let v = self.expect(tag)?;
        let a: [u8; 2] = v.try_into().map_err(|_| Error::Malformed("bad u16 length"))?;
        Ok(u16::from_be_bytes(a))
    }

    pub fn expect_u32(&mut self, tag: u16) -> Result<u32, Error> {
        let v = self.expect(tag)?;
        let a: [u8; 4] = v.try_into().map_err(|_| Error::Malformed("bad u32 length"))?;
        Ok(u32::from_be_bytes(a))
    }

    pub fn expect_u64(&mut self, tag: u16) -> Result<u64, Error> {
        let v = self.expect(tag)?;
        let a: [u8; 8] = v.try_into().map_err(|_| Error::Malformed("bad u64 length"))?;
        Ok(u64::from_be_bytes(a))
    }

    pub fn expect_array<const N: usize>(&mut self, tag: u16) -> Result<[u8; N], Error> {
        let v = self.expect(tag)?;
        v.try_into().map_err(|_| Error::Malformed("bad array length"))
    }

    pub fn expect_uint(&mut self, tag: u16) -> Result<BigUint, Error> {
        let v = self.expect(tag)?;
        Ok(BigUint::from_bytes_be(v))
    }

    /// Asserts that the whole buffer was consumed.
    pub fn finish(self) -> Result<(), Error> {
        if self.pos == self.data.len() {
            Ok(())
        } else {
            Err(Error::Malformed("trailing bytes"))
        }
    }
}
