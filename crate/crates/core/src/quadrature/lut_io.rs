//! Binary table format (little-endian):
//!
//! ```text
//! magic    "PBFLUT1"            7 bytes
//! family   u8                   0 = flux, 1 = contribution
//! tol      f64
//! ref      u16                  reference order
//! lengths  u32 per axis         flux: t̄, v̄   contribution: t̄^f, t̄, v̄
//! axes     f64 per value        same axis order
//! orders   u16 per grid point
//! crc32    u32                  over every preceding byte
//! ```

use super::lut::{LutFamily, QuadratureLut};
use crate::error::{Error, Result};

pub const LUT_MAGIC: &[u8; 7] = b"PBFLUT1";

pub fn save_lut(lut: &QuadratureLut) -> Vec<u8> {
    let mut out =
        Vec::with_capacity(64 + 8 * (lut.tbar.len() + lut.vbar.len() + lut.tbar_f.len()) + 2 * lut.orders.len());
    out.extend_from_slice(LUT_MAGIC);
    out.push(match lut.family {
        LutFamily::Flux => 0,
        LutFamily::Contribution => 1,
    });
    out.extend_from_slice(&lut.tol.to_le_bytes());
    out.extend_from_slice(&lut.ref_order.to_le_bytes());
    let axes: Vec<&[f64]> = match lut.family {
        LutFamily::Flux => vec![&lut.tbar, &lut.vbar],
        LutFamily::Contribution => vec![&lut.tbar_f, &lut.tbar, &lut.vbar],
    };
    for a in &axes {
        out.extend_from_slice(&(a.len() as u32).to_le_bytes());
    }
    for a in &axes {
        for v in a.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for m in &lut.orders {
        out.extend_from_slice(&m.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn axis(&mut self, len: u32) -> Result<Vec<f64>> {
        (0..len).map(|_| self.f64()).collect()
    }
}

pub fn load_lut(bytes: &[u8]) -> Result<QuadratureLut> {
    if bytes.is_empty() {
        return Err(Error::Format("empty input".into()));
    }
    if bytes.len() < LUT_MAGIC.len() + 4 {
        return Err(Error::Format("truncated header".into()));
    }
    if &bytes[..LUT_MAGIC.len()] != LUT_MAGIC {
        if bytes.starts_with(b"PBFLUT") {
            return Err(Error::Format("unsupported table version".into()));
        }
        return Err(Error::Format("bad magic".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(Error::Format("checksum mismatch".into()));
    }

    let mut r = Reader {
        buf: body,
        pos: LUT_MAGIC.len(),
    };
    let family = match r.take(1)?[0] {
        0 => LutFamily::Flux,
        1 => LutFamily::Contribution,
        b => return Err(Error::Format(format!("unknown family byte {b}"))),
    };
    let tol = r.f64()?;
    let ref_order = r.u16()?;
    let (tbar_f, tbar, vbar) = match family {
        LutFamily::Flux => {
            let (nt, nv) = (r.u32()?, r.u32()?);
            (vec![], r.axis(nt)?, r.axis(nv)?)
        }
        LutFamily::Contribution => {
            let (ntf, nt, nv) = (r.u32()?, r.u32()?, r.u32()?);
            (r.axis(ntf)?, r.axis(nt)?, r.axis(nv)?)
        }
    };
    let n = tbar.len() * vbar.len() * tbar_f.len().max(1);
    let orders = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>>>()?;
    if r.pos != body.len() {
        return Err(Error::Format(format!("{} trailing bytes", body.len() - r.pos)));
    }
    if tbar.is_empty() || vbar.is_empty() || (family == LutFamily::Contribution && tbar_f.is_empty()) {
        return Err(Error::Format("empty axis".into()));
    }
    Ok(QuadratureLut {
        family,
        tbar,
        vbar,
        tbar_f,
        orders,
        tol,
        ref_order,
    })
}
