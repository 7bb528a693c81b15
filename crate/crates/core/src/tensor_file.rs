//! `PCT1` tensor container.
//!
//! ```text
//! magic   "PCT1"
//! count   u32
//! entries count × { name_len u32, name utf-8, dtype u8, rank u8,
//!                   dims rank × u32, offset u64 }
//! payload row-major little-endian data at each entry's offset
//! ```
//!
//! All integers are little-endian. dtype codes: 0 = f32, 1 = f64, 2 = u8.
//! The writer places payloads in entry order, each aligned to 8 bytes with
//! zero padding.

use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"PCT1";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("tensor file format error at byte {offset}: {message}")]
pub struct FormatError {
    pub offset: u64,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum TensorIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DType {
    F32 = 0,
    F64 = 1,
    U8 = 2,
}

impl DType {
    pub fn size(&self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
            DType::U8 => 1,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(DType::F32),
            1 => Some(DType::F64),
            2 => Some(DType::U8),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    U8(Vec<u8>),
}

/// Bitwise equality, so NaN payloads compare equal to themselves.
impl PartialEq for TensorData {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TensorData::F32(a), TensorData::F32(b)) => a.iter().map(|v| v.to_bits()).eq(b.iter().map(|v| v.to_bits())),
            (TensorData::F64(a), TensorData::F64(b)) => a.iter().map(|v| v.to_bits()).eq(b.iter().map(|v| v.to_bits())),
            (TensorData::U8(a), TensorData::U8(b)) => a == b,
            _ => false,
        }
    }
}

impl TensorData {
    pub fn dtype(&self) -> DType {
        match self {
            TensorData::F32(_) => DType::F32,
            TensorData::F64(_) => DType::F64,
            TensorData::U8(_) => DType::U8,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
            TensorData::U8(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn write_le(&self, out: &mut Vec<u8>) {
        match self {
            TensorData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::F64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::U8(v) => out.extend_from_slice(v),
        }
    }

    fn read_le(dtype: DType, bytes: &[u8]) -> Self {
        match dtype {
            DType::F32 => TensorData::F32(
                bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect(),
            ),
            DType::F64 => TensorData::F64(
                bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect(),
            ),
            DType::U8 => TensorData::U8(bytes.to_vec()),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            TensorData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::F64(v) => v.clone(),
            TensorData::U8(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorEntry {
    pub name: String,
    pub dims: Vec<u32>,
    pub data: TensorData,
}

impl TensorEntry {
    /// Panics if `data` does not hold exactly `product(dims)` elements.
    pub fn new(name: impl Into<String>, dims: Vec<u32>, data: TensorData) -> Self {
        let n: usize = dims.iter().map(|&d| d as usize).product();
        assert_eq!(n, data.len(), "tensor data length does not match dims");
        Self { name: name.into(), dims, data }
    }

    pub fn byte_len(&self) -> usize {
        self.data.len() * self.data.dtype().size()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorFile {
    pub entries: Vec<TensorEntry>,
}

fn align8(n: usize) -> usize {
    (n + 7) & !7
}

impl TensorFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: TensorEntry) {
        self.entries.push(entry);
    }

    pub fn get(&self, name: &str) -> Option<&TensorEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let table_len: usize = self.entries.iter().map(|e| 4 + e.name.len() + 2 + 4 * e.dims.len() + 8).sum();
        let mut offsets = Vec::with_capacity(self.entries.len());
        let mut cursor = 8 + table_len;
        for e in &self.entries {
            cursor = align8(cursor);
            offsets.push(cursor as u64);
            cursor += e.byte_len();
        }
        let mut out = Vec::with_capacity(cursor);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for (e, off) in self.entries.iter().zip(&offsets) {
            out.extend_from_slice(&(e.name.len() as u32).to_le_bytes());
            out.extend_from_slice(e.name.as_bytes());
            out.push(e.data.dtype() as u8);
            out.push(e.dims.len() as u8);
            for d in &e.dims {
                out.extend_from_slice(&d.to_le_bytes());
            }
            out.extend_from_slice(&off.to_le_bytes());
        }
        for (e, off) in self.entries.iter().zip(&offsets) {
            out.resize(*off as usize, 0);
            e.data.write_le(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(FormatError { offset: 0, message: "bad magic".into() });
        }
        let count = r.u32()?;
        struct Header {
            name: String,
            dtype: DType,
            dims: Vec<u32>,
            offset: u64,
            size: u64,
            at: u64,
        }
        let mut headers = Vec::new();
        let mut names = HashSet::new();
        for _ in 0..count {
            let at = r.pos as u64;
            let name_len = r.u32()? as usize;
            let name_at = r.pos as u64;
            let name = std::str::from_utf8(r.take(name_len)?)
                .map_err(|_| FormatError { offset: name_at, message: "entry name is not UTF-8".into() })?
                .to_string();
            if !names.insert(name.clone()) {
                return Err(FormatError { offset: at, message: format!("duplicate entry name {name:?}") });
            }
            let code_at = r.pos as u64;
            let dtype = DType::from_code(r.u8()?)
                .ok_or_else(|| FormatError { offset: code_at, message: "unknown dtype code".into() })?;
            let rank = r.u8()? as usize;
            let dims = (0..rank).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
            let offset = r.u64()?;
            let size = dims
                .iter()
                .try_fold(dtype.size() as u64, |acc, &d| acc.checked_mul(d as u64))
                .ok_or_else(|| FormatError { offset: at, message: "declared size overflows".into() })?;
            headers.push(Header { name, dtype, dims, offset, size, at });
        }
        let table_end = r.pos as u64;
        let mut spans: Vec<(u64, u64, u64)> = Vec::with_capacity(headers.len());
        for h in &headers {
            let end = h.offset.checked_add(h.size);
            match end {
                Some(end) if h.offset >= table_end && end <= bytes.len() as u64 => spans.push((h.offset, end, h.at)),
                _ => {
                    return Err(FormatError {
                        offset: h.at,
                        message: format!("payload of {:?} lies outside the data section", h.name),
                    })
                }
            }
        }
        spans.sort();
        for w in spans.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(FormatError { offset: w[1].0, message: "overlapping payloads".into() });
            }
        }
        let entries = headers
            .into_iter()
            .map(|h| {
                let raw = &bytes[h.offset as usize..(h.offset + h.size) as usize];
                TensorEntry { name: h.name, dims: h.dims, data: TensorData::read_le(h.dtype, raw) }
            })
            .collect();
        Ok(Self { entries })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| FormatError {
            offset: self.pos as u64,
            message: format!("unexpected end of file reading {n} bytes"),
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn write_tensor_file(path: &Path, file: &TensorFile) -> std::io::Result<()> {
    std::fs::write(path, file.to_bytes())
}

pub fn read_tensor_file(path: &Path) -> Result<TensorFile, TensorIoError> {
    Ok(TensorFile::from_bytes(&std::fs::read(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_eight_bytes() {
        let bytes = TensorFile::new().to_bytes();
        assert_eq!(bytes, b"PCT1\0\0\0\0");
        assert_eq!(TensorFile::from_bytes(&bytes).unwrap(), TensorFile::new());
    }

    #[test]
    fn single_f32_entry_layout() {
        let mut f = TensorFile::new();
        f.push(TensorEntry::new("a", vec![2, 3], TensorData::F32(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])));
        let bytes = f.to_bytes();
        // header 8 + name_len 4 + "a" 1 + dtype 1 + rank 1 + dims 8 + offset 8 = 31, aligned to 32
        let off = u64::from_le_bytes(bytes[23..31].try_into().unwrap());
        assert_eq!(off, 32);
        assert_eq!(bytes.len() as u64 - off, 24);
        assert_eq!(&bytes[32..36], &1.0f32.to_le_bytes());
        assert_eq!(TensorFile::from_bytes(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_bad_magic() {
        let err = TensorFile::from_bytes(b"PCT2\0\0\0\0").unwrap_err();
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn rejects_truncation_and_overlap() {
        let mut f = TensorFile::new();
        f.push(TensorEntry::new("a", vec![4], TensorData::U8(vec![1, 2, 3, 4])));
        f.push(TensorEntry::new("b", vec![4], TensorData::U8(vec![5, 6, 7, 8])));
        let bytes = f.to_bytes();
        assert!(TensorFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        // Point b's offset at a's payload.
        let mut bad = bytes.clone();
        let a_off_at = 8 + 4 + 1 + 2 + 4;
        let b_off_at = a_off_at + 8 + 4 + 1 + 2 + 4;
        let a_off: [u8; 8] = bad[a_off_at..a_off_at + 8].try_into().unwrap();
        bad[b_off_at..b_off_at + 8].copy_from_slice(&a_off);
        let err = TensorFile::from_bytes(&bad).unwrap_err();
        assert!(err.message.contains("overlapping"), "{err}");
    }

    #[test]
    fn rejects_unknown_dtype() {
        let mut f = TensorFile::new();
        f.push(TensorEntry::new("a", vec![1], TensorData::U8(vec![1])));
        let mut bytes = f.to_bytes();
        bytes[13] = 9;
        assert_eq!(TensorFile::from_bytes(&bytes).unwrap_err().offset, 13);
    }
}
