mod common;

use common::*;
use physica_core::rng::SplitMix64;
use physica_core::tensor_file::{read_tensor_file, write_tensor_file, TensorData, TensorEntry, TensorFile, MAGIC};
use proptest::prelude::*;

#[test]
fn empty_file_is_magic_and_zero_count() {
    let bytes = TensorFile::new().to_bytes();
    assert_eq!(bytes, b"PCT1\0\0\0\0");
    assert_eq!(TensorFile::from_bytes(&bytes).unwrap(), TensorFile::new());
}

#[test]
fn single_f32_entry_byte_layout() {
    let mut f = TensorFile::new();
    f.push(TensorEntry::new("x", vec![2, 3], TensorData::F32(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])));
    let b = f.to_bytes();
    // Header: 8 + (4 + 1 + 1 + 1 + 8 + 8) = 31, payload aligned to 32.
    let mut want = Vec::new();
    want.extend_from_slice(MAGIC);
    want.extend_from_slice(&1u32.to_le_bytes());
    want.extend_from_slice(&1u32.to_le_bytes());
    want.push(b'x');
    want.push(0);
    want.push(2);
    want.extend_from_slice(&2u32.to_le_bytes());
    want.extend_from_slice(&3u32.to_le_bytes());
    want.extend_from_slice(&32u64.to_le_bytes());
    want.push(0);
    for v in [1.0f32, 2.0, 3.0, 4.0, 5.0, 6.0] {
        want.extend_from_slice(&v.to_le_bytes());
    }
    assert_eq!(b, want);
    assert_eq!(b.len() - 32, 24);
}

fn one_entry(offset: u64, dims: &[u32]) -> Vec<u8> {
    let mut b = Vec::new();
    b.extend_from_slice(MAGIC);
    b.extend_from_slice(&1u32.to_le_bytes());
    b.extend_from_slice(&1u32.to_le_bytes());
    b.push(b'a');
    b.push(2);
    b.push(dims.len() as u8);
    dims.iter().for_each(|d| b.extend_from_slice(&d.to_le_bytes()));
    b.extend_from_slice(&offset.to_le_bytes());
    b
}

#[test]
fn rejects_corrupt_headers() {
    assert!(TensorFile::from_bytes(b"PCT2\0\0\0\0").is_err());
    assert!(TensorFile::from_bytes(b"PCT").is_err());
    // Payload past the end.
    let mut b = one_entry(23, &[4]);
    b.extend_from_slice(&[1, 2]);
    let err = TensorFile::from_bytes(&b).unwrap_err();
    assert!(err.message.contains("outside"), "{err}");
    // Payload pointing into the header.
    let mut b = one_entry(4, &[2]);
    b.extend_from_slice(&[0; 8]);
    assert!(TensorFile::from_bytes(&b).is_err());
    // Overflowing dims.
    let b = one_entry(0, &[u32::MAX, u32::MAX, u32::MAX]);
    assert!(TensorFile::from_bytes(&b).is_err());
}

#[test]
fn rejects_overlapping_payloads() {
    let mut f = TensorFile::new();
    f.push(TensorEntry::new("a", vec![8], TensorData::U8(vec![1; 8])));
    f.push(TensorEntry::new("b", vec![8], TensorData::U8(vec![2; 8])));
    let mut bytes = f.to_bytes();
    // Point b at a's payload.
    let a_off = u64::from_le_bytes(bytes[8 + 11..8 + 19].try_into().unwrap());
    let b_field = 8 + 19 + 11;
    bytes[b_field..b_field + 8].copy_from_slice(&(a_off + 4).to_le_bytes());
    assert!(TensorFile::from_bytes(&bytes).unwrap_err().message.contains("overlapping"));
}

#[test]
fn rejects_duplicate_names_and_unknown_dtype() {
    let mut f = TensorFile::new();
    f.push(TensorEntry::new("a", vec![1], TensorData::U8(vec![1])));
    f.push(TensorEntry::new("a", vec![1], TensorData::U8(vec![2])));
    assert!(TensorFile::from_bytes(&f.to_bytes()).unwrap_err().message.contains("duplicate"));
    let mut b = one_entry(24, &[1]);
    b[13] = 9;
    b.resize(32, 0);
    assert!(TensorFile::from_bytes(&b).unwrap_err().message.contains("dtype"));
}

#[test]
fn scalars_and_empty_tensors() {
    let mut f = TensorFile::new();
    f.push(TensorEntry::new("s", vec![], TensorData::F64(vec![std::f64::consts::PI])));
    f.push(TensorEntry::new("e", vec![0, 7], TensorData::F32(vec![])));
    let back = TensorFile::from_bytes(&f.to_bytes()).unwrap();
    assert_eq!(back, f);
}

#[test]
fn file_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.pct");
    let f = random_tensor_file(&mut SplitMix64::new(5));
    write_tensor_file(&path, &f).unwrap();
    assert_eq!(read_tensor_file(&path).unwrap(), f);
    assert!(read_tensor_file(&dir.path().join("missing.pct")).is_err());
}

proptest! {
    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let _ = TensorFile::from_bytes(&bytes);
        let mut prefixed = b"PCT1".to_vec();
        prefixed.extend_from_slice(&bytes);
        let _ = TensorFile::from_bytes(&prefixed);
    }

    #[test]
    fn truncations_of_valid_files_are_rejected(seed in any::<u64>()) {
        let f = random_tensor_file(&mut SplitMix64::new(seed));
        let bytes = f.to_bytes();
        for cut in 0..bytes.len() {
            let r = TensorFile::from_bytes(&bytes[..cut]);
            // A truncation can still be valid only if it drops nothing but trailing padding.
            if let Ok(g) = r {
                prop_assert_eq!(g, f.clone());
            }
        }
    }
}
