//! 8-bit RGB, non-interlaced PNG encoding with tEXt metadata.

use std::io::Cursor;
use std::path::Path;

use thiserror::Error;

use crate::raster::RgbImage;

#[derive(Debug, Error)]
pub enum PngError {
    #[error("png encode failed: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("png decode failed: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("expected 8-bit RGB, found {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Encodes `image` with the given `(keyword, text)` chunks ahead of the pixel data.
pub fn encode_png(image: &RgbImage, text: &[(&str, String)]) -> Result<Vec<u8>, PngError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width, image.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        for (k, v) in text {
            enc.add_text_chunk(k.to_string(), v.clone())?;
        }
        let mut w = enc.write_header()?;
        w.write_image_data(&image.data)?;
        w.finish()?;
    }
    Ok(out)
}

pub fn write_png(path: &Path, image: &RgbImage, text: &[(&str, String)]) -> Result<(), PngError> {
    std::fs::write(path, encode_png(image, text)?)?;
    Ok(())
}

/// Decodes an 8-bit RGB PNG, returning the image and its tEXt chunks.
pub fn decode_png(bytes: &[u8]) -> Result<(RgbImage, Vec<(String, String)>), PngError> {
    let mut reader = png::Decoder::new(Cursor::new(bytes)).read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let frame = reader.next_frame(&mut buf)?;
    if frame.color_type != png::ColorType::Rgb || frame.bit_depth != png::BitDepth::Eight {
        return Err(PngError::Unsupported(format!("{:?} {:?}", frame.color_type, frame.bit_depth)));
    }
    buf.truncate(frame.buffer_size());
    let text = reader
        .info()
        .uncompressed_latin1_text
        .iter()
        .map(|c| (c.keyword.clone(), c.text.clone()))
        .collect();
    Ok((RgbImage { width: frame.width, height: frame.height, data: buf }, text))
}

pub fn read_png(path: &Path) -> Result<(RgbImage, Vec<(String, String)>), PngError> {
    decode_png(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_text() {
        let mut img = RgbImage::new(5, 3);
        img.put(4, 2, [1, 2, 3]);
        let bytes = encode_png(&img, &[("o_max", "3".into())]).unwrap();
        assert_eq!(&bytes[1..4], b"PNG");
        let (back, text) = decode_png(&bytes).unwrap();
        assert_eq!(back, img);
        assert_eq!(text, vec![("o_max".to_string(), "3".to_string())]);
        assert_eq!(encode_png(&img, &[("o_max", "3".into())]).unwrap(), bytes);
    }
}
