//! Binary PGM (`P5`) reading and writing, 8-bit only.

use std::io::{Read, Write};

use super::image::{PageImage, PixelKind};
use crate::error::{Error, Result};

pub fn read_pgm(mut reader: impl Read) -> Result<PageImage> {
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    parse_pgm(&data)
}

pub fn parse_pgm(data: &[u8]) -> Result<PageImage> {
    let bad = |msg: &str| Error::format("PGM", 1, msg.to_string());
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        // Skip whitespace and comments.
        while pos < data.len() {
            if data[pos].is_ascii_whitespace() {
                pos += 1;
            } else if data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        tokens.push(std::str::from_utf8(&data[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if tokens[0] != "P5" {
        return Err(bad("not a binary PGM (P5) file"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (w, h, maxval) = (num(tokens[1])?, num(tokens[2])?, num(tokens[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit PGM is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = w * h;
    if data.len() < pos + need {
        return Err(bad("truncated raster"));
    }
    let mut pixels = data[pos..pos + need].to_vec();
    if maxval != 255 {
        for p in &mut pixels {
            *p = ((*p as usize * 255 + maxval / 2) / maxval).min(255) as u8;
        }
    }
    PageImage::new(w, h, PixelKind::Gray, pixels)
}

pub fn write_pgm(img: &PageImage, mut writer: impl Write) -> Result<()> {
    let gray = img.to_gray();
    write!(writer, "P5\n{} {}\n255\n", gray.width(), gray.height())?;
    writer.write_all(gray.pixels())?;
    Ok(())
}

pub fn encode_pgm(img: &PageImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.width() * img.height() + 20);
    write_pgm(img, &mut out).expect("writing to a Vec cannot fail");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let img = PageImage::new(3, 2, PixelKind::Gray, vec![0, 10, 20, 30, 40, 255]).unwrap();
        let bytes = encode_pgm(&img);
        assert_eq!(parse_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn header_comments_and_maxval() {
        let mut data = b"P5\n# made by hand\n2 1\n15\n".to_vec();
        data.extend_from_slice(&[0, 15]);
        let img = parse_pgm(&data).unwrap();
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00").is_err());
        assert!(parse_pgm(b"P5\n2").is_err());
        assert!(matches!(parse_pgm(b"P5\n0 0\n255\n"), Err(Error::EmptyImage)));
    }
}
