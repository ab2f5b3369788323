use crate::error::{Error, Result};

/// Whether pixel values are 0–255 intensities or 0/1 (1 = ink).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelKind {
    Gray,
    Binary,
}

/// A row-major page raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageImage {
    width: usize,
    height: usize,
    kind: PixelKind,
    pixels: Vec<u8>,
}

impl PageImage {
    pub fn new(width: usize, height: usize, kind: PixelKind, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                width * height,
                pixels.len()
            )));
        }
        if kind == PixelKind::Binary && pixels.iter().any(|&p| p > 1) {
            return Err(Error::InvalidParameter("binary image with values > 1".into()));
        }
        Ok(PageImage {
            width,
            height,
            kind,
            pixels,
        })
    }

    /// A page filled with the background value (white for gray, 0 for binary).
    pub fn blank(width: usize, height: usize, kind: PixelKind) -> Result<Self> {
        let fill = match kind {
            PixelKind::Gray => 255,
            PixelKind::Binary => 0,
        };
        Self::new(width, height, kind, vec![fill; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn kind(&self) -> PixelKind {
        self.kind
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn background(&self) -> u8 {
        match self.kind {
            PixelKind::Gray => 255,
            PixelKind::Binary => 0,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Number of ink pixels (value 1) of a binary image.
    pub fn ink_count(&self) -> usize {
        debug_assert_eq!(self.kind, PixelKind::Binary);
        self.pixels.iter().filter(|&&p| p == 1).count()
    }

    /// Columns `x0..=x1` as a new image.
    pub fn crop_columns(&self, x0: usize, x1: usize) -> PageImage {
        self.crop(x0, 0, x1 - x0 + 1, self.height)
    }

    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> PageImage {
        assert!(x + w <= self.width && y + h <= self.height && w > 0 && h > 0);
        let mut pixels = Vec::with_capacity(w * h);
        for yy in y..y + h {
            pixels.extend_from_slice(&self.row(yy)[x..x + w]);
        }
        PageImage {
            width: w,
            height: h,
            kind: self.kind,
            pixels,
        }
    }

    /// Binary image as 0 (ink) / 255 (paper) grayscale, for writing out.
    pub fn to_gray(&self) -> PageImage {
        match self.kind {
            PixelKind::Gray => self.clone(),
            PixelKind::Binary => PageImage {
                width: self.width,
                height: self.height,
                kind: PixelKind::Gray,
                pixels: self.pixels.iter().map(|&p| if p == 1 { 0 } else { 255 }).collect(),
            },
        }
    }

    /// Bilinear resample of a grayscale image to `w`×`h`.
    pub fn resize(&self, w: usize, h: usize) -> PageImage {
        let sx = self.width as f64 / w as f64;
        let sy = self.height as f64 / h as f64;
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
            let y0 = fy.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let ty = fy - y0 as f64;
            for x in 0..w {
                let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
                let x0 = fx.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let tx = fx - x0 as f64;
                let v = |xx: usize, yy: usize| self.get(xx, yy) as f64;
                let top = v(x0, y0) * (1.0 - tx) + v(x1, y0) * tx;
                let bot = v(x0, y1) * (1.0 - tx) + v(x1, y1) * tx;
                pixels.push((top * (1.0 - ty) + bot * ty).round().clamp(0.0, 255.0) as u8);
            }
        }
        PageImage {
            width: w,
            height: h,
            kind: self.kind,
            pixels,
        }
    }
}
