use super::image::PageImage;

/// Axis-aligned character box in page pixels, tagged with its text line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
    /// Index of the text line (column strip) the box came from.
    pub line: usize,
}

impl CharBox {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        CharBox { x, y, w, h, line: 0 }
    }

    /// min(w, h) / max(w, h).
    pub fn ratio(&self) -> f64 {
        self.w.min(self.h) as f64 / self.w.max(self.h) as f64
    }

    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn union(&self, other: &CharBox) -> CharBox {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        CharBox {
            x,
            y,
            w: self.right().max(other.right()) - x,
            h: self.bottom().max(other.bottom()) - y,
            line: self.line,
        }
    }

    pub fn iou(&self, other: &CharBox) -> f64 {
        let ix = self.right().min(other.right()).saturating_sub(self.x.max(other.x));
        let iy = self.bottom().min(other.bottom()).saturating_sub(self.y.max(other.y));
        let inter = (ix * iy) as f64;
        let union = (self.area() + other.area()) as f64 - inter;
        if union == 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

/// Bounding boxes of the 8-connected ink components of one text-line strip,
/// top to bottom. Rows that are entirely ink (ruling lines) are cleared
/// first; entirely white rows need no treatment.
pub fn candidate_boxes(strip: &PageImage) -> Vec<CharBox> {
    let (w, h) = (strip.width(), strip.height());
    let mut ink: Vec<bool> = strip.pixels().iter().map(|&p| p == 1).collect();
    for y in 0..h {
        let row = &mut ink[y * w..(y + 1) * w];
        if row.iter().all(|&b| b) {
            row.fill(false);
        }
    }
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut boxes = Vec::new();
    for start in 0..w * h {
        if !ink[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut x0, mut y0, mut x1, mut y1) = (w, h, 0, 0);
        while let Some(p) = stack.pop() {
            let (x, y) = (p % w, p / w);
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let q = ny * w + nx;
                    if ink[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        boxes.push(CharBox::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1));
    }
    boxes.sort_by_key(|b| (b.y, b.x));
    boxes
}
