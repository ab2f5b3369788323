//! Compositional synthetic characters.
//!
//! A glyph class is a layout (one of 15 structures) filled with components
//! drawn from a small radical inventory. Every attribute is a deterministic
//! function of that composition, so attributes learned on some classes carry
//! over to classes never seen in training, the same way input-method codes
//! follow the radicals of real characters.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codec::CharacterEntry;
use crate::error::Label;
use crate::segmentation::image::{PageImage, PixelKind};

/// First label of the synthetic universe (supplementary private use plane).
pub const LABEL_BASE: u32 = 0xF0000;

type Seg = [f64; 4];

/// A radical: strokes in the unit square plus its code fragments.
pub struct Radical {
    pub name: &'static str,
    pub strokes: &'static [Seg],
    pub stroke_count: u32,
    pub cangjie: &'static str,
    pub zhengma: &'static str,
    pub wubi: &'static str,
    /// Four-corner digits: top-left, top-right, bottom-left, bottom-right, extra.
    pub corners: [u8; 5],
    /// All strokes form one 8-connected blob and span both axes.
    pub connected: bool,
}

macro_rules! radical {
    ($name:expr, [$($s:expr),* $(,)?], $n:expr, $cj:expr, $zm:expr, $wb:expr, $fc:expr, $conn:expr) => {
        Radical {
            name: $name,
            strokes: &[$($s),*],
            stroke_count: $n,
            cangjie: $cj,
            zhengma: $zm,
            wubi: $wb,
            corners: $fc,
            connected: $conn,
        }
    };
}

pub static RADICALS: [Radical; 24] = [
    radical!(
        "heng",
        [[0.1, 0.5, 0.9, 0.5]],
        1,
        "M",
        "AA",
        "G",
        [1, 0, 0, 0, 0],
        false
    ),
    radical!("shu", [[0.5, 0.1, 0.5, 0.9]], 1, "L", "KD", "H", [2, 0, 0, 0, 0], false),
    radical!(
        "shi",
        [[0.1, 0.4, 0.9, 0.4], [0.5, 0.1, 0.5, 0.9]],
        2,
        "J",
        "BA",
        "F",
        [4, 0, 0, 0, 0],
        true
    ),
    radical!(
        "kou",
        [
            [0.15, 0.15, 0.85, 0.15],
            [0.15, 0.15, 0.15, 0.85],
            [0.85, 0.15, 0.85, 0.85],
            [0.15, 0.85, 0.85, 0.85]
        ],
        3,
        "R",
        "JV",
        "K",
        [6, 0, 0, 0, 0],
        true
    ),
    radical!(
        "ri",
        [
            [0.2, 0.1, 0.8, 0.1],
            [0.2, 0.1, 0.2, 0.9],
            [0.8, 0.1, 0.8, 0.9],
            [0.2, 0.5, 0.8, 0.5],
            [0.2, 0.9, 0.8, 0.9]
        ],
        4,
        "A",
        "KA",
        "J",
        [6, 0, 1, 0, 1],
        true
    ),
    radical!(
        "ren",
        [[0.5, 0.1, 0.15, 0.9], [0.4125, 0.3, 0.85, 0.9]],
        2,
        "O",
        "OD",
        "W",
        [8, 0, 0, 0, 0],
        true
    ),
    radical!(
        "tu",
        [[0.2, 0.4, 0.8, 0.4], [0.5, 0.1, 0.5, 0.85], [0.1, 0.85, 0.9, 0.85]],
        3,
        "G",
        "BF",
        "F",
        [4, 0, 1, 0, 2],
        true
    ),
    radical!(
        "gong",
        [[0.2, 0.15, 0.8, 0.15], [0.5, 0.15, 0.5, 0.85], [0.1, 0.85, 0.9, 0.85]],
        3,
        "MN",
        "BD",
        "A",
        [1, 0, 1, 0, 0],
        true
    ),
    radical!(
        "chuan",
        [[0.25, 0.15, 0.15, 0.85], [0.5, 0.2, 0.5, 0.8], [0.8, 0.1, 0.8, 0.9]],
        3,
        "LN",
        "KK",
        "K",
        [2, 2, 0, 0, 0],
        false
    ),
    radical!(
        "san",
        [[0.2, 0.15, 0.8, 0.15], [0.25, 0.5, 0.75, 0.5], [0.1, 0.85, 0.9, 0.85]],
        3,
        "MM",
        "AE",
        "D",
        [1, 0, 1, 1, 1],
        false
    ),
    radical!(
        "yi",
        [[0.15, 0.15, 0.85, 0.85], [0.85, 0.15, 0.15, 0.85]],
        2,
        "K",
        "RR",
        "Q",
        [4, 4, 0, 0, 0],
        true
    ),
    radical!(
        "tian",
        [
            [0.15, 0.15, 0.85, 0.15],
            [0.15, 0.15, 0.15, 0.85],
            [0.85, 0.15, 0.85, 0.85],
            [0.15, 0.85, 0.85, 0.85],
            [0.15, 0.5, 0.85, 0.5],
            [0.5, 0.15, 0.5, 0.85]
        ],
        5,
        "W",
        "JA",
        "L",
        [6, 0, 4, 0, 0],
        true
    ),
    radical!(
        "ba",
        [[0.4, 0.2, 0.15, 0.85], [0.6, 0.2, 0.85, 0.85]],
        2,
        "C",
        "OU",
        "W",
        [8, 0, 0, 0, 0],
        false
    ),
    radical!(
        "shan",
        [
            [0.2, 0.4, 0.2, 0.85],
            [0.5, 0.1, 0.5, 0.85],
            [0.8, 0.4, 0.8, 0.85],
            [0.2, 0.85, 0.8, 0.85]
        ],
        3,
        "U",
        "LL",
        "M",
        [2, 2, 7, 7, 0],
        true
    ),
    radical!(
        "ding",
        [[0.1, 0.15, 0.9, 0.15], [0.5, 0.15, 0.5, 0.9], [0.5, 0.9, 0.35, 0.8]],
        2,
        "MN",
        "AI",
        "S",
        [1, 0, 2, 0, 0],
        true
    ),
    radical!(
        "er",
        [[0.25, 0.3, 0.75, 0.3], [0.1, 0.75, 0.9, 0.75]],
        2,
        "MM",
        "AB",
        "F",
        [1, 0, 1, 0, 0],
        false
    ),
    radical!(
        "jiong",
        [
            [0.15, 0.9, 0.15, 0.15],
            [0.15, 0.15, 0.85, 0.15],
            [0.85, 0.15, 0.85, 0.9]
        ],
        2,
        "BT",
        "LK",
        "M",
        [7, 7, 2, 2, 0],
        true
    ),
    radical!(
        "fang",
        [
            [0.15, 0.15, 0.85, 0.15],
            [0.15, 0.15, 0.15, 0.85],
            [0.15, 0.85, 0.85, 0.85]
        ],
        2,
        "S",
        "HZ",
        "A",
        [7, 1, 1, 1, 0],
        true
    ),
    radical!(
        "xiao",
        [[0.5, 0.1, 0.5, 0.9], [0.3, 0.4, 0.15, 0.7], [0.7, 0.4, 0.85, 0.7]],
        3,
        "F",
        "KO",
        "I",
        [9, 0, 0, 0, 0],
        false
    ),
    radical!(
        "wang",
        [
            [0.15, 0.15, 0.85, 0.15],
            [0.2, 0.5, 0.8, 0.5],
            [0.1, 0.85, 0.9, 0.85],
            [0.5, 0.15, 0.5, 0.85]
        ],
        4,
        "MG",
        "CA",
        "G",
        [1, 0, 1, 4, 0],
        true
    ),
    radical!(
        "mu",
        [
            [0.1, 0.35, 0.9, 0.35],
            [0.5, 0.1, 0.5, 0.9],
            [0.5, 0.35, 0.15, 0.75],
            [0.5, 0.35, 0.85, 0.75]
        ],
        4,
        "D",
        "FD",
        "S",
        [4, 0, 9, 0, 0],
        true
    ),
    radical!(
        "chang",
        [[0.15, 0.15, 0.9, 0.15], [0.2, 0.15, 0.1, 0.9]],
        2,
        "MH",
        "GG",
        "D",
        [7, 1, 2, 0, 0],
        true
    ),
    radical!(
        "bu",
        [[0.4, 0.1, 0.4, 0.9], [0.4, 0.45, 0.8, 0.6]],
        2,
        "Y",
        "KS",
        "H",
        [2, 3, 0, 0, 0],
        true
    ),
    radical!(
        "ji",
        [
            [0.15, 0.15, 0.85, 0.15],
            [0.85, 0.15, 0.85, 0.85],
            [0.2, 0.5, 0.85, 0.5],
            [0.15, 0.85, 0.85, 0.85]
        ],
        3,
        "SM",
        "XA",
        "V",
        [1, 7, 1, 7, 0],
        true
    ),
];

/// Index of the radical with the given name.
fn rad(name: &str) -> usize {
    RADICALS.iter().position(|r| r.name == name).expect("known radical")
}

/// Slot rectangles `(x, y, w, h)` in the unit square for each structure.
pub static LAYOUTS: [&[[f64; 4]]; 15] = [
    &[[0.0, 0.0, 1.0, 1.0]],
    &[[0.0, 0.0, 0.48, 1.0], [0.52, 0.0, 0.48, 1.0]],
    &[[0.0, 0.0, 0.33, 1.0], [0.37, 0.0, 0.63, 1.0]],
    &[[0.0, 0.0, 1.0, 0.48], [0.0, 0.52, 1.0, 0.48]],
    &[[0.0, 0.0, 1.0, 0.33], [0.0, 0.37, 1.0, 0.63]],
    &[[0.0, 0.0, 0.3, 1.0], [0.35, 0.0, 0.3, 1.0], [0.7, 0.0, 0.3, 1.0]],
    &[[0.0, 0.0, 1.0, 0.3], [0.0, 0.35, 1.0, 0.3], [0.0, 0.7, 1.0, 0.3]],
    &[[0.0, 0.0, 1.0, 0.45], [0.0, 0.5, 0.48, 0.5], [0.52, 0.5, 0.48, 0.5]],
    &[[0.0, 0.0, 0.45, 1.0], [0.5, 0.0, 0.5, 0.48], [0.5, 0.52, 0.5, 0.48]],
    &[[0.0, 0.0, 0.48, 0.45], [0.52, 0.0, 0.48, 0.45], [0.0, 0.5, 1.0, 0.5]],
    &[[0.0, 0.0, 1.0, 1.0], [0.27, 0.27, 0.46, 0.46]],
    &[[0.0, 0.0, 1.0, 1.0], [0.35, 0.3, 0.6, 0.65]],
    &[[0.0, 0.0, 1.0, 1.0], [0.3, 0.27, 0.6, 0.46]],
    &[[0.0, 0.0, 1.0, 1.0], [0.28, 0.3, 0.44, 0.6]],
    &[[0.0, 0.0, 0.45, 0.48], [0.0, 0.52, 0.45, 0.48], [0.5, 0.0, 0.5, 1.0]],
];

/// Enclosing radical forced by the surround structures 10–13.
fn enclosure(layout: usize) -> Option<usize> {
    match layout {
        10 => Some(rad("kou")),
        11 => Some(rad("chang")),
        12 => Some(rad("fang")),
        13 => Some(rad("jiong")),
        _ => None,
    }
}

const LAYOUT_WEIGHTS: [u32; 15] = [2, 4, 4, 4, 4, 2, 2, 2, 2, 2, 1, 1, 1, 1, 2];

const INITIALS: [&str; 26] = [
    "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h", "j", "q", "x", "zh", "ch", "sh", "r", "z", "c", "s", "y",
    "w", "0", "ng", "hm",
];
const FINALS: [&str; 38] = [
    "a", "o", "e", "i", "u", "v", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong", "ia", "ie", "iao", "iu",
    "ian", "in", "iang", "ing", "iong", "ua", "uo", "uai", "ui", "uan", "un", "uang", "ueng", "ve", "van", "vn", "er",
    "ê", "io",
];

/// A synthetic character: a structure and one radical per slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlyphClass {
    pub layout: usize,
    pub components: Vec<usize>,
}

impl GlyphClass {
    pub fn new(layout: usize, components: Vec<usize>) -> Self {
        assert!(layout < LAYOUTS.len());
        assert_eq!(components.len(), LAYOUTS[layout].len());
        GlyphClass { layout, components }
    }

    fn slot_at(&self, x: f64, y: f64) -> usize {
        let slots = LAYOUTS[self.layout];
        // Last slot containing the point wins (inner components overlay enclosures).
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, s) in slots.iter().enumerate() {
            let dx = (s[0] - x).max(0.0).max(x - (s[0] + s[2]));
            let dy = (s[1] - y).max(0.0).max(y - (s[1] + s[3]));
            let d = dx.hypot(dy);
            if d <= best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Dictionary record implied by the composition.
    pub fn entry(&self, label: Label) -> CharacterEntry {
        let comps: Vec<&Radical> = self.components.iter().map(|&i| &RADICALS[i]).collect();
        let first = self.components[0];
        let last = *self.components.last().unwrap();
        let mut cangjie: String = comps.iter().map(|r| r.cangjie).collect();
        cangjie.truncate(5);
        let mut zhengma: String = comps.iter().map(|r| r.zhengma).collect();
        zhengma.truncate(4);
        if zhengma.len() < 3 {
            zhengma.push('V');
        }
        let wubi: String = comps.iter().map(|r| r.wubi).collect();
        let corner = |x: f64, y: f64, k: usize| comps[self.slot_at(x, y)].corners[k];
        let mut fc = String::new();
        for (k, (x, y)) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)].into_iter().enumerate() {
            fc.push(char::from(b'0' + corner(x, y, k)));
        }
        let extra = comps[self.slot_at(0.7, 0.7)].corners[4];
        fc.push(char::from(b'0' + extra));
        // Pronunciation loosely follows the components: the last one gives
        // the initial, the first one the final and the tone.
        let initial = INITIALS[(last * 7 + 3) % INITIALS.len()];
        let fin = FINALS[(first * 11 + 5 + self.layout) % FINALS.len()];
        let tone = ((first * 3 + 1) % 5) as u8;
        CharacterEntry {
            label,
            glyph: label.as_char().map(String::from).unwrap_or_default(),
            pinyin_initial: initial.to_string(),
            pinyin_final: fin.to_string(),
            tone,
            structure: format!("s{:02}", self.layout),
            stroke_count: comps.iter().map(|r| r.stroke_count).sum::<u32>().min(31),
            cangjie,
            zhengma,
            wubi: wubi.chars().take(4).collect(),
            fourcorner: fc,
        }
    }

    /// Stroke segments in the unit square. With `fill_slots`, each
    /// component is stretched to its whole slot; otherwise it keeps a margin.
    pub fn strokes(&self, fill_slots: bool) -> Vec<Seg> {
        let mut out = Vec::new();
        for (slot, &ri) in LAYOUTS[self.layout].iter().zip(&self.components) {
            let r = &RADICALS[ri];
            let (mut x0, mut y0, mut x1, mut y1) = (0.0, 0.0, 1.0, 1.0);
            if fill_slots {
                x0 = f64::INFINITY;
                y0 = f64::INFINITY;
                x1 = f64::NEG_INFINITY;
                y1 = f64::NEG_INFINITY;
                for s in r.strokes {
                    x0 = x0.min(s[0]).min(s[2]);
                    x1 = x1.max(s[0]).max(s[2]);
                    y0 = y0.min(s[1]).min(s[3]);
                    y1 = y1.max(s[1]).max(s[3]);
                }
            }
            let map = |u: f64, lo: f64, hi: f64, off: f64, len: f64| {
                if fill_slots {
                    if hi - lo < 1e-9 {
                        off + len / 2.0
                    } else {
                        off + (u - lo) / (hi - lo) * len
                    }
                } else {
                    off + (0.08 + 0.84 * u) * len
                }
            };
            for s in r.strokes {
                out.push([
                    map(s[0], x0, x1, slot[0], slot[2]),
                    map(s[1], y0, y1, slot[1], slot[3]),
                    map(s[2], x0, x1, slot[0], slot[2]),
                    map(s[3], y0, y1, slot[1], slot[3]),
                ]);
            }
        }
        out
    }
}

fn weighted_layout(rng: &mut impl Rng) -> usize {
    let total: u32 = LAYOUT_WEIGHTS.iter().sum();
    let mut pick = rng.gen_range(0..total);
    for (i, &w) in LAYOUT_WEIGHTS.iter().enumerate() {
        if pick < w {
            return i;
        }
        pick -= w;
    }
    unreachable!()
}

/// Random composition; surround structures use their enclosing radical.
pub fn random_class(rng: &mut impl Rng) -> GlyphClass {
    let layout = weighted_layout(rng);
    let n = LAYOUTS[layout].len();
    let mut components: Vec<usize> = (0..n).map(|_| rng.gen_range(0..RADICALS.len())).collect();
    if let Some(outer) = enclosure(layout) {
        components[0] = outer;
    }
    GlyphClass::new(layout, components)
}

/// `n` distinct classes whose full attribute records are pairwise distinct.
pub fn generate_classes(n: usize, seed: u64) -> Vec<GlyphClass> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut seen = HashSet::new();
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        assert!(attempts < n * 1000 + 100_000, "composition space exhausted");
        let c = random_class(&mut rng);
        let e = c.entry(Label(0));
        let key = (
            e.pinyin_initial,
            e.pinyin_final,
            e.tone,
            e.structure,
            e.stroke_count,
            e.cangjie,
            e.zhengma,
            e.wubi,
            e.fourcorner,
        );
        if seen.insert(key) {
            out.push(c);
        }
    }
    out
}

/// Dictionary entries for classes, labelled consecutively from [`LABEL_BASE`].
pub fn class_entries(classes: &[GlyphClass]) -> Vec<CharacterEntry> {
    classes
        .iter()
        .enumerate()
        .map(|(i, c)| c.entry(Label(LABEL_BASE + i as u32)))
        .collect()
}

/// Appearance variation for rendered samples.
#[derive(Debug, Clone)]
pub struct RenderStyle {
    pub size: usize,
    /// Stroke thickness range in pixels.
    pub thickness: (f64, f64),
    /// Endpoint jitter as a fraction of the image size.
    pub endpoint_jitter: f64,
    /// Global rotation range in degrees.
    pub rotation: f64,
    pub scale: (f64, f64),
    /// Global translation range in pixels.
    pub shift: f64,
    /// Uniform pixel noise amplitude (gray levels).
    pub noise: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            size: 64,
            thickness: (2.0, 3.6),
            endpoint_jitter: 0.02,
            rotation: 4.0,
            scale: (0.8, 0.92),
            shift: 2.0,
            noise: 12.0,
        }
    }
}

/// Anti-aliased ink coverage in `[0, 1]`.
pub(crate) struct Canvas {
    pub w: usize,
    pub h: usize,
    pub cov: Vec<f32>,
}

impl Canvas {
    pub fn new(w: usize, h: usize) -> Self {
        Canvas {
            w,
            h,
            cov: vec![0.0; w * h],
        }
    }

    /// Thick segment with a one-pixel soft edge.
    pub fn segment(&mut self, a: (f64, f64), b: (f64, f64), thickness: f64) {
        let r = thickness / 2.0;
        let xmin = (a.0.min(b.0) - r - 1.0).floor().max(0.0) as usize;
        let ymin = (a.1.min(b.1) - r - 1.0).floor().max(0.0) as usize;
        let xmax = ((a.0.max(b.0) + r + 1.0).ceil() as isize).clamp(0, self.w as isize - 1) as usize;
        let ymax = ((a.1.max(b.1) + r + 1.0).ceil() as isize).clamp(0, self.h as isize - 1) as usize;
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        for y in ymin..=ymax {
            for x in xmin..=xmax {
                let (px, py) = (x as f64, y as f64);
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((px - a.0) * dx + (py - a.1) * dy) / len2).clamp(0.0, 1.0)
                };
                let d = (px - a.0 - t * dx).hypot(py - a.1 - t * dy);
                let c = (r + 0.5 - d).clamp(0.0, 1.0) as f32;
                let p = &mut self.cov[y * self.w + x];
                if c > *p {
                    *p = c;
                }
            }
        }
    }
}

/// Renders one sample of `class` as a grayscale image (dark ink on light paper).
pub fn render_glyph(class: &GlyphClass, style: &RenderStyle, rng: &mut impl Rng) -> PageImage {
    let n = style.size as f64;
    let scale = rng.gen_range(style.scale.0..=style.scale.1);
    let angle = rng.gen_range(-style.rotation..=style.rotation).to_radians();
    let shear = rng.gen_range(-0.08..=0.08);
    let tx = rng.gen_range(-style.shift..=style.shift);
    let ty = rng.gen_range(-style.shift..=style.shift);
    let thickness = rng.gen_range(style.thickness.0..=style.thickness.1);
    let (sin, cos) = angle.sin_cos();
    let c = (n - 1.0) / 2.0;
    let map = |u: f64, v: f64| {
        let x = (u - 0.5 + shear * (v - 0.5)) * scale * n;
        let y = (v - 0.5) * scale * n;
        (cos * x - sin * y + c + tx, sin * x + cos * y + c + ty)
    };
    let mut canvas = Canvas::new(style.size, style.size);
    for s in class.strokes(false) {
        let mut j = || rng.gen_range(-style.endpoint_jitter..=style.endpoint_jitter);
        let a = map(s[0] + j(), s[1] + j());
        let b = map(s[2] + j(), s[3] + j());
        canvas.segment(a, b, thickness);
    }
    let paper = rng.gen_range(215.0..=250.0);
    let ink = rng.gen_range(10.0..=60.0);
    let pixels = canvas
        .cov
        .iter()
        .map(|&cv| {
            let v = paper - cv as f64 * (paper - ink) + rng.gen_range(-style.noise..=style.noise);
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    PageImage::new(style.size, style.size, PixelKind::Gray, pixels).expect("square canvas")
}

/// Indices of radicals that form a single blob and are usable on ruled pages.
pub(crate) fn connected_radicals() -> Vec<usize> {
    (0..RADICALS.len()).filter(|&i| RADICALS[i].connected).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode_entry, parse_dictionary, write_dictionary, AttributeSchema};

    #[test]
    fn entries_validate_under_default_schema() {
        let schema = AttributeSchema::default_schema();
        let classes = generate_classes(500, 1);
        let entries = class_entries(&classes);
        let text = write_dictionary(&entries);
        let parsed = parse_dictionary(&text, &schema);
        assert!(parsed.diagnostics.is_empty(), "{:?}", &parsed.diagnostics[..1]);
        assert_eq!(parsed.entries, entries);
        for e in &entries {
            assert_eq!(encode_entry(e, &schema).unwrap().count_ones(), 23);
        }
    }

    #[test]
    fn generation_is_deterministic_and_distinct() {
        let a = generate_classes(300, 9);
        assert_eq!(a, generate_classes(300, 9));
        let schema = AttributeSchema::default_schema();
        let mut seen = HashSet::new();
        for e in class_entries(&a) {
            assert!(seen.insert(encode_entry(&e, &schema).unwrap()));
        }
    }

    #[test]
    fn surround_layouts_use_enclosing_radical() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let c = random_class(&mut rng);
            if let Some(outer) = enclosure(c.layout) {
                assert_eq!(c.components[0], outer);
            }
        }
    }

    #[test]
    fn rendering_produces_ink() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = GlyphClass::new(1, vec![rad("kou"), rad("mu")]);
        let img = render_glyph(&c, &RenderStyle::default(), &mut rng);
        assert_eq!((img.width(), img.height()), (64, 64));
        let dark = img.pixels().iter().filter(|&&p| p < 128).count();
        assert!(dark > 150 && dark < 2000, "dark pixels {dark}");
    }

    #[test]
    fn filled_components_span_slots() {
        let c = GlyphClass::new(3, vec![rad("kou"), rad("tian")]);
        let s = c.strokes(true);
        let min_y = s.iter().map(|v| v[1].min(v[3])).fold(f64::INFINITY, f64::min);
        let max_y = s.iter().map(|v| v[1].max(v[3])).fold(f64::NEG_INFINITY, f64::max);
        assert!(min_y.abs() < 1e-9 && (max_y - 1.0).abs() < 1e-9);
    }
}
