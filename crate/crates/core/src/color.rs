//! Colour values as Processing's fill()/stroke()/background() see them.

use std::fmt;

/// An opaque RGB colour. Alpha is ignored for grading purposes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rgb(pub [f64; 3]);

impl Rgb {
    pub const WHITE: Rgb = Rgb([255.0, 255.0, 255.0]);
    pub const BLACK: Rgb = Rgb([0.0, 0.0, 0.0]);

    pub fn gray(v: f64) -> Rgb {
        Rgb([v, v, v])
    }

    /// Unpacks the low 24 bits of a packed colour (`#RRGGBB` or `color(...)`).
    pub fn unpack(packed: f64) -> Rgb {
        let bits = (packed as i64) & 0xFF_FFFF;
        Rgb([
            ((bits >> 16) & 0xFF) as f64,
            ((bits >> 8) & 0xFF) as f64,
            (bits & 0xFF) as f64,
        ])
    }

    /// Packs as Processing does: opaque ARGB read back as a signed 32-bit int.
    pub fn pack(self) -> f64 {
        let c = |v: f64| (v.clamp(0.0, 255.0) as u32) & 0xFF;
        let argb = 0xFF00_0000u32 | (c(self.0[0]) << 16) | (c(self.0[1]) << 8) | c(self.0[2]);
        argb as i32 as f64
    }

    /// Interprets the arguments of a colour call. One argument in 0..=255 is
    /// a gray level; any other single value is a packed colour. Two or four
    /// arguments carry a trailing alpha.
    pub fn from_args(args: &[f64]) -> Option<Rgb> {
        match args {
            [v] | [v, _] => Some(if (0.0..=255.0).contains(v) {
                Rgb::gray(*v)
            } else {
                Rgb::unpack(*v)
            }),
            [r, g, b] | [r, g, b, _] => Some(Rgb([*r, *g, *b])),
            _ => None,
        }
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}
