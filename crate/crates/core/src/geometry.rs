//! Boxes, points, masks and the IoU kernel.
//!
//! Image coordinates: x grows to the right, y grows downward. Pixel `(i, j)`
//! covers `[i, i+1) x [j, j+1)` and its center sits at `(i + 0.5, j + 0.5)`.

use crate::error::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned box in `(left, top, width, height)` form, continuous pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl BBox {
    /// Builds a box, rejecting non-finite values and non-positive extents.
    pub fn new(left: f64, top: f64, width: f64, height: f64) -> Result<Self, GeometryError> {
        let b = Self {
            left,
            top,
            width,
            height,
        };
        if b.is_valid() {
            Ok(b)
        } else {
            Err(GeometryError::InvalidValue(format!(
                "box ({left}, {top}, {width}, {height})"
            )))
        }
    }

    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Self::new(x0, y0, x1 - x0, y1 - y0)
    }

    pub fn is_valid(&self) -> bool {
        self.left.is_finite()
            && self.top.is_finite()
            && self.width.is_finite()
            && self.height.is_finite()
            && self.width > 0.0
            && self.height > 0.0
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.left + self.width / 2.0, self.top + self.height / 2.0)
    }

    /// Bottom-center point, the usual foot point of a pedestrian box.
    pub fn bottom_center(&self) -> Point2 {
        Point2::new(self.left + self.width / 2.0, self.bottom())
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            Point2::new(self.left, self.top),
            Point2::new(self.right(), self.top),
            Point2::new(self.right(), self.bottom()),
            Point2::new(self.left, self.bottom()),
        ]
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            left: self.left + dx,
            top: self.top + dy,
            ..*self
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            left: self.left * s,
            top: self.top * s,
            width: self.width * s,
            height: self.height * s,
        }
    }

    /// Intersection with `[0, width) x [0, height)`; `None` when empty.
    pub fn clamp_to(&self, width: f64, height: f64) -> Option<BBox> {
        let x0 = self.left.max(0.0);
        let y0 = self.top.max(0.0);
        let x1 = self.right().min(width);
        let y1 = self.bottom().min(height);
        if x1 > x0 && y1 > y0 {
            Some(BBox {
                left: x0,
                top: y0,
                width: x1 - x0,
                height: y1 - y0,
            })
        } else {
            None
        }
    }

    /// Integer pixel ranges whose centers fall inside the box, clipped to an
    /// image of the given size. `None` if no pixel center is covered.
    pub fn pixel_span(&self, width: usize, height: usize) -> Option<PixelSpan> {
        let first = |lo: f64, limit: usize| ((lo - 0.5).ceil().max(0.0) as usize).min(limit);
        let x0 = first(self.left, width);
        let x1 = first(self.right(), width);
        let y0 = first(self.top, height);
        let y1 = first(self.bottom(), height);
        (x1 > x0 && y1 > y0).then_some(PixelSpan { x0, x1, y0, y1 })
    }
}

/// Half-open pixel index ranges `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelSpan {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

/// A single-class (person) detector output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bbox: BBox,
    pub score: f64,
}

impl Detection {
    pub fn new(bbox: BBox, score: f64) -> Result<Self, GeometryError> {
        if !(0.0..=1.0).contains(&score) || !bbox.is_valid() {
            return Err(GeometryError::InvalidValue(format!("detection score {score}")));
        }
        Ok(Self { bbox, score })
    }
}

/// Binary raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn filled(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, GeometryError> {
        if bits.len() != width * height {
            return Err(GeometryError::InvalidValue(format!(
                "mask of {width}x{height} needs {} bits, got {}",
                width * height,
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Intersection over union of two boxes over continuous area.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    if a == b {
        return 1.0;
    }
    let iw = a.right().min(b.right()) - a.left.max(b.left);
    let ih = a.bottom().min(b.bottom()) - a.top.max(b.top);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Pairwise IoU, `rows x cols`.
pub fn iou_matrix(rows: &[BBox], cols: &[BBox]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| cols.iter().map(|c| iou(r, c)).collect())
        .collect()
}

/// Kalman measurement parameterization `(cx, cy, aspect, height)`.
pub fn bbox_to_state_vec(b: &BBox) -> [f64; 4] {
    [
        b.left + b.width / 2.0,
        b.top + b.height / 2.0,
        b.width / b.height,
        b.height,
    ]
}

pub fn state_vec_to_bbox(v: &[f64; 4]) -> BBox {
    let [cx, cy, aspect, height] = *v;
    let width = aspect * height;
    BBox {
        left: cx - width / 2.0,
        top: cy - height / 2.0,
        width,
        height,
    }
}

/// Keeps the bits of `m` whose pixel centers lie inside `b`.
pub fn mask_and_bbox(m: &Mask, b: &BBox) -> Result<Mask, GeometryError> {
    let span = b
        .pixel_span(m.width, m.height)
        .ok_or(GeometryError::DegenerateRegion)?;
    let mut out = Mask::new(m.width, m.height);
    for y in span.y0..span.y1 {
        let row = y * m.width;
        out.bits[row + span.x0..row + span.x1].copy_from_slice(&m.bits[row + span.x0..row + span.x1]);
    }
    Ok(out)
}
