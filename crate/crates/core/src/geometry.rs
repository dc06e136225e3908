//! Oriented grasp rectangles and the planar geometry built on them.
//!
//! Coordinates follow the image convention: `x` runs along columns, `y` along
//! rows (downwards). Pixel `(row i, col j)` covers `[j, j+1) x [i, i+1)` and is
//! sampled at its centre `(j + 0.5, i + 0.5)`. A rectangle's grasp axis (the
//! gripper opening direction) points along `(cos theta, sin theta)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Wraps an angle into `[-pi/2, pi/2)`. Grasps are symmetric under a half turn.
pub fn normalize_angle(theta: f64) -> f64 {
    if (-FRAC_PI_2..FRAC_PI_2).contains(&theta) {
        return theta;
    }
    let mut t = (theta + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    // rem_euclid may round up to exactly `PI`
    if t >= FRAC_PI_2 {
        t -= PI;
    }
    if t < -FRAC_PI_2 {
        t = -FRAC_PI_2;
    }
    t
}

/// Planar antipodal grasp: centre, axis angle, opening `width` along the axis
/// and jaw size `height` across it.
///
/// Fields are public so degenerate rectangles can be expressed directly;
/// [`GraspRectangle::new`] is the validating constructor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspRectangle {
    pub cx: f64,
    pub cy: f64,
    pub theta: f64,
    pub width: f64,
    pub height: f64,
}

impl GraspRectangle {
    pub fn new(cx: f64, cy: f64, theta: f64, width: f64, height: f64) -> Result<Self> {
        if !(cx.is_finite() && cy.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidRectangle(format!(
                "non-finite centre or angle ({cx}, {cy}, {theta})"
            )));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidRectangle(format!("width must be > 0, got {width}")));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::InvalidRectangle(format!("height must be > 0, got {height}")));
        }
        Ok(Self {
            cx,
            cy,
            theta: normalize_angle(theta),
            width,
            height,
        })
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Unit vector of the grasp axis.
    pub fn axis(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (c, s)
    }

    /// Offset of `(x, y)` from the centre expressed in the rectangle frame:
    /// `u` along the grasp axis, `v` across it.
    pub fn to_local(&self, x: f64, y: f64) -> (f64, f64) {
        let (c, s) = self.axis();
        let dx = x - self.cx;
        let dy = y - self.cy;
        (dx * c + dy * s, -dx * s + dy * c)
    }

    /// Half-open containment: `u in [-w/2, w/2)` and `v in [-h/2, h/2)`.
    ///
    /// The half-open rule makes adjacent rectangles tile without double-counting
    /// pixel centres that fall exactly on a shared edge.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (u, v) = self.to_local(x, y);
        let hw = 0.5 * self.width;
        let hh = 0.5 * self.height;
        u >= -hw && u < hw && v >= -hh && v < hh
    }
}

/// The four corners, counter-clockwise in the `x`-right/`y`-up sense
/// (clockwise on screen), starting from local `(-w/2, -h/2)`.
pub fn rect_corners(r: &GraspRectangle) -> [Point; 4] {
    let (c, s) = r.axis();
    let hw = 0.5 * r.width;
    let hh = 0.5 * r.height;
    [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)].map(|(u, v)| Point::new(r.cx + u * c - v * s, r.cy + u * s + v * c))
}

/// The middle third of the rectangle along its grasp axis.
pub fn center_third(r: &GraspRectangle) -> GraspRectangle {
    GraspRectangle {
        width: r.width / 3.0,
        ..*r
    }
}

/// Signed area of a polygon (positive for counter-clockwise in `y`-up sense).
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let n = poly.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum();
    0.5 * twice
}

fn cross(a: Point, b: Point, p: Point) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Clips `subject` to the left half-plane of the directed edge `a -> b`.
fn clip_halfplane(subject: &[Point], a: Point, b: Point) -> Vec<Point> {
    let n = subject.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let s = subject[i];
        let e = subject[(i + 1) % n];
        let ds = cross(a, b, s);
        let de = cross(a, b, e);
        let s_in = ds >= 0.0;
        let e_in = de >= 0.0;
        if s_in != e_in {
            let t = ds / (ds - de);
            out.push(Point::new(s.x + (e.x - s.x) * t, s.y + (e.y - s.y) * t));
        }
        if e_in {
            out.push(e);
        }
    }
    out
}

/// Sutherland-Hodgman clipping of `subject` by a counter-clockwise convex `clip`.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.len() < 3 {
            return Vec::new();
        }
        out = clip_halfplane(&out, clip[i], clip[(i + 1) % n]);
    }
    if out.len() < 3 {
        Vec::new()
    } else {
        out
    }
}

/// Exact intersection-over-union of two oriented rectangles.
///
/// Zero-area rectangles give 0, including two identical degenerate ones.
pub fn rect_iou(a: &GraspRectangle, b: &GraspRectangle) -> f64 {
    let area_a = a.area();
    let area_b = b.area();
    if !(area_a > 0.0 && area_b > 0.0) {
        return 0.0;
    }
    let pa = rect_corners(a);
    let pb = rect_corners(b);
    let inter = polygon_area(&clip_convex(&pa, &pb)).abs().min(area_a.min(area_b));
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Smallest angular distance between two grasp angles, in degrees within `[0, 90]`.
pub fn angle_offset(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d).max(0.0).to_degrees().min(90.0)
}

/// Row-major boolean occupancy grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "mask data has {} entries, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, data })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Rotates the mask a quarter turn clockwise on screen. Pixel `(i, j)` of
    /// an `h x w` mask moves to `(j, h - 1 - i)` of the `w x h` result.
    pub fn rotate90(&self) -> PixelMask {
        let mut out = PixelMask::new(self.height, self.width);
        for i in 0..self.height {
            for j in 0..self.width {
                out.set(j, self.height - 1 - i, self.get(i, j));
            }
        }
        out
    }
}

/// Integer pixel ranges (possibly extending past the image) whose centres may
/// fall inside `r`.
pub(crate) fn pixel_bounds(r: &GraspRectangle) -> (i64, i64, i64, i64) {
    let corners = rect_corners(r);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in corners {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    // centre j + 0.5 in [x0, x1] => j in [x0 - 0.5, x1 - 0.5]
    let col0 = (x0 - 0.5).floor() as i64 - 1;
    let col1 = (x1 - 0.5).ceil() as i64 + 1;
    let row0 = (y0 - 0.5).floor() as i64 - 1;
    let row1 = (y1 - 0.5).ceil() as i64 + 1;
    (row0, row1, col0, col1)
}

/// Calls `f(row, col)` for every in-image pixel whose centre lies inside `r`.
pub(crate) fn for_each_pixel_in(r: &GraspRectangle, rows: usize, cols: usize, mut f: impl FnMut(usize, usize)) {
    let (row0, row1, col0, col1) = pixel_bounds(r);
    let row0 = row0.max(0);
    let col0 = col0.max(0);
    let row1 = row1.min(rows as i64 - 1);
    let col1 = col1.min(cols as i64 - 1);
    for i in row0..=row1 {
        for j in col0..=col1 {
            if r.contains(j as f64 + 0.5, i as f64 + 0.5) {
                f(i as usize, j as usize);
            }
        }
    }
}

/// Pixels of an `rows x cols` image whose centres fall inside the centre third of `r`.
pub fn rasterize_center_third(r: &GraspRectangle, rows: usize, cols: usize) -> PixelMask {
    let mut mask = PixelMask::new(cols, rows);
    let third = center_third(r);
    for_each_pixel_in(&third, rows, cols, |i, j| mask.set(i, j, true));
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(cx: f64, cy: f64, theta: f64, w: f64, h: f64) -> GraspRectangle {
        GraspRectangle::new(cx, cy, theta, w, h).unwrap()
    }

    fn same_point_set(got: &[Point], want: &[(f64, f64)]) -> bool {
        want.iter()
            .all(|&(x, y)| got.iter().any(|p| (p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9))
    }

    #[test]
    fn corners_axis_aligned() {
        let c = rect_corners(&rect(5.0, 5.0, 0.0, 4.0, 2.0));
        let want = [(3.0, 4.0), (7.0, 4.0), (7.0, 6.0), (3.0, 6.0)];
        for (p, (x, y)) in c.iter().zip(want) {
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12);
        }
        assert!(polygon_area(&c) > 0.0);
    }

    #[test]
    fn corners_quarter_turn_normalizes() {
        let r = rect(0.0, 0.0, FRAC_PI_2, 4.0, 2.0);
        assert_eq!(r.theta, -FRAC_PI_2);
        let c = rect_corners(&r);
        assert!(same_point_set(
            &c,
            &[(-1.0, -2.0), (1.0, -2.0), (1.0, 2.0), (-1.0, 2.0)]
        ));
    }

    #[test]
    fn corners_degenerate_line() {
        let r = GraspRectangle {
            cx: 0.0,
            cy: 0.0,
            theta: PI / 4.0,
            width: 2.0 * 2f64.sqrt(),
            height: 0.0,
        };
        let c = rect_corners(&r);
        assert!(same_point_set(&c, &[(1.0, 1.0), (-1.0, -1.0)]));
        let cx = c.iter().map(|p| p.x).sum::<f64>() / 4.0;
        let cy = c.iter().map(|p| p.y).sum::<f64>() / 4.0;
        assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9);
    }

    #[test]
    fn new_rejects_bad_extents() {
        assert!(GraspRectangle::new(0.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(GraspRectangle::new(0.0, 0.0, 0.0, 1.0, -1.0).is_err());
        assert!(GraspRectangle::new(f64::NAN, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(GraspRectangle::new(0.0, 0.0, f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalize_is_half_open() {
        assert_eq!(normalize_angle(-FRAC_PI_2), -FRAC_PI_2);
        assert_eq!(normalize_angle(FRAC_PI_2), -FRAC_PI_2);
        assert!((normalize_angle(100f64.to_radians()) - (-80f64).to_radians()).abs() < 1e-12);
        for k in -5..5 {
            let t = normalize_angle(0.3 + k as f64 * PI);
            assert!((t - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn center_third_examples() {
        let r = center_third(&rect(0.0, 0.0, 0.0, 9.0, 2.0));
        assert_eq!((r.width, r.height), (3.0, 2.0));
        let r = center_third(&rect(0.0, 0.0, PI / 4.0, 6.0, 6.0));
        assert_eq!((r.theta, r.width, r.height), (PI / 4.0, 2.0, 6.0));
        let r = center_third(&rect(1.0, 2.0, 0.0, 1.0, 1.0));
        assert_eq!(r.width, 1.0 / 3.0);
    }

    #[test]
    fn iou_examples() {
        let a = rect(0.0, 0.0, 0.0, 10.0, 20.0);
        assert!((rect_iou(&a, &a) - 1.0).abs() < 1e-12);
        let far = rect(100.0, 0.0, 0.3, 10.0, 10.0);
        assert_eq!(rect_iou(&a, &far), 0.0);
        let b = rect(5.0, 0.0, 0.0, 10.0, 20.0);
        assert!((rect_iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iou_degenerate_is_zero() {
        let d = GraspRectangle {
            cx: 0.0,
            cy: 0.0,
            theta: 0.0,
            width: 4.0,
            height: 0.0,
        };
        assert_eq!(rect_iou(&d, &d), 0.0);
        assert_eq!(rect_iou(&d, &rect(0.0, 0.0, 0.0, 4.0, 4.0)), 0.0);
    }

    #[test]
    fn angle_offset_examples() {
        assert_eq!(angle_offset(0.0, 0.0), 0.0);
        assert!((angle_offset(0.0, PI / 6.0) - 30.0).abs() < 1e-9);
        assert!((angle_offset((-85f64).to_radians(), 85f64.to_radians()) - 10.0).abs() < 1e-9);
        assert!((angle_offset(0.0, FRAC_PI_2) - 90.0).abs() < 1e-9);
    }

    #[test]
    fn raster_axis_aligned_block() {
        let m = rasterize_center_third(&rect(5.0, 5.0, 0.0, 9.0, 3.0), 10, 10);
        for i in 0..10 {
            for j in 0..10 {
                let want = (3..=5).contains(&i) && (3..=5).contains(&j);
                assert_eq!(m.get(i, j), want, "pixel ({i}, {j})");
            }
        }
    }

    #[test]
    fn raster_outside_image_is_empty() {
        let m = rasterize_center_third(&rect(-50.0, 200.0, 0.4, 9.0, 3.0), 10, 10);
        assert!(m.is_empty());
        assert_eq!(m.data.len(), 100);
    }

    #[test]
    fn mask_rotation_moves_pixels() {
        let mut m = PixelMask::new(3, 2);
        m.set(0, 2, true);
        let r = m.rotate90();
        assert_eq!((r.width, r.height), (2, 3));
        assert!(r.get(2, 1));
        assert_eq!(r.count(), 1);
        assert_eq!(m.rotate90().rotate90().rotate90().rotate90(), m);
    }
}
