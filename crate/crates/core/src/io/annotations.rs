//! Grasp annotation text format: one `x;y;theta_degrees;opening;jaw_size`
//! record per line, plus an equivalent JSON document.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, GraspRectangle};
use crate::ground_truth::GraspScene;

/// One annotation line as stored on disk (angle in degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub opening: f64,
    pub jaw_size: f64,
}

impl AnnotationRecord {
    pub fn to_rect(&self) -> Result<GraspRectangle> {
        GraspRectangle::new(
            self.x,
            self.y,
            degrees_to_theta(self.theta),
            self.opening,
            self.jaw_size,
        )
    }

    pub fn from_rect(r: &GraspRectangle) -> Self {
        Self {
            x: r.cx,
            y: r.cy,
            theta: degrees_for(r.theta),
            opening: r.width,
            jaw_size: r.height,
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "{};{};{};{};{}",
            self.x, self.y, self.theta, self.opening, self.jaw_size
        )
    }
}

/// Wraps degrees into `[-90, 90)`.
pub fn normalize_degrees(deg: f64) -> f64 {
    if (-90.0..90.0).contains(&deg) {
        return deg;
    }
    let mut d = (deg + 90.0).rem_euclid(180.0) - 90.0;
    if d >= 90.0 {
        d -= 180.0;
    }
    d
}

/// Annotation angle (degrees, any range) to a normalised grasp angle in radians.
/// Wrapping happens in degrees so that integral angles such as 100 map exactly to -80.
pub fn degrees_to_theta(deg: f64) -> f64 {
    normalize_angle(normalize_degrees(deg).to_radians())
}

/// A degree value that [`degrees_to_theta`] maps back to exactly `theta`
/// whenever such a value exists near `theta` in degrees. Angles read from
/// annotation files always have one, so re-writing them is lossless.
pub fn degrees_for(theta: f64) -> f64 {
    let theta = normalize_angle(theta);
    let deg = theta.to_degrees();
    let back = degrees_to_theta;
    if back(deg) == theta {
        return deg;
    }
    let mut lo = deg;
    let mut hi = deg;
    for _ in 0..16 {
        lo = lo.next_down();
        hi = hi.next_up();
        if back(lo) == theta {
            return lo;
        }
        if back(hi) == theta {
            return hi;
        }
    }
    deg
}

fn parse_line(line: &str, lineno: usize) -> Result<AnnotationRecord> {
    let fields: Vec<&str> = line.split(';').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected 5 `;`-separated fields, found {}", fields.len()),
        });
    }
    let mut vals = [0.0; 5];
    for (slot, (field, name)) in vals
        .iter_mut()
        .zip(fields.iter().zip(["x", "y", "theta", "opening", "jaw_size"]))
    {
        *slot = field.parse::<f64>().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("{name}: `{field}` is not a number"),
        })?;
    }
    Ok(AnnotationRecord {
        x: vals[0],
        y: vals[1],
        theta: vals[2],
        opening: vals[3],
        jaw_size: vals[4],
    })
}

/// Parses annotation lines, skipping blank lines. LF and CRLF endings are accepted.
pub fn parse_records(text: &str) -> Result<Vec<(usize, AnnotationRecord)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1).map(|r| (i + 1, r)))
        .collect()
}

fn build_scene(
    scene_id: &str,
    rows: usize,
    cols: usize,
    records: Vec<(usize, AnnotationRecord)>,
) -> Result<GraspScene> {
    let mut grasps: Vec<GraspRectangle> = Vec::with_capacity(records.len());
    for (lineno, rec) in records {
        let rect = rec.to_rect().map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if !grasps.contains(&rect) {
            grasps.push(rect);
        }
    }
    if grasps.is_empty() {
        return Err(Error::EmptyAnnotations(scene_id.to_string()));
    }
    GraspScene::new(scene_id, rows, cols, grasps)
}

/// Parses a line-format annotation file for an image of `rows x cols` pixels.
/// Repeated identical grasps are kept once.
pub fn parse_annotations(text: &str, scene_id: &str, rows: usize, cols: usize) -> Result<GraspScene> {
    build_scene(scene_id, rows, cols, parse_records(text)?)
}

pub fn serialize_annotations(grasps: &[GraspRectangle]) -> String {
    let mut out = String::new();
    for g in grasps {
        out.push_str(&AnnotationRecord::from_rect(g).to_line());
        out.push('\n');
    }
    out
}

/// JSON mirror of the line format, carrying its own image size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene_id: Option<String>,
    pub image_w: usize,
    pub image_h: usize,
    pub grasps: Vec<AnnotationRecord>,
}

impl SceneDocument {
    pub fn from_scene(scene: &GraspScene) -> Self {
        Self {
            scene_id: Some(scene.scene_id.clone()),
            image_w: scene.cols,
            image_h: scene.rows,
            grasps: scene.grasps.iter().map(AnnotationRecord::from_rect).collect(),
        }
    }
}

/// Parses the JSON mirror; `fallback_id` is used when the document has no id.
pub fn parse_scene_json(text: &str, fallback_id: &str) -> Result<GraspScene> {
    let doc: SceneDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let id = doc.scene_id.clone().unwrap_or_else(|| fallback_id.to_string());
    let records = doc.grasps.into_iter().enumerate().map(|(i, r)| (i + 1, r)).collect();
    build_scene(&id, doc.image_h, doc.image_w, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_centre_grasp() {
        let s = parse_annotations("512;512;0;100;50\n", "s", 1024, 1024).unwrap();
        assert_eq!(s.grasps.len(), 1);
        let g = s.grasps[0];
        assert_eq!(
            (g.cx, g.cy, g.theta, g.width, g.height),
            (512.0, 512.0, 0.0, 100.0, 50.0)
        );
    }

    #[test]
    fn theta_normalised() {
        let s = parse_annotations("10;10;100;50;20", "s", 64, 64).unwrap();
        assert!((s.grasps[0].theta.to_degrees() + 80.0).abs() < 1e-9);
    }

    #[test]
    fn malformed_reports_line() {
        match parse_annotations("a;b;c", "s", 10, 10) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse_annotations("1;1;0;4;2\n\n1;x;0;4;2\n", "s", 10, 10) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_annotations("1;1;0;-4;2", "s", 10, 10) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_duplicates() {
        assert!(matches!(
            parse_annotations("\n \n", "s", 10, 10),
            Err(Error::EmptyAnnotations(_))
        ));
        let s = parse_annotations("1;1;0;4;2\r\n1;1;0;4;2\r\n2;2;0;4;2\r\n", "s", 10, 10).unwrap();
        assert_eq!(s.grasps.len(), 2);
    }

    #[test]
    fn centre_outside_image() {
        assert!(matches!(
            parse_annotations("12;1;0;4;2", "s", 10, 10),
            Err(Error::GraspOutsideImage { .. })
        ));
    }

    #[test]
    fn json_mirror_matches_lines() {
        let lines = parse_annotations("3;4;30;8;4\n5;6;-45;10;5\n", "doc", 20, 30).unwrap();
        let json = serde_json::to_string(&SceneDocument::from_scene(&lines)).unwrap();
        let from_json = parse_scene_json(&json, "other").unwrap();
        assert_eq!(from_json, lines);
        let anonymous =
            r#"{"image_w": 30, "image_h": 20, "grasps": [{"x": 3, "y": 4, "theta": 30, "opening": 8, "jaw_size": 4}]}"#;
        assert_eq!(parse_scene_json(anonymous, "fallback").unwrap().scene_id, "fallback");
    }

    #[test]
    fn degrees_round_trip_exactly() {
        for i in 0..20000 {
            let deg = -270.0 + i as f64 * 0.0271;
            let theta = degrees_to_theta(deg);
            assert_eq!(degrees_to_theta(degrees_for(theta)), theta, "{deg}");
        }
        assert_eq!(normalize_degrees(100.0), -80.0);
        assert_eq!(normalize_degrees(90.0), -90.0);
        assert_eq!(normalize_degrees(-450.0), -90.0);
    }
}
