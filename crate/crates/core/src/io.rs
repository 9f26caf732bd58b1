//! Readers and writers for every on-disk artifact.
//!
//! All formats are line-based UTF-8 with `\n` endings, except masks, which
//! are binary PGM. Blank lines are ignored; any other malformed line aborts
//! the read with its line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::calibration::{Correspondence, Homography};
use crate::cooperative::{BrightnessLabel, FrameStats};
use crate::error::IoError;
use crate::geometry::{BBox, Detection, Mask, Point2};
use crate::ho3::{Ho3Landmark, LandmarkMap};
use crate::sim::{SimConfig, SimDataset};
use crate::tracker::TrackRecord;

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| IoError::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn field<T: FromStr>(s: &str, path: &Path, line: usize, what: &str) -> Result<T, IoError> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad {what}: {s:?}")))
}

fn finite(v: f64, path: &Path, line: usize, what: &str) -> Result<f64, IoError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(path, line, format!("{what} is not finite")))
    }
}

/// Numbered non-blank lines.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// One row of a MOTChallenge CSV. `id` is `None` for raw detections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotRow {
    pub frame_id: u32,
    pub id: Option<u32>,
    pub bbox: BBox,
    pub score: f64,
}

pub fn parse_mot_csv(text: &str, path: &Path) -> Result<Vec<MotRow>, IoError> {
    let mut rows = Vec::new();
    for (n, line) in lines(text) {
        let f: Vec<&str> = line.split(',').collect();
        if !(7..=10).contains(&f.len()) {
            return Err(parse_err(path, n, format!("expected 7 to 10 fields, got {}", f.len())));
        }
        let frame_id: u32 = field(f[0], path, n, "frame")?;
        let id: i64 = field(f[1], path, n, "id")?;
        let mut v = [0.0; 5];
        for (k, what) in ["bb_left", "bb_top", "bb_width", "bb_height", "conf"].iter().enumerate() {
            v[k] = finite(field(f[k + 2], path, n, what)?, path, n, what)?;
        }
        for extra in &f[7..] {
            field::<f64>(extra, path, n, "trailing field")?;
        }
        let violation = |msg: &str| IoError::InvariantViolation {
            path: path.display().to_string(),
            line: n,
            msg: msg.to_string(),
        };
        if frame_id == 0 {
            return Err(violation("frame ids start at 1"));
        }
        if v[2] <= 0.0 || v[3] <= 0.0 {
            return Err(violation("box width and height must be positive"));
        }
        let id = match id {
            -1 => None,
            i if i >= 0 && i <= u32::MAX as i64 => Some(i as u32),
            _ => return Err(parse_err(path, n, format!("bad id: {id}"))),
        };
        rows.push(MotRow {
            frame_id,
            id,
            bbox: BBox {
                left: v[0],
                top: v[1],
                width: v[2],
                height: v[3],
            },
            score: v[4],
        });
    }
    rows.sort_by(|a, b| (a.frame_id, a.id).cmp(&(b.frame_id, b.id)));
    Ok(rows)
}

pub fn read_mot_csv(path: &Path) -> Result<Vec<MotRow>, IoError> {
    parse_mot_csv(&read_text(path)?, path)
}

fn mot_line(out: &mut String, frame: u32, id: i64, b: &BBox, score: f64) {
    let _ = writeln!(
        out,
        "{frame},{id},{:.2},{:.2},{:.2},{:.2},{score:.6},-1,-1,-1",
        b.left, b.top, b.width, b.height
    );
}

/// Track records sorted by `(frame, id)`.
pub fn format_tracks(records: &[TrackRecord]) -> String {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| (r.frame_id, r.person_id));
    let mut out = String::new();
    for r in &sorted {
        mot_line(&mut out, r.frame_id, r.person_id as i64, &r.bbox, r.score);
    }
    out
}

pub fn write_tracks(path: &Path, records: &[TrackRecord]) -> Result<(), IoError> {
    write_text(path, &format_tracks(records))
}

/// Rows with an id as track records; detection rows are rejected.
pub fn read_tracks(path: &Path) -> Result<Vec<TrackRecord>, IoError> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (k, row) in parse_mot_csv(&text, path)?.into_iter().enumerate() {
        let Some(person_id) = row.id else {
            return Err(IoError::Format {
                path: path.display().to_string(),
                msg: format!("row {} is a detection (id -1), expected tracks", k + 1),
            });
        };
        out.push(TrackRecord {
            frame_id: row.frame_id,
            person_id,
            bbox: row.bbox,
            score: row.score,
        });
    }
    Ok(out)
}

/// Per-frame detections (index `frame - 1`), written with id `-1`.
pub fn format_detections(dets: &[Vec<Detection>]) -> String {
    let mut out = String::new();
    for (k, frame) in dets.iter().enumerate() {
        for d in frame {
            mot_line(&mut out, k as u32 + 1, -1, &d.bbox, d.score);
        }
    }
    out
}

pub fn write_detections(path: &Path, dets: &[Vec<Detection>]) -> Result<(), IoError> {
    write_text(path, &format_detections(dets))
}

/// Any MOT CSV as per-frame detections; ids are ignored. The result covers
/// at least `min_frames` frames.
pub fn read_detections(path: &Path, min_frames: u32) -> Result<Vec<Vec<Detection>>, IoError> {
    let rows = read_mot_csv(path)?;
    let n = rows.iter().map(|r| r.frame_id).max().unwrap_or(0).max(min_frames);
    let mut out = vec![Vec::new(); n as usize];
    for r in rows {
        out[r.frame_id as usize - 1].push(Detection {
            bbox: r.bbox,
            score: r.score,
        });
    }
    Ok(out)
}

fn fmt_err(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

pub fn encode_pgm(m: &Mask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.width(), m.height()).into_bytes();
    out.extend(m.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

pub fn decode_pgm(bytes: &[u8], path: &Path) -> Result<Mask, IoError> {
    let mut pos = 0;
    let mut token = || -> Option<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        (pos > start).then(|| String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token().as_deref() != Some("P5") {
        return Err(fmt_err(path, "missing P5 magic"));
    }
    let mut num = |what: &str| -> Result<usize, IoError> {
        token()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| fmt_err(path, format!("bad {what}")))
    };
    let (w, h, maxval) = (num("width")?, num("height")?, num("maxval")?);
    if w == 0 || h == 0 {
        return Err(fmt_err(path, "dimensions must be positive"));
    }
    if maxval != 255 {
        return Err(fmt_err(path, format!("maxval must be 255, got {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the payload.
    let payload = bytes.get(pos + 1..).unwrap_or(&[]);
    if payload.len() < w * h {
        return Err(fmt_err(path, format!("truncated payload: {} of {} bytes", payload.len(), w * h)));
    }
    if payload.len() > w * h {
        return Err(fmt_err(path, "trailing bytes after payload"));
    }
    Mask::from_bits(w, h, payload.iter().map(|&v| v > 127).collect()).map_err(|e| fmt_err(path, e.to_string()))
}

pub fn write_mask_pgm(m: &Mask, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, encode_pgm(m)).map_err(|e| IoError::io(path, e))
}

pub fn read_mask_pgm(path: &Path) -> Result<Mask, IoError> {
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    decode_pgm(&bytes, path)
}

/// Mask file name for a frame, e.g. `000012.pgm`.
pub fn mask_file_name(frame: u32) -> String {
    format!("{frame:06}.pgm")
}

pub fn write_mask_dir(dir: &Path, masks: &BTreeMap<u32, Mask>) -> Result<(), IoError> {
    std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    for (f, m) in masks {
        write_mask_pgm(m, &dir.join(mask_file_name(*f)))?;
    }
    Ok(())
}

/// Reads every `NNNNNN.pgm` in `dir`; other files are rejected.
pub fn read_mask_dir(dir: &Path) -> Result<BTreeMap<u32, Mask>, IoError> {
    let mut out = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|e| IoError::io(dir, e))?;
    for e in entries {
        let e = e.map_err(|e| IoError::io(dir, e))?;
        let path = e.path();
        let frame = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_suffix(".pgm"))
            .and_then(|s| s.parse::<u32>().ok())
            .filter(|&f| f >= 1)
            .ok_or_else(|| fmt_err(&path, "mask files must be named <frame>.pgm"))?;
        out.insert(frame, read_mask_pgm(&path)?);
    }
    Ok(out)
}

/// `frame person x y` per landmark; a frame with no landmarks is a line
/// holding only its id.
pub fn format_landmarks(map: &LandmarkMap) -> String {
    let mut out = String::new();
    for (f, lms) in map {
        if lms.is_empty() {
            let _ = writeln!(out, "{f}");
        }
        for l in lms {
            let _ = writeln!(out, "{} {} {} {}", f, l.person_id, l.point.x, l.point.y);
        }
    }
    out
}

pub fn parse_landmarks(text: &str, path: &Path) -> Result<LandmarkMap, IoError> {
    let mut map = LandmarkMap::new();
    for (n, line) in lines(text) {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.len() {
            1 => {
                map.entry(field(f[0], path, n, "frame")?).or_default();
            }
            4 => {
                let frame_id: u32 = field(f[0], path, n, "frame")?;
                let l = Ho3Landmark {
                    frame_id,
                    person_id: field(f[1], path, n, "person")?,
                    point: Point2::new(
                        finite(field(f[2], path, n, "x")?, path, n, "x")?,
                        finite(field(f[3], path, n, "y")?, path, n, "y")?,
                    ),
                };
                map.entry(frame_id).or_default().push(l);
            }
            k => return Err(parse_err(path, n, format!("expected 1 or 4 fields, got {k}"))),
        }
    }
    Ok(map)
}

pub fn write_landmarks(path: &Path, map: &LandmarkMap) -> Result<(), IoError> {
    write_text(path, &format_landmarks(map))
}

pub fn read_landmarks(path: &Path) -> Result<LandmarkMap, IoError> {
    parse_landmarks(&read_text(path)?, path)
}

/// Nine row-major entries on one line.
pub fn format_homography(h: &Homography) -> String {
    let v: Vec<String> = h.to_row_major().iter().map(|x| x.to_string()).collect();
    format!("{}\n", v.join(" "))
}

pub fn parse_homography(text: &str, path: &Path) -> Result<Homography, IoError> {
    let mut it = lines(text);
    let (n, line) = it.next().ok_or_else(|| fmt_err(path, "empty homography file"))?;
    if let Some((extra, _)) = it.next() {
        return Err(parse_err(path, extra, "unexpected line after homography"));
    }
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 9 {
        return Err(parse_err(path, n, format!("expected 9 numbers, got {}", f.len())));
    }
    let mut v = [0.0; 9];
    for (k, s) in f.iter().enumerate() {
        v[k] = finite(field(s, path, n, "entry")?, path, n, "entry")?;
    }
    Homography::from_row_major(v).map_err(|e| parse_err(path, n, e.to_string()))
}

pub fn write_homography(path: &Path, h: &Homography) -> Result<(), IoError> {
    write_text(path, &format_homography(h))
}

pub fn read_homography(path: &Path) -> Result<Homography, IoError> {
    parse_homography(&read_text(path)?, path)
}

/// `frame B` or `frame D` per line.
pub fn format_brightness(labels: &BTreeMap<u32, BrightnessLabel>) -> String {
    labels.iter().map(|(f, l)| format!("{f} {}\n", l.code())).collect()
}

pub fn parse_brightness(text: &str, path: &Path) -> Result<BTreeMap<u32, BrightnessLabel>, IoError> {
    let mut out = BTreeMap::new();
    for (n, line) in lines(text) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(parse_err(path, n, "expected `frame B|D`"));
        }
        let label = match f[1] {
            "B" => BrightnessLabel::Bright,
            "D" => BrightnessLabel::Dark,
            other => return Err(parse_err(path, n, format!("unknown label {other:?}"))),
        };
        if out.insert(field(f[0], path, n, "frame")?, label).is_some() {
            return Err(parse_err(path, n, "duplicate frame"));
        }
    }
    Ok(out)
}

pub fn write_brightness(path: &Path, labels: &BTreeMap<u32, BrightnessLabel>) -> Result<(), IoError> {
    write_text(path, &format_brightness(labels))
}

pub fn read_brightness(path: &Path) -> Result<BTreeMap<u32, BrightnessLabel>, IoError> {
    parse_brightness(&read_text(path)?, path)
}

/// `frame mean_intensity` per line, three decimals.
pub fn format_intensity(stats: &[FrameStats]) -> String {
    stats
        .iter()
        .map(|s| format!("{} {:.3}\n", s.frame_id, s.mean_intensity))
        .collect()
}

pub fn parse_intensity(text: &str, path: &Path) -> Result<Vec<FrameStats>, IoError> {
    let mut out = Vec::new();
    for (n, line) in lines(text) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(parse_err(path, n, "expected `frame intensity`"));
        }
        out.push(FrameStats {
            frame_id: field(f[0], path, n, "frame")?,
            mean_intensity: finite(field(f[1], path, n, "intensity")?, path, n, "intensity")?,
        });
    }
    Ok(out)
}

pub fn read_intensity(path: &Path) -> Result<Vec<FrameStats>, IoError> {
    parse_intensity(&read_text(path)?, path)
}

pub fn write_intensity(path: &Path, stats: &[FrameStats]) -> Result<(), IoError> {
    write_text(path, &format_intensity(stats))
}

/// `sx sy tx ty` per line.
pub fn format_correspondences(c: &[Correspondence]) -> String {
    c.iter()
        .map(|c| format!("{} {} {} {}\n", c.source.x, c.source.y, c.target.x, c.target.y))
        .collect()
}

pub fn parse_correspondences(text: &str, path: &Path) -> Result<Vec<Correspondence>, IoError> {
    let mut out = Vec::new();
    for (n, line) in lines(text) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(parse_err(path, n, format!("expected 4 numbers, got {}", f.len())));
        }
        let mut v = [0.0; 4];
        for (k, s) in f.iter().enumerate() {
            v[k] = finite(field(s, path, n, "coordinate")?, path, n, "coordinate")?;
        }
        out.push(Correspondence {
            source: Point2::new(v[0], v[1]),
            target: Point2::new(v[2], v[3]),
        });
    }
    Ok(out)
}

pub fn write_correspondences(path: &Path, c: &[Correspondence]) -> Result<(), IoError> {
    write_text(path, &format_correspondences(c))
}

pub fn read_correspondences(path: &Path) -> Result<Vec<Correspondence>, IoError> {
    parse_correspondences(&read_text(path)?, path)
}

/// Bottom-center correspondences between two trackers' records that share
/// a person id in the same frame.
pub fn correspondences_from_tracks(a: &[TrackRecord], b: &[TrackRecord]) -> Vec<Correspondence> {
    let index: BTreeMap<(u32, u32), &TrackRecord> = b.iter().map(|r| ((r.frame_id, r.person_id), r)).collect();
    let mut sorted: Vec<&TrackRecord> = a.iter().collect();
    sorted.sort_by_key(|r| (r.frame_id, r.person_id));
    sorted
        .into_iter()
        .filter_map(|r| {
            index.get(&(r.frame_id, r.person_id)).map(|s| Correspondence {
                source: r.bbox.bottom_center(),
                target: s.bbox.bottom_center(),
            })
        })
        .collect()
}

/// `query frame` per line.
pub fn format_loop_gt(gt: &BTreeMap<u32, u32>) -> String {
    gt.iter().map(|(q, f)| format!("{q} {f}\n")).collect()
}

pub fn parse_loop_gt(text: &str, path: &Path) -> Result<BTreeMap<u32, u32>, IoError> {
    let mut out = BTreeMap::new();
    for (n, line) in lines(text) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(parse_err(path, n, "expected `query frame`"));
        }
        if out
            .insert(field(f[0], path, n, "query")?, field(f[1], path, n, "frame")?)
            .is_some()
        {
            return Err(parse_err(path, n, "duplicate query"));
        }
    }
    Ok(out)
}

pub fn read_loop_gt(path: &Path) -> Result<BTreeMap<u32, u32>, IoError> {
    parse_loop_gt(&read_text(path)?, path)
}

pub fn write_loop_gt(path: &Path, gt: &BTreeMap<u32, u32>) -> Result<(), IoError> {
    write_text(path, &format_loop_gt(gt))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeqInfo {
    pub name: String,
    pub frame_rate: u32,
    pub length: u32,
    pub width: usize,
    pub height: usize,
}

pub fn format_seqinfo(s: &SeqInfo) -> String {
    format!(
        "[Sequence]\nname={}\nframeRate={}\nseqLength={}\nimWidth={}\nimHeight={}\n",
        s.name, s.frame_rate, s.length, s.width, s.height
    )
}

pub fn parse_seqinfo(text: &str, path: &Path) -> Result<SeqInfo, IoError> {
    let mut kv = BTreeMap::new();
    for (n, line) in lines(text) {
        let line = line.trim();
        if line == "[Sequence]" {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, n, "expected key=value"))?;
        kv.insert(k.trim().to_string(), (n, v.trim().to_string()));
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| fmt_err(path, format!("missing key {k}")));
    let num = |k: &str| -> Result<u64, IoError> {
        let (n, v) = get(k)?;
        field(v, path, *n, k)
    };
    Ok(SeqInfo {
        name: get("name")?.1.clone(),
        frame_rate: num("frameRate")? as u32,
        length: num("seqLength")? as u32,
        width: num("imWidth")? as usize,
        height: num("imHeight")? as usize,
    })
}

pub fn read_seqinfo(path: &Path) -> Result<SeqInfo, IoError> {
    parse_seqinfo(&read_text(path)?, path)
}

/// Parses and validates a simulator config.
pub fn read_sim_config(path: &Path) -> Result<SimConfig, IoError> {
    let c: SimConfig = serde_json::from_str(&read_text(path)?).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    c.validate().map_err(|e| IoError::Format {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    Ok(c)
}

pub fn write_sim_config(path: &Path, c: &SimConfig) -> Result<(), IoError> {
    let mut s = serde_json::to_string_pretty(c).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    s.push('\n');
    write_text(path, &s)
}

/// File names inside a dataset directory.
pub mod layout {
    pub const SEQINFO: &str = "seqinfo.ini";
    pub const GT: &str = "gt.txt";
    pub const DET_RGB: &str = "det_rgb.txt";
    pub const DET_T: &str = "det_t.txt";
    pub const DET_D: &str = "det_d.txt";
    pub const BRIGHTNESS: &str = "brightness.txt";
    pub const INTENSITY: &str = "intensity.txt";
    pub const MASKS: &str = "masks";
    pub const LOOP_GT: &str = "loop_gt.txt";
    pub const CONFIG: &str = "config.json";
}

/// Writes a simulated dataset in the standard layout.
pub fn write_dataset(dir: &Path, c: &SimConfig, ds: &SimDataset) -> Result<(), IoError> {
    std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    let info = SeqInfo {
        name: "darktrack-sim".into(),
        frame_rate: 30,
        length: ds.n_frames,
        width: ds.width,
        height: ds.height,
    };
    write_text(&dir.join(layout::SEQINFO), &format_seqinfo(&info))?;
    write_sim_config(&dir.join(layout::CONFIG), c)?;
    write_tracks(&dir.join(layout::GT), &ds.gt)?;
    write_detections(&dir.join(layout::DET_RGB), &ds.dets_rgb)?;
    write_detections(&dir.join(layout::DET_T), &ds.dets_t)?;
    write_detections(&dir.join(layout::DET_D), &ds.dets_d)?;
    write_brightness(&dir.join(layout::BRIGHTNESS), &ds.labels)?;
    write_intensity(&dir.join(layout::INTENSITY), &ds.brightness)?;
    write_mask_dir(&dir.join(layout::MASKS), &ds.masks)?;
    if c.camera.is_some() {
        write_loop_gt(&dir.join(layout::LOOP_GT), &ds.gt_loop)?;
    }
    Ok(())
}

/// Annotations for one sequence as found on disk. Missing optional files
/// are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceBundle {
    pub info: SeqInfo,
    pub gt: Option<Vec<TrackRecord>>,
    pub dets_rgb: Option<Vec<Vec<Detection>>>,
    pub dets_t: Option<Vec<Vec<Detection>>>,
    pub dets_d: Option<Vec<Vec<Detection>>>,
    pub masks: Option<BTreeMap<u32, Mask>>,
    pub brightness: Option<BTreeMap<u32, BrightnessLabel>>,
    pub homography: Option<Homography>,
}

fn optional<T>(path: PathBuf, read: impl FnOnce(&Path) -> Result<T, IoError>) -> Result<Option<T>, IoError> {
    if path.exists() {
        read(&path).map(Some)
    } else {
        Ok(None)
    }
}

/// Reads a dataset directory and checks that every referenced frame lies in
/// `1..=seqLength`.
pub fn read_bundle(dir: &Path) -> Result<SequenceBundle, IoError> {
    let info = read_seqinfo(&dir.join(layout::SEQINFO))?;
    let t = info.length;
    let dets = |name: &str| optional(dir.join(name), |p| read_detections(p, t));
    let b = SequenceBundle {
        gt: optional(dir.join(layout::GT), read_tracks)?,
        dets_rgb: dets(layout::DET_RGB)?,
        dets_t: dets(layout::DET_T)?,
        dets_d: dets(layout::DET_D)?,
        masks: optional(dir.join(layout::MASKS), read_mask_dir)?,
        brightness: optional(dir.join(layout::BRIGHTNESS), read_brightness)?,
        homography: optional(dir.join("homography.txt"), read_homography)?,
        info,
    };
    let out_of_range = |what: &str, f: u32| fmt_err(dir, format!("{what} references frame {f} outside 1..={t}"));
    if let Some(gt) = &b.gt {
        if let Some(r) = gt.iter().find(|r| r.frame_id > t) {
            return Err(out_of_range(layout::GT, r.frame_id));
        }
    }
    for (name, d) in [(layout::DET_RGB, &b.dets_rgb), (layout::DET_T, &b.dets_t), (layout::DET_D, &b.dets_d)] {
        if let Some(d) = d {
            if d.len() as u32 > t {
                return Err(out_of_range(name, d.len() as u32));
            }
        }
    }
    if let Some(m) = &b.masks {
        if let Some((&f, _)) = m.iter().find(|(&f, _)| f > t) {
            return Err(out_of_range(layout::MASKS, f));
        }
    }
    if let Some(l) = &b.brightness {
        if let Some((&f, _)) = l.iter().find(|(&f, _)| f > t) {
            return Err(out_of_range(layout::BRIGHTNESS, f));
        }
    }
    Ok(b)
}
