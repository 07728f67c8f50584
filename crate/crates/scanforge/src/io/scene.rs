//! Scene files: one `wall x0 y0 x1 y1 z_lo z_hi` line per panel.
//! Blank lines and `#` comments are skipped.

use std::path::Path;

use crate::raycast::{Scene, Wall};

use super::{read_to_string, write_atomic, IoError, ParseError};

pub fn scene_from_str(s: &str) -> Result<Scene, ParseError> {
    let mut walls = Vec::new();
    for (idx, raw) in s.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        if directive != "wall" {
            return Err(ParseError::new(
                format!("line {lineno}"),
                format!("unknown directive {directive:?}; expected \"wall\""),
            ));
        }
        let mut values = [0f64; 6];
        for v in values.iter_mut() {
            let token = tokens.next().ok_or_else(|| {
                ParseError::new(
                    format!("line {lineno}"),
                    "wall needs 6 values: x0 y0 x1 y1 z_lo z_hi",
                )
            })?;
            *v = token.parse().map_err(|_| {
                ParseError::new(format!("line {lineno}"), format!("invalid number {token:?}"))
            })?;
        }
        if tokens.next().is_some() {
            return Err(ParseError::new(
                format!("line {lineno}"),
                "wall takes exactly 6 values",
            ));
        }
        let wall = Wall::new(
            [values[0], values[1]],
            [values[2], values[3]],
            values[4],
            values[5],
        )
        .map_err(|e| ParseError::new(format!("line {lineno}"), e.to_string()))?;
        walls.push(wall);
    }
    Ok(Scene::new(walls))
}

pub fn scene_to_string(scene: &Scene) -> String {
    let mut out = String::new();
    for w in scene.walls() {
        out.push_str(&format!(
            "wall {:?} {:?} {:?} {:?} {:?} {:?}\n",
            w.p0()[0],
            w.p0()[1],
            w.p1()[0],
            w.p1()[1],
            w.z_lo(),
            w.z_hi(),
        ));
    }
    out
}

pub fn read_scene(path: &Path) -> Result<Scene, IoError> {
    let text = read_to_string(path)?;
    scene_from_str(&text).map_err(|e| IoError::parse(path, e))
}

pub fn write_scene(path: &Path, scene: &Scene) -> Result<(), IoError> {
    write_atomic(path, &scene_to_string(scene))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_walls_and_skips_comments() {
        let text = "# room\n\nwall -2.0 -2 2.0 -2.0 -1.0 1.0\nwall 2 -2 2 2 -1 1\n";
        let scene = scene_from_str(text).unwrap();
        assert_eq!(scene.walls().len(), 2);
        assert_eq!(scene.walls()[1].p1(), [2.0, 2.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = scene_from_str("wall 0 0 1 0 -1 1\nbox 1 2\n").unwrap_err();
        assert_eq!(err.location, "line 2");
        assert!(err.message.contains("box"), "{}", err.message);

        let err = scene_from_str("wall 0 0 1 0 -1\n").unwrap_err();
        assert_eq!(err.location, "line 1");

        let err = scene_from_str("wall 0 0 1 0 -1 oops\n").unwrap_err();
        assert!(err.message.contains("oops"), "{}", err.message);

        // degenerate wall fails through the wall validator
        let err = scene_from_str("wall 1 1 1 1 -1 1\n").unwrap_err();
        assert_eq!(err.location, "line 1");
    }

    #[test]
    fn round_trip_preserves_walls() {
        let scene = scene_from_str("wall -2.5 0.1 3.75 -0.30000000000000004 -1.25 0.5\n").unwrap();
        let back = scene_from_str(&scene_to_string(&scene)).unwrap();
        assert_eq!(back, scene);
    }
}
