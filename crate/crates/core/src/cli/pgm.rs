//! Plain (P2) PGM frames.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    /// Row-major gray levels.
    pub pixels: Vec<u32>,
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
}

pub fn parse(text: &str) -> Result<PgmImage> {
    let mut it = tokens(text);
    let mut header = |what: &str| -> Result<&str> {
        it.next()
            .ok_or_else(|| Error::Format(format!("PGM header ends before {what}")))
    };
    let magic = header("magic")?;
    if magic != "P2" {
        return Err(Error::Format(format!("expected plain PGM magic P2, found {magic:?}")));
    }
    let num = |tok: &str, what: &str| -> Result<u32> {
        tok.parse::<u32>()
            .map_err(|_| Error::Format(format!("bad PGM {what} {tok:?}")))
    };
    let width = num(header("width")?, "width")? as usize;
    let height = num(header("height")?, "height")? as usize;
    let maxval = num(header("maxval")?, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Format("PGM has zero width or height".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("PGM maxval {maxval} outside 1..=65535")));
    }
    let pixels = it
        .by_ref()
        .take(width * height)
        .map(|tok| {
            let v = num(tok, "pixel")?;
            if v > maxval {
                return Err(Error::Format(format!("pixel {v} exceeds maxval {maxval}")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    if pixels.len() != width * height {
        return Err(Error::Format(format!(
            "PGM has {} pixels, expected {}",
            pixels.len(),
            width * height
        )));
    }
    if it.next().is_some() {
        return Err(Error::Format("unexpected data after PGM pixels".into()));
    }
    Ok(PgmImage { width, height, maxval, pixels })
}

fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Stacks the `.pgm` frames of a directory, in lexicographic file-name order,
/// into a `height × width × frames` tensor scaled to `[0, 1]` by each frame's
/// maxval.
pub fn import_dir(dir: &Path) -> Result<Tensor> {
    let paths = frame_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::Format(format!("no .pgm frames in {}", dir.display())));
    }
    let frames = paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)?;
            parse(&text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let (h, w) = (frames[0].height, frames[0].width);
    if let Some((p, f)) = paths
        .iter()
        .zip(&frames)
        .find(|(_, f)| f.height != h || f.width != w)
    {
        return Err(Error::Format(format!(
            "mixed frame dimensions: {} is {}×{}, expected {}×{}",
            p.display(),
            f.height,
            f.width,
            h,
            w
        )));
    }
    Tensor::from_fn(vec![h, w, frames.len()], |i| {
        let f = &frames[i[2]];
        f.pixels[i[0] * w + i[1]] as f64 / f.maxval as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_odd_spacing() {
        let img = parse("P2\n# a comment\n3 2 # trailing\n 10\n0 1 2\n3\t4 10\n").unwrap();
        assert_eq!((img.width, img.height, img.maxval), (3, 2, 10));
        assert_eq!(img.pixels, vec![0, 1, 2, 3, 4, 10]);
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(parse("P5\n1 1\n255\n0").is_err());
        assert!(parse("P2\n1 1\n70000\n0").is_err());
        assert!(parse("P2\n2 1\n255\n0").is_err());
        assert!(parse("P2\n1 1\n255\n300").is_err());
        assert!(parse("P2\n1 1\n255\n3 4").is_err());
        assert!(parse("P2\nx 1\n255\n3").is_err());
    }
}
