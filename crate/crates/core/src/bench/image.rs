//! C-space visualization: binary portable pixmaps with the grid truth as
//! background, model mismatches as an overlay mask, and support points as
//! marked pixels.

use super::BenchError;
use crate::fastron::{FastronModel, C_OBS};
use crate::geometry::LabelGrid;
use std::io::Write;
use std::path::Path;

const FREE_RGB: [u8; 3] = [245, 245, 245];
const OBS_RGB: [u8; 3] = [60, 60, 60];
const MISMATCH_RGB: [u8; 3] = [220, 60, 50];
const SUPPORT_RGB: [u8; 3] = [40, 80, 230];

/// Summary returned alongside the written file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageStats {
    pub width: usize,
    pub height: usize,
    /// Fraction of rendered pixels where the model disagrees with truth;
    /// 0 without a model.
    pub mismatch_fraction: f64,
    pub support_pixels: usize,
}

/// Renders `grid` (2 joints directly; 3 joints as the middle slice of the
/// third) to a binary PPM at `path`.
pub fn export_cspace_image(
    grid: &LabelGrid,
    model: Option<&FastronModel>,
    path: &Path,
) -> Result<ImageStats, BenchError> {
    let dof = grid.resolution.len();
    if dof != 2 && dof != 3 {
        return Err(BenchError::Image(format!(
            "image export supports 2 or 3 joints, got {dof}"
        )));
    }
    let (w, h) = (grid.resolution[0], grid.resolution[1]);
    let slice = if dof == 3 { Some(grid.resolution[2] / 2) } else { None };

    let mut pixels = vec![0u8; w * h * 3];
    let mut mismatches = 0usize;
    for ix in 0..w {
        for iy in 0..h {
            let idx: Vec<usize> = match slice {
                Some(iz) => vec![ix, iy, iz],
                None => vec![ix, iy],
            };
            let truth = grid.labels[grid.flat_index(&idx)];
            let mut rgb = if truth == C_OBS { OBS_RGB } else { FREE_RGB };
            if let Some(model) = model {
                let q = grid.config_at(&idx);
                let (pred, _) = model.query(&q).map_err(|e| BenchError::Image(e.to_string()))?;
                if pred != truth {
                    rgb = MISMATCH_RGB;
                    mismatches += 1;
                }
            }
            put(&mut pixels, w, h, ix, iy, rgb);
        }
    }

    let mut support_pixels = 0usize;
    if let Some(model) = model {
        for q in model.support() {
            let Some((ix, iy)) = support_pixel(grid, q, slice) else { continue };
            put(&mut pixels, w, h, ix, iy, SUPPORT_RGB);
            support_pixels += 1;
        }
    }

    let mut f = std::fs::File::create(path)?;
    write!(f, "P6\n{w} {h}\n255\n")?;
    f.write_all(&pixels)?;
    Ok(ImageStats {
        width: w,
        height: h,
        mismatch_fraction: mismatches as f64 / (w * h) as f64,
        support_pixels,
    })
}

/// Pixel layout: x right = joint 0 increasing, y down = joint 1 decreasing.
fn put(pixels: &mut [u8], w: usize, h: usize, ix: usize, iy: usize, rgb: [u8; 3]) {
    let row = h - 1 - iy;
    let off = (row * w + ix) * 3;
    pixels[off..off + 3].copy_from_slice(&rgb);
}

/// Maps a support configuration to its nearest grid pixel; for sliced 3-DOF
/// grids only configurations within half a grid cell of the slice plane are
/// drawn.
fn support_pixel(grid: &LabelGrid, q: &crate::kinematics::Configuration, slice: Option<usize>) -> Option<(usize, usize)> {
    let index_of = |d: usize| -> Option<usize> {
        let (lo, hi) = grid.joint_limits[d];
        let r = grid.resolution[d];
        if r < 2 || hi <= lo {
            return Some(0);
        }
        let t = (q[d] - lo) / (hi - lo);
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        Some((t * (r - 1) as f64).round() as usize)
    };
    let ix = index_of(0)?;
    let iy = index_of(1)?;
    if let Some(iz) = slice {
        let want = iz as f64;
        let got = {
            let (lo, hi) = grid.joint_limits[2];
            (q[2] - lo) / (hi - lo) * (grid.resolution[2] - 1) as f64
        };
        if (got - want).abs() > 0.5 {
            return None;
        }
    }
    Some((ix, iy))
}

/// Minimal binary-PPM reader used for round-trip tests.
pub fn parse_ppm(path: &Path) -> Result<(usize, usize, Vec<u8>), BenchError> {
    let bytes = std::fs::read(path)?;
    let mut pos = 0usize;
    let mut token = || -> Result<String, BenchError> {
        // Skip whitespace and `#` comments.
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
        if start == pos {
            return Err(BenchError::Image("truncated ppm header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = token()?;
    if magic != "P6" {
        return Err(BenchError::Image(format!("expected P6 magic, got {magic}")));
    }
    let w: usize = token()?.parse().map_err(|_| BenchError::Image("bad width".into()))?;
    let h: usize = token()?.parse().map_err(|_| BenchError::Image("bad height".into()))?;
    let maxval: usize = token()?.parse().map_err(|_| BenchError::Image("bad maxval".into()))?;
    if maxval != 255 {
        return Err(BenchError::Image(format!("unsupported maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = w * h * 3;
    if bytes.len() < pos + need {
        return Err(BenchError::Image("truncated ppm raster".into()));
    }
    Ok((w, h, bytes[pos..pos + need].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fastron::C_FREE;

    fn flat_grid(res: Vec<usize>, label: f64) -> LabelGrid {
        let total: usize = res.iter().product();
        LabelGrid {
            joint_limits: res.iter().map(|_| (-1.0, 1.0)).collect(),
            labels: vec![label; total],
            resolution: res,
        }
    }

    #[test]
    fn all_free_grid_renders_uniform_background() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("img.ppm");
        let grid = flat_grid(vec![8, 6], C_FREE);
        let stats = export_cspace_image(&grid, None, &file).unwrap();
        assert_eq!(stats.mismatch_fraction, 0.0);
        let (w, h, data) = parse_ppm(&file).unwrap();
        assert_eq!((w, h), (8, 6));
        assert!(data.chunks(3).all(|px| px == FREE_RGB));
    }

    #[test]
    fn three_dof_uses_middle_slice() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("img.ppm");
        let mut grid = flat_grid(vec![4, 4, 5], C_FREE);
        // Mark the whole slice iz=2 as C_obs; other slices stay free.
        for ix in 0..4 {
            for iy in 0..4 {
                let i = grid.flat_index(&[ix, iy, 2]);
                grid.labels[i] = C_OBS;
            }
        }
        export_cspace_image(&grid, None, &file).unwrap();
        let (_, _, data) = parse_ppm(&file).unwrap();
        assert!(data.chunks(3).all(|px| px == OBS_RGB));
    }

    #[test]
    fn unsupported_dof_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let grid = flat_grid(vec![2, 2, 2, 2], C_FREE);
        assert!(export_cspace_image(&grid, None, &dir.path().join("x.ppm")).is_err());
    }

    #[test]
    fn ppm_parser_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("bad.ppm");
        std::fs::write(&file, b"P3\n1 1\n255\n0 0 0\n").unwrap();
        assert!(parse_ppm(&file).is_err());
        std::fs::write(&file, b"P6\n4 4\n255\nxx").unwrap();
        assert!(parse_ppm(&file).is_err());
    }
}
