//! Constellation hotspots from a Gaussian kernel density estimate.
//!
//! The density is evaluated on a square grid by linear binning followed by
//! a separable Gaussian blur. The two strongest grid maxima are then
//! refined by mean shift on the samples themselves, so a noiseless
//! two-point constellation yields its two points exactly.

use num_complex::{Complex32, Complex64};
use serde::{Deserialize, Serialize};

use crate::channel::IqCapture;
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 1000;
const MAX_CANDIDATES: usize = 16;
/// Two modes whose connecting valley keeps this share of the weaker peak
/// are one lobe.
const VALLEY_MERGE: f64 = 0.995;

/// The two reflection-state cluster centers. `h0` is the denser one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hotspots {
    pub h0: Complex64,
    pub h1: Complex64,
    pub densities: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeConfig {
    /// Grid cells per axis.
    pub grid: usize,
    /// Kernel standard deviation in signal units; Silverman's rule if unset.
    pub bandwidth: Option<f64>,
    /// Samples beyond this are decimated evenly before estimation.
    pub max_samples: usize,
    /// Maxima weaker than this fraction of the strongest are ignored.
    pub min_relative_density: f64,
}

impl Default for KdeConfig {
    fn default() -> Self {
        Self {
            grid: 256,
            bandwidth: None,
            max_samples: 1 << 18,
            min_relative_density: 0.05,
        }
    }
}

struct Grid {
    origin: Complex64,
    cell: f64,
    n: usize,
    density: Vec<f64>,
}

impl Grid {
    fn at(&self, ix: usize, iy: usize) -> f64 {
        self.density[iy * self.n + ix]
    }

    fn point(&self, ix: usize, iy: usize) -> Complex64 {
        self.origin + Complex64::new(ix as f64 * self.cell, iy as f64 * self.cell)
    }

    /// Bilinear density at an arbitrary point; zero off the grid.
    fn sample(&self, p: Complex64) -> f64 {
        let gx = (p.re - self.origin.re) / self.cell;
        let gy = (p.im - self.origin.im) / self.cell;
        let top = (self.n - 1) as f64;
        if !(gx >= 0.0 && gy >= 0.0 && gx <= top && gy <= top) {
            return 0.0;
        }
        let (x0, y0) = ((gx.floor() as usize).min(self.n - 2), (gy.floor() as usize).min(self.n - 2));
        let (fx, fy) = (gx - x0 as f64, gy - y0 as f64);
        self.at(x0, y0) * (1.0 - fx) * (1.0 - fy)
            + self.at(x0 + 1, y0) * fx * (1.0 - fy)
            + self.at(x0, y0 + 1) * (1.0 - fx) * fy
            + self.at(x0 + 1, y0 + 1) * fx * fy
    }

    /// Lowest density on the segment from `a` to `b`.
    fn valley(&self, a: Complex64, b: Complex64) -> f64 {
        let steps = ((b - a).norm() / self.cell).ceil().max(1.0) as usize;
        (0..=steps)
            .map(|i| self.sample(a + (b - a) * (i as f64 / steps as f64)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn gaussian_kernel(sigma_cells: f64) -> Vec<f64> {
    let radius = (4.0 * sigma_cells).ceil().max(1.0) as isize;
    let k: Vec<f64> = (-radius..=radius)
        .map(|i| (-0.5 * (i as f64 / sigma_cells.max(1e-3)).powi(2)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.into_iter().map(|v| v / s).collect()
}

fn blur_rows(data: &[f64], n: usize, kernel: &[f64]) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; data.len()];
    for y in 0..n {
        let row = &data[y * n..(y + 1) * n];
        for x in 0..n {
            let mut acc = 0.0;
            for (k, &w) in kernel.iter().enumerate() {
                let xx = x as isize + k as isize - r;
                if (0..n as isize).contains(&xx) {
                    acc += w * row[xx as usize];
                }
            }
            out[y * n + x] = acc;
        }
    }
    out
}

fn transpose(data: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for y in 0..n {
        for x in 0..n {
            out[x * n + y] = data[y * n + x];
        }
    }
    out
}

fn decimate(samples: &[Complex32], max: usize) -> Vec<Complex64> {
    let stride = samples.len().div_ceil(max.max(1)).max(1);
    samples
        .iter()
        .step_by(stride)
        .map(|s| Complex64::new(s.re as f64, s.im as f64))
        .collect()
}

/// Isotropic Silverman bandwidth for two dimensions, `sigma * n^(-1/6)`.
fn silverman(pts: &[Complex64], mean: Complex64) -> f64 {
    let n = pts.len() as f64;
    let var = pts.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / (2.0 * n);
    var.sqrt() * n.powf(-1.0 / 6.0)
}

fn build_grid(pts: &[Complex64], mean: Complex64, half_width: f64, h: f64, n: usize) -> Grid {
    let origin = mean - Complex64::new(half_width, half_width);
    let cell = 2.0 * half_width / (n - 1) as f64;
    let mut hist = vec![0.0; n * n];
    for p in pts {
        let gx = (p.re - origin.re) / cell;
        let gy = (p.im - origin.im) / cell;
        if !(gx >= 0.0 && gy >= 0.0 && gx < (n - 1) as f64 && gy < (n - 1) as f64) {
            continue;
        }
        let (x0, y0) = (gx.floor() as usize, gy.floor() as usize);
        let (fx, fy) = (gx - x0 as f64, gy - y0 as f64);
        hist[y0 * n + x0] += (1.0 - fx) * (1.0 - fy);
        hist[y0 * n + x0 + 1] += fx * (1.0 - fy);
        hist[(y0 + 1) * n + x0] += (1.0 - fx) * fy;
        hist[(y0 + 1) * n + x0 + 1] += fx * fy;
    }
    let kernel = gaussian_kernel(h / cell);
    let rows = blur_rows(&hist, n, &kernel);
    let cols = blur_rows(&transpose(&rows, n), n, &kernel);
    Grid {
        origin,
        cell,
        n,
        density: transpose(&cols, n),
    }
}

/// Strict local maxima against earlier neighbors, non-strict against later
/// ones, so a flat top yields exactly one maximum.
fn local_maxima(g: &Grid) -> Vec<(usize, usize, f64)> {
    let n = g.n as isize;
    let mut out = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let v = g.at(ix as usize, iy as usize);
            if v <= 0.0 {
                continue;
            }
            let mut is_max = true;
            'nb: for dy in -1..=1 {
                for dx in -1..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (x, y) = (ix + dx, iy + dy);
                    if !(0..n).contains(&x) || !(0..n).contains(&y) {
                        continue;
                    }
                    let w = g.at(x as usize, y as usize);
                    let earlier = (dy, dx) < (0, 0);
                    if w > v || (earlier && w == v) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                out.push((ix as usize, iy as usize, v));
            }
        }
    }
    out
}

fn mean_shift(pts: &[Complex64], start: Complex64, h: f64) -> Complex64 {
    let inv = 1.0 / (2.0 * h * h);
    let mut m = start;
    for _ in 0..200 {
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for p in pts {
            let w = (-(p - m).norm_sqr() * inv).exp();
            num += p * w;
            den += w;
        }
        if den == 0.0 {
            break;
        }
        let next = num / den;
        let moved = (next - m).norm();
        m = next;
        if moved <= 1e-12 * h.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    m
}

pub fn find_hotspots(capture: &IqCapture, cfg: &KdeConfig) -> Result<Hotspots> {
    find_hotspots_in(&capture.samples, cfg)
}

pub fn find_hotspots_in(samples: &[Complex32], cfg: &KdeConfig) -> Result<Hotspots> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooShort {
            need: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if cfg.grid < 8 {
        return Err(Error::InvalidParameter("KDE grid needs at least 8 cells".into()));
    }
    let pts = decimate(samples, cfg.max_samples);
    let n = pts.len() as f64;
    let mean = pts.iter().sum::<Complex64>() / n;
    let sd_re = (pts.iter().map(|p| (p.re - mean.re).powi(2)).sum::<f64>() / n).sqrt();
    let sd_im = (pts.iter().map(|p| (p.im - mean.im).powi(2)).sum::<f64>() / n).sqrt();
    let half_width = 3.0 * sd_re.max(sd_im);
    if !(half_width > 0.0) {
        return Err(Error::DegenerateConstellation("all samples coincide".into()));
    }
    let h = match cfg.bandwidth {
        Some(b) if b > 0.0 => b,
        Some(b) => return Err(Error::InvalidParameter(format!("KDE bandwidth {b} must be positive"))),
        None => silverman(&pts, mean),
    };
    let grid = build_grid(&pts, mean, half_width, h, cfg.grid);
    let mut maxima = local_maxima(&grid);
    maxima.sort_by(|a, b| b.2.total_cmp(&a.2));
    let top = maxima.first().map(|m| m.2).unwrap_or(0.0);
    maxima.retain(|m| m.2 >= cfg.min_relative_density * top);
    if maxima.len() < 2 {
        return Err(Error::DegenerateConstellation(format!(
            "found {} density maxima",
            maxima.len()
        )));
    }
    // Noise ripples put several grid maxima on one lobe. Each candidate is
    // climbed to its mode; two modes stay distinct only if the density
    // dips between them.
    let mut modes: Vec<(Complex64, f64)> = Vec::new();
    for m in maxima.iter().take(MAX_CANDIDATES) {
        let c = mean_shift(&pts, grid.point(m.0, m.1), h);
        let dc = grid.sample(c);
        let merged = modes.iter().any(|&(o, d)| {
            (o - c).norm() <= grid.cell || grid.valley(o, c) >= VALLEY_MERGE * d.min(dc)
        });
        if !merged {
            modes.push((c, dc));
        }
    }
    if modes.len() < 2 {
        return Err(Error::DegenerateConstellation(
            "density maxima converge to one center".into(),
        ));
    }
    Ok(Hotspots {
        h0: modes[0].0,
        h1: modes[1].0,
        densities: (modes[0].1, modes[1].1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn blob(rng: &mut ChaCha8Rng, center: Complex64, sd: f64, n: usize) -> Vec<Complex32> {
        (0..n)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                Complex32::new((center.re + sd * a) as f32, (center.im + sd * b) as f32)
            })
            .collect()
    }

    #[test]
    fn two_blobs_two_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = blob(&mut rng, Complex64::new(0.0, 0.0), 0.08, 20_000);
        s.extend(blob(&mut rng, Complex64::new(1.0, 0.0), 0.08, 10_000));
        let cfg = KdeConfig::default();
        let h = find_hotspots_in(&s, &cfg).unwrap();
        // One grid cell of the 3-sigma box.
        let cell = 6.0 * 0.48 / 255.0;
        assert!(h.h0.norm() < cell, "{:?}", h.h0);
        assert!((h.h1 - Complex64::new(1.0, 0.0)).norm() < cell, "{:?}", h.h1);
        assert!(h.densities.0 > h.densities.1);
    }

    #[test]
    fn single_blob_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = blob(&mut rng, Complex64::new(0.3, -0.2), 0.1, 20_000);
        assert!(matches!(
            find_hotspots_in(&s, &KdeConfig::default()),
            Err(Error::DegenerateConstellation(_))
        ));
    }

    #[test]
    fn too_few_samples() {
        let s = vec![Complex32::new(0.0, 0.0); 10];
        assert!(matches!(
            find_hotspots_in(&s, &KdeConfig::default()),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn exact_two_point_constellation() {
        let a = Complex32::new(1.25, 0.5);
        let b = Complex32::new(1.5, 0.25);
        let s: Vec<Complex32> = (0..3000).map(|i| if i % 3 == 0 { b } else { a }).collect();
        let h = find_hotspots_in(&s, &KdeConfig::default()).unwrap();
        let (a, b) = (
            Complex64::new(a.re as f64, a.im as f64),
            Complex64::new(b.re as f64, b.im as f64),
        );
        assert!((h.h0 - a).norm() < 1e-9);
        assert!((h.h1 - b).norm() < 1e-9);
    }
}
