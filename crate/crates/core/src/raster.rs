//! Parameter-plane rasters of the `(t, a)` plane written as binary PGM.
//!
//! Rows run from the largest `a` (top of the file) to the smallest, so `a`
//! increases upward; columns run left to right in increasing `t`.

use std::io::{self, Write};

use log::warn;
use rayon::prelude::*;

use crate::circle_map::{FamilySpec, ParamPoint};
use crate::rotation::trans_estimate;
use crate::tongue::{Fraction, TongueSolver};
use crate::{Error, Result};

/// Gray value of pixels inside a tongue in mask mode.
pub const MASK_SET: u8 = 0;
pub const MASK_CLEAR: u8 = 255;

#[derive(Clone, Debug, PartialEq)]
pub enum RasterMode {
    /// Gray level `round(frac(Trans)·255)`.
    TransGray,
    /// Black where `(t, a)` lies in one of the listed tongues or an integer
    /// translate of it.
    TongueMask(Vec<Fraction>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RasterConfig {
    pub family: FamilySpec,
    pub t_range: (f64, f64),
    pub a_range: (f64, f64),
    pub width_px: usize,
    pub height_px: usize,
    pub iterations: u64,
    pub mode: RasterMode,
}

impl RasterConfig {
    pub fn validate(&self) -> Result<()> {
        let (t0, t1) = self.t_range;
        let (a0, a1) = self.a_range;
        if !(t0 < t1) || !(a0 <= a1) {
            return Err(Error::InvalidArgument(format!(
                "empty raster window t {:?}, a {:?}",
                self.t_range, self.a_range
            )));
        }
        if self.width_px < 2 || self.height_px < 2 {
            return Err(Error::InvalidArgument("raster needs at least 2x2 pixels".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iteration count must be positive".into()));
        }
        Ok(())
    }

    /// `t` at column `j`; the last column lands exactly on `t_range.1`.
    pub fn t_at(&self, j: usize) -> f64 {
        let (t0, t1) = self.t_range;
        t0 + (j as f64 * (t1 - t0)) / (self.width_px - 1) as f64
    }

    /// `a` at file row `i` (row 0 is the top, largest `a`).
    pub fn a_at(&self, i: usize) -> f64 {
        let (a0, a1) = self.a_range;
        a1 - (i as f64 * (a1 - a0)) / (self.height_px - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major gray levels, top row first.
    pub pixels: Vec<u8>,
    /// File rows whose `a` fell outside the family range.
    pub skipped_rows: Vec<usize>,
    header_comment: String,
}

impl Raster {
    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P5\n# {}\n{} {}\n255\n", self.header_comment, self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.pixels.len() + 128);
        self.write_pgm(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }
}

fn gray_row(cfg: &RasterConfig, a: f64) -> Result<Vec<u8>> {
    (0..cfg.width_px)
        .map(|j| {
            let v = trans_estimate(&cfg.family, ParamPoint::new(cfg.t_at(j), a), cfg.iterations)?;
            Ok(((v - v.floor()) * 255.0).round().min(255.0) as u8)
        })
        .collect()
}

/// Integer translates `(p + kq)/q` of `frac` whose value lies within one unit
/// of the window.
fn translates(frac: Fraction, t_range: (f64, f64)) -> Vec<Fraction> {
    let q = frac.q() as i64;
    let lo = (t_range.0 - 1.0).floor() as i64 - 1;
    let hi = (t_range.1 + 1.0).ceil() as i64 + 1;
    (lo..=hi)
        .filter_map(|k| Fraction::new(frac.p() + k * q, q).ok())
        .filter(|f| f.value() >= t_range.0 - 1.0 && f.value() <= t_range.1 + 1.0)
        .collect()
}

fn mask_row(cfg: &RasterConfig, solver: &TongueSolver, fracs: &[Fraction], a: f64) -> Result<Vec<u8>> {
    let mut row = vec![MASK_CLEAR; cfg.width_px];
    for &frac in fracs {
        match solver.boundary_at(&cfg.family, frac, a) {
            Ok(s) => {
                for (j, px) in row.iter_mut().enumerate() {
                    let t = cfg.t_at(j);
                    if s.t_left <= t && t <= s.t_right {
                        *px = MASK_SET;
                    }
                }
            }
            Err(Error::BracketFailure { .. }) => {
                warn!("bracket failed for {frac} at a = {a}; classifying pixels one by one");
                for (j, px) in row.iter_mut().enumerate() {
                    if solver.classify(&cfg.family, frac, cfg.t_at(j), a)?.in_tongue() {
                        *px = MASK_SET;
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(row)
}

/// Renders the raster. Rows are computed in parallel and assembled in order,
/// so the output does not depend on the thread count.
pub fn render(cfg: &RasterConfig) -> Result<Raster> {
    cfg.validate()?;
    let solver = TongueSolver::default();
    let fracs: Vec<Fraction> = match &cfg.mode {
        RasterMode::TransGray => Vec::new(),
        RasterMode::TongueMask(list) => list.iter().flat_map(|&f| translates(f, cfg.t_range)).collect(),
    };
    let background = match cfg.mode {
        RasterMode::TransGray => 0,
        RasterMode::TongueMask(_) => MASK_CLEAR,
    };
    let rows: Vec<Result<Option<Vec<u8>>>> = (0..cfg.height_px)
        .into_par_iter()
        .map(|i| {
            let a = cfg.a_at(i);
            if cfg.family.check_a(a).is_err() {
                return Ok(None);
            }
            let row = match cfg.mode {
                RasterMode::TransGray => gray_row(cfg, a)?,
                RasterMode::TongueMask(_) => mask_row(cfg, &solver, &fracs, a)?,
            };
            Ok(Some(row))
        })
        .collect();
    let mut pixels = Vec::with_capacity(cfg.width_px * cfg.height_px);
    let mut skipped_rows = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        match row? {
            Some(r) => pixels.extend_from_slice(&r),
            None => {
                warn!("row {i} (a = {}) is outside the family range; left blank", cfg.a_at(i));
                skipped_rows.push(i);
                pixels.extend(std::iter::repeat_n(background, cfg.width_px));
            }
        }
    }
    let mode = match &cfg.mode {
        RasterMode::TransGray => "trans-gray".to_string(),
        RasterMode::TongueMask(list) => {
            let names: Vec<String> = list.iter().map(|f| f.to_string()).collect();
            format!("tongue-mask {}", names.join(","))
        }
    };
    let header_comment = format!(
        "{mode}; row-major; rows a from {} (top) down to {}; columns t from {} (left) to {}; n={}",
        cfg.a_range.1, cfg.a_range.0, cfg.t_range.0, cfg.t_range.1, cfg.iterations
    );
    Ok(Raster { width: cfg.width_px, height: cfg.height_px, pixels, skipped_rows, header_comment })
}
