//! Zero counting by the argument principle, with subdivision and Newton
//! refinement.

use std::cell::Cell;

use num_complex::Complex;
use serde::Serialize;

use super::{CharacterId, LFunction};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed rectangle `[sigma_lo, sigma_hi] × [t_lo, t_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect<T> {
    pub sigma_lo: T,
    pub sigma_hi: T,
    pub t_lo: T,
    pub t_hi: T,
}

impl<T: Real> Rect<T> {
    pub fn new(sigma_lo: T, sigma_hi: T, t_lo: T, t_hi: T) -> Self {
        Rect { sigma_lo, sigma_hi, t_lo, t_hi }
    }

    pub fn width(&self) -> T {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> T {
        self.t_hi - self.t_lo
    }

    pub fn has_area(&self) -> bool {
        self.width() > T::zero() && self.height() > T::zero()
    }

    pub fn contains(&self, z: Complex<T>, slack: T) -> bool {
        z.re >= self.sigma_lo - slack
            && z.re <= self.sigma_hi + slack
            && z.im >= self.t_lo - slack
            && z.im <= self.t_hi + slack
    }

    fn center(&self) -> Complex<T> {
        let half = T::lit(0.5);
        Complex::new((self.sigma_lo + self.sigma_hi) * half, (self.t_lo + self.t_hi) * half)
    }

    fn corners(&self) -> [Complex<T>; 4] {
        [
            Complex::new(self.sigma_lo, self.t_lo),
            Complex::new(self.sigma_hi, self.t_lo),
            Complex::new(self.sigma_hi, self.t_hi),
            Complex::new(self.sigma_lo, self.t_hi),
        ]
    }

    fn grow(&self, by: T) -> Self {
        Rect::new(self.sigma_lo - by, self.sigma_hi + by, self.t_lo - by, self.t_hi + by)
    }

    /// Splits across the longer side at `frac` of its length.
    fn split(&self, frac: T) -> (Self, Self) {
        if self.width() >= self.height() {
            let mid = self.sigma_lo + self.width() * frac;
            (
                Rect::new(self.sigma_lo, mid, self.t_lo, self.t_hi),
                Rect::new(mid, self.sigma_hi, self.t_lo, self.t_hi),
            )
        } else {
            let mid = self.t_lo + self.height() * frac;
            (
                Rect::new(self.sigma_lo, self.sigma_hi, self.t_lo, mid),
                Rect::new(self.sigma_lo, self.sigma_hi, mid, self.t_hi),
            )
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions<T> {
    /// Cells smaller than this in both directions are not subdivided further.
    pub resolution: T,
    /// Absolute evaluation tolerance.
    pub tol: T,
}

impl Default for ScanOptions<f64> {
    fn default() -> Self {
        ScanOptions { resolution: 1e-3, tol: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Zero<T> {
    pub beta: T,
    pub gamma: T,
    /// `|L(β + iγ)|` at the refined point.
    pub residual: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroScanReport<T> {
    pub character: CharacterId,
    pub requested: Rect<T>,
    /// The rectangle actually scanned; differs from `requested` when the
    /// boundary had to be moved off a suspected zero.
    pub scanned: Rect<T>,
    pub perturbed: bool,
    pub count: usize,
    pub zeros: Vec<Zero<T>>,
    pub resolution: T,
    pub evaluations: usize,
    pub caveat: String,
}

const CAVEAT: &str = "floating-point argument principle, not interval-certified; \
zeros closer together than the resolution or hugging the boundary may be merged or displaced";

/// Split positions tried in turn when a cut line runs into a zero.
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.4637, 0.5371, 0.4213, 0.5829];
/// Outward boundary shifts (in units of the resolution) tried when the
/// requested boundary passes through a zero.
const BOUNDARY_SHIFTS: [f64; 4] = [0.0, 0.37, 0.79, 1.63];
const MAX_EDGE_DEPTH: u32 = 48;

pub(crate) struct Scanner<'a, T: Real> {
    lf: &'a LFunction<T>,
    opts: ScanOptions<T>,
    evals: Cell<usize>,
}

impl<'a, T: Real> Scanner<'a, T> {
    pub(crate) fn new(lf: &'a LFunction<T>, opts: ScanOptions<T>) -> Self {
        Scanner { lf, opts, evals: Cell::new(0) }
    }

    fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.evals.set(self.evals.get() + 1);
        let v = self.lf.entire_value(z)?;
        if v.norm() <= T::lit(10.0) * self.opts.tol {
            return Err(Error::BoundaryZeroSuspected {
                re: z.re.to_f64().unwrap_or(f64::NAN),
                im: z.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(v)
    }

    /// Change of argument along the segment `a → b`.
    fn edge_phase(&self, a: Complex<T>, va: Complex<T>, b: Complex<T>, vb: Complex<T>) -> Result<T> {
        let len = (b - a).norm();
        let pieces = (len / T::lit(0.25)).ceil().to_usize().unwrap_or(1).max(2);
        let limit = T::FRAC_PI_4();
        let ratio_limit = T::lit(2.0).ln();
        let mut total = T::zero();
        let mut prev = (a, va);
        for i in 1..=pieces {
            let z = if i == pieces {
                b
            } else {
                a + (b - a) * (T::from_usize(i).unwrap() / T::from_usize(pieces).unwrap())
            };
            let v = if i == pieces { vb } else { self.value(z)? };
            let mut stack = vec![(prev.0, prev.1, z, v, 0u32)];
            while let Some((za, fa, zb, fb, depth)) = stack.pop() {
                let r = fb / fa;
                let dtheta = r.arg();
                if dtheta.abs() < limit && r.norm().ln().abs() < ratio_limit {
                    total += dtheta;
                    continue;
                }
                let zm = (za + zb) * T::lit(0.5);
                if depth >= MAX_EDGE_DEPTH {
                    return Err(Error::BoundaryZeroSuspected {
                        re: zm.re.to_f64().unwrap_or(f64::NAN),
                        im: zm.im.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let fm = self.value(zm)?;
                // Pushed in reverse so segments are consumed left to right.
                stack.push((zm, fm, zb, fb, depth + 1));
                stack.push((za, fa, zm, fm, depth + 1));
            }
            prev = (z, v);
        }
        Ok(total)
    }

    /// Number of zeros inside `rect`, counted with multiplicity.
    pub(crate) fn winding(&self, rect: &Rect<T>) -> Result<i64> {
        let corners = rect.corners();
        let mut vals = [Complex::new(T::zero(), T::zero()); 4];
        for (v, &z) in vals.iter_mut().zip(&corners) {
            *v = self.value(z)?;
        }
        let mut total = T::zero();
        for i in 0..4 {
            let j = (i + 1) % 4;
            total += self.edge_phase(corners[i], vals[i], corners[j], vals[j])?;
        }
        let turns = total / (T::PI() + T::PI());
        let rounded = turns.round();
        if (turns - rounded).abs() > T::lit(0.1) {
            return Err(Error::ResolutionExhausted(format!("non-integral winding {turns}")));
        }
        Ok(rounded.to_i64().unwrap_or(0))
    }

    fn newton(&self, start: Complex<T>) -> Option<Complex<T>> {
        let step_tol = T::epsilon().sqrt() * T::lit(1e-2);
        let mut z = start;
        let mut settled = 0;
        for _ in 0..80 {
            self.evals.set(self.evals.get() + 1);
            let (v, d) = self.lf.entire_part(z).ok()?;
            if d.norm() == T::zero() {
                return None;
            }
            let step = v / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z -= step;
            if self.lf.is_real() && z.im.abs() < T::lit(1e-7) {
                z.im = T::zero();
            }
            if step.norm() <= step_tol * z.norm().max(T::one()) {
                settled += 1;
                if settled >= 2 {
                    return Some(z);
                }
            }
        }
        None
    }

    fn zero_at(&self, z: Complex<T>) -> Result<Zero<T>> {
        let residual = self.lf.eval(z).map(|v| v.norm()).unwrap_or_else(|_| T::zero());
        Ok(Zero { beta: z.re, gamma: z.im, residual })
    }

    /// Locates the `w` zeros inside `rect`.
    fn resolve(&self, rect: &Rect<T>, w: i64, out: &mut Vec<Zero<T>>) -> Result<()> {
        if w <= 0 {
            return Ok(());
        }
        let slack = T::epsilon().sqrt() * T::lit(1e-3);
        if w == 1 {
            let c = rect.center();
            let starts = [
                c,
                Complex::new(c.re, rect.t_lo + rect.height() * T::lit(0.25)),
                Complex::new(c.re, rect.t_lo + rect.height() * T::lit(0.75)),
                Complex::new(rect.sigma_lo + rect.width() * T::lit(0.25), c.im),
                Complex::new(rect.sigma_lo + rect.width() * T::lit(0.75), c.im),
            ];
            for s in starts {
                if let Some(z) = self.newton(s) {
                    if rect.contains(z, slack) {
                        out.push(self.zero_at(z)?);
                        return Ok(());
                    }
                }
            }
        }
        if rect.width() < self.opts.resolution && rect.height() < self.opts.resolution {
            return Err(Error::ResolutionExhausted(format!(
                "{w} zero(s) unresolved in a cell of size {} × {} near {}",
                rect.width(),
                rect.height(),
                rect.center()
            )));
        }
        let mut last_err = None;
        for frac in SPLIT_FRACTIONS {
            let (a, b) = rect.split(T::lit(frac));
            let counts = self.winding(&a).and_then(|wa| Ok((wa, self.winding(&b)?)));
            match counts {
                Ok((wa, wb)) if wa + wb == w && wa >= 0 && wb >= 0 => {
                    self.resolve(&a, wa, out)?;
                    return self.resolve(&b, wb, out);
                }
                Ok((wa, wb)) => {
                    last_err = Some(Error::ResolutionExhausted(format!(
                        "split counts {wa} + {wb} disagree with {w}"
                    )))
                }
                Err(e @ Error::BoundaryZeroSuspected { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("at least one split tried"))
    }

    pub(crate) fn evaluations(&self) -> usize {
        self.evals.get()
    }
}

/// Counts and locates the zeros of `L(s, χ)` in `rect`.
pub fn scan_zeros<T: Real>(
    chi: &DirichletCharacter,
    rect: Rect<T>,
    opts: ScanOptions<T>,
) -> Result<ZeroScanReport<T>> {
    let lf = LFunction::new(chi, opts.tol)?;
    scan_lfunction(&lf, rect, opts)
}

pub(crate) fn scan_lfunction<T: Real>(
    lf: &LFunction<T>,
    rect: Rect<T>,
    opts: ScanOptions<T>,
) -> Result<ZeroScanReport<T>> {
    if !rect.has_area() {
        return Err(Error::DegenerateRegion(format!(
            "[{}, {}] × [{}, {}]",
            rect.sigma_lo, rect.sigma_hi, rect.t_lo, rect.t_hi
        )));
    }
    if !(opts.resolution > T::zero()) || !(opts.tol > T::zero()) {
        return Err(Error::InvalidParameter("resolution and tolerance must be positive".into()));
    }
    let scanner = Scanner::new(lf, opts);
    let mut last_err = None;
    for shift in BOUNDARY_SHIFTS {
        let scanned = rect.grow(opts.resolution * T::lit(shift));
        let w = match scanner.winding(&scanned) {
            Ok(w) => w,
            Err(e @ Error::BoundaryZeroSuspected { .. }) => {
                log::warn!("zero suspected on boundary; moving it outward: {e}");
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut zeros = Vec::new();
        scanner.resolve(&scanned, w, &mut zeros)?;
        zeros.sort_by(|a, b| {
            a.gamma
                .partial_cmp(&b.gamma)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.beta.partial_cmp(&b.beta).unwrap_or(std::cmp::Ordering::Equal))
        });
        return Ok(ZeroScanReport {
            character: CharacterId { modulus: lf.modulus(), index: lf.index() },
            requested: rect,
            scanned,
            perturbed: shift != 0.0,
            count: zeros.len(),
            zeros,
            resolution: opts.resolution,
            evaluations: scanner.evaluations(),
            caveat: CAVEAT.to_string(),
        });
    }
    Err(last_err.expect("at least one boundary tried"))
}
