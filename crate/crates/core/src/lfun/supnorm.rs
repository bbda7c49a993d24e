//! Maximum of `|L(s, χ)|` over `[1-θ, 2] × [-t_max, t_max]`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{CharacterId, LFunction};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct SupNormReport<T> {
    pub character: CharacterId,
    pub sigma_min: T,
    pub sigma_max: T,
    pub t_max: T,
    pub resolution: T,
    pub max_abs: T,
    pub argmax_re: T,
    pub argmax_im: T,
    /// `ln max_abs`.
    pub phi: T,
    pub samples: usize,
}

impl<T: Real> SupNormReport<T> {
    /// `max(φ, 1)`: still a valid bound `|L| <= e^φ`, and at least 1 as the
    /// certificate requires.
    pub fn certify_phi(&self) -> T {
        self.phi.max(T::one())
    }
}

/// Uniform grid from `lo` to `hi` inclusive with spacing at most `step`.
fn grid<T: Real>(lo: T, hi: T, step: T) -> Vec<T> {
    let n = ((hi - lo) / step).ceil().to_usize().unwrap_or(1).max(1);
    let h = (hi - lo) / T::from_usize(n).unwrap();
    (0..=n).map(|i| if i == n { hi } else { lo + h * T::from_usize(i).unwrap() }).collect()
}

/// Grid maximum of `|L|` followed by a compass search around the best grid
/// points. The σ grid always contains the line `σ = 1`.
pub fn sup_norm<T: Real>(chi: &DirichletCharacter, theta: T, t_max: T, resolution: T, tol: T) -> Result<SupNormReport<T>> {
    if chi.is_principal() {
        return Err(Error::PoleInRegion);
    }
    if !(theta > T::zero() && theta < T::one()) || !(t_max >= T::zero()) || !(resolution > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < θ < 1, t_max ≥ 0, resolution > 0 (got {theta}, {t_max}, {resolution})"
        )));
    }
    let lf = LFunction::new(chi, tol)?;
    let one = T::one();
    let two = T::lit(2.0);
    let sigma_lo = one - theta;
    let mut sigmas = grid(sigma_lo, one, resolution);
    sigmas.pop();
    sigmas.extend(grid(one, two, resolution));
    let ts = if t_max > T::zero() { grid(-t_max, t_max, resolution) } else { vec![T::zero()] };

    let rows: Vec<Vec<(T, Complex<T>)>> = ts
        .par_iter()
        .map(|&t| {
            sigmas
                .iter()
                .map(|&s| {
                    let z = Complex::new(s, t);
                    lf.eval(z).map(|v| (v.norm(), z))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut samples = rows.len() * sigmas.len();
    let mut points: Vec<(T, Complex<T>)> = rows.into_iter().flatten().collect();
    // Deterministic ordering: largest first, ties by position.
    points.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.re.partial_cmp(&b.1.re).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.1.im.partial_cmp(&b.1.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    points.truncate(4);

    let clamp = |z: Complex<T>| {
        Complex::new(z.re.max(sigma_lo).min(two), z.im.max(-t_max).min(t_max))
    };
    let refined: Vec<((T, Complex<T>), usize)> = points
        .par_iter()
        .map(|&(mut best, mut at)| {
            let mut h = resolution * T::lit(0.5);
            let floor = resolution / T::lit(256.0);
            let mut count = 0;
            while h > floor {
                let mut moved = false;
                for d in [Complex::new(h, T::zero()), Complex::new(-h, T::zero()), Complex::new(T::zero(), h), Complex::new(T::zero(), -h)] {
                    let z = clamp(at + d);
                    count += 1;
                    let v = lf.eval(z)?.norm();
                    if v > best {
                        best = v;
                        at = z;
                        moved = true;
                    }
                }
                if !moved {
                    h *= T::lit(0.5);
                }
            }
            Ok(((best, at), count))
        })
        .collect::<Result<_>>()?;
    let mut best = (T::zero(), Complex::new(two, T::zero()));
    for ((v, z), count) in refined {
        samples += count;
        if v > best.0 {
            best = (v, z);
        }
    }
    Ok(SupNormReport {
        character: CharacterId::of(chi),
        sigma_min: sigma_lo,
        sigma_max: two,
        t_max,
        resolution,
        max_abs: best.0,
        argmax_re: best.1.re,
        argmax_im: best.1.im,
        phi: best.0.ln(),
        samples,
    })
}
