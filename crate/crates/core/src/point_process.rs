//! Homogeneous Poisson patterns, probit thinning, and the wholesale update of
//! the discarded process over the continuous window.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{is_positive, Error, Result};
use crate::gp::{conditional_draw, gp_draw, GpParams};
use crate::normal::phi;
use crate::region::{Point, Region};

/// A finite point pattern, optionally marked with latent-field values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub locations: Vec<Point>,
    pub marks: Option<Vec<f64>>,
}

impl PointPattern {
    pub fn unmarked(locations: Vec<Point>) -> Self {
        PointPattern {
            locations,
            marks: None,
        }
    }

    pub fn with_marks(locations: Vec<Point>, marks: Vec<f64>) -> Result<Self> {
        if marks.len() != locations.len() {
            return Err(Error::LengthMismatch {
                what: "point-pattern marks",
                got: marks.len(),
                expected: locations.len(),
            });
        }
        Ok(PointPattern {
            locations,
            marks: Some(marks),
        })
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// Which side of the thinning split to retain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeepSign {
    Positive,
    Negative,
}

/// Draw a homogeneous Poisson pattern with the given intensity (points per
/// unit area): the count is `Poisson(λ*·|B|)` and locations are i.i.d.
/// uniform.
pub fn hpp_draw<R: Rng + ?Sized>(
    lambda_star: f64,
    region: &Region,
    rng: &mut R,
) -> Result<PointPattern> {
    if !is_positive(lambda_star) {
        return Err(Error::invalid(format!("intensity must be positive, got {lambda_star}")));
    }
    let count = Poisson::new(lambda_star * region.area())
        .map_err(|e| Error::invalid(format!("Poisson mean: {e}")))?
        .sample(rng) as usize;
    Ok(PointPattern::unmarked(region.sample_uniform(count, rng)))
}

/// Thin a marked pattern, retaining each point independently with probability
/// `Φ(±β·S/σ)` according to `keep_sign`.
///
/// The two signs consume the thinning uniforms identically, so calling with
/// `Positive` and `Negative` on clones of the same stream partitions the
/// input exactly.
pub fn thin<R: Rng + ?Sized>(
    pattern: &PointPattern,
    beta: f64,
    sigma: f64,
    keep_sign: KeepSign,
    rng: &mut R,
) -> Result<PointPattern> {
    let (kept, dropped) = thin_split(pattern, beta, sigma, rng)?;
    Ok(match keep_sign {
        KeepSign::Positive => kept,
        KeepSign::Negative => dropped,
    })
}

/// Partition a marked pattern by probit thinning: the first component keeps
/// each point with probability `Φ(β·S/σ)`, the second holds the rest.
pub fn thin_split<R: Rng + ?Sized>(
    pattern: &PointPattern,
    beta: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<(PointPattern, PointPattern)> {
    if !is_positive(sigma) {
        return Err(Error::invalid(format!("thinning scale must be positive, got {sigma}")));
    }
    let marks = pattern
        .marks
        .as_ref()
        .ok_or_else(|| Error::invalid("thinning requires a marked pattern"))?;

    let mut kept = (Vec::new(), Vec::new());
    let mut dropped = (Vec::new(), Vec::new());
    for (loc, &s) in pattern.locations.iter().zip(marks) {
        let p_keep = phi(beta * s / sigma);
        if rng.random::<f64>() < p_keep {
            kept.0.push(*loc);
            kept.1.push(s);
        } else {
            dropped.0.push(*loc);
            dropped.1.push(s);
        }
    }
    Ok((
        PointPattern::with_marks(kept.0, kept.1)?,
        PointPattern::with_marks(dropped.0, dropped.1)?,
    ))
}

/// Redraw the discarded process wholesale from its full conditional.
///
/// Candidate points come from a homogeneous pattern at the envelope
/// intensity, the field is extended to them retrospectively given the current
/// values, and each candidate survives with probability `Φ(-β·S/σ)`. The
/// retained pattern (with its field marks) is an exact draw from the
/// inhomogeneous process with intensity `λ* Φ(-β S(x)/σ)` given the current
/// field.
///
/// `current_locs`/`current_s` may be empty, in which case candidates get
/// unconditional field draws.
pub fn update_discarded<R: Rng + ?Sized>(
    lambda_star: f64,
    beta: f64,
    gp: &GpParams,
    current_locs: &[Point],
    current_s: &[f64],
    region: &Region,
    rng: &mut R,
) -> Result<PointPattern> {
    if current_s.len() != current_locs.len() {
        return Err(Error::LengthMismatch {
            what: "current field values",
            got: current_s.len(),
            expected: current_locs.len(),
        });
    }
    let candidates = hpp_draw(lambda_star, region, rng)?;
    if candidates.is_empty() {
        return PointPattern::with_marks(Vec::new(), Vec::new());
    }
    let s_cand = if current_locs.is_empty() {
        gp_draw(&candidates.locations, gp, rng)?
    } else {
        conditional_draw(&candidates.locations, current_locs, current_s, gp, rng)?
    };
    let marked = PointPattern::with_marks(candidates.locations, s_cand.iter().copied().collect())?;
    thin(&marked, beta, gp.sigma(), KeepSign::Negative, rng)
}
