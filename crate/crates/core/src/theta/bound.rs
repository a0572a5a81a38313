//! Gaussian tail estimates for lattice sums.
//!
//! For a positive definite form `q` on `R^n` with smallest eigenvalue `λ` and
//! any shift `a`, the omitted part of `Σ_{x∈Z^n+a} e^{−πq(x)}` over `q(x) > C`
//! is at most `e^{−π(1−θ)C} · Σ_x e^{−πθq(x)}` for every `θ ∈ (0, 1)`. The last
//! sum is bounded by `Π_i Σ_k e^{−πθλ(k+a_i)²} ≤ S(πθλ)^n`, using that a shifted
//! one-dimensional Gaussian sum never exceeds the centred one (its Fourier
//! coefficients are positive) and
//! `S(β) = min(1 + 2e^{−β}/(1−e^{−β}), 1 + √(π/β))`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn ln_centred_sum(beta: f64) -> f64 {
    let geometric = 1.0 + 2.0 * (-beta).exp() / (-(-beta).exp_m1());
    let integral = 1.0 + (PI / beta).sqrt();
    geometric.min(integral).ln()
}

/// Upper bound on the tail `Σ_{q(x)>c} e^{−πq(x)}` in dimension `dim`, for a form
/// whose smallest eigenvalue is at least `lambda`.
pub fn tail_bound(c: f64, lambda: f64, dim: usize) -> f64 {
    assert!(lambda > 0.0);
    let c = c.max(0.0);
    let mut best = f64::INFINITY;
    for k in 1..200 {
        let theta = k as f64 / 200.0;
        let ln = -PI * (1.0 - theta) * c + dim as f64 * ln_centred_sum(PI * theta * lambda);
        best = best.min(ln);
    }
    best.exp()
}

/// Smallest level `C` (to within a relative 1e−9) with `tail_bound(C) < eps`.
pub fn level_for(eps: f64, lambda: f64, dim: usize) -> f64 {
    let mut hi = 1.0;
    while tail_bound(hi, lambda, dim) >= eps {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if tail_bound(mid, lambda, dim) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest integer radius `R` such that all points `x` with `‖x‖ > R − offset_norm`
/// contribute less than `eps` in total, for the isotropic decay
/// `e^{−π λ_Y λ_P ‖x‖²}` in dimension `dim`.
pub fn choose_radius(
    lambda_min_y: f64,
    lambda_min_p: f64,
    offset_norm: f64,
    eps: f64,
    dim: usize,
    max_radius: u64,
) -> Result<u64> {
    if !(lambda_min_y > 0.0 && lambda_min_p > 0.0 && eps > 0.0 && offset_norm >= 0.0) {
        return Err(Error::InvalidParameter("choose_radius needs positive inputs".into()));
    }
    let decay = lambda_min_y * lambda_min_p;
    let level = level_for(eps, decay, dim);
    let needed = ((level / decay).sqrt() + offset_norm).ceil().max(1.0) as u64;
    // the continuous level is a lower bound; step up until the integer radius satisfies the bound
    let mut r = needed.saturating_sub(1).max(1);
    loop {
        let reach = r as f64 - offset_norm;
        if reach > 0.0 && tail_bound(decay * reach * reach, decay, dim) < eps {
            break;
        }
        r += 1;
    }
    if r > max_radius {
        return Err(Error::Truncation { needed: r, max_radius, eps });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_decay_in_the_plane() {
        assert_eq!(choose_radius(1.0, 1.0, 0.0, 1e-12, 2, 64).unwrap(), 4);
    }

    #[test]
    fn bound_dominates_explicit_shell_sum() {
        // Σ_{|x|²>R²} e^{−π|x|²} over Z², computed directly
        for r in 1..5 {
            let r2 = (r * r) as f64;
            let mut tail = 0.0;
            for a in -30i64..=30 {
                for b in -30i64..=30 {
                    let q = (a * a + b * b) as f64;
                    if q > r2 {
                        tail += (-PI * q).exp();
                    }
                }
            }
            assert!(tail_bound(r2, 1.0, 2) >= tail, "r = {r}");
        }
    }

    #[test]
    fn monotone_in_decay_and_eps() {
        let r1 = choose_radius(1.0, 1.0, 0.0, 1e-12, 4, 64).unwrap();
        let r2 = choose_radius(2.0, 1.0, 0.0, 1e-12, 4, 64).unwrap();
        let r3 = choose_radius(1.0, 1.0, 0.0, 1e-3, 4, 64).unwrap();
        assert!(r2 <= r1 && r3 <= r1);
    }

    #[test]
    fn unattainable_target_is_reported() {
        let err = choose_radius(1.0, 1.0, 0.0, 1e-30, 2, 4).unwrap_err();
        assert!(matches!(err, Error::Truncation { max_radius: 4, .. }));
    }
}
