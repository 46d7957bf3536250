//! The maneuver expanded in the eigenbasis of `Ã` (`f64` only).

use serde::Serialize;

use super::{maneuver_beta, ControlProblem};
use crate::error::{Error, Result};
use crate::numkernels::{general_eig, GeneralEigen, C64};

/// Norm of an eigenvector's attacker rows above which it counts as an attacker mode.
const ATTACKER_MODE_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Coefficient {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Coefficient {
    fn from(z: C64) -> Self {
        Coefficient { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralBeta {
    pub beta: Vec<f64>,
    pub eigenvalues: Vec<Coefficient>,
    /// `V⁻¹ x̃0`
    pub c: Vec<Coefficient>,
    /// `V⁻¹ r̃`
    pub g: Vec<Coefficient>,
    /// `(e^{λΔt} − 1)/λ`, or `Δt` at `λ = 0`.
    pub j: Vec<Coefficient>,
    /// `‖β_spectral − β‖ / ‖β‖` against the exponential-based maneuver.
    pub relative_error: f64,
    #[serde(skip)]
    eig: Option<GeneralEigen>,
}

/// `(e^{λΔt} − 1)/λ` with its limit at `λ = 0`.
fn j_factor(lambda: C64, dt: f64) -> C64 {
    let z = lambda * dt;
    if z.norm() < 1e-5 {
        // z + z^2/2 + z^3/6 over λ
        C64::new(dt, 0.0) * (C64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0)
    } else {
        (z.exp() - 1.0) / lambda
    }
}

fn rel_error(approx: &[f64], exact: &[f64]) -> f64 {
    let diff: f64 = approx.iter().zip(exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = exact.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / norm
    }
}

/// Sums `Σ_{i ∈ modes} (cᵢ e^{λᵢΔt} + gᵢ Jᵢ) vᵢ` and keeps the network rows.
fn expand(eig: &GeneralEigen, c: &[C64], g: &[C64], j: &[C64], dt: f64, n: usize, modes: &[usize]) -> Vec<f64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for &k in modes {
        let weight = c[k] * (eig.values[k] * dt).exp() + g[k] * j[k];
        for (row, o) in out.iter_mut().enumerate() {
            *o += weight * eig.vectors[(row, k)];
        }
    }
    out.iter().map(|z| z.re).collect()
}

pub fn spectral_beta(p: &ControlProblem) -> Result<SpectralBeta> {
    let eig = general_eig(&p.aug.a)?;
    let dt = p.horizon();
    let c = eig.coefficients(&p.initial_state())?;
    let g = eig.coefficients(&p.aug.r)?;
    let j: Vec<C64> = eig.values.iter().map(|&l| j_factor(l, dt)).collect();
    let all: Vec<usize> = (0..eig.values.len()).collect();
    let mut beta = expand(&eig, &c, &g, &j, dt, p.aug.n, &all);
    for (b, y) in beta.iter_mut().zip(&p.y_f) {
        *b -= y;
    }
    let exact = maneuver_beta(p)?;
    Ok(SpectralBeta {
        relative_error: rel_error(&beta, &exact),
        beta,
        eigenvalues: eig.values.iter().map(|&z| z.into()).collect(),
        c: c.into_iter().map(Into::into).collect(),
        g: g.into_iter().map(Into::into).collect(),
        j: j.into_iter().map(Into::into).collect(),
        eig: Some(eig),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LargeTfBeta {
    pub approx: Vec<f64>,
    pub exact: Vec<f64>,
    pub relative_error: f64,
    /// Indices (into the sorted spectrum) of the modes that were kept.
    pub attacker_modes: Vec<usize>,
}

/// Keeps only the eigenmodes of `Ã` that live on the attacker states.
pub fn beta_large_tf(p: &ControlProblem) -> Result<LargeTfBeta> {
    let sb = spectral_beta(p)?;
    let eig = sb
        .eig
        .as_ref()
        .ok_or_else(|| Error::Diagonalizability("eigenbasis unavailable".into()))?;
    let n = p.aug.n;
    let dim = p.aug.dim();
    let modes: Vec<usize> = (0..dim)
        .filter(|&k| {
            let tail: f64 = (n..dim).map(|r| eig.vectors[(r, k)].norm_sqr()).sum::<f64>().sqrt();
            tail > ATTACKER_MODE_THRESHOLD
        })
        .collect();
    let c = eig.coefficients(&p.initial_state())?;
    let g = eig.coefficients(&p.aug.r)?;
    let j: Vec<C64> = eig.values.iter().map(|&l| j_factor(l, p.horizon())).collect();
    let approx = expand(eig, &c, &g, &j, p.horizon(), n, &modes);
    let exact = maneuver_beta(p)?;
    Ok(LargeTfBeta {
        relative_error: rel_error(&approx, &exact),
        approx,
        exact,
        attacker_modes: modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_factor_limit() {
        assert_eq!(j_factor(C64::new(0.0, 0.0), 1.0), C64::new(1.0, 0.0));
        let v = j_factor(C64::new(-1.0, 0.0), 1.0);
        assert!((v.re - (1.0 - (-1f64).exp())).abs() < 1e-15);
        let tiny = j_factor(C64::new(1e-9, 0.0), 2.0);
        assert!((tiny.re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn relative_error_conventions() {
        assert_eq!(rel_error(&[0.0], &[1.0]), 1.0);
        assert_eq!(rel_error(&[0.0], &[0.0]), 0.0);
    }
}
