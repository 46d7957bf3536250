//! Fixed-step RK4 integration of the augmented network, with and without the
//! minimum-energy defense.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::control::{ControlProblem, PreparedProblem};
use crate::error::{Error, Result};
use crate::numkernels::{expm, norm2, DenseMatrix, Real};
use crate::sysmodel::AugmentedSystem;

/// Default number of steps over the horizon.
pub const DEFAULT_STEPS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `[x; w]` at each time.
    pub states: Vec<Vec<f64>>,
    /// Defense input at each time (closed loop only).
    pub inputs: Option<Vec<Vec<f64>>>,
    pub n: usize,
    pub q: usize,
}

impl Trajectory {
    pub fn network_norms(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s[..self.n].iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// The network norm ends above where it started and is still rising.
    pub fn diverging(&self) -> bool {
        let norms = self.network_norms();
        match norms.as_slice() {
            [first, .., prev, last] => last > first && last > prev,
            _ => false,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_csv_to(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_csv_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.n).map(|i| format!("x_{i}")));
        header.extend((1..=self.q).map(|i| format!("w_{i}")));
        let m = self
            .inputs
            .as_ref()
            .and_then(|u| u.first())
            .map_or(0, Vec::len);
        header.extend((1..=m).map(|i| format!("u_{i}")));
        writeln!(out, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            let mut fields = vec![format!("{t:.17e}")];
            fields.extend(self.states[k].iter().map(|v| format!("{v:.17e}")));
            if let Some(u) = &self.inputs {
                fields.extend(u[k].iter().map(|v| format!("{v:.17e}")));
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Number of steps and the step actually used so that the steps tile the horizon.
pub fn step_grid(horizon: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("step {dt} must be > 0")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("horizon {horizon} must be > 0")));
    }
    let ratio = horizon / dt;
    let rounded = ratio.round();
    let steps = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
    .max(1);
    Ok((steps, horizon / steps as f64))
}

fn affine<T: Real>(a: &DenseMatrix<T>, x: &[T], shift: &[T]) -> Vec<T> {
    let mut out = a.mul_vec(x);
    for (o, s) in out.iter_mut().zip(shift) {
        *o += s;
    }
    out
}

fn axpy_vec<T: Real>(x: &[T], k: &T, d: &[T]) -> Vec<T> {
    x.iter()
        .zip(d)
        .map(|(xi, di)| {
            let mut v = xi.clone();
            v.mul_add_assign(k, di);
            v
        })
        .collect()
}

/// One RK4 step of `ẋ = A x + f(t)` with the forcing sampled at the start,
/// midpoint and end of the step.
fn rk4_step<T: Real>(a: &DenseMatrix<T>, x: &[T], h: &T, f0: &[T], fm: &[T], f1: &[T]) -> Vec<T> {
    let half = h.clone() * T::from_f64(0.5);
    let k1 = affine(a, x, f0);
    let k2 = affine(a, &axpy_vec(x, &half, &k1), fm);
    let k3 = affine(a, &axpy_vec(x, &half, &k2), fm);
    let k4 = affine(a, &axpy_vec(x, h, &k3), f1);
    let sixth = h.clone() / T::from_f64(6.0);
    let two = T::from_f64(2.0);
    x.iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut incr = k1[i].clone() + &k4[i];
            incr.mul_add_assign(&two, &(k2[i].clone() + &k3[i]));
            let mut v = xi.clone();
            v.mul_add_assign(&sixth, &incr);
            v
        })
        .collect()
}

fn check_finite<T: Real>(x: &[T], t: f64) -> Result<()> {
    if x.iter().all(Real::is_finite) {
        Ok(())
    } else {
        Err(Error::Divergence { time: t })
    }
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(Real::to_f64).collect()
}

/// `ẋ̃ = Ã x̃ + r̃` from `[x0; w0]` over `[0, horizon]`.
pub fn integrate_open_loop(
    aug: &AugmentedSystem,
    x0: &[f64],
    w0: &[f64],
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_open_loop_in::<f64>(aug, x0, w0, horizon, dt)
}

pub fn integrate_open_loop_in<T: Real>(
    aug: &AugmentedSystem,
    x0: &[f64],
    w0: &[f64],
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    if x0.len() != aug.n || w0.len() != aug.q {
        return Err(Error::Shape(format!(
            "initial state sizes ({}, {}) for n = {}, q = {}",
            x0.len(),
            w0.len(),
            aug.n,
            aug.q
        )));
    }
    let (steps, h) = step_grid(horizon, dt)?;
    let a = aug.a.cast::<T>();
    let r: Vec<T> = aug.r.iter().map(|&v| T::from_f64(v)).collect();
    let th = T::from_f64(h);
    let mut x: Vec<T> = x0.iter().chain(w0).map(|&v| T::from_f64(v)).collect();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(to_f64(&x));
    for k in 0..steps {
        x = rk4_step(&a, &x, &th, &r, &r, &r);
        let t = (k + 1) as f64 * h;
        check_finite(&x, t)?;
        times.push(t);
        states.push(to_f64(&x));
    }
    Ok(Trajectory {
        times,
        states,
        inputs: None,
        n: aug.n,
        q: aug.q,
    })
}

#[derive(Clone, Debug)]
pub struct ClosedLoop {
    pub trajectory: Trajectory,
    /// `‖x(t_f)‖` over the network states.
    pub terminal_norm: f64,
    pub beta_norm: f64,
    /// Simpson quadrature of `∫ uᵀu dt` over the sampled inputs.
    pub realized_energy: f64,
    /// `βᵀ W_p⁻¹ β`
    pub min_energy: f64,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedLoopSummary {
    pub terminal_norm: f64,
    pub beta_norm: f64,
    pub realized_energy: f64,
    pub min_energy: f64,
    pub steps: usize,
    pub precision_bits: u32,
}

impl ClosedLoop {
    pub fn summary(&self) -> ClosedLoopSummary {
        ClosedLoopSummary {
            terminal_norm: self.terminal_norm,
            beta_norm: self.beta_norm,
            realized_energy: self.realized_energy,
            min_energy: self.min_energy,
            steps: self.trajectory.times.len() - 1,
            precision_bits: self.precision_bits,
        }
    }
}

pub fn integrate_closed_loop(p: &ControlProblem, dt: f64) -> Result<ClosedLoop> {
    integrate_closed_loop_in::<f64>(p, dt)
}

/// RK4 under `u*(t)`. The costate `e^{Ãᵀ(t_f − t)} λ_f` is tabulated at
/// every half step by repeated multiplication with `e^{Ãᵀ h/2}`, so each
/// stage sees the analytic input rather than an interpolant.
pub fn integrate_closed_loop_in<T: Real>(p: &ControlProblem, dt: f64) -> Result<ClosedLoop> {
    let (steps, h) = step_grid(p.horizon(), dt)?;
    let prepared = PreparedProblem::<T>::new(p)?;
    let dim = p.aug.dim();
    let phi_half = expm(&prepared.a.transpose().scale(&T::from_f64(h / 2.0)))?;
    // costates[j] = ψ(t_f − j h/2)
    let mut costates = Vec::with_capacity(2 * steps + 1);
    costates.push(prepared.costate_f.clone());
    for j in 0..2 * steps {
        let next = phi_half.mul_vec(&costates[j]);
        costates.push(next);
    }
    let forcing = |k_half: usize| -> (Vec<T>, Vec<T>) {
        let u = prepared.input_from_costate(&costates[2 * steps - k_half]);
        let mut f = prepared.b.mul_vec(&u);
        for (fi, ri) in f.iter_mut().zip(&prepared.r) {
            *fi += ri;
        }
        (f, u)
    };

    let th = T::from_f64(h);
    let mut x: Vec<T> = p.initial_state().iter().map(|&v| T::from_f64(v)).collect();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut inputs = Vec::with_capacity(steps + 1);
    let (mut f_start, u_start) = forcing(0);
    times.push(p.t0);
    states.push(to_f64(&x));
    inputs.push(to_f64(&u_start));
    for k in 0..steps {
        let (f_mid, _) = forcing(2 * k + 1);
        let (f_end, u_end) = forcing(2 * k + 2);
        x = rk4_step(&prepared.a, &x, &th, &f_start, &f_mid, &f_end);
        let t = p.t0 + (k + 1) as f64 * h;
        check_finite(&x, t)?;
        times.push(t);
        states.push(to_f64(&x));
        inputs.push(to_f64(&u_end));
        f_start = f_end;
    }
    debug_assert_eq!(x.len(), dim);
    let terminal_norm = norm2(&x[..p.aug.n]).to_f64();
    let trajectory = Trajectory {
        times,
        states,
        inputs: Some(inputs),
        n: p.aug.n,
        q: p.aug.q,
    };
    let realized = realized_energy(&trajectory)?;
    Ok(ClosedLoop {
        terminal_norm,
        beta_norm: norm2(&prepared.beta).to_f64(),
        realized_energy: realized,
        min_energy: prepared.energy().to_f64(),
        trajectory,
        precision_bits: T::BITS,
    })
}

/// Composite Simpson weights on `intervals` uniform panels of width `h`; a
/// 3/8 panel closes an odd count.
pub fn simpson_weights(intervals: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; intervals + 1];
    match intervals {
        0 => {}
        1 => {
            w[0] = h / 2.0;
            w[1] = h / 2.0;
        }
        _ => {
            let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
            for k in (0..simpson_end).step_by(2) {
                w[k] += h / 3.0;
                w[k + 1] += 4.0 * h / 3.0;
                w[k + 2] += h / 3.0;
            }
            if simpson_end < intervals {
                let s = simpson_end;
                w[s] += 3.0 * h / 8.0;
                w[s + 1] += 9.0 * h / 8.0;
                w[s + 2] += 9.0 * h / 8.0;
                w[s + 3] += 3.0 * h / 8.0;
            }
        }
    }
    w
}

/// `∫ uᵀu dt` by composite Simpson over the sampled inputs.
pub fn realized_energy(traj: &Trajectory) -> Result<f64> {
    let inputs = traj
        .inputs
        .as_ref()
        .ok_or_else(|| Error::Domain("trajectory carries no inputs".into()))?;
    if traj.times.len() < 2 {
        return Ok(0.0);
    }
    let h = (traj.times[traj.times.len() - 1] - traj.times[0]) / (traj.times.len() - 1) as f64;
    let weights = simpson_weights(traj.times.len() - 1, h);
    Ok(inputs
        .iter()
        .zip(&weights)
        .map(|(u, w)| w * u.iter().map(|v| v * v).sum::<f64>())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{augment, AttackerModel, NetworkSystem};

    fn scalar_aug() -> AugmentedSystem {
        let sys = NetworkSystem::new(
            DenseMatrix::from_rows(&[vec![-1.0]]).unwrap(),
            DenseMatrix::zeros(1, 0),
            DenseMatrix::from_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap();
        augment(&sys, &AttackerModel::default()).unwrap()
    }

    #[test]
    fn scalar_flow() {
        let tr = integrate_open_loop(&scalar_aug(), &[1.0], &[], 1.0, 1e-3).unwrap();
        assert_eq!(tr.times.len(), 1001);
        assert!((tr.states[1000][0] - (-1f64).exp()).abs() < 1e-9);
        assert!(!tr.diverging());
    }

    #[test]
    fn scalar_closed_loop() {
        let p = ControlProblem::new(scalar_aug(), vec![1.0], vec![], None, 0.0, 1.0).unwrap();
        let cl = integrate_closed_loop(&p, 1e-3).unwrap();
        assert!(cl.terminal_norm <= 1e-8, "{}", cl.terminal_norm);
        assert!((cl.realized_energy - 0.313035).abs() < 1e-6);
    }

    #[test]
    fn simpson_constant_and_odd_counts() {
        for intervals in 1..8 {
            let w = simpson_weights(intervals, 1.0 / intervals as f64);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        // cubic is exact for both Simpson rules
        let n = 7;
        let w = simpson_weights(n, 1.0 / n as f64);
        let integral: f64 = (0..=n).map(|k| w[k] * (k as f64 / n as f64).powi(3)).sum();
        assert!((integral - 0.25).abs() < 1e-14);
    }

    #[test]
    fn step_grid_rules() {
        assert_eq!(step_grid(1.0, 1e-3).unwrap().0, 1000);
        let (n, h) = step_grid(1.0, 0.3).unwrap();
        assert_eq!(n, 4);
        assert!((h - 0.25).abs() < 1e-15);
        assert!(step_grid(1.0, 0.0).is_err());
    }

    #[test]
    fn missing_inputs_is_an_error() {
        let tr = integrate_open_loop(&scalar_aug(), &[1.0], &[], 1.0, 0.1).unwrap();
        assert!(matches!(realized_energy(&tr), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_header() {
        let tr = integrate_open_loop(&scalar_aug(), &[1.0], &[], 1.0, 0.5).unwrap();
        let mut buf = Vec::new();
        tr.write_csv_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x_1\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
