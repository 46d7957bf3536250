//! Reduced power-grid frequency model.
//!
//! State is `[δ; θ; ω]`: generator phase angles, load-bus phase angles and
//! generator frequencies. Load alterations enter the θ rows through `D_L⁻¹`;
//! ancillary generation enters the ω rows through `−M⁻¹`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::ControlProblem;
use crate::error::{Error, Result};
use crate::numkernels::DenseMatrix;
use crate::sysmodel::{augment, AttackerModel, AugmentedSystem, NetworkSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Generator count.
    pub g: usize,
    /// Load count.
    pub l: usize,
    #[serde(rename = "M")]
    pub inertia: Vec<f64>,
    #[serde(rename = "D_G")]
    pub gen_damping: Vec<f64>,
    #[serde(rename = "D_L")]
    pub load_damping: Vec<f64>,
    #[serde(rename = "K_P")]
    pub k_p: Vec<f64>,
    #[serde(rename = "K_I")]
    pub k_i: Vec<f64>,
    #[serde(rename = "H_GG")]
    pub h_gg: Vec<Vec<f64>>,
    #[serde(rename = "H_GL")]
    pub h_gl: Vec<Vec<f64>>,
    #[serde(rename = "H_LG")]
    pub h_lg: Vec<Vec<f64>>,
    #[serde(rename = "H_LL")]
    pub h_ll: Vec<Vec<f64>>,
}

impl GridParams {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    fn check_dims(&self) -> Result<()> {
        let (g, l) = (self.g, self.l);
        if g == 0 {
            return Err(Error::Reduction("grid needs at least one generator".into()));
        }
        let vectors = [
            ("M", &self.inertia, g),
            ("D_G", &self.gen_damping, g),
            ("D_L", &self.load_damping, l),
            ("K_P", &self.k_p, g),
            ("K_I", &self.k_i, g),
        ];
        for (name, v, len) in vectors {
            if v.len() != len {
                return Err(Error::Shape(format!("{name} has {} entries, expected {len}", v.len())));
            }
        }
        let blocks = [
            ("H_GG", &self.h_gg, g, g),
            ("H_GL", &self.h_gl, g, l),
            ("H_LG", &self.h_lg, l, g),
            ("H_LL", &self.h_ll, l, l),
        ];
        for (name, b, rows, cols) in blocks {
            if b.len() != rows || b.iter().any(|r| r.len() != cols) {
                return Err(Error::Shape(format!("{name} must be {rows}x{cols}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSystem {
    pub a: DenseMatrix<f64>,
    /// One column per load.
    pub h: DenseMatrix<f64>,
    /// One column per generator.
    pub b: DenseMatrix<f64>,
    pub g: usize,
    pub l: usize,
}

impl GridSystem {
    pub fn dim(&self) -> usize {
        2 * self.g + self.l
    }
}

pub fn assemble_reduced(p: &GridParams) -> Result<GridSystem> {
    p.check_dims()?;
    let (g, l) = (p.g, p.l);
    for (name, v) in [("M", &p.inertia), ("D_L", &p.load_damping)] {
        if let Some(i) = v.iter().position(|&x| x == 0.0 || !x.is_finite()) {
            return Err(Error::Reduction(format!(
                "{name}[{}] = {} cannot be inverted",
                i + 1,
                v[i]
            )));
        }
    }
    let n = 2 * g + l;
    let (theta0, omega0) = (g, g + l);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..g {
        a[(i, omega0 + i)] = 1.0;
    }
    for i in 0..l {
        let d = p.load_damping[i];
        for j in 0..g {
            a[(theta0 + i, j)] = p.h_lg[i][j] / d;
        }
        for j in 0..l {
            a[(theta0 + i, theta0 + j)] = p.h_ll[i][j] / d;
        }
    }
    for i in 0..g {
        let m = p.inertia[i];
        for j in 0..g {
            let ki = if i == j { p.k_i[i] } else { 0.0 };
            a[(omega0 + i, j)] = -(ki + p.h_gg[i][j]) / m + 0.0;
        }
        for j in 0..l {
            a[(omega0 + i, theta0 + j)] = -p.h_gl[i][j] / m + 0.0;
        }
        a[(omega0 + i, omega0 + i)] = -(p.k_p[i] + p.gen_damping[i]) / m + 0.0;
    }
    let mut h = DenseMatrix::zeros(n, l);
    for i in 0..l {
        h[(theta0 + i, i)] = 1.0 / p.load_damping[i];
    }
    let mut b = DenseMatrix::zeros(n, g);
    for i in 0..g {
        b[(omega0 + i, i)] = -1.0 / p.inertia[i];
    }
    Ok(GridSystem { a, h, b, g, l })
}

/// Grid network restricted to the chosen attack and defense channels.
#[derive(Clone, Debug)]
pub struct GridScenario {
    pub system: NetworkSystem,
    pub aug: AugmentedSystem,
}

impl GridScenario {
    pub fn problem(&self, x0: Vec<f64>, w0: Vec<f64>, t0: f64, t_f: f64) -> Result<ControlProblem> {
        ControlProblem::new(self.aug.clone(), x0, w0, None, t0, t_f)
    }
}

fn check_ids(ids: &[usize], max: usize, role: &str) -> Result<()> {
    for (k, &id) in ids.iter().enumerate() {
        if id == 0 || id > max {
            return Err(Error::Placement(format!("{role} {id} outside 1..={max}")));
        }
        if ids[..k].contains(&id) {
            return Err(Error::Placement(format!("{role} {id} listed twice")));
        }
    }
    Ok(())
}

pub fn grid_attack_scenario(
    gs: &GridSystem,
    attacked_loads: &[usize],
    defending_generators: &[usize],
    atk: &AttackerModel,
) -> Result<GridScenario> {
    check_ids(attacked_loads, gs.l, "load")?;
    check_ids(defending_generators, gs.g, "generator")?;
    let h = gs.h.select_columns(&attacked_loads.iter().map(|i| i - 1).collect::<Vec<_>>());
    let b = gs.b.select_columns(&defending_generators.iter().map(|i| i - 1).collect::<Vec<_>>());
    let system = NetworkSystem::new(gs.a.clone(), h, b)?;
    let aug = augment(&system, atk)?;
    Ok(GridScenario { system, aug })
}

/// The one-generator, one-load example with unit parameters.
pub fn toy_grid() -> GridParams {
    GridParams {
        g: 1,
        l: 1,
        inertia: vec![1.0],
        gen_damping: vec![1.0],
        load_damping: vec![1.0],
        k_p: vec![1.0],
        k_i: vec![1.0],
        h_gg: vec![vec![-1.0]],
        h_gl: vec![vec![1.0]],
        h_lg: vec![vec![1.0]],
        h_ll: vec![vec![-1.0]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_assembly() {
        let gs = assemble_reduced(&toy_grid()).unwrap();
        assert_eq!(gs.a.as_slice(), &[0.0, 0.0, 1.0, 1.0, -1.0, 0.0, 0.0, -1.0, -2.0]);
        assert_eq!(gs.h.as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(gs.b.as_slice(), &[0.0, 0.0, -1.0]);
    }

    #[test]
    fn identity_load_damping_leaves_theta_rows() {
        let mut p = toy_grid();
        p.h_lg = vec![vec![0.7]];
        p.h_ll = vec![vec![-2.3]];
        let gs = assemble_reduced(&p).unwrap();
        assert_eq!(gs.a.row(1), &[0.7, -2.3, 0.0]);
    }

    #[test]
    fn doubling_inertia_halves_omega_rows() {
        let base = assemble_reduced(&toy_grid()).unwrap();
        let mut p = toy_grid();
        p.inertia = vec![2.0];
        let gs = assemble_reduced(&p).unwrap();
        for j in 0..3 {
            assert_eq!(gs.a[(2, j)], base.a[(2, j)] / 2.0);
        }
        assert_eq!(gs.b[(2, 0)], base.b[(2, 0)] / 2.0);
    }

    #[test]
    fn singular_parameters() {
        let mut p = toy_grid();
        p.inertia = vec![0.0];
        assert!(matches!(assemble_reduced(&p), Err(Error::Reduction(_))));
        let mut p = toy_grid();
        p.load_damping = vec![0.0];
        assert!(matches!(assemble_reduced(&p), Err(Error::Reduction(_))));
        let mut p = toy_grid();
        p.h_gl = vec![];
        assert!(matches!(assemble_reduced(&p), Err(Error::Shape(_))));
    }

    #[test]
    fn channel_selection() {
        let gs = assemble_reduced(&toy_grid()).unwrap();
        let sc = grid_attack_scenario(&gs, &[1], &[1], &AttackerModel::uniform(1, 0.0, 0.0)).unwrap();
        assert_eq!(sc.system.h, gs.h);
        assert_eq!(sc.system.b, gs.b);
        assert!(grid_attack_scenario(&gs, &[2], &[1], &AttackerModel::uniform(1, 0.0, 0.0)).is_err());
    }
}
