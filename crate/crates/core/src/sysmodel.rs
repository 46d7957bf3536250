//! Attacked network systems and their attacker-augmented form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{placement_matrix, Placement};
use crate::numkernels::DenseMatrix;

/// One attacker obeying `ẇ = s w + r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackRate {
    /// Growth rate (1/time).
    pub s: f64,
    /// Drive rate (state/time).
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Constant,
    Linear,
    Exponential,
    Other,
}

pub fn classify_attack(s: f64, r: f64) -> Strategy {
    match (s, r) {
        (s, r) if s == 0.0 && r == 0.0 => Strategy::Constant,
        (s, r) if s == 0.0 && r > 0.0 => Strategy::Linear,
        (s, r) if s > 0.0 && r == 0.0 => Strategy::Exponential,
        _ => Strategy::Other,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AttackerModel {
    pub rates: Vec<AttackRate>,
}

impl AttackerModel {
    pub fn new(rates: Vec<AttackRate>) -> Self {
        AttackerModel { rates }
    }

    /// `q` attackers sharing one `(s, r)`.
    pub fn uniform(q: usize, s: f64, r: f64) -> Self {
        AttackerModel {
            rates: vec![AttackRate { s, r }; q],
        }
    }

    pub fn q(&self) -> usize {
        self.rates.len()
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.rates.iter().map(|a| classify_attack(a.s, a.r)).collect()
    }

    pub fn growth_rates(&self) -> Vec<f64> {
        self.rates.iter().map(|a| a.s).collect()
    }

    pub fn drive(&self) -> Vec<f64> {
        self.rates.iter().map(|a| a.r).collect()
    }
}

/// Closed-form attacker state at time `t` from `w0`.
pub fn attacker_trajectory(atk: &AttackerModel, w0: &[f64], t: f64) -> Result<Vec<f64>> {
    if w0.len() != atk.q() {
        return Err(Error::Shape(format!(
            "{} initial attacker states for {} attackers",
            w0.len(),
            atk.q()
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("attacker time {t} must be >= 0")));
    }
    Ok(atk
        .rates
        .iter()
        .zip(w0)
        .map(|(a, &w)| {
            if a.s == 0.0 {
                w + a.r * t
            } else {
                let g = (a.s * t).exp();
                g * w + a.r / a.s * (a.s * t).exp_m1()
            }
        })
        .collect())
}

/// `ẋ = A x + H w + B u`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSystem {
    pub a: DenseMatrix<f64>,
    pub h: DenseMatrix<f64>,
    pub b: DenseMatrix<f64>,
}

impl NetworkSystem {
    pub fn new(a: DenseMatrix<f64>, h: DenseMatrix<f64>, b: DenseMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Assembly(format!("A is {}x{}", a.rows(), a.cols())));
        }
        if h.rows() != a.rows() || b.rows() != a.rows() {
            return Err(Error::Assembly(format!(
                "A is {n}x{n} but H has {} rows and B has {} rows",
                h.rows(),
                b.rows(),
                n = a.rows()
            )));
        }
        Ok(NetworkSystem { a, h, b })
    }

    /// Versor H and B columns from a placement.
    pub fn from_placement(a: DenseMatrix<f64>, placement: &Placement) -> Result<Self> {
        let n = a.rows();
        let h = placement_matrix(n, &placement.attackers)?;
        let b = placement_matrix(n, &placement.defenders)?;
        NetworkSystem::new(a, h, b)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn q(&self) -> usize {
        self.h.cols()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }
}

/// `x̃ = [x; w]`, `ẋ̃ = Ã x̃ + B̃ u + r̃`, `y = C x̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSystem {
    pub a: DenseMatrix<f64>,
    pub b: DenseMatrix<f64>,
    pub c: DenseMatrix<f64>,
    pub r: Vec<f64>,
    pub n: usize,
    pub q: usize,
    pub m: usize,
}

impl AugmentedSystem {
    pub fn dim(&self) -> usize {
        self.n + self.q
    }

    pub fn network_block(&self) -> DenseMatrix<f64> {
        self.a.block(0, 0, self.n, self.n)
    }

    pub fn attack_block(&self) -> DenseMatrix<f64> {
        self.a.block(0, self.n, self.n, self.q)
    }

    pub fn growth_block(&self) -> DenseMatrix<f64> {
        self.a.block(self.n, self.n, self.q, self.q)
    }

    pub fn defense_block(&self) -> DenseMatrix<f64> {
        self.b.block(0, 0, self.n, self.m)
    }

    pub fn drive_block(&self) -> Vec<f64> {
        self.r[self.n..].to_vec()
    }
}

pub fn augment(sys: &NetworkSystem, atk: &AttackerModel) -> Result<AugmentedSystem> {
    let (n, q, m) = (sys.n(), sys.q(), sys.m());
    if atk.q() != q {
        return Err(Error::Assembly(format!(
            "attacker model has {} attackers but H has {q} columns",
            atk.q()
        )));
    }
    let dim = n + q;
    let mut a = DenseMatrix::zeros(dim, dim);
    a.set_block(0, 0, &sys.a);
    a.set_block(0, n, &sys.h);
    for (i, rate) in atk.rates.iter().enumerate() {
        a[(n + i, n + i)] = rate.s;
    }
    let mut b = DenseMatrix::zeros(dim, m);
    b.set_block(0, 0, &sys.b);
    let mut c = DenseMatrix::zeros(n, dim);
    for i in 0..n {
        c[(i, i)] = 1.0;
    }
    let mut r = vec![0.0; dim];
    for (i, rate) in atk.rates.iter().enumerate() {
        r[n + i] = rate.r;
    }
    Ok(AugmentedSystem { a, b, c, r, n, q, m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify_attack(0.0, 0.0), Strategy::Constant);
        assert_eq!(classify_attack(0.0, 1.5), Strategy::Linear);
        assert_eq!(classify_attack(2.5, 0.0), Strategy::Exponential);
        assert_eq!(classify_attack(2.5, 1.0), Strategy::Other);
        assert_eq!(classify_attack(-1.0, 0.0), Strategy::Other);
        assert_eq!(classify_attack(0.0, -1.0), Strategy::Other);
    }

    #[test]
    fn trajectories() {
        let one = |s, r| AttackerModel::uniform(1, s, r);
        assert_eq!(attacker_trajectory(&one(0.0, 0.0), &[1.0], 5.0).unwrap(), vec![1.0]);
        assert_eq!(attacker_trajectory(&one(0.0, 2.0), &[0.0], 3.0).unwrap(), vec![6.0]);
        let w = attacker_trajectory(&one(2.5, 0.0), &[1.0], 1.0).unwrap()[0];
        assert!((w - 2.5f64.exp()).abs() < 1e-12);
        assert!((w - 12.182).abs() < 1e-3);
        assert!(attacker_trajectory(&one(1.0, 0.0), &[1.0], -1.0).is_err());
    }

    #[test]
    fn augment_without_attackers() {
        let a = DenseMatrix::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]).unwrap();
        let sys = NetworkSystem::new(a.clone(), DenseMatrix::zeros(2, 0), placement_matrix(2, &[1]).unwrap()).unwrap();
        let aug = augment(&sys, &AttackerModel::default()).unwrap();
        assert_eq!(aug.a, a);
        assert_eq!(aug.b, sys.b);
        assert_eq!(aug.c, DenseMatrix::identity(2));
        assert_eq!(aug.r, vec![0.0, 0.0]);
    }

    #[test]
    fn augment_scalar() {
        let sys = NetworkSystem::new(
            DenseMatrix::from_rows(&[vec![-1.0]]).unwrap(),
            DenseMatrix::from_rows(&[vec![1.0]]).unwrap(),
            DenseMatrix::from_rows(&[vec![1.0]]).unwrap(),
        )
        .unwrap();
        let aug = augment(&sys, &AttackerModel::uniform(1, 0.0, 0.0)).unwrap();
        assert_eq!(aug.a.as_slice(), &[-1.0, 1.0, 0.0, 0.0]);
        assert!(augment(&sys, &AttackerModel::default()).is_err());
    }

    #[test]
    fn augment_shape() {
        let placement = Placement::new(10, vec![1, 3, 10], vec![2, 5, 7]).unwrap();
        let sys = NetworkSystem::from_placement(DenseMatrix::identity(10).scale(&-1.0), &placement).unwrap();
        let aug = augment(&sys, &AttackerModel::uniform(3, 2.5, 0.0)).unwrap();
        assert_eq!(aug.a.shape(), (13, 13));
        assert_eq!(aug.a.block(10, 0, 3, 10).max_abs(), 0.0);
        assert_eq!(aug.growth_block(), DenseMatrix::identity(3).scale(&2.5));
    }
}
