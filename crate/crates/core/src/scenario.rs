//! Single-problem scenario files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::ControlProblem;
use crate::error::{Error, Result};
use crate::netgen::{adjacency_realization, AdjacencyConfig, Graph, GraphSource, Placement, SelfLoop};
use crate::precision::check_bits;
use crate::sysmodel::{augment, AttackRate, AttackerModel, NetworkSystem};

fn unit() -> f64 {
    1.0
}

fn default_bits() -> u32 {
    53
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackerSpec {
    pub node: usize,
    pub s: f64,
    pub r: f64,
    #[serde(default = "unit")]
    pub w0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub graph: GraphSource,
    pub defenders: Vec<usize>,
    #[serde(default)]
    pub attackers: Vec<AttackerSpec>,
    /// Zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_f: Option<Vec<f64>>,
    #[serde(default)]
    pub t0: f64,
    pub t_f: f64,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    /// Which noise draw of `seed` to use.
    #[serde(default)]
    pub realization: u32,
    #[serde(default)]
    pub self_loop: SelfLoop,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
}

#[derive(Clone, Debug)]
pub struct BuiltScenario {
    pub graph: Graph,
    pub placement: Placement,
    pub system: NetworkSystem,
    pub problem: ControlProblem,
}

impl Scenario {
    /// Parses a scenario and resolves its graph relative to the file.
    pub fn load(path: &Path) -> Result<(Self, Graph)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let sc: Scenario = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        let g = sc.graph.resolve(path.parent())?;
        Ok((sc, g))
    }

    /// One node, no edges, `A = −1`, `B = 1`, `x0 = 1`, `T = 1`.
    pub fn scalar_demo() -> Self {
        Scenario {
            graph: GraphSource::Inline(Graph {
                n: 1,
                directed: false,
                edges: vec![],
                provenance: None,
            }),
            defenders: vec![1],
            attackers: vec![],
            x0: Some(vec![1.0]),
            y_f: None,
            t0: 0.0,
            t_f: 1.0,
            eps: 0.0,
            seed: 0,
            realization: 0,
            self_loop: SelfLoop::Constant(1.0),
            precision_bits: 53,
        }
    }

    pub fn build(&self, graph: &Graph) -> Result<BuiltScenario> {
        check_bits(self.precision_bits)?;
        let attackers: Vec<usize> = self.attackers.iter().map(|a| a.node).collect();
        let placement = Placement::new(graph.n, self.defenders.clone(), attackers)?;
        if placement.defenders.is_empty() {
            return Err(Error::Placement("scenario needs at least one defender".into()));
        }
        let adj = AdjacencyConfig {
            self_loop: self.self_loop,
            eps: self.eps,
            seed: self.seed,
        };
        let a = adjacency_realization(graph, &adj, self.realization, 0)?;
        let system = NetworkSystem::from_placement(a, &placement)?;
        let atk = AttackerModel::new(self.attackers.iter().map(|a| AttackRate { s: a.s, r: a.r }).collect());
        let aug = augment(&system, &atk)?;
        let x0 = self.x0.clone().unwrap_or_else(|| vec![0.0; graph.n]);
        let w0 = self.attackers.iter().map(|a| a.w0).collect();
        let problem = ControlProblem::new(aug, x0, w0, self.y_f.clone(), self.t0, self.t_f)?;
        Ok(BuiltScenario {
            graph: graph.clone(),
            placement,
            system,
            problem,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::min_energy;

    #[test]
    fn scalar_demo_energy() {
        let sc = Scenario::scalar_demo();
        let g = sc.graph.resolve(None).unwrap();
        let built = sc.build(&g).unwrap();
        let e = min_energy(&built.problem).unwrap();
        let exact = 2.0 * (-2f64).exp() / (1.0 - (-2f64).exp());
        assert!((e - exact).abs() < 1e-12);
    }

    #[test]
    fn parses_and_rejects_overlap() {
        let text = r#"{"graph": {"generator": "chain:6"}, "defenders": [1],
            "attackers": [{"node": 6, "s": 2.5, "r": 0.0}], "t_f": 1.0, "eps": 0.01}"#;
        let sc: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(sc.attackers[0].w0, 1.0);
        let g = sc.graph.resolve(None).unwrap();
        let built = sc.build(&g).unwrap();
        assert_eq!(built.problem.aug.dim(), 7);
        let mut bad = sc.clone();
        bad.attackers[0].node = 1;
        assert!(matches!(bad.build(&g), Err(Error::Placement(_))));
        let mut bad = sc;
        bad.x0 = Some(vec![0.0; 2]);
        assert!(bad.build(&g).is_err());
    }
}
