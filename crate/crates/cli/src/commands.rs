//! Command resolution and execution.

use std::io::Write;
use std::path::Path;

use netdefense::control::{energy_decomposition_in, output_gramian, EnergyReport};
use netdefense::experiments::{
    attacker_count_sweep, attacker_position_sweep, render_count_table, render_table,
    scalefree_study, SweepConfig, TableFormat,
};
use netdefense::netgen::{self, GraphSource};
use netdefense::numkernels::DenseMatrix;
use netdefense::powergrid::{assemble_reduced, grid_attack_scenario, GridParams};
use netdefense::precision::check_bits;
use netdefense::scenario::Scenario;
use netdefense::simulate::{integrate_closed_loop_in, integrate_open_loop_in, step_grid};
use netdefense::sysmodel::AttackerModel;
use netdefense::{with_precision, Error};

use crate::manifest::{self, Resolved};
use crate::{Cli, Command, Failure, Mode, Study, EXIT_PLACEMENT};

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(bits) = cli.precision {
        check_bits(bits)?;
    }
    let (resolved, out) = match &cli.command {
        Command::Replay { manifest } => {
            let m = manifest::read(manifest)?;
            let out = cli.out.clone().or_else(|| m.outputs.first().cloned());
            (m.run, out)
        }
        _ => (resolve(cli)?, cli.out.clone()),
    };
    execute(&resolved, out.as_deref(), cli.verbose)
}

fn resolve(cli: &Cli) -> Result<Resolved, Failure> {
    let scenario = |path: &Path| -> Result<Scenario, Failure> {
        let (mut sc, g) = Scenario::load(path)?;
        sc.graph = GraphSource::Inline(g);
        if let Some(seed) = cli.seed {
            sc.seed = seed;
        }
        if let Some(bits) = cli.precision {
            sc.precision_bits = bits;
        }
        Ok(sc)
    };
    Ok(match &cli.command {
        Command::Gen { spec } => Resolved::Gen { spec: spec.clone() },
        Command::Analyze { scenario: path } => Resolved::Analyze {
            scenario: scenario(path)?,
        },
        Command::Simulate { scenario: path, dt, mode } => Resolved::Simulate {
            scenario: scenario(path)?,
            dt: *dt,
            mode: *mode,
        },
        Command::Sweep {
            config,
            study,
            max_attackers,
            defender_fraction,
        } => {
            let (mut cfg, g) = SweepConfig::load(config)?;
            cfg.graph = GraphSource::Inline(g);
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(bits) = cli.precision {
                cfg.precision_bits = bits;
            }
            if *study == Study::Count && max_attackers.is_none() {
                return Err(Failure::usage("--study count needs --max-attackers"));
            }
            Resolved::Sweep {
                config: cfg,
                study: *study,
                max_attackers: *max_attackers,
                defender_fraction: *defender_fraction,
            }
        }
        Command::Grid {
            params,
            loads,
            generators,
            s,
            r,
            w0,
            t0,
            t_f,
        } => Resolved::Grid {
            params: GridParams::load(params)?,
            loads: loads.clone(),
            generators: generators.clone(),
            s: *s,
            r: *r,
            w0: *w0,
            t0: *t0,
            t_f: *t_f,
            precision_bits: cli.precision.unwrap_or(53),
        },
        Command::Replay { .. } => unreachable!("handled by run"),
    })
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

/// Writes `text` to `out` plus its manifest, or to standard output.
fn emit(run: &Resolved, out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| io_failure(path, e))?;
            manifest::write(run, path)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

/// Summary lines go to stdout when the main output is a file, else to stderr.
fn note(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn print_matrix(name: &str, m: &DenseMatrix<f64>) {
    eprintln!("{name} ({}x{}):", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:>12.6}")).collect();
        eprintln!("  [{}]", row.join(" "));
    }
}

fn json(value: &impl serde::Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::usage(e.to_string()))
}

fn uncontrollable(defenders: &[usize], e: Error) -> Failure {
    match e {
        Error::SingularGramian { .. } => Failure {
            code: EXIT_PLACEMENT,
            message: format!("defenders {defenders:?} cannot control the network: {e}"),
        },
        other => other.into(),
    }
}

fn summarize(report: &EnergyReport) -> String {
    let mu2 = report.mu2.map_or("-".to_string(), |m| format!("{m:.6e}"));
    format!(
        "E* = {:.6e}  E1 = {:.6e}  E2 = {:.6e}  E3 = {:.6e}  mu1 = {:.6e}  mu2 = {mu2}  nTw1 = {:.6e}  beta2 = {:.6e}{}",
        report.e_exact,
        report.e1,
        report.e2,
        report.e3,
        report.mu1,
        report.n_t_w1,
        report.e1,
        if report.low_confidence { "  (rank-1 estimate low confidence)" } else { "" }
    )
}

fn execute(run: &Resolved, out: Option<&Path>, verbose: bool) -> Result<(), Failure> {
    match run {
        Resolved::Gen { spec } => {
            let g = netgen::from_spec(spec).map_err(|e| Failure::usage(e.to_string()))?;
            note(out, &format!("{} nodes, {} edges", g.n, g.edge_count()));
            emit(run, out, &json(&g)?)
        }
        Resolved::Analyze { scenario } => {
            let g = scenario.graph.resolve(None)?;
            let built = scenario.build(&g)?;
            if verbose {
                print_matrix("augmented A", &built.problem.aug.a);
                print_matrix("W_p", &output_gramian(&built.system, built.problem.horizon())?);
            }
            let report = with_precision!(scenario.precision_bits, T => energy_decomposition_in::<T>(&built.problem))
                .map_err(|e| uncontrollable(&scenario.defenders, e))?;
            note(out, &summarize(&report));
            emit(run, out, &json(&report)?)
        }
        Resolved::Simulate { scenario, dt, mode } => {
            let g = scenario.graph.resolve(None)?;
            let built = scenario.build(&g)?;
            let p = &built.problem;
            step_grid(p.horizon(), *dt)?;
            let mut csv = Vec::new();
            let summary = match mode {
                Mode::Open => {
                    let traj = match with_precision!(scenario.precision_bits, T =>
                        integrate_open_loop_in::<T>(&p.aug, &p.x0, &p.w0, p.horizon(), *dt))
                    {
                        Ok(t) => t,
                        Err(Error::Divergence { time }) => {
                            note(out, &format!("open loop: state overflowed at t = {time}; diverging = true"));
                            return Ok(());
                        }
                        Err(e) => return Err(e.into()),
                    };
                    traj.write_csv_to(&mut csv).map_err(|e| io_failure(Path::new("<csv>"), e))?;
                    let norms = traj.network_norms();
                    serde_json::json!({
                        "mode": "open",
                        "steps": traj.times.len() - 1,
                        "terminal_norm": norms.last().copied().unwrap_or(0.0),
                        "max_norm": norms.iter().copied().fold(0.0, f64::max),
                        "diverging": traj.diverging(),
                    })
                }
                Mode::Closed => {
                    let cl = with_precision!(scenario.precision_bits, T => integrate_closed_loop_in::<T>(p, *dt))
                        .map_err(|e| uncontrollable(&scenario.defenders, e))?;
                    cl.trajectory
                        .write_csv_to(&mut csv)
                        .map_err(|e| io_failure(Path::new("<csv>"), e))?;
                    let mut v = serde_json::to_value(cl.summary()).map_err(|e| Failure::usage(e.to_string()))?;
                    v["mode"] = "closed".into();
                    v
                }
            };
            note(out, &summary.to_string());
            let text = String::from_utf8(csv).map_err(|e| Failure::usage(e.to_string()))?;
            emit(run, out, &text)
        }
        Resolved::Sweep {
            config,
            study,
            max_attackers,
            defender_fraction,
        } => {
            let g = config.graph.resolve(None)?;
            let format = out.map_or(TableFormat::Csv, TableFormat::from_path);
            let text = match study {
                Study::Position => {
                    let outcome = attacker_position_sweep(config, &g)?;
                    render_table(&outcome.rows, format)?
                }
                Study::Count => {
                    let k = max_attackers.ok_or_else(|| Failure::usage("--study count needs --max-attackers"))?;
                    render_count_table(&attacker_count_sweep(config, &g, k)?, format)?
                }
                Study::Scalefree => {
                    let outcome = scalefree_study(config, &g, *defender_fraction)?;
                    note(out, &format!("defenders: {:?}", outcome.defenders));
                    render_table(&outcome.rows, format)?
                }
            };
            emit(run, out, &text)
        }
        Resolved::Grid {
            params,
            loads,
            generators,
            s,
            r,
            w0,
            t0,
            t_f,
            precision_bits,
        } => {
            check_bits(*precision_bits)?;
            let gs = assemble_reduced(params)?;
            if verbose {
                print_matrix("A", &gs.a);
                print_matrix("H", &gs.h);
                print_matrix("B", &gs.b);
            }
            let atk = AttackerModel::uniform(loads.len(), *s, *r);
            let sc = grid_attack_scenario(&gs, loads, generators, &atk)?;
            let p = sc.problem(vec![0.0; gs.dim()], vec![*w0; loads.len()], *t0, *t_f)?;
            if verbose {
                print_matrix("W_p", &output_gramian(&sc.system, p.horizon())?);
            }
            let report = with_precision!(*precision_bits, T => energy_decomposition_in::<T>(&p))
                .map_err(|e| uncontrollable(generators, e))?;
            note(out, &summarize(&report));
            emit(run, out, &json(&report)?)
        }
    }
}
