use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gridcoh::dynamics::{
    assemble_state_space, h2_squared_closed_form, h2_squared_gramian, preset_spec, simulate_impulse,
    topology_term, SimulationOptions,
};
use gridcoh::io::{metric_spec, MetricEntry, NetworkFile};
use gridcoh::netgraph::{build_laplacian, is_connected};
use gridcoh::solver::{design as solve_design, BnbOptions, DesignOptions};
use gridcoh::{CoherenceSpec, DesignMode, DesignProblem, Error, Line, MetricPreset, PowerNetwork};
use log::warn;

use crate::report::{metric_label, BoundsEcho, ProblemEcho, ResultFile, SelectedLine, RESULT_SCHEMA};
use crate::{CompareArgs, DesignArgs, EvaluateArgs, NetworkArgs, SimulateArgs, Switch};

/// Stored and re-evaluated objectives must agree to this relative precision.
const REEVALUATION_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Unreadable files and inconsistent arguments.
    Input(String),
}

impl CliError {
    /// 0 ok, 1 invalid input, 2 disconnected, 3 assumption violated,
    /// 4 no feasible topology, 5 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidNetwork(_)
                | Error::UnknownPreset(_)
                | Error::Dimension(_)
                | Error::GuardExceeded { .. } => 1,
                Error::Disconnected | Error::Unreachable(_) | Error::SingularLaplacian => 2,
                Error::NotRadial(_) | Error::ZeroInertia(_) | Error::Assumption(_) => 3,
                Error::InfeasibleBounds { .. } | Error::NoFeasibleTopology => 4,
                Error::Numerical(_) => 5,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot write {}: {e}", path.display()))
}

struct Loaded {
    path: String,
    name: Option<String>,
    network: PowerNetwork,
    spec: CoherenceSpec,
    preset: Option<MetricPreset>,
}

fn load(args: &NetworkArgs) -> Result<Loaded, CliError> {
    let file = NetworkFile::read(&args.network)?;
    let network = file.network()?;
    let (spec, preset) = match (args.metric, &file.metric) {
        (Some(p), _) => (preset_spec(p.into(), &network), Some(p.into())),
        (None, Some(MetricEntry::Preset { preset })) => (preset_spec(*preset, &network), Some(*preset)),
        (None, Some(m)) => (metric_spec(m, &network)?, None),
        (None, None) => (preset_spec(MetricPreset::Coherence, &network), Some(MetricPreset::Coherence)),
    };
    Ok(Loaded {
        path: args.network.display().to_string(),
        name: file.name,
        network,
        spec,
        preset,
    })
}

struct Cost {
    topology: f64,
    h2: Option<f64>,
}

/// Cost of operating exactly `lines`.
fn cost_of(loaded: &Loaded, lines: &[&Line]) -> Result<Cost, CliError> {
    let net = &loaded.network;
    let n = net.n_buses();
    if !is_connected(lines.iter().copied(), n) {
        return Err(Error::Disconnected.into());
    }
    let l = build_laplacian(lines.iter().copied(), n, net.reference());
    let params = net.machine_params();
    let topology = topology_term(&loaded.spec.reduced_w(net.reference()), &l.reduced())?;
    let h2 = match params.uniform_damping() {
        Some(_) => Some(h2_squared_closed_form(&loaded.spec, &l, &params)?.total),
        None => None,
    };
    Ok(Cost { topology, h2 })
}

fn in_service(net: &PowerNetwork) -> Vec<&Line> {
    net.existing_lines().collect()
}

/// Line indices stored in `result`, checked against `net`.
fn result_selection(result: &ResultFile, net: &PowerNetwork) -> Result<Vec<usize>, CliError> {
    if result.problem.n_buses != net.n_buses() || result.problem.n_lines != net.lines().len() {
        return Err(CliError::Input(format!(
            "result was produced for {} buses and {} lines, the network has {} and {}",
            result.problem.n_buses,
            result.problem.n_lines,
            net.n_buses(),
            net.lines().len()
        )));
    }
    result
        .selected
        .iter()
        .map(|s| match net.lines().get(s.index) {
            Some(l) if l.key() == (s.from.min(s.to), s.from.max(s.to)) => Ok(s.index),
            _ => Err(CliError::Input(format!(
                "result line {} ({}-{}) does not match the network",
                s.index, s.from, s.to
            ))),
        })
        .collect()
}

fn print_header(loaded: &Loaded, in_service: usize) {
    let net = &loaded.network;
    println!(
        "network: {} ({} buses, {} lines, {} in service, reference bus {})",
        loaded.name.as_deref().unwrap_or(&loaded.path),
        net.n_buses(),
        net.lines().len(),
        in_service,
        net.reference()
    );
    println!("metric: {}", metric_label(loaded.preset));
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let loaded = load(&args.net)?;
    let net = &loaded.network;
    let stored = args.result.as_deref().map(ResultFile::read).transpose()?;
    let lines: Vec<&Line> = match &stored {
        Some(result) => result_selection(result, net)?.into_iter().map(|m| &net.lines()[m]).collect(),
        None => in_service(net),
    };
    print_header(&loaded, lines.len());
    let cost = cost_of(&loaded, &lines)?;
    println!("topology term: {:.9}", cost.topology);
    match cost.h2 {
        Some(h2) => println!("h2 squared: {h2:.9}"),
        None => println!("h2 squared: no closed form (damping differs between buses)"),
    }
    if args.gramian {
        let l = build_laplacian(lines.iter().copied(), net.n_buses(), net.reference());
        let ss = assemble_state_space(&l, &net.machine_params(), &loaded.spec)?;
        let g = h2_squared_gramian(&ss)?;
        match cost.h2 {
            Some(h2) => println!(
                "h2 squared (gramian): {g:.9} (relative difference {:.3e})",
                (g - h2).abs() / h2.abs().max(f64::MIN_POSITIVE)
            ),
            None => println!("h2 squared (gramian): {g:.9}"),
        }
    }
    if let Some(result) = stored {
        let diff = (result.objective - cost.topology).abs() / result.objective.abs().max(1e-300);
        println!("stored objective: {:.9} (relative difference {diff:.3e})", result.objective);
        if diff > REEVALUATION_TOL {
            return Err(CliError::Input(format!(
                "stored objective {} does not match the re-evaluated {}",
                result.objective, cost.topology
            )));
        }
    }
    Ok(())
}

fn build_problem(args: &DesignArgs, loaded: &Loaded) -> Result<DesignProblem, CliError> {
    let net = &loaded.network;
    let spec = loaded.spec.clone();
    let problem = match DesignMode::from(args.mode) {
        DesignMode::Augment => match (args.budget, args.add_lines) {
            (Some(k), _) => DesignProblem::augment(net, spec, k)?,
            (None, Some(extra)) => DesignProblem::augment_by(net, spec, extra)?,
            (None, None) => {
                return Err(CliError::Input("augment mode needs --budget or --add-lines".into()));
            }
        },
        DesignMode::Radial => {
            if args.add_lines.is_some() {
                return Err(CliError::Input("--add-lines applies to augment mode only".into()));
            }
            let p = DesignProblem::radial(net, spec)?;
            if let Some(k) = args.budget.filter(|&k| k != p.budget()) {
                return Err(Error::Assumption(format!(
                    "a radial design over {} buses has exactly {} lines, not {k}",
                    net.n_buses(),
                    p.budget()
                ))
                .into());
            }
            p
        }
    };
    Ok(problem)
}

pub fn design(args: &DesignArgs) -> Result<(), CliError> {
    let loaded = load(&args.net)?;
    let net = &loaded.network;
    let problem = build_problem(args, &loaded)?;
    print_header(&loaded, net.existing_indices().len());
    println!(
        "mode: {}, budget {} lines ({} fixed, {} free candidates)",
        format!("{:?}", problem.mode()).to_lowercase(),
        problem.budget(),
        problem.fixed().len(),
        problem.free_edges().len()
    );

    let opts = DesignOptions {
        bounds: args.bounds.into(),
        tighten: args.tighten == Switch::On,
        solver: args.solver.into(),
        bnb: BnbOptions { node_limit: args.node_limit, ..BnbOptions::default() },
    };
    let run = solve_design(&problem, &opts)?;
    if let Some(path) = &args.export_model {
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        let mut out = BufWriter::new(file);
        run.model.write_lp(&mut out).and_then(|()| out.flush()).map_err(|e| io_error(path, e))?;
    }

    let sol = &run.solution;
    let added: Vec<String> = sol
        .selected
        .iter()
        .filter(|m| !problem.fixed().contains(m))
        .map(|&m| {
            let l = &net.lines()[m];
            format!("{m} ({}-{})", l.from, l.to)
        })
        .collect();
    println!("selected lines: {}", added.join(", "));
    println!("objective (topology term): {:.9}", sol.objective);
    if let Some(h2) = sol.h2_cost {
        println!("h2 squared: {h2:.9}");
    }
    let s = &sol.stats;
    println!(
        "nodes {}, lp solves {}, proven optimal {}, gap {:.3e}, {:.2} s",
        s.nodes_explored, s.lp_solves, s.proven_optimal, s.final_gap, s.wall_time_s
    );
    if !s.proven_optimal {
        warn!("node limit reached; the reported design is the best found, not proven optimal");
    }

    if let Some(path) = &args.out {
        let result = ResultFile {
            schema: RESULT_SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            problem: ProblemEcho {
                network: loaded.path.clone(),
                network_name: loaded.name.clone(),
                n_buses: net.n_buses(),
                n_lines: net.lines().len(),
                reference: net.reference(),
                mode: problem.mode(),
                budget: problem.budget(),
                metric: metric_label(loaded.preset),
            },
            solver: opts.solver,
            selected: sol
                .selected
                .iter()
                .map(|&m| {
                    let l = &net.lines()[m];
                    SelectedLine { index: m, from: l.from, to: l.to, susceptance: l.susceptance, status: l.status }
                })
                .collect(),
            objective: sol.objective,
            h2_squared: sol.h2_cost,
            bounds: BoundsEcho {
                choice: opts.bounds,
                tighten: opts.tighten,
                total_width: run.bounds.total_width(),
                tightening: run.tightening.clone(),
            },
            model: run.model_size,
            stats: sol.stats.clone(),
        };
        result.write(path)?;
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let loaded = load(&args.net)?;
    let net = &loaded.network;
    let lines = in_service(net);
    if !is_connected(lines.iter().copied(), net.n_buses()) {
        return Err(Error::Disconnected.into());
    }
    let l = build_laplacian(lines.iter().copied(), net.n_buses(), net.reference());
    let ss = assemble_state_space(&l, &net.machine_params(), &loaded.spec)?;
    let opts = SimulationOptions { horizon: args.horizon, dt: args.dt, stride: args.stride };
    let traj = simulate_impulse(&ss, args.impulse_bus, &opts)?;
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        let mut out = BufWriter::new(file);
        traj.write_csv(&mut out).and_then(|()| out.flush()).map_err(|e| io_error(path, e))?;
    }
    print_header(&loaded, lines.len());
    println!("impulse at bus {}, horizon {} s, step {} s", args.impulse_bus, args.horizon, args.dt);
    println!("output energy: {:.9}", traj.output_energy());
    println!(
        "peak |omega| away from bus {}: {:.9}",
        args.impulse_bus,
        traj.peak_abs_omega(Some(args.impulse_bus))
    );
    println!("energy share of the last 10% of the horizon: {:.3e}", traj.tail_fraction);
    if traj.tail_fraction > 1e-3 {
        warn!("the response has not settled; a longer horizon will raise the energy");
    }
    Ok(())
}

fn parse_indices(text: &str, n_lines: usize) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let m: usize = s
                .parse()
                .map_err(|_| CliError::Input(format!("'{s}' is not a line index")))?;
            if m >= n_lines {
                return Err(CliError::Input(format!("line index {m} out of range (network has {n_lines})")));
            }
            Ok(m)
        })
        .collect()
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let loaded = load(&args.net)?;
    let net = &loaded.network;
    let existing = net.existing_indices();
    let mut selections: Vec<(String, Vec<usize>)> = vec![("in service".into(), Vec::new())];
    for text in &args.lines {
        let extra = parse_indices(text, net.lines().len())?;
        let label = extra.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        selections.push((format!("+{label}"), extra));
    }
    for path in &args.result {
        let result = ResultFile::read(path)?;
        selections.push((path.display().to_string(), result_selection(&result, net)?));
    }

    print_header(&loaded, existing.len());
    println!("{:<32} {:>6} {:>16} {:>16}", "selection", "lines", "topology term", "h2 squared");
    let mut best: Option<(f64, usize)> = None;
    let mut rows = Vec::new();
    for (k, (label, extra)) in selections.iter().enumerate() {
        let mut chosen: Vec<usize> = existing.iter().chain(extra).copied().collect();
        chosen.sort_unstable();
        chosen.dedup();
        let lines: Vec<&Line> = chosen.iter().map(|&m| &net.lines()[m]).collect();
        let row = match cost_of(&loaded, &lines) {
            Ok(c) => {
                if best.is_none_or(|(b, _)| c.topology < b) {
                    best = Some((c.topology, k));
                }
                let h2 = c.h2.map_or_else(|| "-".to_string(), |h| format!("{h:.9}"));
                format!("{label:<32} {:>6} {:>16.9} {h2:>16}", lines.len(), c.topology)
            }
            Err(CliError::Core(Error::Disconnected)) => {
                format!("{label:<32} {:>6} {:>16} {:>16}", lines.len(), "disconnected", "-")
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    for (k, row) in rows.iter().enumerate() {
        let mark = if best.is_some_and(|(_, b)| b == k) { " *" } else { "" };
        println!("{row}{mark}");
    }
    Ok(())
}
