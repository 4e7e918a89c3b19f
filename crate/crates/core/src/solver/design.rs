use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{branch_and_bound_with, brute_force_design_with, BnbOptions, DesignSolution};
use crate::error::{Error, Result};
use crate::formulation::{
    bounds_augment, bounds_radial, build_milp, build_milp_tightened, cutset_report, loose_bounds,
    tighten_bounds, DesignMode, DesignProblem, MilpModel, TighteningSummary, VariableBounds,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsChoice {
    /// Structural bounds for the problem's mode.
    #[default]
    Auto,
    /// The box `[0, 10]` on every entry.
    Loose,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Bnb,
    Brute,
}

impl FromStr for BoundsChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "loose" => Ok(Self::Loose),
            _ => Err(Error::InvalidNetwork(format!("unknown bounds choice '{s}'"))),
        }
    }
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bnb" => Ok(Self::Bnb),
            "brute" => Ok(Self::Brute),
            _ => Err(Error::InvalidNetwork(format!("unknown solver '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignOptions {
    pub bounds: BoundsChoice,
    pub tighten: bool,
    pub solver: SolverChoice,
    pub bnb: BnbOptions,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            bounds: BoundsChoice::Auto,
            tighten: true,
            solver: SolverChoice::Bnb,
            bnb: BnbOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSize {
    pub variables: usize,
    pub binaries: usize,
    pub products: usize,
    pub rows: usize,
}

impl ModelSize {
    fn of(model: &MilpModel) -> Self {
        Self {
            variables: model.n_vars(),
            binaries: model.n_binaries(),
            products: model.n_y(),
            rows: model.rows().len(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DesignRun {
    pub solution: DesignSolution,
    /// Bounds handed to the model, after tightening.
    pub bounds: VariableBounds,
    pub tightening: Option<TighteningSummary>,
    pub model_size: ModelSize,
    pub model: MilpModel,
}

/// Builds the bounded model and solves it in one call.
pub fn design(problem: &DesignProblem, opts: &DesignOptions) -> Result<DesignRun> {
    let bounds = match (opts.bounds, problem.mode()) {
        (BoundsChoice::Loose, _) => loose_bounds(problem),
        (BoundsChoice::Auto, DesignMode::Augment) => bounds_augment(problem)?,
        (BoundsChoice::Auto, DesignMode::Radial) => bounds_radial(problem)?,
    };
    let (model, bounds, tightening, forced) = if opts.tighten {
        let report = cutset_report(problem)?;
        let t = tighten_bounds(problem, &bounds, &report)?;
        let model = build_milp_tightened(problem, &t)?;
        (model, t.bounds, Some(t.summary), t.fixed_on)
    } else {
        (build_milp(problem, &bounds)?, bounds, None, Vec::new())
    };
    let solution = match opts.solver {
        SolverChoice::Bnb => branch_and_bound_with(&model, problem, &opts.bnb)?,
        SolverChoice::Brute => brute_force_design_with(problem, &forced)?,
    };
    Ok(DesignRun {
        solution,
        bounds,
        tightening,
        model_size: ModelSize::of(&model),
        model,
    })
}
