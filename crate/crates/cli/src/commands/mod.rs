use clap::Subcommand;

pub mod conductance;
pub mod counterexample;
pub mod losange;
pub mod simulate;
pub mod sublinear;
pub mod urn;

use crate::{CliError, Outcome};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the ant process from a config file.
    Simulate(simulate::SimulateArgs),
    /// Side weights on the two-path counterexample graph, plus the exact drift.
    Counterexample(counterexample::CounterexampleArgs),
    /// Surviving edges on the triangle under a walk exponent.
    SublinearSuperlinear(sublinear::SublinearArgs),
    /// Effective conductance between nest and food.
    Conductance(conductance::ConductanceArgs),
    /// Reinforcement probabilities, drift and inequality checks on the losange.
    LosangeAnalytics(losange::LosangeArgs),
    /// Simulate one of the urn processes.
    Urn(urn::UrnArgs),
}

impl Command {
    pub fn run(self) -> Result<Outcome, CliError> {
        match self {
            Command::Simulate(a) => simulate::run(a),
            Command::Counterexample(a) => counterexample::run(a),
            Command::SublinearSuperlinear(a) => sublinear::run(a),
            Command::Conductance(a) => conductance::run(a),
            Command::LosangeAnalytics(a) => losange::run(a),
            Command::Urn(a) => urn::run(a),
        }
    }
}

/// Parses a comma-separated list of numbers.
pub(crate) fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}
