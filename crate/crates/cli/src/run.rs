//! Sweep execution and output rendering.
//!
//! Every sweep sample is evaluated independently (in parallel, collected in
//! sweep order), so identical scenarios always produce byte-identical
//! output. Scalars are printed with 17 significant digits, enough to round
//! trip doubles; cells whose defining formula degenerates on null
//! directions carry the literal token `DEGENERATE` instead of a number.

use rayon::prelude::*;

use relkin::kinematics::RelativeState;
use relkin::Error;

use crate::scenario::{BuiltScenario, Quantity};
use crate::CliError;

/// One output cell: a finite value or an explicit degeneracy marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    Degenerate,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Value(v) => format!("{v:.16e}"),
            Cell::Degenerate => "DEGENERATE".into(),
        }
    }
}

/// Header plus rows of a finished run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// Evaluates the scenario over its sweep.
pub fn run_scenario(sc: &BuiltScenario) -> Result<RunOutput, CliError> {
    let dim = sc.geometry.dim();
    let header = header_for(sc, dim);
    let needs_state = sc.outputs.iter().any(|q| !q.is_component());
    let needs_components = sc.outputs.iter().any(|q| q.is_component());

    let samples = sc.sweep.values();
    let rows: Result<Vec<Vec<Cell>>, CliError> = samples
        .par_iter()
        .map(|&s| {
            let state = if needs_state {
                Some(sc.config.relative_state(s).map_err(CliError::Pipeline)?)
            } else {
                None
            };
            let components = if needs_components {
                match sc.config.energy_momentum_components(s) {
                    Ok(c) => Some(c),
                    // Null directions make the component formulas
                    // undefined; that is a property of the scenario, not a
                    // failure of the run.
                    Err(Error::DegenerateDirection(_)) => None,
                    Err(e) => return Err(CliError::Pipeline(e)),
                }
            } else {
                None
            };

            let mut row = vec![Cell::Value(s)];
            for q in &sc.outputs {
                push_cells(&mut row, *q, state.as_ref(), components.as_ref(), dim);
            }
            Ok(row)
        })
        .collect();

    Ok(RunOutput {
        header,
        rows: rows?,
    })
}

fn header_for(sc: &BuiltScenario, dim: usize) -> Vec<String> {
    let mut header = vec!["s".to_string()];
    for q in &sc.outputs {
        if q.is_vector() {
            for i in 0..dim {
                header.push(format!("{}_{i}", q.base_name()));
            }
        } else {
            header.push(q.base_name().to_string());
        }
    }
    header
}

fn push_cells(
    row: &mut Vec<Cell>,
    q: Quantity,
    state: Option<&RelativeState<f64>>,
    components: Option<&relkin::kinematics::MomentumComponents<f64>>,
    dim: usize,
) {
    let from_vec = |row: &mut Vec<Cell>, comps: &[f64]| {
        for &c in comps {
            row.push(Cell::Value(c));
        }
    };
    match q {
        Quantity::RelativeVelocity => from_vec(row, state.unwrap().relative_velocity.comps()),
        Quantity::DeviationVector => from_vec(row, state.unwrap().deviation_vector.comps()),
        Quantity::DeviationVelocity => from_vec(row, state.unwrap().deviation_velocity.comps()),
        Quantity::RelativeAcceleration => {
            from_vec(row, state.unwrap().relative_acceleration.comps())
        }
        Quantity::DeviationAcceleration => {
            from_vec(row, state.unwrap().deviation_acceleration.comps())
        }
        Quantity::RelativeMomentum => from_vec(row, state.unwrap().relative_momentum.comps()),
        Quantity::E21 | Quantity::E12 | Quantity::E11 | Quantity::E22 => {
            let e = state
                .unwrap()
                .energies
                .as_ref()
                .expect("energy outputs are rejected without a metric");
            let v = match q {
                Quantity::E21 => e.e21,
                Quantity::E12 => e.e12,
                Quantity::E11 => e.e11,
                _ => e.e22,
            };
            row.push(Cell::Value(v));
        }
        Quantity::MomentumInvariant => {
            let v = state
                .unwrap()
                .momentum_invariant
                .expect("invariant output is rejected without a metric");
            row.push(Cell::Value(v));
        }
        Quantity::P1First
        | Quantity::P2AtFirstFirst
        | Quantity::RelativeAtFirstFirst
        | Quantity::RelativeAtObserverFirst
        | Quantity::P1FirstInSecondFrame => match components {
            None => row.push(Cell::Degenerate),
            Some(c) => {
                let v = match q {
                    Quantity::P1First => Some(c.p1_first),
                    Quantity::P2AtFirstFirst => Some(c.p2_at_first_first),
                    Quantity::RelativeAtFirstFirst => Some(c.relative_at_first_first),
                    Quantity::RelativeAtObserverFirst => Some(c.relative_at_observer_first),
                    _ => c.p1_first_in_second_frame,
                };
                match v {
                    Some(v) => row.push(Cell::Value(v)),
                    None => row.push(Cell::Degenerate),
                }
            }
        },
    }
    debug_assert!(row.len() > 1, "{dim}");
}

/// Renders the run as CSV: header row, comma separators, newline-terminated
/// rows.
pub fn to_csv(out: &RunOutput) -> String {
    let mut text = out.header.join(",");
    text.push('\n');
    for row in &out.rows {
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        text.push_str(&rendered.join(","));
        text.push('\n');
    }
    text
}

/// Renders the run as an aligned plain-text table.
pub fn to_table(out: &RunOutput) -> String {
    let width = 24usize;
    let mut text = String::new();
    for (i, name) in out.header.iter().enumerate() {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&format!("{name:>width$}"));
    }
    text.push('\n');
    for row in &out.rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            let rendered = match cell {
                Cell::Value(v) => format!("{v:>width$.9e}"),
                Cell::Degenerate => format!("{:>width$}", "DEGENERATE"),
            };
            text.push_str(&rendered);
        }
        text.push('\n');
    }
    text
}
