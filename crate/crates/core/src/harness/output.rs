//! CSV and report files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{FlowError, Result};
use crate::geometry::Dimension;
use crate::harness::report::VerificationReport;
use crate::solver::{state_rows, FlowState, Trajectory};

pub const CSV_HEADER: &str = "t,r,u,U,R";

/// Writes `t,r,u,U,R` rows, t-major and r-minor, in full precision.
pub fn write_csv<W: Write>(states: &[FlowState], dim: Dimension, out: W) -> Result<()> {
    if states.is_empty() {
        return Err(FlowError::Precondition("no states to write".into()));
    }
    let mut out = BufWriter::new(out);
    writeln!(out, "{CSV_HEADER}")?;
    for state in states {
        for row in state_rows(state, dim) {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                row[0], row[1], row[2], row[3], row[4]
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    emit_states_csv(&traj.states, traj.dim(), path)
}

pub fn emit_states_csv(states: &[FlowState], dim: Dimension, path: &Path) -> Result<()> {
    write_csv(states, dim, fs::File::create(path)?)
}

pub fn emit_report(report: &VerificationReport, path: &Path) -> Result<()> {
    let mut text = report.to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ConformalFactor;
    use crate::geometry::RadialGrid;
    use crate::solver::{solve_dirichlet, DirichletProblem};

    fn rigidity_run() -> Trajectory {
        let g = RadialGrid::with_spacing(4.0, 0.1).unwrap();
        let u = ConformalFactor::constant(g, 1.0).unwrap();
        let p = DirichletProblem::new(&u, 4.0, Dimension::new(3).unwrap(), 0.2)
            .unwrap()
            .with_output_stamps(vec![0.1, 0.2])
            .unwrap();
        solve_dirichlet(&p, 0.01).unwrap()
    }

    #[test]
    fn single_state_has_one_row_per_node() {
        let traj = rigidity_run();
        let mut buf = Vec::new();
        write_csv(&traj.states[..1], traj.dim(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,r,u,U,R");
        assert_eq!(lines.len(), 1 + 41);
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 0.0, 1.0, 1.0, -6.0]);
    }

    #[test]
    fn rows_are_t_major_and_u_is_constant_per_block() {
        let traj = rigidity_run();
        let mut buf = Vec::new();
        write_csv(&traj.states, traj.dim(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 3 * 41);
        for block in rows.chunks(41) {
            assert!(block.iter().all(|row| row[0] == block[0][0]));
            assert!(block.iter().all(|row| (row[2] - block[0][2]).abs() < 1e-12));
            assert!(block.windows(2).all(|w| w[0][1] < w[1][1]));
        }
    }

    #[test]
    fn empty_input_and_bad_path() {
        let traj = rigidity_run();
        assert!(write_csv(&[], traj.dim(), Vec::new()).is_err());
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("no/such/dir/out.csv");
        assert!(matches!(emit_csv(&traj, &missing), Err(FlowError::Io(_))));
    }

    #[test]
    fn files_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        emit_csv(&rigidity_run(), &a).unwrap();
        emit_csv(&rigidity_run(), &b).unwrap();
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}
