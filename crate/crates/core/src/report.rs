//! Result serialization: value-surface CSV, convergence CSV, and the
//! human-readable solve report.
//!
//! All numbers are printed through [`format_sig`] so exports are stable,
//! diffable, and reparse to the original values at the stated precision.

use std::io::Write;

use crate::convergence::ConvergenceReport;
use crate::error::Result;
use crate::network::{Allocation, BudgetPair, SensorNetwork};
use crate::objective::Objective;
use crate::table::ValueTable;

/// Renders `value` with at most `digits` significant digits, trailing
/// zeros trimmed: `format_sig(10.100, 12)` is `"10.1"`, zero is `"0"`.
/// Plain decimal notation is used for moderate magnitudes, scientific
/// (`1.5e-7`) outside them.
pub fn format_sig(value: f64, digits: usize) -> String {
    assert!(digits >= 1, "at least one significant digit");
    if value == 0.0 {
        return "0".to_string();
    }
    // `{:.*e}` rounds to `digits` significant digits and re-normalizes the
    // exponent, e.g. 0.0999 at two digits -> "1.0e-1".
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if mantissa.starts_with('-') { "-" } else { "" };
    let digit_run: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digit_run = digit_run.trim_end_matches('0');
    let digit_run = if digit_run.is_empty() { "0" } else { digit_run };

    // Keep plain decimal while it stays readable; otherwise scientific.
    if (-4..15).contains(&exp) {
        let point = exp + 1; // digits before the decimal point
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat(-point as usize), digit_run)
        } else if (point as usize) >= digit_run.len() {
            format!("{}{}", digit_run, "0".repeat(point as usize - digit_run.len()))
        } else {
            format!("{}.{}", &digit_run[..point as usize], &digit_run[point as usize..])
        };
        format!("{sign}{body}")
    } else if digit_run.len() == 1 {
        format!("{sign}{digit_run}e{exp}")
    } else {
        format!("{sign}{}.{}e{exp}", &digit_run[..1], &digit_run[1..])
    }
}

/// Number of significant digits used by the CSV exporters.
pub const EXPORT_DIGITS: usize = 12;

fn write_counted(sink: &mut dyn Write, line: &str, written: &mut usize) -> Result<()> {
    sink.write_all(line.as_bytes())?;
    *written += line.len();
    Ok(())
}

/// Writes a value surface as CSV — header `x_budget,y_budget,value`, then
/// one row per cell in row-major order (all outer budgets for the first
/// inner budget, then the next inner budget, ...). Numbers carry 12
/// significant digits; lines end in LF. Returns the bytes written.
pub fn export_surface(table: &ValueTable, sink: &mut dyn Write) -> Result<usize> {
    let mut written = 0;
    write_counted(sink, "x_budget,y_budget,value\n", &mut written)?;
    for xi in 0..table.nx() {
        let x = format_sig(table.x_mesh().points()[xi], EXPORT_DIGITS);
        for yi in 0..table.ny() {
            let line = format!(
                "{x},{},{}\n",
                format_sig(table.y_mesh().points()[yi], EXPORT_DIGITS),
                format_sig(table.value(xi, yi), EXPORT_DIGITS),
            );
            write_counted(sink, &line, &mut written)?;
        }
    }
    Ok(written)
}

/// Writes a refinement study as CSV — header `epsilon,value,delta,bound`,
/// one row per level, coarsest first. Returns the bytes written.
pub fn export_convergence(report: &ConvergenceReport, sink: &mut dyn Write) -> Result<usize> {
    let mut written = 0;
    write_counted(sink, "epsilon,value,delta,bound\n", &mut written)?;
    for level in &report.levels {
        let line = format!(
            "{},{},{},{}\n",
            format_sig(level.epsilon, EXPORT_DIGITS),
            format_sig(level.value, EXPORT_DIGITS),
            format_sig(level.delta, EXPORT_DIGITS),
            format_sig(level.bound, EXPORT_DIGITS),
        );
        write_counted(sink, &line, &mut written)?;
    }
    Ok(written)
}

/// Everything a `solve` run reports: what was solved, what came out, and
/// how long it took. Sensor spends are kept in network order so rendered
/// reports are stable and diffable.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Solver name and version, e.g. `layered-defense 0.1.0`.
    pub solver: String,
    pub objective: Objective,
    pub epsilon: f64,
    /// Mesh sizes (inner-layer points, outer-layer points).
    pub mesh: (usize, usize),
    pub value: f64,
    pub inner_spends: Vec<(String, f64)>,
    pub outer_spends: Vec<(String, f64)>,
    pub slack_x: f64,
    pub slack_y: f64,
    pub wall_clock_s: f64,
}

impl SolveReport {
    /// Assembles a report from a solved instance. The allocation must cover
    /// exactly the sensors of `net` (which a solver-produced allocation
    /// always does).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        net: &SensorNetwork,
        budgets: BudgetPair,
        epsilon: f64,
        objective: Objective,
        mesh: (usize, usize),
        value: f64,
        allocation: &Allocation,
        wall_clock_s: f64,
    ) -> Self {
        let spends = |ids: Vec<&String>, map: &std::collections::BTreeMap<String, f64>| {
            ids.into_iter()
                .map(|id| (id.clone(), map.get(id).copied().unwrap_or(0.0)))
                .collect::<Vec<_>>()
        };
        SolveReport {
            solver: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            objective,
            epsilon,
            mesh,
            value,
            inner_spends: spends(net.inner.iter().map(|s| &s.id).collect(), &allocation.inner),
            outer_spends: spends(net.outer.iter().map(|s| &s.id).collect(), &allocation.outer),
            slack_x: budgets.x - allocation.sum_inner(),
            slack_y: budgets.y - allocation.sum_outer(),
            wall_clock_s,
        }
    }

    /// Renders the report as line-oriented text with a fixed field order.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "solver: {}", self.solver);
        let _ = writeln!(out, "objective: {}", self.objective);
        let _ = writeln!(out, "epsilon: {}", format_sig(self.epsilon, EXPORT_DIGITS));
        let _ = writeln!(out, "mesh: {} x {}", self.mesh.0, self.mesh.1);
        let _ = writeln!(out, "value: {}", format_sig(self.value, EXPORT_DIGITS));
        for (id, v) in &self.inner_spends {
            let _ = writeln!(out, "inner {id}: {}", format_sig(*v, EXPORT_DIGITS));
        }
        for (id, v) in &self.outer_spends {
            let _ = writeln!(out, "outer {id}: {}", format_sig(*v, EXPORT_DIGITS));
        }
        let _ = writeln!(out, "slack_x: {}", format_sig(self.slack_x, EXPORT_DIGITS));
        let _ = writeln!(out, "slack_y: {}", format_sig(self.slack_y, EXPORT_DIGITS));
        let _ = writeln!(out, "wall_clock_s: {}", format_sig(self.wall_clock_s, 6));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{solve_expected, sweep_expected};
    use crate::network::build_example_8_1;
    use crate::objective::eval_expected;
    use crate::scenario::{bundled, parse_scenario};
    use crate::testutil::identity_chain;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(10.0, 12), "10");
        assert_eq!(format_sig(0.1, 12), "0.1");
        assert_eq!(format_sig(10.1, 12), "10.1");
        assert_eq!(format_sig(-2.5, 12), "-2.5");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_sig(1.018233764908628, 12), "1.01823376491");
        // Rounding that carries into a new leading digit re-normalizes.
        assert_eq!(format_sig(0.99999999999999, 12), "1");
        assert_eq!(format_sig(9.99999999999999e-3, 2), "0.01");
        // Large and tiny magnitudes fall back to scientific notation.
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_sig(1e20, 12), "1e20");
        assert_eq!(format_sig(-2.25e21, 3), "-2.25e21");
        // Fewer digits round.
        assert_eq!(format_sig(1.0 / 3.0, 3), "0.333");
        assert_eq!(format_sig(123456.0, 3), "123000");
    }

    #[test]
    fn zero_table_exports_header_and_one_row() {
        let sol = solve_expected(&identity_chain(1), BudgetPair::new(0.0, 0.0), 0.5).unwrap();
        let mut buf = Vec::new();
        let n = export_surface(sol.table(), &mut buf).unwrap();
        assert_eq!(buf, b"x_budget,y_budget,value\n0,0,0\n");
        assert_eq!(n, buf.len());
    }

    #[test]
    fn reference_surface_exports_every_cell_and_reparses_exactly() {
        let s = parse_scenario(bundled("example_8_1").unwrap()).unwrap();
        let table = sweep_expected(&s.network, s.budgets, s.epsilon).unwrap();
        let mut buf = Vec::new();
        let n = export_surface(&table, &mut buf).unwrap();
        assert_eq!(n, buf.len());

        let text = std::str::from_utf8(&buf).unwrap();
        assert!(!text.contains('\r'), "LF line endings only");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10_303); // header + 101*102 cells
        assert_eq!(lines[0], "x_budget,y_budget,value");

        // Row-major: the first cells hold the smallest inner budget.
        assert_eq!(lines[1], "0,0,0");
        assert_eq!(lines[2], "0,0.1,0.03"); // 0.1 on one outer sensor at slope 0.3

        // Every row reparses to the table's value at full export precision.
        for (k, line) in lines[1..].iter().enumerate() {
            let (xi, yi) = (k / table.ny(), k % table.ny());
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 3);
            let v: f64 = fields[2].parse().unwrap();
            let cell = table.value(xi, yi);
            assert!((v - cell).abs() <= 1e-11 * cell.abs().max(1.0), "{line}");
            // And the printed form is the canonical 12-digit rendering.
            assert_eq!(fields[2], &format_sig(cell, EXPORT_DIGITS));
        }
    }

    #[test]
    fn convergence_export_matches_the_report() {
        let report = crate::convergence::refinement_study(
            &identity_chain(2),
            BudgetPair::new(1.0, 1.0),
            0.5,
            1,
            Objective::Expected,
        )
        .unwrap();
        let mut buf = Vec::new();
        export_convergence(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "epsilon,value,delta,bound");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.5,2,0,"));
        assert!(lines[2].starts_with("0.25,2,0,"));
    }

    #[test]
    fn solve_report_renders_stable_fields_in_network_order() {
        let net = build_example_8_1();
        let budgets = BudgetPair::new(2.0, 2.0);
        let sol = solve_expected(&net, budgets, 0.5).unwrap();
        let alloc = sol.allocation();
        let report = SolveReport::new(
            &net,
            budgets,
            0.5,
            Objective::Expected,
            (sol.table().nx(), sol.table().ny()),
            sol.value(),
            &alloc,
            0.125,
        );
        assert_eq!(report.solver, "layered-defense 0.1.0");
        assert!((report.slack_x + report.slack_y) >= -1e-12);
        // The reported value must be reproducible from the allocation.
        assert!((eval_expected(&net, &alloc).unwrap() - report.value).abs() <= 1e-9);

        let text = report.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "solver: layered-defense 0.1.0");
        assert_eq!(lines[1], "objective: expected");
        assert_eq!(lines[2], "epsilon: 0.5");
        assert_eq!(lines[3], "mesh: 5 x 5");
        assert!(lines[4].starts_with("value: "));
        // Sensors appear in network order, all thirteen of them.
        let ids: Vec<&str> = lines[5..18].iter().map(|l| l.split(':').next().unwrap()).collect();
        assert_eq!(
            ids,
            [
                "inner i1", "inner i2", "inner i3", "inner i4", "outer j1", "outer j2", "outer j3",
                "outer j4", "outer j5", "outer j6", "outer j7", "outer j8", "outer j9",
            ]
        );
        assert!(lines[18].starts_with("slack_x: "));
        assert!(lines[19].starts_with("slack_y: "));
        assert!(lines[20].starts_with("wall_clock_s: 0.125"));
    }
}
