//! Scenario-file parsing and serialization.
//!
//! Scenarios are line-oriented text: one field per line, `#` starts a
//! comment, blank lines are ignored. Scalar fields are `epsilon`,
//! `budget_x`, `budget_y`, and the optional `objective` (default
//! `expected`) and `domain_max` (default: the owning layer's budget, used
//! only by `lines`-form curves). Sensors are declared as
//!
//! ```text
//! inner <id> lines [[slope,intercept],...]
//! inner <id> breakpoints [[budget,rate],...]
//! outer <id> flow <value> lines [[slope,intercept],...]
//! branch <inner-id> <outer-id> <outer-id> ...
//! ```
//!
//! Sensor and branch order in the file is the processing order everywhere
//! downstream, so scenarios pin results bit-for-bit. Ids are bare tokens
//! (no whitespace).

use crate::curves::{AffineLine, PwlCurve};
use crate::error::{Error, Result};
use crate::network::{Allocation, Branch, BudgetPair, InnerSensor, OuterSensor, SensorNetwork};
use crate::objective::Objective;

/// A fully specified solver input: the network, the budgets (or sweep
/// maxima), the mesh step, and the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: SensorNetwork,
    pub budgets: BudgetPair,
    pub epsilon: f64,
    pub objective: Objective,
}

/// Names accepted by [`bundled`], for help text and error messages.
pub const BUNDLED_NAMES: [&str; 3] = ["example_8_1", "example_8_2", "two_branch_small"];

/// Returns the text of a scenario shipped with the binary, or `None` for
/// unknown names. See [`BUNDLED_NAMES`].
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "example_8_1" => Some(include_str!("../scenarios/example_8_1.scn")),
        "example_8_2" => Some(include_str!("../scenarios/example_8_2.scn")),
        "two_branch_small" => Some(include_str!("../scenarios/two_branch_small.scn")),
        _ => None,
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, message: message.into() }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| syntax(line, format!("expected a number, found `{token}`")))
}

/// Byte cursor over a whitespace-stripped pair list like `[[0,0],[1,1]]`.
struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(
                self.line,
                format!("expected `{}` at byte {} of the pair list", c as char, self.pos + 1),
            ))
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, b'+' | b'-' | b'.' | b'e' | b'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let token =
            std::str::from_utf8(&self.bytes[start..self.pos]).expect("matched bytes are ASCII");
        parse_number(token, self.line)
    }
}

/// Parses `[[a,b],[c,d],...]` (whitespace already removed) into pairs.
fn parse_pair_list(src: &str, line: usize) -> Result<Vec<(f64, f64)>> {
    let mut cur = Cursor { bytes: src.as_bytes(), pos: 0, line };
    cur.expect(b'[')?;
    let mut pairs = Vec::new();
    if cur.peek() == Some(b']') {
        cur.pos += 1;
    } else {
        loop {
            cur.expect(b'[')?;
            let a = cur.number()?;
            cur.expect(b',')?;
            let b = cur.number()?;
            cur.expect(b']')?;
            pairs.push((a, b));
            match cur.peek() {
                Some(b',') => cur.pos += 1,
                Some(b']') => {
                    cur.pos += 1;
                    break;
                }
                _ => {
                    return Err(syntax(
                        line,
                        format!("expected `,` or `]` at byte {} of the pair list", cur.pos + 1),
                    ))
                }
            }
        }
    }
    if cur.pos != cur.bytes.len() {
        return Err(syntax(line, "trailing text after the pair list"));
    }
    Ok(pairs)
}

enum CurveForm {
    Lines(Vec<(f64, f64)>),
    Breakpoints(Vec<(f64, f64)>),
}

fn curve_form(form: &str, pairs: Vec<(f64, f64)>, line: usize) -> Result<CurveForm> {
    match form {
        "lines" => Ok(CurveForm::Lines(pairs)),
        "breakpoints" => Ok(CurveForm::Breakpoints(pairs)),
        other => Err(syntax(
            line,
            format!("unknown curve form `{other}` (use `lines` or `breakpoints`)"),
        )),
    }
}

fn build_curve(form: &CurveForm, default_domain: f64) -> Result<PwlCurve> {
    match form {
        CurveForm::Lines(pairs) => {
            let lines = pairs
                .iter()
                .map(|&(slope, intercept)| AffineLine::new(slope, intercept))
                .collect::<Result<Vec<_>>>()?;
            PwlCurve::from_lines(&lines, default_domain)
        }
        CurveForm::Breakpoints(pairs) => PwlCurve::from_breakpoints(pairs.clone()),
    }
}

fn set_scalar(slot: &mut Option<f64>, name: &str, tokens: &[&str], line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(syntax(line, format!("duplicate field `{name}`")));
    }
    if tokens.len() != 1 {
        return Err(syntax(line, format!("`{name}` takes exactly one value")));
    }
    *slot = Some(parse_number(tokens[0], line)?);
    Ok(())
}

/// Parses a scenario file. Grammar problems surface as [`Error::Syntax`]
/// with the 1-based line number or [`Error::UnknownField`]; problems with
/// the described network surface as the corresponding curve or network
/// errors (e.g. [`Error::InvalidNetwork`]). A missing required field is
/// reported against line 0.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut epsilon: Option<f64> = None;
    let mut budget_x: Option<f64> = None;
    let mut budget_y: Option<f64> = None;
    let mut domain_max: Option<f64> = None;
    let mut objective: Option<Objective> = None;
    let mut inner: Vec<(String, CurveForm)> = Vec::new();
    let mut outer: Vec<(String, f64, CurveForm)> = Vec::new();
    let mut branches: Vec<Branch> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "epsilon" => set_scalar(&mut epsilon, "epsilon", &tokens[1..], line)?,
            "budget_x" => set_scalar(&mut budget_x, "budget_x", &tokens[1..], line)?,
            "budget_y" => set_scalar(&mut budget_y, "budget_y", &tokens[1..], line)?,
            "domain_max" => set_scalar(&mut domain_max, "domain_max", &tokens[1..], line)?,
            "objective" => {
                if objective.is_some() {
                    return Err(syntax(line, "duplicate field `objective`"));
                }
                if tokens.len() != 2 {
                    return Err(syntax(line, "`objective` takes exactly one value"));
                }
                objective = Some(match tokens[1] {
                    "expected" => Objective::Expected,
                    "minimax" => Objective::Minimax,
                    other => {
                        return Err(syntax(
                            line,
                            format!("unknown objective `{other}` (use `expected` or `minimax`)"),
                        ))
                    }
                });
            }
            "inner" => {
                if tokens.len() < 4 {
                    return Err(syntax(line, "`inner` needs an id, a curve form, and a pair list"));
                }
                let pairs = parse_pair_list(&tokens[3..].concat(), line)?;
                inner.push((tokens[1].to_string(), curve_form(tokens[2], pairs, line)?));
            }
            "outer" => {
                if tokens.len() < 6 || tokens[2] != "flow" {
                    return Err(syntax(
                        line,
                        "`outer` needs `outer <id> flow <value> <form> <pairs>`",
                    ));
                }
                let flow = parse_number(tokens[3], line)?;
                let pairs = parse_pair_list(&tokens[5..].concat(), line)?;
                outer.push((tokens[1].to_string(), flow, curve_form(tokens[4], pairs, line)?));
            }
            "branch" => {
                if tokens.len() < 2 {
                    return Err(syntax(line, "`branch` needs an inner id"));
                }
                branches.push(Branch {
                    inner_id: tokens[1].to_string(),
                    outer_ids: tokens[2..].iter().map(|s| s.to_string()).collect(),
                });
            }
            other => {
                return Err(Error::UnknownField { line, name: other.to_string() });
            }
        }
    }

    let missing = |name: &str| syntax(0, format!("missing required field `{name}`"));
    let epsilon = epsilon.ok_or_else(|| missing("epsilon"))?;
    let budget_x = budget_x.ok_or_else(|| missing("budget_x"))?;
    let budget_y = budget_y.ok_or_else(|| missing("budget_y"))?;
    if !(epsilon > 0.0) {
        return Err(Error::NonpositiveStep { step: epsilon });
    }
    for budget in [budget_x, budget_y] {
        if !(budget >= 0.0) {
            return Err(Error::NegativeBudget { budget });
        }
    }
    let budgets = BudgetPair::new(budget_x, budget_y);

    let network = SensorNetwork {
        inner: inner
            .into_iter()
            .map(|(id, form)| {
                Ok(InnerSensor { id, curve: build_curve(&form, domain_max.unwrap_or(budget_x))? })
            })
            .collect::<Result<_>>()?,
        outer: outer
            .into_iter()
            .map(|(id, flow, form)| {
                Ok(OuterSensor {
                    id,
                    flow,
                    curve: build_curve(&form, domain_max.unwrap_or(budget_y))?,
                })
            })
            .collect::<Result<_>>()?,
        branches,
    };
    network.require_valid()?;

    Ok(Scenario { network, budgets, epsilon, objective: objective.unwrap_or(Objective::Expected) })
}

fn format_pairs(pairs: &[(f64, f64)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
    format!("[{}]", body.join(","))
}

/// Renders a scenario in canonical form: every curve as `breakpoints`
/// (numbers printed with shortest-round-trip precision, so reparsing is
/// exact), sensors and branches in their stored order.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "epsilon {}", scenario.epsilon);
    let _ = writeln!(out, "budget_x {}", scenario.budgets.x);
    let _ = writeln!(out, "budget_y {}", scenario.budgets.y);
    let _ = writeln!(out, "objective {}", scenario.objective);
    for s in &scenario.network.inner {
        let _ = writeln!(out, "inner {} breakpoints {}", s.id, format_pairs(s.curve.breakpoints()));
    }
    for s in &scenario.network.outer {
        let _ = writeln!(
            out,
            "outer {} flow {} breakpoints {}",
            s.id,
            s.flow,
            format_pairs(s.curve.breakpoints())
        );
    }
    for b in &scenario.network.branches {
        let _ = writeln!(out, "branch {} {}", b.inner_id, b.outer_ids.join(" "));
    }
    out
}

/// Parses an allocation file: one `inner <id> <spend>` or `outer <id>
/// <spend>` per line, with the same comment and blank-line rules as
/// scenario files.
pub fn parse_allocation(text: &str) -> Result<Allocation> {
    let mut alloc = Allocation::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let map = match tokens[0] {
            "inner" => &mut alloc.inner,
            "outer" => &mut alloc.outer,
            other => return Err(Error::UnknownField { line, name: other.to_string() }),
        };
        if tokens.len() != 3 {
            return Err(syntax(line, format!("`{}` needs an id and a spend", tokens[0])));
        }
        let value = parse_number(tokens[2], line)?;
        if map.insert(tokens[1].to_string(), value).is_some() {
            return Err(syntax(line, format!("duplicate entry for sensor `{}`", tokens[1])));
        }
    }
    Ok(alloc)
}
