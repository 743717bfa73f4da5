//! The line-oriented problem file format.
//!
//! ```text
//! # open-top box of fixed volume
//! vars: x1 x2 x3
//! objective: x1*x2 + 2*x1*x3 + 2*x2*x3
//! constraint: x1*x2*x3 - 1
//! box: 0.1 5
//! box: 0.1 5
//! box: 0.1 5
//! ```
//!
//! Exactly one `vars:` and one `objective:` line, one or more `constraint:`
//! lines, and either no `box:` lines or exactly one per variable (in
//! variable order). `#` starts a comment; blank lines are ignored.

use std::fmt;

use lmm_core::corpus::CorpusCase;
use lmm_core::{ParseError, Problem};

/// A problem-file error with its 1-based line number (0 for file-level
/// problems such as missing sections).
#[derive(Clone, Debug, PartialEq)]
pub struct FileError {
    pub line: usize,
    pub message: String,
}

impl FileError {
    fn file_level(message: impl Into<String>) -> FileError {
        FileError {
            line: 0,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> FileError {
        FileError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for FileError {}

/// Points a nested expression parse error at the right column of the line.
fn expression_error(line: usize, value_col: usize, err: &ParseError) -> FileError {
    match err.offset() {
        Some(off) => FileError::at(line, format!("column {}: {err}", value_col + off + 1)),
        None => FileError::at(line, format!("{err}")),
    }
}

pub fn parse_problem_file(text: &str) -> Result<Problem, FileError> {
    struct Field<'a> {
        line: usize,
        value_col: usize,
        value: &'a str,
    }
    let mut vars: Option<Field> = None;
    let mut objective: Option<Field> = None;
    let mut constraints: Vec<Field> = Vec::new();
    let mut boxes: Vec<Field> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let uncommented = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if uncommented.trim().is_empty() {
            continue;
        }
        let Some(colon) = uncommented.find(':') else {
            return Err(FileError::at(
                line_no,
                "expected `key: value` (keys: vars, objective, constraint, box)",
            ));
        };
        let key = uncommented[..colon].trim();
        let after = &uncommented[colon + 1..];
        let value = after.trim();
        let value_col = colon + 1 + (after.len() - after.trim_start().len());
        let field = Field {
            line: line_no,
            value_col,
            value,
        };
        match key {
            "vars" => {
                if vars.is_some() {
                    return Err(FileError::at(line_no, "duplicate `vars:` line"));
                }
                vars = Some(field);
            }
            "objective" => {
                if objective.is_some() {
                    return Err(FileError::at(line_no, "duplicate `objective:` line"));
                }
                objective = Some(field);
            }
            "constraint" => constraints.push(field),
            "box" => boxes.push(field),
            other => {
                return Err(FileError::at(
                    line_no,
                    format!("unknown key `{other}` (expected vars, objective, constraint or box)"),
                ))
            }
        }
    }

    let vars = vars.ok_or_else(|| FileError::file_level("missing `vars:` line"))?;
    let objective = objective.ok_or_else(|| FileError::file_level("missing `objective:` line"))?;
    if constraints.is_empty() {
        return Err(FileError::file_level("missing `constraint:` line"));
    }

    let names: Vec<&str> = vars.value.split_whitespace().collect();
    if names.is_empty() {
        return Err(FileError::at(vars.line, "`vars:` line names no variables"));
    }

    let obj_expr = lmm_core::Expression::parse(objective.value, &names)
        .map_err(|e| expression_error(objective.line, objective.value_col, &e))?;
    let mut constraint_exprs = Vec::with_capacity(constraints.len());
    for c in &constraints {
        let e = lmm_core::Expression::parse(c.value, &names)
            .map_err(|err| expression_error(c.line, c.value_col, &err))?;
        constraint_exprs.push(e);
    }

    let sample_box = if boxes.is_empty() {
        None
    } else {
        if boxes.len() != names.len() {
            return Err(FileError::file_level(format!(
                "found {} `box:` lines, expected none or exactly {} (one per variable)",
                boxes.len(),
                names.len()
            )));
        }
        let mut intervals = Vec::with_capacity(boxes.len());
        for b in &boxes {
            let parts: Vec<&str> = b.value.split_whitespace().collect();
            let parsed: Option<(f64, f64)> = match parts.as_slice() {
                [lo, hi] => match (lo.parse(), hi.parse()) {
                    (Ok(lo), Ok(hi)) => Some((lo, hi)),
                    _ => None,
                },
                _ => None,
            };
            let Some((lo, hi)) = parsed else {
                return Err(FileError::at(b.line, "expected `box: <lo> <hi>`"));
            };
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(FileError::at(b.line, "box interval must satisfy lo < hi"));
            }
            intervals.push((lo, hi));
        }
        Some(intervals)
    };

    Problem::new(obj_expr, constraint_exprs, sample_box)
        .map_err(|e| FileError::file_level(format!("{e}")))
}

/// Renders a corpus case in the problem file format.
pub fn render_case(case: &CorpusCase) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}: {}\n", case.id, case.title));
    out.push_str(&format!("vars: {}\n", case.variables.join(" ")));
    out.push_str(&format!("objective: {}\n", case.objective_src));
    for c in case.constraint_srcs {
        out.push_str(&format!("constraint: {c}\n"));
    }
    if let Some(b) = &case.sample_box {
        for (lo, hi) in b {
            out.push_str(&format!("box: {lo} {hi}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# surface area under a volume constraint
vars: x1 x2 x3
objective: x1*x2 + 2*x1*x3 + 2*x2*x3   # trailing comment
constraint: x1*x2*x3 - 1

box: 0.1 5
box: 0.1 5
box: 0.1 5
";

    #[test]
    fn parses_a_complete_file() {
        let p = parse_problem_file(GOOD).unwrap();
        assert_eq!(p.n_vars(), 3);
        assert_eq!(p.n_constraints(), 1);
        assert_eq!(p.sample_box(), &[(0.1, 5.0); 3]);
    }

    #[test]
    fn missing_objective_is_named() {
        let text = "vars: x1 x2\nconstraint: x2\n";
        let err = parse_problem_file(text).unwrap_err();
        assert!(err.message.contains("objective"), "got: {}", err.message);
    }

    #[test]
    fn missing_constraint_is_named() {
        let text = "vars: x1 x2\nobjective: x1\n";
        let err = parse_problem_file(text).unwrap_err();
        assert!(err.message.contains("constraint"));
    }

    #[test]
    fn expression_errors_carry_line_numbers() {
        let text = "vars: x1 x2\nobjective: x1 +* 2\nconstraint: x2\n";
        let err = parse_problem_file(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("syntax error"), "got: {}", err.message);
    }

    #[test]
    fn wrong_box_count_is_rejected() {
        let text = "vars: x1 x2\nobjective: x1\nconstraint: x2\nbox: 0 1\n";
        let err = parse_problem_file(text).unwrap_err();
        assert!(err.message.contains("box"), "got: {}", err.message);
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let text = "vars: x1 x2\nobjective: x1\nconstraint: x2\nbox: 1 1\nbox: 0 1\n";
        let err = parse_problem_file(text).unwrap_err();
        assert_eq!(err.line, 4);
    }

    #[test]
    fn duplicate_vars_rejected() {
        let text = "vars: x1 x2\nvars: x1 x2\nobjective: x1\nconstraint: x2\n";
        let err = parse_problem_file(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = "vars: x1 x2\nminimize: x1\nconstraint: x2\n";
        let err = parse_problem_file(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown key"));
    }

    #[test]
    fn too_many_constraints_rejected() {
        let text = "vars: x1 x2\nobjective: x1\nconstraint: x2\nconstraint: x1\n";
        let err = parse_problem_file(text).unwrap_err();
        assert!(err.message.contains("fewer constraints"), "got: {}", err.message);
    }

    #[test]
    fn exported_corpus_cases_parse_back() {
        for case in lmm_core::corpus_cases() {
            let text = render_case(&case);
            let p = parse_problem_file(&text)
                .unwrap_or_else(|e| panic!("case {}: {e}\n{text}", case.id));
            assert_eq!(p.n_vars(), case.variables.len());
            assert_eq!(p.n_constraints(), case.constraint_srcs.len());
        }
    }
}
