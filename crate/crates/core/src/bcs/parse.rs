use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{answer_string, parse_bits, BcsError, BcsInstance, Constraint, ConstraintKind, MAX_ARITY};

fn syntax(line: usize, msg: impl Into<String>) -> BcsError {
    BcsError::Syntax { line, msg: msg.into() }
}

fn parse_scope(tokens: &[&str], line: usize, var_count: usize) -> Result<Vec<usize>, BcsError> {
    if tokens.is_empty() {
        return Err(syntax(line, "constraint has an empty scope"));
    }
    let mut seen = BTreeSet::new();
    let mut scope = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let index: usize = tok
            .parse()
            .map_err(|_| syntax(line, format!("expected a variable index, found `{tok}`")))?;
        if index == 0 || index > var_count {
            return Err(BcsError::IndexOutOfRange { line, index, var_count });
        }
        if !seen.insert(index) {
            return Err(BcsError::DuplicateIndex { line, index });
        }
        scope.push(index);
    }
    Ok(scope)
}

/// Parses the line-oriented instance format. A leading `# name: <id>` comment,
/// if present before `vars`, becomes the instance name.
///
/// ```text
/// # comment
/// vars 3
/// parity 1 2 3 = 0
/// general 1 2 : 01,10,11
/// ```
pub fn parse_instance(text: &str) -> Result<BcsInstance, BcsError> {
    let mut var_count: Option<usize> = None;
    let mut constraints = Vec::new();
    let mut last_line = 0;
    let mut name: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        if var_count.is_none() && name.is_none() {
            if let Some(rest) = raw.trim().strip_prefix("# name:") {
                name = Some(rest.trim().to_string()).filter(|s| !s.is_empty());
                continue;
            }
        }
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(n) = var_count else {
            if tokens[0] != "vars" || tokens.len() != 2 {
                return Err(syntax(line, "expected `vars <n>` before any constraint"));
            }
            let n: usize = tokens[1]
                .parse()
                .map_err(|_| syntax(line, format!("bad variable count `{}`", tokens[1])))?;
            if n == 0 {
                return Err(syntax(line, "variable count must be positive"));
            }
            var_count = Some(n);
            continue;
        };
        match tokens[0] {
            "parity" => {
                let eq = tokens
                    .iter()
                    .position(|&t| t == "=")
                    .ok_or_else(|| syntax(line, "parity constraint is missing `=`"))?;
                if eq + 2 != tokens.len() {
                    return Err(syntax(line, "expected a single right-hand side after `=`"));
                }
                let rhs = match tokens[eq + 1] {
                    "0" => 0,
                    "1" => 1,
                    other => return Err(syntax(line, format!("right-hand side must be 0 or 1, found `{other}`"))),
                };
                let scope = parse_scope(&tokens[1..eq], line, n)?;
                if scope.len() > MAX_ARITY {
                    return Err(syntax(
                        line,
                        format!("constraints are limited to {MAX_ARITY} variables"),
                    ));
                }
                constraints.push(Constraint::parity(scope, rhs));
            }
            "general" => {
                let colon = tokens
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| syntax(line, "general constraint is missing `:`"))?;
                let scope = parse_scope(&tokens[1..colon], line, n)?;
                if scope.len() > MAX_ARITY {
                    return Err(syntax(
                        line,
                        format!("constraints are limited to {MAX_ARITY} variables"),
                    ));
                }
                let list: String = tokens[colon + 1..].concat();
                let mut satisfying = BTreeSet::new();
                for bits in list.split(',').filter(|s| !s.is_empty()) {
                    let code = parse_bits(bits, scope.len()).map_err(|m| syntax(line, m))?;
                    if !satisfying.insert(code) {
                        return Err(syntax(line, format!("satisfying string `{bits}` listed twice")));
                    }
                }
                constraints.push(Constraint {
                    scope,
                    kind: ConstraintKind::General { satisfying },
                });
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let n = var_count.ok_or_else(|| syntax(last_line.max(1), "missing `vars <n>` header"))?;
    if constraints.is_empty() {
        return Err(syntax(last_line.max(1), "instance has no constraints"));
    }
    let inst = BcsInstance::new(n, constraints)?;
    Ok(match name {
        Some(name) => inst.with_name(name),
        None => inst,
    })
}

/// Canonical text form; `parse_instance` inverts it exactly.
pub fn serialize_instance(inst: &BcsInstance) -> String {
    let mut out = String::new();
    if let Some(name) = inst.name() {
        let _ = writeln!(out, "# name: {name}");
    }
    let _ = writeln!(out, "vars {}", inst.var_count());
    for c in inst.constraints() {
        let scope: Vec<String> = c.scope.iter().map(|v| v.to_string()).collect();
        match &c.kind {
            ConstraintKind::Parity { rhs } => {
                let _ = writeln!(out, "parity {} = {rhs}", scope.join(" "));
            }
            ConstraintKind::General { satisfying } => {
                let bits: Vec<String> = satisfying.iter().map(|&code| answer_string(code, c.arity())).collect();
                let _ = writeln!(out, "general {} : {}", scope.join(" "), bits.join(","));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_chsh() {
        let inst = parse_instance("vars 2\nparity 1 2 = 0\nparity 1 2 = 1").unwrap();
        assert_eq!(inst.var_count(), 2);
        assert_eq!(inst.constraint_count(), 2);
        assert_eq!(inst.constraints()[1], Constraint::parity(vec![1, 2], 1));
    }

    #[test]
    fn parses_single_variable() {
        let inst = parse_instance("vars 1\nparity 1 = 0").unwrap();
        assert_eq!(inst.constraints()[0], Constraint::parity(vec![1], 0));
    }

    #[test]
    fn parses_general_with_comments() {
        let text = "# OR gate\n\nvars 2   # two vars\ngeneral 1 2 : 11,01,10\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(serialize_instance(&inst), "vars 2\ngeneral 1 2 : 01,10,11\n");
    }

    #[test]
    fn empty_general_set_round_trips() {
        let inst = parse_instance("vars 1\ngeneral 1 :").unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_instance("vars 2\nparity 1 2 = 0\nparity 1 x = 1").unwrap_err();
        assert!(matches!(err, BcsError::Syntax { line: 3, .. }), "{err}");
        let err = parse_instance("vars 2\n\nparity 1 3 = 0").unwrap_err();
        assert_eq!(
            err,
            BcsError::IndexOutOfRange {
                line: 3,
                index: 3,
                var_count: 2
            }
        );
        let err = parse_instance("vars 3\nparity 2 2 = 0").unwrap_err();
        assert_eq!(err, BcsError::DuplicateIndex { line: 2, index: 2 });
        assert!(parse_instance("parity 1 = 0").is_err());
        assert!(parse_instance("vars 2\n").is_err());
        assert!(parse_instance("vars 2\nparity 1 2 = 2").is_err());
        assert!(parse_instance("vars 2\ngeneral 1 2 : 0").is_err());
        assert!(parse_instance("vars 2\nxor 1 2 = 0").is_err());
    }
}
