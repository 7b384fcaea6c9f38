//! Replay and text form of derivations.
//!
//! ```text
//! start 1
//! sub 3 2 4 5
//! swap 2
//! cancel 1
//! final-sign -1
//! k 6
//! ```

use std::fmt::Write as _;

use super::word::{cancel, relation_of, substitute, swap};
use super::{Derivation, Move, ProverError, Word};
use crate::bcs::BcsInstance;

/// Replays `deriv` move by move against `inst`, independently of the search.
/// Illegal moves are reported with their 1-based index; a final word or `k`
/// that disagrees with the replay is a [`ProverError::BadCertificate`].
pub fn check_derivation(inst: &BcsInstance, deriv: &Derivation) -> Result<(), ProverError> {
    let mut word = relation_of(inst, deriv.start).map_err(|e| ProverError::InvalidCertificate {
        index: 0,
        reason: format!("start: {e}"),
    })?;
    let mut k = 0;
    for (i, m) in deriv.moves.iter().enumerate() {
        let step = match m {
            Move::Substitute { pos, constraint, perm } => substitute(inst, &word, *pos, *constraint, perm),
            Move::Swap { pos } => swap(&word, *pos),
            Move::Cancel { pos } => cancel(&word, *pos).map(|(w, cross)| {
                k += cross as usize;
                w
            }),
        };
        word = step.map_err(|e| ProverError::InvalidCertificate {
            index: i + 1,
            reason: e.to_string(),
        })?;
    }
    if word != deriv.final_word {
        return Err(ProverError::BadCertificate(format!(
            "replay ends in `{word}`, certificate claims `{}`",
            deriv.final_word
        )));
    }
    if k != deriv.k {
        return Err(ProverError::BadCertificate(format!(
            "replay counts k = {k}, certificate claims k = {}",
            deriv.k
        )));
    }
    Ok(())
}

pub fn render_certificate(deriv: &Derivation) -> String {
    let mut out = format!("start {}\n", deriv.start);
    for m in &deriv.moves {
        match m {
            Move::Substitute { pos, constraint, perm } => {
                write!(out, "sub {pos} {constraint}").unwrap();
                for v in perm {
                    write!(out, " {v}").unwrap();
                }
                out.push('\n');
            }
            Move::Swap { pos } => writeln!(out, "swap {pos}").unwrap(),
            Move::Cancel { pos } => writeln!(out, "cancel {pos}").unwrap(),
        }
    }
    writeln!(
        out,
        "final-sign {}",
        if deriv.final_word.sign < 0 { "-1" } else { "+1" }
    )
    .unwrap();
    writeln!(out, "k {}", deriv.k).unwrap();
    out
}

/// Parses the text form. The final word is taken to be empty, so only
/// contradiction-style certificates round-trip.
pub fn parse_certificate(text: &str) -> Result<Derivation, ProverError> {
    let syntax = |line: usize, msg: String| ProverError::Syntax { line, msg };
    let mut start = None;
    let mut moves = Vec::new();
    let mut sign = None;
    let mut k = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap_or("");
        let args: Vec<&str> = tokens.collect();
        if sign.is_some() && k.is_some() {
            return Err(syntax(line, "content after `k`".into()));
        }
        let nums = |args: &[&str]| -> Result<Vec<usize>, ProverError> {
            args.iter()
                .map(|a| {
                    a.parse::<usize>()
                        .map_err(|_| syntax(line, format!("bad number `{a}`")))
                })
                .collect()
        };
        let one = |args: &[&str]| -> Result<usize, ProverError> {
            match nums(args)?.as_slice() {
                [n] => Ok(*n),
                _ => Err(syntax(line, format!("`{keyword}` takes one number"))),
            }
        };
        if keyword != "start" && start.is_none() {
            return Err(syntax(line, "certificate must begin with `start`".into()));
        }
        match keyword {
            "start" if start.is_none() => start = Some(one(&args)?),
            "start" => return Err(syntax(line, "duplicate `start`".into())),
            "sub" | "swap" | "cancel" if sign.is_some() || k.is_some() => {
                return Err(syntax(line, "move after `final-sign`/`k`".into()))
            }
            "sub" => {
                let n = nums(&args)?;
                if n.len() < 2 {
                    return Err(syntax(
                        line,
                        "`sub` takes a position, a constraint and a permutation".into(),
                    ));
                }
                moves.push(Move::Substitute {
                    pos: n[0],
                    constraint: n[1],
                    perm: n[2..].to_vec(),
                });
            }
            "swap" => moves.push(Move::Swap { pos: one(&args)? }),
            "cancel" => moves.push(Move::Cancel { pos: one(&args)? }),
            "final-sign" if sign.is_none() => {
                sign = Some(match args.as_slice() {
                    ["-1"] => -1,
                    ["+1"] | ["1"] => 1,
                    _ => return Err(syntax(line, "`final-sign` is +1 or -1".into())),
                })
            }
            "k" if k.is_none() => k = Some(one(&args)?),
            "final-sign" | "k" => return Err(syntax(line, format!("duplicate `{keyword}`"))),
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    let end = text.lines().count().max(1);
    Ok(Derivation {
        start: start.ok_or_else(|| syntax(end, "missing `start`".into()))?,
        moves,
        final_word: Word::new(vec![], sign.ok_or_else(|| syntax(end, "missing `final-sign`".into()))?),
        k: k.ok_or_else(|| syntax(end, "missing `k`".into()))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::builtin_instance;

    const CHSH: &str = "start 1\nsub 2 2 1\ncancel 2\ncancel 1\nfinal-sign -1\nk 2\n";

    #[test]
    fn chsh_by_hand() {
        let inst = builtin_instance("chsh").unwrap();
        let d = parse_certificate(CHSH).unwrap();
        check_derivation(&inst, &d).unwrap();
        assert_eq!(render_certificate(&d), CHSH);
    }

    #[test]
    fn wrong_k_or_sign() {
        let inst = builtin_instance("chsh").unwrap();
        let d = parse_certificate(&CHSH.replace("k 2", "k 1")).unwrap();
        assert!(matches!(
            check_derivation(&inst, &d),
            Err(ProverError::BadCertificate(_))
        ));
        let d = parse_certificate(&CHSH.replace("-1", "+1")).unwrap();
        assert!(matches!(
            check_derivation(&inst, &d),
            Err(ProverError::BadCertificate(_))
        ));
    }

    #[test]
    fn illegal_move_index() {
        let inst = builtin_instance("chsh").unwrap();
        // A1@1 A2@1 A2@2 A1@2: swapping positions 2 and 3 crosses contexts
        let text = "start 1\nsub 2 2 1\nswap 2\ncancel 2\ncancel 1\nfinal-sign -1\nk 2\n";
        let d = parse_certificate(text).unwrap();
        assert!(matches!(
            check_derivation(&inst, &d),
            Err(ProverError::InvalidCertificate { index: 2, .. })
        ));
    }

    #[test]
    fn other_instance() {
        let inst = builtin_instance("four-line").unwrap();
        let d = parse_certificate(CHSH).unwrap();
        assert!(check_derivation(&inst, &d).is_err());
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_certificate("sub 1 2 3\n"),
            Err(ProverError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_certificate("start 1\nfrob 2\n"),
            Err(ProverError::Syntax { line: 2, .. })
        ));
        assert!(parse_certificate("start 1\nk 2\n").is_err());
        assert!(parse_certificate("start 1\nfinal-sign -1\nk 2\ncancel 1\n").is_err());
        assert!(parse_certificate("start x\nfinal-sign -1\nk 2\n").is_err());
    }
}
