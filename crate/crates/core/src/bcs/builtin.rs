use super::{BcsError, BcsInstance, Constraint};

pub const BUILTIN_NAMES: [&str; 5] = [
    "magic-square",
    "magic-pentagram",
    "chsh",
    "four-line",
    "truncated-pentagram",
];

fn parity_system(name: &str, n: usize, rows: &[(&[usize], u8)]) -> BcsInstance {
    let constraints = rows
        .iter()
        .map(|(scope, rhs)| Constraint::parity(scope.to_vec(), *rhs))
        .collect();
    BcsInstance::new(n, constraints)
        .expect("built-in instances are well formed")
        .with_name(name)
}

/// Returns one of the named example systems.
pub fn builtin_instance(name: &str) -> Result<BcsInstance, BcsError> {
    let inst = match name {
        // rows then columns of the 3x3 grid
        "magic-square" => parity_system(
            name,
            9,
            &[
                (&[1, 2, 3], 0),
                (&[4, 5, 6], 0),
                (&[7, 8, 9], 0),
                (&[1, 4, 7], 0),
                (&[2, 5, 8], 0),
                (&[3, 6, 9], 1),
            ],
        ),
        "magic-pentagram" => parity_system(
            name,
            10,
            &[
                (&[1, 5, 7, 9], 1),
                (&[4, 5, 6, 8], 0),
                (&[1, 2, 8, 10], 0),
                (&[2, 3, 6, 9], 0),
                (&[3, 4, 7, 10], 0),
            ],
        ),
        "chsh" => parity_system(name, 2, &[(&[1, 2], 0), (&[1, 2], 1)]),
        "four-line" => parity_system(
            name,
            6,
            &[(&[1, 2, 3], 0), (&[3, 4, 5], 0), (&[5, 6, 1], 0), (&[2, 4, 6], 1)],
        ),
        "truncated-pentagram" => parity_system(
            name,
            9,
            &[
                (&[7, 5, 1, 8], 1),
                (&[5, 4, 6], 0),
                (&[1, 2, 9], 0),
                (&[8, 2, 3, 6], 0),
                (&[7, 4, 3, 9], 0),
            ],
        ),
        _ => return Err(BcsError::UnknownBuiltin { name: name.to_string() }),
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_line_layout() {
        let inst = builtin_instance("four-line").unwrap();
        let expect = [
            Constraint::parity(vec![1, 2, 3], 0),
            Constraint::parity(vec![3, 4, 5], 0),
            Constraint::parity(vec![5, 6, 1], 0),
            Constraint::parity(vec![2, 4, 6], 1),
        ];
        assert_eq!(inst.constraints(), &expect);
    }

    #[test]
    fn chsh_layout() {
        let inst = builtin_instance("chsh").unwrap();
        assert_eq!(inst.constraints()[0], Constraint::parity(vec![1, 2], 0));
        assert_eq!(inst.constraints()[1], Constraint::parity(vec![1, 2], 1));
    }

    #[test]
    fn pentagrams_use_each_variable_twice() {
        for name in ["magic-pentagram", "truncated-pentagram", "magic-square", "four-line"] {
            let inst = builtin_instance(name).unwrap();
            for v in 1..=inst.var_count() {
                assert_eq!(inst.constraints_containing(v).len(), 2, "{name} v{v}");
            }
        }
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        let err = builtin_instance("tic-tac-toe").unwrap_err();
        let msg = err.to_string();
        for name in BUILTIN_NAMES {
            assert!(msg.contains(name));
        }
    }
}
