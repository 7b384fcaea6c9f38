//! C ABI for `bcsgame`.
//!
//! Instances are opaque handles created by `bcsgame_instance_from_text` or
//! `bcsgame_instance_builtin` and released with `bcsgame_instance_free`.
//! Every fallible call returns a `BcsgameStatus`; on failure the message is
//! available from `bcsgame_last_error` on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bcsgame::bcs::{builtin_instance, gf2_solve, parse_instance, BcsError, BcsInstance};
use bcsgame::game::{classical_value, GameError};
use bcsgame::prover::{cancellation_bounds, search_contradiction, Budget, ProverError, SearchOutcome};
use bcsgame::quantum::{parse_observable_file, quantum_game_value, verify_qsa, QuantumError};

/// Opaque instance handle.
pub struct BcsgameInstance {
    inner: BcsInstance,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcsgameStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownBuiltin = 4,
    NotParity = 5,
    TooLarge = 6,
    InvalidArgument = 7,
    Quantum = 8,
    BufferTooSmall = 9,
    Internal = 10,
}

/// Result of `bcsgame_prove`. The bound fields are meaningful only when
/// `found` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcsgameProof {
    pub found: bool,
    pub start: usize,
    pub substitutions: usize,
    pub k: usize,
    pub per_question_success_bound: f64,
    pub game_value_bound: f64,
    pub epsilon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(BcsgameStatus, String);

impl From<BcsError> for Failure {
    fn from(e: BcsError) -> Self {
        let status = match e {
            BcsError::UnknownBuiltin { .. } => BcsgameStatus::UnknownBuiltin,
            BcsError::NotParity(_) => BcsgameStatus::NotParity,
            BcsError::TooLarge { .. } => BcsgameStatus::TooLarge,
            _ => BcsgameStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        let status = match e {
            GameError::EnumerationLimit { .. } => BcsgameStatus::TooLarge,
            GameError::Malformed(_) => BcsgameStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<ProverError> for Failure {
    fn from(e: ProverError) -> Self {
        let status = match e {
            ProverError::NotParity(_) => BcsgameStatus::NotParity,
            _ => BcsgameStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<QuantumError> for Failure {
    fn from(e: QuantumError) -> Self {
        Failure(BcsgameStatus::Quantum, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BcsgameStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BcsgameStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            BcsgameStatus::Internal
        }
    }
}

fn null() -> Failure {
    Failure(BcsgameStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BcsgameStatus::InvalidUtf8, "string is not UTF-8".into()))
}

fn tolerance(tol: f64) -> Result<f64, Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(Failure(
            BcsgameStatus::InvalidArgument,
            format!("tolerance must be positive, got {tol}"),
        ))
    }
}

unsafe fn instance<'a>(p: *const BcsgameInstance) -> Result<&'a BcsInstance, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(null)
}

unsafe fn output<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn store(out: *mut *mut BcsgameInstance, inst: BcsInstance) -> Result<(), Failure> {
    *output(out)? = Box::into_raw(Box::new(BcsgameInstance { inner: inst }));
    Ok(())
}

/// Message for the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bcsgame_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bcsgame_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance in the text format.
///
/// # Safety
/// `text_ptr` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_instance_from_text(
    text_ptr: *const c_char,
    out: *mut *mut BcsgameInstance,
) -> BcsgameStatus {
    guard(|| {
        let inst = parse_instance(text(text_ptr)?)?;
        store(out, inst)
    })
}

/// Looks up a built-in instance by name.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_instance_builtin(
    name: *const c_char,
    out: *mut *mut BcsgameInstance,
) -> BcsgameStatus {
    guard(|| {
        let inst = builtin_instance(text(name)?)?;
        store(out, inst)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_instance_free(inst: *mut BcsgameInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_instance_var_count(inst: *const BcsgameInstance, out: *mut usize) -> BcsgameStatus {
    guard(|| {
        *output(out)? = instance(inst)?.var_count();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_instance_constraint_count(
    inst: *const BcsgameInstance,
    out: *mut usize,
) -> BcsgameStatus {
    guard(|| {
        *output(out)? = instance(inst)?.constraint_count();
        Ok(())
    })
}

/// Classical satisfiability of a parity system. When satisfiable and
/// `witness` is non-null, writes one bit per variable into
/// `witness[0..witness_len]`.
///
/// # Safety
/// Pointers must be valid; `witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_gf2_satisfiable(
    inst: *const BcsgameInstance,
    satisfiable: *mut bool,
    witness: *mut u8,
    witness_len: usize,
) -> BcsgameStatus {
    guard(|| {
        let inst = instance(inst)?;
        let out = output(satisfiable)?;
        let sol = gf2_solve(inst)?;
        *out = sol.is_some();
        if let (Some(sol), false) = (sol, witness.is_null()) {
            if witness_len < sol.len() {
                return Err(Failure(
                    BcsgameStatus::BufferTooSmall,
                    format!("witness needs {} bytes", sol.len()),
                ));
            }
            std::ptr::copy_nonoverlapping(sol.bits().as_ptr(), witness, sol.len());
        }
        Ok(())
    })
}

/// Exact classical value as a reduced fraction.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_classical_value(
    inst: *const BcsgameInstance,
    numerator: *mut i64,
    denominator: *mut i64,
) -> BcsgameStatus {
    guard(|| {
        let inst = instance(inst)?;
        let (num, den) = (output(numerator)?, output(denominator)?);
        let v = classical_value(inst)?.overall;
        *num = *v.numer();
        *den = *v.denom();
        Ok(())
    })
}

/// Substitution search with the given budget (0 selects the default).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_prove(
    inst: *const BcsgameInstance,
    max_substitutions: usize,
    max_word_length: usize,
    out: *mut BcsgameProof,
) -> BcsgameStatus {
    guard(|| {
        let inst = instance(inst)?;
        let out = output(out)?;
        let default = Budget::default();
        let budget = Budget {
            max_substitutions: if max_substitutions == 0 {
                default.max_substitutions
            } else {
                max_substitutions
            },
            max_word_length: if max_word_length == 0 {
                default.max_word_length
            } else {
                max_word_length
            },
        };
        *out = match search_contradiction(inst, budget)? {
            SearchOutcome::Certificate(d) => {
                let b = cancellation_bounds(inst, &d)?;
                BcsgameProof {
                    found: true,
                    start: d.start,
                    substitutions: d.substitution_count(),
                    k: d.k,
                    per_question_success_bound: b.per_question_success_bound,
                    game_value_bound: b.game_value_bound,
                    epsilon: b.epsilon,
                }
            }
            SearchOutcome::Inconclusive { .. } => BcsgameProof {
                found: false,
                start: 0,
                substitutions: 0,
                k: 0,
                per_question_success_bound: f64::NAN,
                game_value_bound: f64::NAN,
                epsilon: f64::NAN,
            },
        };
        Ok(())
    })
}

/// Checks the non-contextual assignment in an observable file.
///
/// # Safety
/// Pointers must be valid; `obs_text` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_qsa_verify(
    inst: *const BcsgameInstance,
    obs_text: *const c_char,
    tol: f64,
    pass: *mut bool,
    max_residual: *mut f64,
) -> BcsgameStatus {
    guard(|| {
        let inst = instance(inst)?;
        let (pass, residual) = (output(pass)?, output(max_residual)?);
        let obs = parse_observable_file(text(obs_text)?)?;
        let report = verify_qsa(inst, &obs.to_assignment()?, tolerance(tol)?)?;
        *pass = report.pass;
        *residual = report.max_residual();
        Ok(())
    })
}

/// Success probability of the strategy in an observable file.
///
/// # Safety
/// Pointers must be valid; `obs_text` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn bcsgame_quantum_value(
    inst: *const BcsgameInstance,
    obs_text: *const c_char,
    tol: f64,
    value: *mut f64,
) -> BcsgameStatus {
    guard(|| {
        let inst = instance(inst)?;
        let value = output(value)?;
        let strat = parse_observable_file(text(obs_text)?)?.to_strategy()?;
        *value = quantum_game_value(inst, &strat, tolerance(tol)?)?.overall;
        Ok(())
    })
}
