#ifndef BCSGAME_H
#define BCSGAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BcsgameStatus {
  BCSGAME_STATUS_OK = 0,
  BCSGAME_STATUS_NULL_POINTER = 1,
  BCSGAME_STATUS_INVALID_UTF8 = 2,
  BCSGAME_STATUS_PARSE = 3,
  BCSGAME_STATUS_UNKNOWN_BUILTIN = 4,
  BCSGAME_STATUS_NOT_PARITY = 5,
  BCSGAME_STATUS_TOO_LARGE = 6,
  BCSGAME_STATUS_INVALID_ARGUMENT = 7,
  BCSGAME_STATUS_QUANTUM = 8,
  BCSGAME_STATUS_BUFFER_TOO_SMALL = 9,
  BCSGAME_STATUS_INTERNAL = 10,
} BcsgameStatus;

/*
 Opaque instance handle.
 */
typedef struct BcsgameInstance BcsgameInstance;

/*
 Result of `bcsgame_prove`. The bound fields are meaningful only when
 `found` is true.
 */
typedef struct BcsgameProof {
  bool found;
  size_t start;
  size_t substitutions;
  size_t k;
  double per_question_success_bound;
  double game_value_bound;
  double epsilon;
} BcsgameProof;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread (empty after a success).
 The pointer stays valid until the next call on the same thread.
 */
const char *bcsgame_last_error(void);

/*
 Library version as a static string.
 */
const char *bcsgame_version(void);

/*
 Parses an instance in the text format.

 # Safety
 `text_ptr` must be a nul-terminated string and `out` a valid pointer.
 */
enum BcsgameStatus bcsgame_instance_from_text(const char *text_ptr, struct BcsgameInstance **out);

/*
 Looks up a built-in instance by name.

 # Safety
 `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum BcsgameStatus bcsgame_instance_builtin(const char *name, struct BcsgameInstance **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `inst` must come from this library and not be used afterwards.
 */
void bcsgame_instance_free(struct BcsgameInstance *inst);

/*
 # Safety
 Pointers must be valid.
 */
enum BcsgameStatus bcsgame_instance_var_count(const struct BcsgameInstance *inst, size_t *out);

/*
 # Safety
 Pointers must be valid.
 */
enum BcsgameStatus bcsgame_instance_constraint_count(const struct BcsgameInstance *inst,
                                                     size_t *out);

/*
 Classical satisfiability of a parity system. When satisfiable and
 `witness` is non-null, writes one bit per variable into
 `witness[0..witness_len]`.

 # Safety
 Pointers must be valid; `witness` may be null.
 */
enum BcsgameStatus bcsgame_gf2_satisfiable(const struct BcsgameInstance *inst,
                                           bool *satisfiable,
                                           uint8_t *witness,
                                           size_t witness_len);

/*
 Exact classical value as a reduced fraction.

 # Safety
 Pointers must be valid.
 */
enum BcsgameStatus bcsgame_classical_value(const struct BcsgameInstance *inst,
                                           int64_t *numerator,
                                           int64_t *denominator);

/*
 Substitution search with the given budget (0 selects the default).

 # Safety
 Pointers must be valid.
 */
enum BcsgameStatus bcsgame_prove(const struct BcsgameInstance *inst,
                                 size_t max_substitutions,
                                 size_t max_word_length,
                                 struct BcsgameProof *out);

/*
 Checks the non-contextual assignment in an observable file.

 # Safety
 Pointers must be valid; `obs_text` nul-terminated.
 */
enum BcsgameStatus bcsgame_qsa_verify(const struct BcsgameInstance *inst,
                                      const char *obs_text,
                                      double tol,
                                      bool *pass,
                                      double *max_residual);

/*
 Success probability of the strategy in an observable file.

 # Safety
 Pointers must be valid; `obs_text` nul-terminated.
 */
enum BcsgameStatus bcsgame_quantum_value(const struct BcsgameInstance *inst,
                                         const char *obs_text,
                                         double tol,
                                         double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BCSGAME_H */
