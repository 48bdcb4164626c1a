#ifndef CHASEKIT_H
#define CHASEKIT_H

#include <stdint.h>

typedef enum ChasekitStatus {
  CHASEKIT_STATUS_OK = 0,
  CHASEKIT_STATUS_NULL_ARGUMENT = 1,
  CHASEKIT_STATUS_INVALID_UTF8 = 2,
  CHASEKIT_STATUS_PARSE_ERROR = 3,
  CHASEKIT_STATUS_INVALID_INPUT = 4,
  CHASEKIT_STATUS_INTERNAL = 5,
} ChasekitStatus;

typedef enum ChasekitVerdict {
  CHASEKIT_VERDICT_PROVABLE = 0,
  CHASEKIT_VERDICT_REFUTED = 1,
  CHASEKIT_VERDICT_UNKNOWN = 2,
} ChasekitVerdict;

typedef struct ChasekitChase ChasekitChase;

typedef struct ChasekitStructure ChasekitStructure;

typedef struct ChasekitTheory ChasekitTheory;

/**
 * Chase options. `faithful` and `parallel` are booleans (0 or 1).
 */
typedef struct ChasekitOptions {
  uint32_t fuel;
  uint8_t faithful;
  uint8_t parallel;
} ChasekitOptions;

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *chasekit_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void chasekit_string_free(char *s);

/**
 * Defaults: fuel 20, lean, sequential.
 */
struct ChasekitOptions chasekit_options_default(void);

/**
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ChasekitStatus chasekit_theory_parse(const char *src, struct ChasekitTheory **out);

/**
 * # Safety
 * `t` must be null or a handle from [`chasekit_theory_parse`].
 */
void chasekit_theory_free(struct ChasekitTheory *t);

/**
 * Parses a structure. Symbols not declared in the text are looked up in
 * `theory`, which may be null.
 *
 * # Safety
 * Pointers must be valid or null where allowed.
 */
enum ChasekitStatus chasekit_structure_parse(const char *src,
                                             const struct ChasekitTheory *theory,
                                             struct ChasekitStructure **out);

/**
 * # Safety
 * `s` must be null or a handle from this library.
 */
void chasekit_structure_free(struct ChasekitStructure *s);

/**
 * # Safety
 * `s` must be a valid structure handle and `out` a valid pointer.
 */
enum ChasekitStatus chasekit_structure_print(const struct ChasekitStructure *s, char **out);

/**
 * Chases `a` with `theory`.
 *
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum ChasekitStatus chasekit_chase(const struct ChasekitTheory *theory,
                                   const struct ChasekitStructure *a,
                                   struct ChasekitOptions opts,
                                   struct ChasekitChase **out);

/**
 * # Safety
 * `c` must be null or a handle from [`chasekit_chase`].
 */
void chasekit_chase_free(struct ChasekitChase *c);

/**
 * Writes 1 to `saturated` when a fixpoint was reached, and the number of
 * computed levels beyond the input to `levels`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum ChasekitStatus chasekit_chase_status(const struct ChasekitChase *c,
                                          uint8_t *saturated,
                                          uint32_t *levels);

/**
 * The last chase level read back over the theory's signature; fails when
 * the chase did not saturate.
 *
 * # Safety
 * `c` must be a valid chase handle and `out` a valid pointer.
 */
enum ChasekitStatus chasekit_chase_model(const struct ChasekitChase *c, char **out);

/**
 * Decides `query` (a sequent, possibly with `|` in the consequent) in
 * `theory`. `report` receives the witness formula for a provable query,
 * the countermodel for a refuted one and an empty string otherwise.
 *
 * # Safety
 * Pointers must be valid; `report` may be null.
 */
enum ChasekitStatus chasekit_entails(const struct ChasekitTheory *theory,
                                     const char *query,
                                     struct ChasekitOptions opts,
                                     enum ChasekitVerdict *verdict,
                                     char **report);

/**
 * Checks a derivation file against `theory`. Writes 1 to `valid` when every
 * node is correct; otherwise 0, with the first bad node described in
 * `diagnostic` (which may be null).
 *
 * # Safety
 * Pointers must be valid; `diagnostic` may be null.
 */
enum ChasekitStatus chasekit_check_derivation(const struct ChasekitTheory *theory,
                                              const char *src,
                                              uint8_t *valid,
                                              char **diagnostic);

/**
 * Normalizes a derivation file to the printed form.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ChasekitStatus chasekit_derivation_reformat(const struct ChasekitTheory *theory,
                                                 const char *src,
                                                 char **out);

#endif  /* CHASEKIT_H */
