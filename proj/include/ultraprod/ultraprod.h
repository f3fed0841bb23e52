#ifndef ULTRAPROD_H
#define ULTRAPROD_H

/* C interface to the ultraproduct engine.
 *
 * Every operation runs against a context and leaves its report there: a
 * JSON document (schema "ultraprod/1") and a plain-text rendering. On
 * failure the report is empty and up_last_error describes the problem.
 * Strings returned by the accessors stay valid until the next call on the
 * same context. Contexts are not shared between threads. */

#include <stdint.h>

#if defined(__GNUC__)
#define UP_API __attribute__((visibility("default")))
#else
#define UP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct up_context up_context;

typedef enum up_status {
  UP_OK = 0,
  UP_ERR_INTERNAL = 1,
  UP_ERR_PARSE = 2,
  UP_ERR_CAP = 3,
  UP_ERR_INCONSISTENT = 4,
  UP_ERR_INVALID_ARGUMENT = 5
} up_status;

UP_API up_context* up_context_new(void);
UP_API void up_context_free(up_context* ctx);

/* Window bound for sampled evaluation. 0 restores the defaults: 1000 for
 * evaluation and 10000 for cross-checks, each lowered when a family would
 * exceed the quantifier cap. An explicit window is never lowered. */
UP_API up_status up_set_window(up_context* ctx, uint64_t window);

/* Adds a set expression such as "(1 mod 4) + {2}" to the assumption base
 * used by the "generic" filter, which then becomes constrained. */
UP_API up_status up_add_assumption(up_context* ctx, const char* set_expr);
UP_API void up_clear_assumptions(up_context* ctx);

/* Truth of a sentence in the ultraproduct of `family` over `filter`
 * ("generic" or "principal:<p>"). With `bitmap` nonzero the per-prime
 * sample is included. */
UP_API up_status up_eval(up_context* ctx, const char* family, const char* sentence, const char* filter,
                  int bitmap);

/* Element expressions, e.g. "eq (p) (0) @Fp generic", "inv (6) @Zp^2",
 * "residue (p) mod 4", "compare (p) (p + 1)", "const (5)". */
UP_API up_status up_elem(up_context* ctx, const char* expression);

UP_API up_status up_classify(up_context* ctx, const char* set_expr, const char* filter);

/* op is one of member, collapse, add, mul, mono-add, mono-mul, grade.
 * `b` is ignored by the unary operations and may be NULL. */
UP_API up_status up_proto(up_context* ctx, const char* op, const char* a, const char* b);

UP_API up_status up_transfer(up_context* ctx, const char* family_a, const char* family_b,
                      const char* sentence);

/* Replays a session document: bindings plus a list of commands. */
UP_API up_status up_session(up_context* ctx, const char* session_json);

/* Randomized self-check of the engine against brute force. */
UP_API up_status up_check(up_context* ctx, uint64_t seed, uint32_t cases);

UP_API const char* up_last_json(const up_context* ctx);
UP_API const char* up_last_text(const up_context* ctx);
UP_API const char* up_last_error(const up_context* ctx);

UP_API const char* up_version(void);

#ifdef __cplusplus
}
#endif

#endif
