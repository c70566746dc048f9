/* C ABI for the dgmod library.
 *
 * Documents cross the boundary as JSON strings in the library's canonical
 * interchange format (see the repository README for the grammar). The only
 * stateful object is an opaque context holding the last error message.
 *
 * Status codes returned by every operation:
 *   0  success
 *   1  mathematical failure (an axiom or property fails; the report or
 *      verdict is in dgmod_last_error)
 *   2  input error (unreadable or malformed document)
 *   3  internal error
 *
 * Strings written through out-parameters are owned by the caller and must be
 * released with dgmod_string_free. Out-parameters may be NULL when the caller
 * does not need the result.
 */

#ifndef DGMOD_H
#define DGMOD_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DGMOD_OK 0
#define DGMOD_MATH_FAILURE 1
#define DGMOD_INPUT_ERROR 2
#define DGMOD_INTERNAL_ERROR 3

typedef struct DgmodCtx DgmodCtx;

DgmodCtx *dgmod_ctx_new(void);
void dgmod_ctx_free(DgmodCtx *ctx);

/* Message of the most recent failure; valid until the next call on the same
 * context. Never NULL for a live context. */
const char *dgmod_last_error(const DgmodCtx *ctx);

void dgmod_string_free(char *s);

/* Validate an algebra, module, map, presentation, or system document.
 * On success *report_out receives the text report. */
int dgmod_validate(DgmodCtx *ctx, const char *doc_json, char **report_out);

/* Decide dualizability of a module document. On success *verdict_out receives
 * a verdict document with the witness; on status 1 the verdict is in
 * dgmod_last_error. */
int dgmod_dualizable(DgmodCtx *ctx, const char *module_json, char **verdict_out);

/* dim Ext^1(X, Y) for two module documents over the same algebra. */
int dgmod_ext1(DgmodCtx *ctx, const char *x_json, const char *y_json, int64_t *dim_out);

/* Y (x)_A X for a right module and a left module; the result is a module
 * document, or a complex document when no action survives. */
int dgmod_tensor(DgmodCtx *ctx, const char *y_json, const char *x_json, char **result_out);

/* hom_A(X, Y) for two modules on the same side. */
int dgmod_hom(DgmodCtx *ctx, const char *x_json, const char *y_json, char **result_out);

/* X* = hom_A(X, A) as a module document. */
int dgmod_dual(DgmodCtx *ctx, const char *x_json, char **result_out);

/* Factor the map u through a free module given a presentation document of its
 * target; the result is a factorization document certified exactly. Status 1
 * when the target is not flat on this test. */
int dgmod_factorize(DgmodCtx *ctx, const char *u_json, const char *presentation_json,
                    char **result_out);

/* Independently recheck a factorization document: all three maps must be
 * valid module maps and w . v must equal u by direct matrix multiplication. */
int dgmod_verify(DgmodCtx *ctx, const char *factorization_json, char **report_out);

/* Run the frozen theorem suite for a named corpus; *report_out receives the
 * text report. Status 2 for an unknown corpus name. */
int dgmod_suite(DgmodCtx *ctx, const char *corpus_name, char **report_out);

#ifdef __cplusplus
}
#endif

#endif /* DGMOD_H */
