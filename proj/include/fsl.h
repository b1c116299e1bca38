#ifndef FSL_H
#define FSL_H

/* C interface to the frame-sparse recovery library.
 *
 * Conventions:
 *   - Functions returning int use the process exit-code vocabulary:
 *       0 ok / certified-holds / optimal
 *       2 bad arguments, 3 I/O failure
 *       10 certified-fails, 11 estimate, 12 not-checked   (property checks)
 *       20 iteration cap, 21 infeasible                   (decoders)
 *       30 assertion failure                              (experiment pipelines)
 *       70 internal error
 *   - Functions returning a pointer return NULL on failure.
 *   - On any failure, fsl_last_error() describes it (thread-local).
 *   - Strings written through char** out-params are heap-allocated JSON
 *     documents; release them with fsl_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FSL_API __declspec(dllexport)
#else
#define FSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Version string, static storage. */
FSL_API const char* fsl_version(void);

/* Message of the most recent failure on the calling thread; "" if none. */
FSL_API const char* fsl_last_error(void);

/* Status code of that failure (exit-code vocabulary above); 0 if none. */
FSL_API int fsl_last_status(void);

FSL_API void fsl_string_free(char* s);

/* Opaque dense row-major matrix of doubles. */
typedef struct fsl_matrix fsl_matrix;

FSL_API void fsl_matrix_free(fsl_matrix* m);
FSL_API size_t fsl_matrix_rows(const fsl_matrix* m);
FSL_API size_t fsl_matrix_cols(const fsl_matrix* m);
/* Pointer to rows*cols doubles, valid while the handle lives. */
FSL_API const double* fsl_matrix_data(const fsl_matrix* m);

/* Samples a sensing matrix from an ensemble spec:
 *   {"family": "gaussian"|"rademacher"|"uniform-sphere-rows"|"laplace"|
 *              "weibull"|"student-t"|"partial-circulant"|"subsampled-dct",
 *    "m":…, "d":…, "seed":…, "normalization":"rows-inv-sqrt-m"|"none", …}
 */
FSL_API fsl_matrix* fsl_gen_matrix(const char* spec_json);

/* Builds a frame matrix from a frame spec:
 *   {"kind": "identity"|"gaussian"|"dct-overcomplete"|"from-file",
 *    "d":…, "n":…, "seed":…, "path":…}
 */
FSL_API fsl_matrix* fsl_gen_frame(const char* spec_json);

/* format: "csv", "bin", or NULL/"auto" to sniff from content (load only). */
FSL_API fsl_matrix* fsl_matrix_load(const char* path, const char* format);
FSL_API int fsl_matrix_save(const fsl_matrix* m, const char* path, const char* format);

/* Property checks. property is one of
 *   coherence rip nsp f-rip f-nsp rnsp-from-rip rnsp-star quotient rwp split
 * args_json may carry: "matrix" (path), "frame" (path), "k", "rho", "q",
 * "trials", "seed", "c0", "c1", "delta", plus per-property extras.
 * *out_json receives the report document; return value is the verdict code.
 */
FSL_API int fsl_check(const char* property, const char* args_json, char** out_json);

/* Decoders. method is one of: bp qcbp synthesis analysis.
 * args_json: {"matrix": path, "y": path, "frame": path (synthesis/analysis),
 *             "eta": scalar (default 0)}.
 * *out_json receives the decode result document; return value is the status code.
 */
FSL_API int fsl_decode(const char* method, const char* args_json, char** out_json);

/* Experiment pipelines. kind is one of:
 *   phase sweep nsp-scaling f-rip smallball
 * config_json per pipeline schema; artifacts (result JSON, CSV where
 * applicable, manifest) are written under out_dir. *out_json receives the
 * result document with an added "artifacts" object. Returns 0 when every
 * pipeline assertion passed, 30 otherwise.
 */
FSL_API int fsl_run_experiment(const char* kind, const char* config_json, const char* out_dir,
                               char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* FSL_H */
