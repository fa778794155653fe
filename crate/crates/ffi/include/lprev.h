#ifndef LPREV_H
#define LPREV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LprevCheckMode {
  // Against the generated constraints.
  LPREV_CHECK_MODE_CONSTRAINTS = 0,
  // Over subsets, without generated constraints.
  LPREV_CHECK_MODE_DIRECT = 1,
  // Lower envelope of the credal set.
  LPREV_CHECK_MODE_ENVELOPE = 2,
} LprevCheckMode;

typedef enum LprevStatus {
  LPREV_STATUS_OK = 0,
  LPREV_STATUS_NULL_POINTER = 1,
  LPREV_STATUS_INVALID_ARGUMENT = 2,
  LPREV_STATUS_PARSE = 3,
  LPREV_STATUS_INFEASIBLE = 4,
  LPREV_STATUS_SURE_LOSS = 5,
  LPREV_STATUS_BUDGET_EXCEEDED = 6,
  LPREV_STATUS_INTERNAL = 7,
} LprevStatus;

// Opaque set of gambles on a finite possibility space.
typedef struct LprevGambles LprevGambles;

// Opaque result of a pipeline run.
typedef struct LprevPolytope LprevPolytope;

// Pipeline settings. Zero means "no limit" for both budgets.
typedef struct LprevOptions {
  bool augment;
  bool enumerate;
  size_t max_vertices;
  double time_limit_seconds;
} LprevOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *lprev_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void lprev_string_free(char *s);

// Parses a gamble file (`omega a b c` followed by `name v1 v2 ...` lines).
//
// # Safety
// `src` must be a NUL-terminated string; `out` must be writable.
enum LprevStatus lprev_gambles_parse(const char *src, struct LprevGambles **out);

// Built-in gamble set: `toy`, `3on3`, ... or a family name (`l`, `u`, `lu`,
// `pset`, `vb`) with `omega` and, for `vb`, `k`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum LprevStatus lprev_gambles_builtin(const char *name,
                                       size_t omega,
                                       size_t k,
                                       struct LprevGambles **out);

// # Safety
// `g` must be NULL or a live handle.
size_t lprev_gambles_len(const struct LprevGambles *g);

// Gambles in file format.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum LprevStatus lprev_gambles_format(const struct LprevGambles *g, char **out);

// # Safety
// `g` must be NULL or a handle not yet freed.
void lprev_gambles_free(struct LprevGambles *g);

struct LprevOptions lprev_options_default(void);

// Runs the full pipeline. `options` may be NULL for the defaults.
//
// # Safety
// `g` must be a live handle, `options` NULL or valid, `out` writable.
enum LprevStatus lprev_pipeline(const struct LprevGambles *g,
                                const struct LprevOptions *options,
                                struct LprevPolytope **out);

// # Safety
// `p` must be NULL or a handle not yet freed.
void lprev_polytope_free(struct LprevPolytope *p);

// Number of irredundant constraints.
//
// # Safety
// `p` must be NULL or a live handle.
size_t lprev_polytope_constraint_count(const struct LprevPolytope *p);

// Number of vertices, or `SIZE_MAX` when they were not enumerated.
//
// # Safety
// `p` must be NULL or a live handle.
size_t lprev_polytope_vertex_count(const struct LprevPolytope *p);

// Number of edges, or `SIZE_MAX` when vertices were not enumerated.
//
// # Safety
// `p` must be NULL or a live handle.
size_t lprev_polytope_edge_count(const struct LprevPolytope *p);

// Constraints in H-representation text format.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum LprevStatus lprev_polytope_hrep(const struct LprevPolytope *p, char **out);

// Vertices in V-representation text format.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum LprevStatus lprev_polytope_vrep(const struct LprevPolytope *p, char **out);

// Edge list, one `u v` pair per line.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum LprevStatus lprev_polytope_adjacency(const struct LprevPolytope *p, char **out);

// Coherence of the lower prevision given as `n` rational strings (`"p/q"`
// or `"p"`) in gamble order. Writes 1 or 0 to `coherent`. A lower
// prevision incurring sure loss is reported as incoherent, not as an error.
//
// # Safety
// `g` must be a live handle, `values` must hold `n` NUL-terminated strings,
// `coherent` must be writable.
enum LprevStatus lprev_check(const struct LprevGambles *g,
                             const char *const *values,
                             size_t n,
                             enum LprevCheckMode mode,
                             bool *coherent);

// Natural extension of the lower prevision to the gamble `target` (one
// rational string per element of the possibility space). The result is
// written as a rational string.
//
// # Safety
// `g` must be a live handle; `values` and `target` must hold `n` and `m`
// NUL-terminated strings; `out` must be writable.
enum LprevStatus lprev_natural_extension(const struct LprevGambles *g,
                                         const char *const *values,
                                         size_t n,
                                         const char *const *target,
                                         size_t m,
                                         char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPREV_H */
