#ifndef LOCSPEC_H
#define LOCSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define LS_OK 0

#define LS_ERR_NULL -1

#define LS_ERR_DOMAIN -2

#define LS_ERR_DIMENSION -3

#define LS_ERR_FRAME -4

#define LS_ERR_NOT_SYMPLECTIC -5

#define LS_ERR_NOT_POSITIVE_DEFINITE -6

#define LS_ERR_NOT_POLYRADIAL -7

#define LS_ERR_QUADRATURE -8

#define LS_ERR_UNSUPPORTED -9

#define LS_ERR_CONFIG -10

/**
 * Output buffer shorter than required.
 */
#define LS_ERR_BUFFER -11

#define LS_ERR_PANIC -12

/**
 * A Lagrangian frame `(Q, P)`.
 */
typedef struct LsFrame LsFrame;

/**
 * A phase-space mask: polyradial or the square `[-a, a]^2`.
 */
typedef struct LsMask LsMask;

/**
 * An assembled operator matrix together with its eigenvalues.
 */
typedef struct LsOperator LsOperator;

/**
 * Complex number with the layout of C99 `double _Complex`.
 */
typedef struct LsComplex {
  double re;
  double im;
} LsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length in bytes.
 */
int32_t ls_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Hermite function `phi_n(t)`, normalized with `phi_0(t) = 2^{1/4} e^{-pi t^2}`.
 */
int32_t ls_hermite(uint32_t n, double t, double *result);

/**
 * Generalized Laguerre polynomial `L_k^alpha(t)`.
 */
int32_t ls_laguerre(uint32_t k, double alpha, double t, double *result);

/**
 * Complex Hermite polynomial `H_{n,k}(z)`.
 */
int32_t ls_complex_hermite(uint32_t n, uint32_t k, struct LsComplex z, struct LsComplex *result);

/**
 * Frame from row-major `d x d` matrices `q` and `p`.
 */
int32_t ls_frame_new(size_t d,
                     const struct LsComplex *q,
                     const struct LsComplex *p,
                     struct LsFrame **frame);

/**
 * The frame `(I, iI)` whose wavepackets are the Hermite functions.
 */
int32_t ls_frame_standard(size_t d, struct LsFrame **frame);

/**
 * The two-dimensional frame with zero-diagonal `Q^{-1} conj(Q)`.
 */
int32_t ls_frame_zero_diagonal(struct LsFrame **frame);

int32_t ls_frame_dim(const struct LsFrame *frame, size_t *d);

/**
 * Releases a frame. Null is ignored.
 */
void ls_frame_free(struct LsFrame *frame);

/**
 * Hagedorn wavepacket `phi_k[Q, P](t)`; `k` and `t` have the frame's dimension.
 */
int32_t ls_wavepacket_eval(const struct LsFrame *frame,
                           const uint32_t *k,
                           const double *t,
                           struct LsComplex *result);

/**
 * `V_{phi_k[Q,P]} phi_n[Q,P](z)` in closed form, `z_j = x_j + i w_j`.
 */
int32_t ls_hagedorn_stft(const struct LsFrame *frame,
                         const uint32_t *n,
                         const uint32_t *k,
                         const struct LsComplex *z,
                         struct LsComplex *result);

/**
 * Polyradial mask from its JSON description, e.g.
 * `{"d":1,"constant":0,"profile":{"kind":"indicator","scale":1,"shadow":{"kind":"ball","d":1,"radius":1}}}`.
 */
int32_t ls_mask_from_json(const char *json,
                          struct LsMask **mask);

/**
 * Indicator of the disc `|z| <= radius` in the phase plane.
 */
int32_t ls_mask_disc(double radius, struct LsMask **mask);

/**
 * Indicator of the square `[-a, a]^2` in the phase plane (not polyradial).
 */
int32_t ls_mask_square(double half_side, struct LsMask **mask);

int32_t ls_mask_dim(const struct LsMask *mask, size_t *d);

/**
 * Releases a mask. Null is ignored.
 */
void ls_mask_free(struct LsMask *mask);

/**
 * Eigenvalue for `phi_n` of the disc localization operator with window `phi_k`.
 */
int32_t ls_eig_disc(uint32_t n, uint32_t k, double radius, double *result);

/**
 * Eigenvalue for `phi_n` with window `phi_k` and a polyradial mask.
 */
int32_t ls_eig_weighted(const struct LsMask *mask,
                        const uint32_t *n,
                        const uint32_t *k,
                        double *result);

/**
 * Assembles the localization operator on the first `n_basis` basis elements
 * per axis. With a null `frame` the window is the Hermite function `phi_k`,
 * otherwise the Hagedorn wavepacket `phi_k[Q, P]`.
 */
int32_t ls_assemble_localization(const struct LsMask *mask,
                                 const struct LsFrame *frame,
                                 const uint32_t *k,
                                 size_t n_basis,
                                 struct LsOperator **operator_);

/**
 * Number of basis elements (rows) of the operator matrix.
 */
int32_t ls_operator_dim(const struct LsOperator *operator_, size_t *dim);

/**
 * Row-major matrix entries `<A phi_n, phi_m>` into `buf` of length `len >= dim^2`.
 */
int32_t ls_operator_entries(const struct LsOperator *operator_, struct LsComplex *buf, size_t len);

/**
 * Eigenvalues in descending order into `buf` of length `len >= dim`.
 */
int32_t ls_operator_eigenvalues(const struct LsOperator *operator_, double *buf, size_t len);

/**
 * Releases an operator. Null is ignored.
 */
void ls_operator_free(struct LsOperator *operator_);

/**
 * Williamson normal form `M = T K T^T` of a symmetric positive definite
 * row-major `2d x 2d` matrix. Writes `T` (row-major, `4d^2` values) and the
 * `d` symplectic eigenvalues in ascending order.
 */
int32_t ls_williamson(size_t d, const double *m, double *t, double *k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCSPEC_H */
