/* C ABI for the sphere-substrate Casimir spectral calculator.
 *
 * Maintained by hand alongside crates/ffi/src/lib.rs; the `header_in_sync`
 * test cross-checks the exported symbol list. Link against the cdylib or
 * staticlib built from the casimir-spectral-ffi crate.
 *
 * Lengths are nm, energies/frequencies eV, forces eV/nm or pN. Every
 * fallible call returns a CASIMIR_STATUS_* code and writes results through
 * out-pointers; casimir_last_error_message retrieves the message behind the
 * most recent failure on the calling thread.
 */

#ifndef CASIMIR_SPECTRAL_H
#define CASIMIR_SPECTRAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CASIMIR_ABI_VERSION 1u

#define CASIMIR_STATUS_OK 0
#define CASIMIR_STATUS_NULL_ARGUMENT 1
#define CASIMIR_STATUS_VALIDATION 2
#define CASIMIR_STATUS_NUMERICAL 3
#define CASIMIR_STATUS_IO 4
#define CASIMIR_STATUS_INTERNAL 5

/* PFA variants for casimir_pfa_force_pn. */
#define CASIMIR_PFA_IDEAL_RETARDED 0
#define CASIMIR_PFA_HAMAKER_NONRETARDED 1

/* Opaque sphere-over-substrate configuration. */
typedef struct CasimirSystem CasimirSystem;

uint32_t casimir_abi_version(void);

/* Copies the last error message on this thread into buffer (NUL-terminated,
 * truncated to capacity). Returns the full message length excluding the NUL,
 * or 0 when no error has occurred. buffer may be NULL to query the length. */
size_t casimir_last_error_message(char *buffer, size_t capacity);

/* Constructors; on success write a handle to *out that must be released
 * with casimir_system_free. */
int casimir_system_new_drude(double radius_nm,
                             double gap_nm,
                             double sphere_omega_p_ev,
                             double sphere_damping_ratio,
                             double substrate_epsilon,
                             double ambient_epsilon,
                             CasimirSystem **out);

int casimir_system_new_drude_over_conductor(double radius_nm,
                                            double gap_nm,
                                            double sphere_omega_p_ev,
                                            double sphere_damping_ratio,
                                            double ambient_epsilon,
                                            CasimirSystem **out);

/* Preset names (case-insensitive): spheres K, Au, Ag, Al; substrates Inf,
 * Al2O3, TiO2. Ambient is vacuum. */
int casimir_system_new_named(const char *sphere_name,
                             const char *substrate_name,
                             double radius_nm,
                             double gap_nm,
                             CasimirSystem **out);

void casimir_system_free(CasimirSystem *system);

/* Substrate contrast factor in [-1, 1). */
int casimir_contrast_factor(const CasimirSystem *system, double *out);

/* Eigenvalues of the interaction matrix: in-plane pair and surface normal. */
int casimir_eigenvalues(const CasimirSystem *system,
                        double *out_parallel,
                        double *out_perpendicular);

/* Proper-mode frequencies in eV plus the z-to-infinity reference mode. */
int casimir_mode_frequencies_ev(const CasimirSystem *system,
                                double *out_parallel,
                                double *out_perpendicular,
                                double *out_reference);

/* Mode-sum interaction energy in eV (negative: attraction). */
int casimir_interaction_energy_ev(const CasimirSystem *system, double *out);

/* Force; negative values point toward the substrate. Pass
 * use_central_difference = 0 for the analytic derivative. */
int casimir_force(const CasimirSystem *system,
                  int use_central_difference,
                  double *out_ev_per_nm,
                  double *out_pn);

/* Density-of-states interaction energy in eV; needs a damped Drude sphere.
 * rel_tol <= 0 selects the default tolerance (1e-8). */
int casimir_dos_interaction_energy_ev(const CasimirSystem *system,
                                      double rel_tol,
                                      double *out);

/* Proximity-theorem force in pN; hamaker_ev is read only for the
 * CASIMIR_PFA_HAMAKER_NONRETARDED variant. */
int casimir_pfa_force_pn(double radius_nm,
                         double gap_nm,
                         int variant,
                         double hamaker_ev,
                         double *out_pn);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CASIMIR_SPECTRAL_H */
