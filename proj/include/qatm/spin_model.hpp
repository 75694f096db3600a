#pragma once

#include "qatm/params.hpp"
#include "qatm/types.hpp"

namespace qatm {

// Density matrix after laser initialization: electron polarized into ms=0,
// nucleus in a diagonal mixture with polarization p in [-1, 1]:
//   rho = diag((1+p)/2, (1-p)/2, 0, 0)
Matrix4c initial_state(double p);

// Free Hamiltonian in the frame rotating at the microwave drive frequency
// f_drive (MHz) for the electron and at f_rf for the nucleus in ms=0:
//   diag(0, -f_rf, f_drive - f1, -f_rf + f_drive - f2)
// so the electron coherence (0,2) evolves at f1 - f_drive, (1,3) at f2 - f_drive,
// and the nuclear coherence (0,1) at f_rf. With include_transverse the
// off-diagonal hyperfine term a_perp/2 couples |-1,up> and |-1,down>.
Matrix4c build_free_hamiltonian(const PhysicalParams& p, double f_drive_mhz,
                                bool include_transverse = false);
Matrix4c build_free_hamiltonian(const PhysicalParams& p, MwStep step,
                                bool include_transverse = false);

// Free Hamiltonian plus the microwave drive coupling, rotating-wave form:
// matrix element (0,2) and (1,3) set to (rabi/2) e^{i phase} (rabi in MHz).
// Both nuclear manifolds are driven; selectivity comes from the detunings.
Matrix4c build_driven_hamiltonian(const PhysicalParams& p, MwStep step,
                                  double rabi_mhz, double phase,
                                  bool include_transverse = false);
Matrix4c build_driven_hamiltonian(const PhysicalParams& p, MwStep step);

// rho -> U rho U+ with U = exp(-i 2 pi H dt), H hermitian in MHz, dt in us >= 0
Matrix4c propagate_unitary(const Matrix4c& rho, const Matrix4c& h, double dt_us);

// the propagator itself (unitary to machine precision, via eigendecomposition)
Matrix4c propagator(const Matrix4c& h, double dt_us);

// multiply every electron coherence (the off-diagonal 2x2 block between the
// ms=0 and ms=-1 manifolds) by exp(-tau/t2) or exp(-(tau/t2)^2); populations
// and nuclear coherences within a manifold are untouched. Exactly trace- and
// positivity-preserving.
Matrix4c apply_dephasing(const Matrix4c& rho, double tau_us, double t2_us,
                         DephasingShape shape = DephasingShape::exponential);

// <I_z>/(1/2): population difference n_up - n_down, in [-1, 1]
double nuclear_polarization(const Matrix4c& rho);

// rho00 + rho11, the bright-state probability seen by optical readout
double electron_ground_population(const Matrix4c& rho);

// ideal (instantaneous) rotations used by the ideal pulse modes:
// nuclear rotation about x by theta within ms=0, and a selective electron
// rotation on one nuclear manifold with the same axis convention as the
// driven Hamiltonian
Matrix4c nuclear_rotation(double theta);
Matrix4c selective_mw_rotation(MwStep step, double angle, double phase);

// throws std::invalid_argument unless rho is hermitian, unit trace and
// positive semidefinite within tol
void check_density_matrix(const Matrix4c& rho, double tol = 1e-9);

} // namespace qatm
