#include "qatm/spin_model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qatm {

Matrix4c initial_state(double p) {
  if (!(std::abs(p) <= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("initial_state: polarization must lie in [-1, 1]");
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = 0.5 * (1.0 + p);
  rho(1, 1) = 0.5 * (1.0 - p);
  return rho;
}

Matrix4c build_free_hamiltonian(const PhysicalParams& p, double f_drive_mhz,
                                bool include_transverse) {
  Matrix4c h = Matrix4c::Zero();
  const double frf = p.f_rf_mhz();
  h(1, 1) = -frf;
  h(2, 2) = f_drive_mhz - p.f1;
  h(3, 3) = -frf + f_drive_mhz - p.f2;
  if (include_transverse) {
    h(2, 3) = 0.5 * p.a_perp;
    h(3, 2) = 0.5 * p.a_perp;
  }
  return h;
}

Matrix4c build_free_hamiltonian(const PhysicalParams& p, MwStep step,
                                bool include_transverse) {
  return build_free_hamiltonian(p, p.drive_frequency(step), include_transverse);
}

Matrix4c build_driven_hamiltonian(const PhysicalParams& p, MwStep step,
                                  double rabi_mhz, double phase,
                                  bool include_transverse) {
  if (!(rabi_mhz >= 0.0) || !std::isfinite(rabi_mhz))
    throw std::invalid_argument("build_driven_hamiltonian: rabi rate must be >= 0");
  Matrix4c h = build_free_hamiltonian(p, step, include_transverse);
  const cx drive = 0.5 * rabi_mhz * std::exp(img * phase);
  h(0, 2) = drive;
  h(2, 0) = std::conj(drive);
  h(1, 3) = drive;
  h(3, 1) = std::conj(drive);
  return h;
}

Matrix4c build_driven_hamiltonian(const PhysicalParams& p, MwStep step) {
  return build_driven_hamiltonian(p, step, p.rabi_rate(step), 0.0, false);
}

Matrix4c propagator(const Matrix4c& h, double dt_us) {
  if (!(dt_us >= 0.0) || !std::isfinite(dt_us))
    throw std::invalid_argument("propagator: dt must be >= 0");
  if (!h.isApprox(h.adjoint(), 1e-12))
    throw std::invalid_argument("propagator: hamiltonian must be hermitian");
  // U = V exp(-i 2 pi lambda dt) V+, exactly unitary up to roundoff
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  Vector4c phases;
  for (int i = 0; i < 4; ++i)
    phases(i) = std::exp(-img * 2.0 * pi * dt_us * es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix4c propagate_unitary(const Matrix4c& rho, const Matrix4c& h, double dt_us) {
  Matrix4c u = propagator(h, dt_us);
  Matrix4c out = u * rho * u.adjoint();
  return 0.5 * (out + out.adjoint());  // re-hermitize roundoff
}

Matrix4c apply_dephasing(const Matrix4c& rho, double tau_us, double t2_us,
                         DephasingShape shape) {
  if (!(tau_us >= 0.0) || !std::isfinite(tau_us))
    throw std::invalid_argument("apply_dephasing: tau must be >= 0");
  if (!(t2_us > 0.0))
    throw std::invalid_argument("apply_dephasing: t2 must be positive");
  const double x = tau_us / t2_us;
  const double factor = shape == DephasingShape::exponential ? std::exp(-x) : std::exp(-x * x);
  Matrix4c out = rho;
  out.block<2, 2>(0, 2) *= factor;
  out.block<2, 2>(2, 0) *= factor;
  return out;
}

double nuclear_polarization(const Matrix4c& rho) {
  return std::real(rho(0, 0) + rho(2, 2) - rho(1, 1) - rho(3, 3));
}

double electron_ground_population(const Matrix4c& rho) {
  return std::real(rho(0, 0) + rho(1, 1));
}

Matrix4c nuclear_rotation(double theta) {
  Matrix4c u = Matrix4c::Identity();
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  u(0, 0) = c;
  u(0, 1) = -img * s;
  u(1, 0) = -img * s;
  u(1, 1) = c;
  return u;
}

Matrix4c selective_mw_rotation(MwStep step, double angle, double phase) {
  // same axis convention as the driven hamiltonian: exp(-i angle/2 n.sigma)
  // on the addressed manifold, with n = (cos phase, -sin phase, 0)
  const int a = step == MwStep::MW1 ? 0 : 1;
  const int b = a + 2;
  Matrix4c u = Matrix4c::Identity();
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  u(a, a) = c;
  u(b, b) = c;
  u(a, b) = -img * s * std::exp(img * phase);
  u(b, a) = -img * s * std::exp(-img * phase);
  return u;
}

void check_density_matrix(const Matrix4c& rho, double tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("density matrix is not hermitian");
  if (std::abs(rho.trace() - cx(1.0, 0.0)) > tol)
    throw std::invalid_argument("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (rho + rho.adjoint()));
  if (es.eigenvalues().minCoeff() < -tol)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

} // namespace qatm
