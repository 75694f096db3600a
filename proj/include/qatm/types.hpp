#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace qatm {

using cx = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

constexpr double pi = 3.14159265358979323846;
constexpr cx img(0.0, 1.0);

// Basis order, used everywhere a 4x4 operator appears:
//   0 = |ms=0, n_up>,  1 = |ms=0, n_down>,  2 = |ms=-1, n_up>,  3 = |ms=-1, n_down>
// Hamiltonian matrix elements are in MHz, times in us; a state evolving under a
// diagonal element E picks up the phase exp(-i 2 pi E t).

// the two electron-spin transitions addressed by microwave pulses:
// MW1 drives |0,up> <-> |-1,up> near f1; MW2 drives |0,down> <-> |-1,down> near f2
enum class MwStep { MW1, MW2 };

inline const char* to_string(MwStep s) { return s == MwStep::MW1 ? "MW1" : "MW2"; }

// sensor dephasing envelope applied to electron coherences during free evolution
enum class DephasingShape { exponential, gaussian };

} // namespace qatm
