#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qatm/spin_model.hpp"

using namespace qatm;

TEST_CASE("initial state populations") {
  Matrix4c rho = initial_state(0.91);
  CHECK(std::real(rho(0, 0)) == doctest::Approx(0.955).epsilon(1e-12));
  CHECK(std::real(rho(1, 1)) == doctest::Approx(0.045).epsilon(1e-12));
  CHECK(std::abs(rho(2, 2)) == 0.0);
  CHECK(std::abs(rho(3, 3)) == 0.0);
  CHECK(nuclear_polarization(rho) == doctest::Approx(0.91).epsilon(1e-12));

  rho = initial_state(-1.0);
  CHECK(std::real(rho(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));

  rho = initial_state(0.0);
  CHECK(std::real(rho(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::real(rho(1, 1)) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(initial_state(1.5), std::invalid_argument);
  CHECK_THROWS_AS(initial_state(-1.0001), std::invalid_argument);
}

TEST_CASE("free hamiltonian coherence frequencies") {
  PhysicalParams p;

  // start from a state with coherence between every pair, propagate, and read
  // the phases off against scalar arithmetic
  Matrix4c psi_rho;
  {
    Vector4c psi;
    psi << 0.5, 0.5, 0.5, 0.5;
    psi_rho = psi * psi.adjoint();
  }

  SUBCASE("MW1 frame, default +1 MHz detuning") {
    Matrix4c h = build_free_hamiltonian(p, MwStep::MW1);
    const double tau = 0.5;
    Matrix4c rho = propagate_unitary(psi_rho, h, tau);
    // element (i,j) rotates by exp(-i 2 pi (E_i - E_j) tau)
    const double e0 = 0.0, e1 = -p.f_rf_mhz(), e2 = p.detune1,
                 e3 = -p.f_rf_mhz() + (p.f1 + p.detune1) - p.f2;
    CHECK(std::abs(rho(0, 2) / psi_rho(0, 2) -
                   std::exp(-img * 2.0 * pi * (e0 - e2) * tau)) < 1e-10);
    CHECK(std::abs(rho(1, 3) / psi_rho(1, 3) -
                   std::exp(-img * 2.0 * pi * (e1 - e3) * tau)) < 1e-10);
    CHECK(std::abs(rho(0, 1) / psi_rho(0, 1) -
                   std::exp(-img * 2.0 * pi * (e0 - e1) * tau)) < 1e-10);
    // electron coherence (0,2) advances by 2 pi * 1.0 * 0.5 = pi: sign flip
    CHECK(std::abs(rho(0, 2) - (-psi_rho(0, 2))) < 1e-10);
    // |f2 - f_drive| = 14.5 MHz on the (1,3) coherence
    CHECK(std::abs((p.f1 + p.detune1) - p.f2) == doctest::Approx(14.5).epsilon(1e-12));
    // nuclear coherence at f_rf: phase magnitude 2 pi * 0.496 * 0.5
    CHECK(std::arg(rho(0, 1) / psi_rho(0, 1)) ==
          doctest::Approx(-2.0 * pi * 0.496 * 0.5).epsilon(1e-9));
  }

  SUBCASE("MW2 frame mirrors the detunings") {
    Matrix4c h = build_free_hamiltonian(p, MwStep::MW2);
    // (1,3) fringe at f2 - f_drive = +1 MHz magnitude; (0,2) at 14.5 MHz
    CHECK(std::real(h(3, 3)) ==
          doctest::Approx(-p.f_rf_mhz() + p.detune2).epsilon(1e-12));
    CHECK(std::real(h(2, 2)) == doctest::Approx(p.detune2 - (p.f1 - p.f2)).epsilon(1e-9));
    const double tau = 0.25;
    Matrix4c rho = propagate_unitary(psi_rho, h, tau);
    const cx expected = std::exp(-img * 2.0 * pi * (-p.f_rf_mhz() - std::real(h(3, 3))) * tau);
    CHECK(std::abs(rho(1, 3) / psi_rho(1, 3) - expected) < 1e-10);
  }

  SUBCASE("transverse coupling only touches the lower manifold") {
    Matrix4c h0 = build_free_hamiltonian(p, MwStep::MW1, false);
    Matrix4c ht = build_free_hamiltonian(p, MwStep::MW1, true);
    CHECK(std::abs(h0(2, 3)) == 0.0);
    CHECK(std::real(ht(2, 3)) == doctest::Approx(0.5 * p.a_perp).epsilon(1e-12));
    CHECK((ht - ht.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("driven hamiltonian pulses") {
  PhysicalParams p;

  SUBCASE("resonant pi pulse empties the addressed level") {
    PhysicalParams res = p;
    res.detune1 = 0.0;
    Matrix4c h = build_driven_hamiltonian(res, MwStep::MW1, res.rabi_rate(MwStep::MW1), 0.0);
    Matrix4c rho = propagate_unitary(initial_state(0.91), h, 0.234);
    CHECK(std::real(rho(0, 0)) < 1e-6);
    CHECK(std::real(rho(2, 2)) == doctest::Approx(0.955).epsilon(1e-6));
  }

  SUBCASE("half pi gives half transfer") {
    PhysicalParams res = p;
    res.detune1 = 0.0;
    Matrix4c h = build_driven_hamiltonian(res, MwStep::MW1, res.rabi_rate(MwStep::MW1), 0.0);
    Matrix4c rho = propagate_unitary(initial_state(1.0), h, 0.117);
    CHECK(electron_ground_population(rho) == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("far-detuned manifold barely responds") {
    // MW1 drive, nucleus down: detuning f2 - f_drive = -14.5 MHz. Maximum
    // transfer over a fine duration sweep must match the closed-form
    // two-level result.
    Matrix4c h = build_driven_hamiltonian(p, MwStep::MW1);
    const double rabi = p.rabi_rate(MwStep::MW1);
    const double detune = p.f2 - (p.f1 + p.detune1);
    double max_transfer = 0.0;
    Matrix4c rho = initial_state(-1.0);  // all population in |0,down>
    for (double t = 0.0; t <= 0.08; t += 0.0005) {
      Matrix4c out = propagate_unitary(rho, h, t);
      max_transfer = std::max(max_transfer, std::real(out(3, 3)));
    }
    const double expected = rabi * rabi / (rabi * rabi + detune * detune);
    CHECK(max_transfer == doctest::Approx(expected).epsilon(2e-3));
    CHECK(expected == doctest::Approx(0.0213).epsilon(0.02));
  }

  SUBCASE("phase enters the off-diagonal element") {
    Matrix4c h = build_driven_hamiltonian(p, MwStep::MW1, 2.0, 0.7, false);
    CHECK(std::abs(h(0, 2) - cx(std::cos(0.7), std::sin(0.7))) < 1e-12);
    CHECK(std::abs(h(1, 3) - h(0, 2)) < 1e-15);
    CHECK_THROWS_AS(build_driven_hamiltonian(p, MwStep::MW1, -1.0, 0.0, false),
                    std::invalid_argument);
  }
}

TEST_CASE("propagator properties") {
  PhysicalParams p;
  Matrix4c h = build_driven_hamiltonian(p, MwStep::MW1);

  SUBCASE("dt = 0 is the identity") {
    CHECK((propagator(h, 0.0) - Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("composition") {
    Matrix4c u1 = propagator(h, 0.13);
    Matrix4c u2 = propagator(h, 0.29);
    Matrix4c u12 = propagator(h, 0.42);
    CHECK((u2 * u1 - u12).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("unitarity and trace preservation") {
    Matrix4c u = propagator(h, 1.7);
    CHECK((u * u.adjoint() - Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    std::mt19937_64 gen(7);
    Matrix4c rho = oracle::random_density(gen);
    Matrix4c out = propagate_unitary(rho, h, 1.7);
    CHECK(std::abs(out.trace() - rho.trace()) < 1e-13);
    CHECK_NOTHROW(check_density_matrix(out));
  }

  SUBCASE("negative or non-finite dt rejected") {
    CHECK_THROWS_AS(propagator(h, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(propagator(h, std::nan("")), std::invalid_argument);
  }

  SUBCASE("matches brute-force integration") {
    std::mt19937_64 gen(42);
    for (int rep = 0; rep < 5; ++rep) {
      Matrix4c rho = oracle::random_density(gen);
      Matrix4c fine = oracle::rk4_von_neumann(rho, h, 0.1, 1000);
      Matrix4c fast = propagate_unitary(rho, h, 0.1);
      CHECK((fine - fast).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("dephasing channel") {
  PhysicalParams p;
  std::mt19937_64 gen(3);
  Matrix4c rho = oracle::random_density(gen);

  SUBCASE("one t2 damps coherences by 1/e") {
    Matrix4c out = apply_dephasing(rho, p.t2_star, p.t2_star);
    const double f = std::exp(-1.0);
    CHECK(std::abs(out(0, 2) - f * rho(0, 2)) < 1e-14);
    CHECK(std::abs(out(1, 3) - f * rho(1, 3)) < 1e-14);
    CHECK(std::abs(out(0, 3) - f * rho(0, 3)) < 1e-14);
    // populations and intra-manifold coherences untouched
    CHECK(std::abs(out(0, 0) - rho(0, 0)) == 0.0);
    CHECK(std::abs(out(0, 1) - rho(0, 1)) == 0.0);
    CHECK(std::abs(out(2, 3) - rho(2, 3)) == 0.0);
  }

  SUBCASE("gaussian shape") {
    Matrix4c out = apply_dephasing(rho, 0.9, 1.8, DephasingShape::gaussian);
    CHECK(std::abs(out(0, 2) - std::exp(-0.25) * rho(0, 2)) < 1e-14);
  }

  SUBCASE("tau = 0 is the identity, huge tau kills the block") {
    Matrix4c same = apply_dephasing(rho, 0.0, 1.8);
    CHECK((same - rho).cwiseAbs().maxCoeff() == 0.0);
    Matrix4c dead = apply_dephasing(rho, 1e9, 1.8);
    CHECK(std::abs(dead(0, 2)) == 0.0);
    CHECK(std::abs(dead.trace() - rho.trace()) < 1e-15);
    CHECK_NOTHROW(check_density_matrix(dead, 1e-9));
  }

  SUBCASE("stays a density matrix") {
    for (double tau : {0.1, 0.5, 2.0, 7.0}) {
      Matrix4c out = apply_dephasing(rho, tau, p.t2_star);
      CHECK_NOTHROW(check_density_matrix(out, 1e-9));
    }
  }

  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(apply_dephasing(rho, -1.0, 1.8), std::invalid_argument);
    CHECK_THROWS_AS(apply_dephasing(rho, 1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("ideal rotations") {
  SUBCASE("nuclear rotation tracks cos(theta)") {
    for (double theta : {0.0, 0.3, pi / 2, 2.0, pi}) {
      Matrix4c u = nuclear_rotation(theta);
      Matrix4c rho = u * initial_state(0.91) * u.adjoint();
      CHECK(nuclear_polarization(rho) == doctest::Approx(0.91 * std::cos(theta)).epsilon(1e-12));
    }
  }

  SUBCASE("selective rotation only moves its manifold") {
    Matrix4c u = selective_mw_rotation(MwStep::MW1, pi, 0.0);
    Matrix4c rho = u * initial_state(0.91) * u.adjoint();
    CHECK(std::real(rho(0, 0)) < 1e-14);
    CHECK(std::real(rho(2, 2)) == doctest::Approx(0.955).epsilon(1e-12));
    CHECK(std::real(rho(1, 1)) == doctest::Approx(0.045).epsilon(1e-12));
    // agrees with the finite resonant pulse when all weight sits in its manifold
    PhysicalParams res;
    res.detune1 = 0.0;
    Matrix4c h = build_driven_hamiltonian(res, MwStep::MW1, res.rabi_rate(MwStep::MW1), 0.4, false);
    Matrix4c fin = propagator(h, 0.234);
    Matrix4c sel = selective_mw_rotation(MwStep::MW1, pi, 0.4);
    Matrix4c a = fin * initial_state(1.0) * fin.adjoint();
    Matrix4c b = sel * initial_state(1.0) * sel.adjoint();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("density matrix checker flags violations") {
  Matrix4c rho = initial_state(0.5);
  CHECK_NOTHROW(check_density_matrix(rho));
  Matrix4c bad = rho;
  bad(0, 0) += 0.1;
  CHECK_THROWS_AS(check_density_matrix(bad), std::invalid_argument);
  bad = rho;
  bad(0, 1) = cx(0.9, 0.0);
  bad(1, 0) = cx(0.9, 0.0);  // breaks positivity
  CHECK_THROWS_AS(check_density_matrix(bad), std::invalid_argument);
  bad = rho;
  bad(0, 1) = cx(0.0, 0.2);  // not hermitian
  CHECK_THROWS_AS(check_density_matrix(bad), std::invalid_argument);
}
