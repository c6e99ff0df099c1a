#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "toplat/dynamics.hpp"
#include "toplat/lattice.hpp"

using namespace toplat;

namespace {

using Cd = std::complex<double>;

Eigen::MatrixXd two_site(double c) {
    Eigen::MatrixXd H(2, 2);
    H << 0.0, c, c, 0.0;
    return H;
}

Eigen::MatrixXd interface_hamiltonian(int J, std::vector<double> intra, double tau,
                                      int half_cells, int offset = 0) {
    InterfaceLatticeSpec spec;
    spec.cell.J = J;
    spec.cell.intracell = std::move(intra);
    spec.cell.intercell = tau;
    spec.half_cells = half_cells;
    spec.interface_offset = offset;
    return build_hamiltonian(build_interface_sequence(spec));
}

double max_rel_frobenius(const BiphotonTrajectory& a, const BiphotonTrajectory& b) {
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.snapshots.size(); ++i)
        scale = std::max(scale, a.snapshots[i].psi.norm());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i)
        worst = std::max(worst, (a.snapshots[i].psi - b.snapshots[i].psi).norm());
    return scale > 0 ? worst / scale : worst;
}

}  // namespace

TEST_CASE("two-site pump oscillates as cos^2 between the waveguides") {
    const double c = 3.0e4;
    const Eigen::MatrixXd H = two_site(c);
    Eigen::VectorXcd in(2);
    in << 1.0, 0.0;
    PumpEvolution pump(H, in);
    for (double z : {0.0, 1e-5, 3e-5, 7.3e-5}) {
        const Eigen::VectorXcd a = pump.amplitudes(z);
        CHECK(std::norm(a(0)) == doctest::Approx(std::cos(c * z) * std::cos(c * z)));
        CHECK(std::norm(a(1)) == doctest::Approx(std::sin(c * z) * std::sin(c * z)));
        // Norm conservation.
        CHECK(a.squaredNorm() == doctest::Approx(1.0));
    }
}

TEST_CASE("frozen pump holds its input amplitudes") {
    const Eigen::MatrixXd H = two_site(3.0e4);
    Eigen::VectorXcd in(2);
    in << 0.6, Cd(0.0, 0.8);
    PumpEvolution pump(H, in, /*frozen=*/true);
    const Eigen::VectorXcd a = pump.amplitudes(1e-4);
    CHECK(std::abs(a(0) - in(0)) < 1e-15);
    CHECK(std::abs(a(1) - in(1)) < 1e-15);
    const Eigen::VectorXcd a2 = pump.squared_amplitudes(2e-4);
    CHECK(std::abs(a2(0) - in(0) * in(0)) < 1e-15);
    CHECK(std::abs(a2(1) - in(1) * in(1)) < 1e-15);
}

TEST_CASE("squared amplitudes are complex squares, not modulus squares") {
    const Eigen::MatrixXd H = two_site(2.0e4);
    Eigen::VectorXcd in(2);
    in << 1.0, 0.0;
    PumpEvolution pump(H, in);
    const double z = 2.5e-5;
    const Eigen::VectorXcd a = pump.amplitudes(z);
    const Eigen::VectorXcd a2 = pump.squared_amplitudes(z);
    CHECK(std::abs(a2(0) - a(0) * a(0)) < 1e-14);
    CHECK(std::abs(a2(1) - a(1) * a(1)) < 1e-14);
}

TEST_CASE("biphoton amplitude is linear in the nonlinearity") {
    const Eigen::MatrixXd H = interface_hamiltonian(3, {0.5e5, 0.5e5}, 1.0e5, 2);
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(H.rows());
    in((H.rows() - 1) / 2) = 1.0;
    PropagationConfig cfg;
    cfg.length = 1e-4;
    cfg.snapshots = 5;
    NonlinearSource src;
    src.gamma = 60.0;
    const BiphotonTrajectory a = propagate_biphoton(H, H, H, in, src, cfg);
    src.gamma = 120.0;
    const BiphotonTrajectory b = propagate_biphoton(H, H, H, in, src, cfg);
    for (std::size_t i = 0; i < a.snapshots.size(); ++i)
        CHECK((2.0 * a.snapshots[i].psi - b.snapshots[i].psi).norm() <=
              1e-10 * std::max(1.0, b.snapshots[i].psi.norm()));
}

TEST_CASE("single decoupled waveguide accumulates |psi| = gamma*psi0*A^2*L") {
    Eigen::MatrixXd H(1, 1);
    H << 0.0;
    Eigen::VectorXcd in(1);
    in << 0.7;
    NonlinearSource src;
    src.gamma = 120.0;
    src.psi0 = 1.0;
    PropagationConfig cfg;
    cfg.length = 5e-4;
    cfg.snapshots = 3;
    const BiphotonTrajectory traj = propagate_biphoton(H, H, H, in, src, cfg);
    const double expect = 120.0 * 0.49 * 5e-4;
    CHECK(std::abs(traj.snapshots.back().psi(0, 0)) == doctest::Approx(expect));
    // Halfway point is linear in z.
    CHECK(std::abs(traj.snapshots[1].psi(0, 0)) == doctest::Approx(expect / 2));
}

TEST_CASE("exchange antisymmetry psi^T = -psi* for identical signal/idler") {
    const Eigen::MatrixXd H = interface_hamiltonian(3, {0.5e5, 0.5e5}, 1.0e5, 3);
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(H.rows());
    in((H.rows() - 1) / 2) = 1.0;
    NonlinearSource src;
    src.gamma = 120.0;
    PropagationConfig cfg;
    cfg.length = 3e-4;
    cfg.snapshots = 7;
    const BiphotonTrajectory traj = propagate_biphoton(H, H, H, in, src, cfg);
    CHECK(traj.snapshots.back().psi.norm() > 0.0);
    for (const auto& s : traj.snapshots) {
        const Eigen::MatrixXcd defect = s.psi.transpose() + s.psi.conjugate();
        CHECK(defect.norm() <= 1e-12 * std::max(1.0, s.psi.norm()));
    }
}

TEST_CASE("mirror symmetry of the correlation map for a center pump") {
    const Eigen::MatrixXd H = interface_hamiltonian(4, {0.8e5, 0.5e5, 0.8e5}, 1.0e5, 3);
    const int N = static_cast<int>(H.rows());
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(N);
    in((N - 1) / 2) = 1.0;
    NonlinearSource src;
    src.gamma = 120.0;
    PropagationConfig cfg;
    cfg.length = 2e-4;
    cfg.snapshots = 5;
    const BiphotonTrajectory traj = propagate_biphoton(H, H, H, in, src, cfg);
    const Eigen::MatrixXcd& psi = traj.snapshots.back().psi;
    CHECK(psi.norm() > 0.0);
    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n)
            CHECK(std::abs(std::abs(psi(m, n)) - std::abs(psi(N - 1 - m, N - 1 - n))) <=
                  1e-12 * psi.cwiseAbs().maxCoeff());
}

TEST_CASE("split-step and Crank-Nicolson agree on a small lattice") {
    const Eigen::MatrixXd H = interface_hamiltonian(3, {0.5e5, 0.5e5}, 1.0e5, 3);
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(H.rows());
    in((H.rows() - 1) / 2) = 1.0;
    NonlinearSource src;
    src.gamma = 120.0;
    PropagationConfig cfg;
    cfg.length = 2e-4;
    cfg.snapshots = 9;
    const BiphotonTrajectory ss = propagate_biphoton(H, H, H, in, src, cfg);
    const BiphotonTrajectory cn = propagate_biphoton_cn(H, H, H, in, src, cfg);
    CHECK(max_rel_frobenius(ss, cn) < 2e-3);
    CHECK(ss.certificate <= cfg.global_tol);
}

TEST_CASE("Crank-Nicolson converges at second order in the step size") {
    const Eigen::MatrixXd H = interface_hamiltonian(3, {0.5e5, 0.5e5}, 1.0e5, 2);
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(H.rows());
    in((H.rows() - 1) / 2) = 1.0;
    NonlinearSource src;
    src.gamma = 120.0;
    PropagationConfig cfg;
    cfg.length = 1e-4;
    cfg.snapshots = 2;
    const BiphotonTrajectory ref = propagate_biphoton(H, H, H, in, src, cfg);

    auto cn_error = [&](int steps) {
        PropagationConfig c = cfg;
        c.cn_steps = steps;
        const BiphotonTrajectory cn = propagate_biphoton_cn(H, H, H, in, src, c);
        return (cn.snapshots.back().psi - ref.snapshots.back().psi).norm() /
               ref.snapshots.back().psi.norm();
    };
    const double e1 = cn_error(200);
    const double e2 = cn_error(400);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("frozen pump matches the evolving pump at z = 0 slope only") {
    const Eigen::MatrixXd H = interface_hamiltonian(3, {0.5e5, 0.5e5}, 1.0e5, 2);
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(H.rows());
    in((H.rows() - 1) / 2) = 1.0;
    NonlinearSource src;
    src.gamma = 120.0;
    PropagationConfig cfg;
    cfg.length = 3e-4;
    cfg.snapshots = 4;
    const BiphotonTrajectory evolving = propagate_biphoton(H, H, H, in, src, cfg);
    cfg.frozen_pump = true;
    const BiphotonTrajectory frozen = propagate_biphoton(H, H, H, in, src, cfg);
    // Different dynamics at finite z.
    CHECK((evolving.snapshots.back().psi - frozen.snapshots.back().psi).norm() >
          1e-3 * frozen.snapshots.back().psi.norm());
    // But both start from vacuum.
    CHECK(evolving.snapshots.front().psi.norm() == doctest::Approx(0.0));
    CHECK(frozen.snapshots.front().psi.norm() == doctest::Approx(0.0));
}

TEST_CASE("configuration validation") {
    PropagationConfig cfg;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // zero length
    cfg.length = 1e-4;
    cfg.snapshots = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // needs >= 2
    cfg.snapshots = 2;
    CHECK_NOTHROW(cfg.validate());

    NonlinearSource src;
    src.gamma = -1.0;
    CHECK_THROWS_AS(src.validate(), std::invalid_argument);
    src.gamma = 100.0;
    CHECK_NOTHROW(src.validate());

    CHECK(nonlinear_gamma(2.6e-20, 5e-13, 1.55e-6) ==
          doctest::Approx(2.0 * 3.14159265358979323846 * 2.6e-20 / (1.55e-6 * 5e-13)));
}
