#include "toplat/dynamics.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace toplat {
namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

Eigen::VectorXcd phase_vector(const Eigen::VectorXd& beta, double z) {
    Eigen::VectorXcd out(beta.size());
    for (int i = 0; i < beta.size(); ++i)
        out(i) = std::polar(1.0, -beta(i) * z);
    return out;
}

}  // namespace

void NonlinearSource::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("NonlinearSource: gamma must be > 0");
    if (!(psi0 > 0.0)) throw std::invalid_argument("NonlinearSource: psi0 must be > 0");
}

void PropagationConfig::validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("PropagationConfig: length must be > 0");
    if (snapshots < 2) throw std::invalid_argument("PropagationConfig: need >= 2 snapshots");
    if (!(local_tol > 0.0) || !(global_tol > 0.0))
        throw std::invalid_argument("PropagationConfig: tolerances must be > 0");
}

double nonlinear_gamma(double n2, double A_eff, double lambda0) {
    if (!(n2 > 0.0) || !(A_eff > 0.0) || !(lambda0 > 0.0))
        throw std::invalid_argument("nonlinear_gamma: inputs must be positive");
    return 2.0 * kPi * n2 / (lambda0 * A_eff);
}

PumpEvolution::PumpEvolution(const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& input,
                             bool frozen)
    : input_(input), frozen_(frozen) {
    if (H_p.rows() != input.size())
        throw std::invalid_argument("PumpEvolution: dimension mismatch");
    const EigenSystem sys = eigensystem(H_p);
    vectors_ = sys.vectors;
    beta_ = sys.values;
    coeffs_ = vectors_.transpose() * input;
}

Eigen::VectorXcd PumpEvolution::amplitudes(double z) const {
    if (frozen_) return input_;
    return vectors_ * phase_vector(beta_, z).cwiseProduct(coeffs_);
}

Eigen::VectorXcd PumpEvolution::squared_amplitudes(double z) const {
    const Eigen::VectorXcd a = amplitudes(z);
    return a.cwiseProduct(a);
}

PumpTrajectory propagate_pump(const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& input,
                              const PropagationConfig& cfg) {
    cfg.validate();
    const PumpEvolution evo(H_p, input, cfg.frozen_pump);
    PumpTrajectory traj;
    traj.snapshots.resize(cfg.snapshots);
    for (int i = 0; i < cfg.snapshots; ++i) {
        const double z = cfg.length * i / (cfg.snapshots - 1);
        traj.snapshots[i] = {evo.amplitudes(z), z};
    }
    return traj;
}

namespace {

// Shared setup for both integrators.
struct BiphotonProblem {
    int N = 0;
    PumpEvolution pump;
    double drive = 0.0;  // gamma * psi0

    BiphotonProblem(const Eigen::MatrixXd& H_s, const Eigen::MatrixXd& H_i,
                    const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& pump_in,
                    const NonlinearSource& src, const PropagationConfig& cfg)
        : pump(H_p, pump_in, cfg.frozen_pump) {
        src.validate();
        cfg.validate();
        if (H_s.rows() != H_i.rows() || H_s.rows() != H_p.rows() ||
            H_s.rows() != pump_in.size())
            throw std::invalid_argument("propagate_biphoton: dimension mismatch");
        N = static_cast<int>(H_s.rows());
        drive = src.gamma * src.psi0;
    }
};

}  // namespace

BiphotonTrajectory propagate_biphoton(const Eigen::MatrixXd& H_s, const Eigen::MatrixXd& H_i,
                                      const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& pump_in,
                                      const NonlinearSource& src, const PropagationConfig& cfg) {
    const BiphotonProblem prob(H_s, H_i, H_p, pump_in, src, cfg);
    const int N = prob.N;
    const EigenSystem sys_s = eigensystem(H_s);
    const EigenSystem sys_i = eigensystem(H_i);
    const Eigen::MatrixXd& Vs = sys_s.vectors;
    const Eigen::MatrixXd& Vi = sys_i.vectors;

    // Mode-pair mismatch Delta_mn = beta_s(m) - beta_i(n).
    Eigen::MatrixXd delta(N, N);
    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) delta(m, n) = sys_s.values(m) - sys_i.values(n);

    // Interaction-picture source at position s, already phase-rotated:
    // F(s)_mn = exp(i Delta_mn s) * [Vs^T diag(drive*A^2(s)) Vi]_mn.
    auto integrand = [&](double s) -> Eigen::MatrixXcd {
        const Eigen::VectorXcd a2 = prob.pump.squared_amplitudes(s) * prob.drive;
        Eigen::MatrixXcd F = Vs.transpose() * a2.asDiagonal() * Vi;
        for (int m = 0; m < N; ++m)
            for (int n = 0; n < N; ++n)
                F(m, n) *= std::polar(1.0, delta(m, n) * s);
        return F;
    };

    // Composite 5-point Gauss-Legendre over [z0, z1] with `panels` panels
    // (degree-9 exactness keeps the panel count modest for the oscillatory
    // interaction-picture integrand).
    const double n1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double n2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double w0 = 128.0 / 225.0;
    const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    const double nodes[5] = {-n2, -n1, 0.0, n1, n2};
    const double weights[5] = {w2, w1, w0, w1, w2};
    auto integrate = [&](double z0, double z1, int panels) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N, N);
        const double h = (z1 - z0) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = z0 + (p + 0.5) * h;
            for (int q = 0; q < 5; ++q)
                acc += weights[q] * integrand(mid + 0.5 * nodes[q] * h);
        }
        return acc * (0.5 * h);
    };

    // Cumulative integrals G(z_j) = int_0^{z_j} F(s) ds for a given panel
    // count per snapshot interval.
    const int n_int = cfg.snapshots - 1;
    auto cumulative = [&](int panels) {
        std::vector<Eigen::MatrixXcd> G(cfg.snapshots);
        G[0] = Eigen::MatrixXcd::Zero(N, N);
        for (int j = 0; j < n_int; ++j) {
            const double z0 = cfg.length * j / n_int;
            const double z1 = cfg.length * (j + 1) / n_int;
            G[j + 1] = G[j] + integrate(z0, z1, panels);
        }
        return G;
    };

    // Initial resolution: about one panel per radian of the fastest phase.
    const double omega = delta.cwiseAbs().maxCoeff() +
                         2.0 * std::max(sys_s.values.cwiseAbs().maxCoeff(),
                                        sys_i.values.cwiseAbs().maxCoeff());
    int panels = std::max<int>(
        4, static_cast<int>(std::ceil(omega * cfg.length / (2.0 * kPi) / n_int)));
    std::vector<Eigen::MatrixXcd> G = cumulative(panels);
    double defect = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 24; ++iter) {
        const std::vector<Eigen::MatrixXcd> G2 = cumulative(2 * panels);
        defect = 0.0;
        for (int j = 1; j < cfg.snapshots; ++j) {
            const double scale = std::max(G2[j].norm(), 1e-300);
            defect = std::max(defect, (G2[j] - G[j]).norm() / scale);
        }
        G = G2;
        panels *= 2;
        if (defect <= cfg.local_tol) { converged = true; break; }
    }
    if (!converged && defect > cfg.global_tol)
        throw std::runtime_error(
            "propagate_biphoton: step-halving certificate failed (defect " +
            std::to_string(defect) + " at " + std::to_string(panels) + " panels)");

    BiphotonTrajectory traj;
    traj.quadrature_panels = panels;
    traj.certificate = defect;
    traj.snapshots.resize(cfg.snapshots);
    for (int j = 0; j < cfg.snapshots; ++j) {
        const double z = cfg.length * j / n_int;
        Eigen::MatrixXcd phi(N, N);
        for (int m = 0; m < N; ++m)
            for (int n = 0; n < N; ++n)
                phi(m, n) = cplx(0.0, -1.0) * std::polar(1.0, -delta(m, n) * z) * G[j](m, n);
        traj.snapshots[j] = {Vs * phi * Vi.transpose(), z};
    }
    return traj;
}

BiphotonTrajectory propagate_biphoton_cn(const Eigen::MatrixXd& H_s, const Eigen::MatrixXd& H_i,
                                         const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& pump_in,
                                         const NonlinearSource& src, const PropagationConfig& cfg) {
    const BiphotonProblem prob(H_s, H_i, H_p, pump_in, src, cfg);
    const int N = prob.N;
    const int dim = N * N;

    // Column-major vectorization: vec(H_s psi - psi H_i) =
    // (I (x) H_s - H_i (x) I) vec(psi), using H_i = H_i^T.
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(6 * dim));
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m) {
            const int row = m + n * N;
            for (int mm = 0; mm < N; ++mm)
                if (H_s(m, mm) != 0.0) trip.emplace_back(row, mm + n * N, cplx(H_s(m, mm), 0.0));
            for (int nn = 0; nn < N; ++nn)
                if (H_i(nn, n) != 0.0) trip.emplace_back(row, m + nn * N, cplx(-H_i(nn, n), 0.0));
        }
    Eigen::SparseMatrix<cplx> M(dim, dim);
    M.setFromTriplets(trip.begin(), trip.end());

    const double beta_scale = H_s.cwiseAbs().rowwise().sum().maxCoeff() +
                              H_i.cwiseAbs().rowwise().sum().maxCoeff();
    int steps = cfg.cn_steps > 0
                    ? cfg.cn_steps
                    : std::max(2400, static_cast<int>(std::ceil(24.0 * beta_scale * cfg.length)));
    const int n_int = cfg.snapshots - 1;
    const int per_interval = (steps + n_int - 1) / n_int;
    steps = per_interval * n_int;
    const double dz = cfg.length / steps;

    Eigen::SparseMatrix<cplx> lhs(dim, dim), rhs(dim, dim);
    {
        Eigen::SparseMatrix<cplx> id(dim, dim);
        id.setIdentity();
        lhs = id + cplx(0.0, 0.5 * dz) * M;
        rhs = id - cplx(0.0, 0.5 * dz) * M;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> solver;
    solver.compute(lhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("propagate_biphoton_cn: sparse LU factorization failed");

    BiphotonTrajectory traj;
    traj.snapshots.resize(cfg.snapshots);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    traj.snapshots[0] = {Eigen::MatrixXcd::Zero(N, N), 0.0};
    for (int j = 0; j < n_int; ++j) {
        const double z0 = cfg.length * j / n_int;
        for (int s = 0; s < per_interval; ++s) {
            const double z_mid = z0 + (s + 0.5) * dz;
            Eigen::VectorXcd b = rhs * v;
            const Eigen::VectorXcd a2 =
                prob.pump.squared_amplitudes(z_mid) * prob.drive;
            for (int n = 0; n < N; ++n)
                b(n + n * N) -= cplx(0.0, dz) * a2(n);
            v = solver.solve(b);
            if (solver.info() != Eigen::Success)
                throw std::runtime_error("propagate_biphoton_cn: linear solve failed");
        }
        BiphotonState st;
        st.z = cfg.length * (j + 1) / n_int;
        st.psi = Eigen::Map<const Eigen::MatrixXcd>(v.data(), N, N);
        traj.snapshots[j + 1] = st;
    }
    return traj;
}

}  // namespace toplat
