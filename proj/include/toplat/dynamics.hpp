#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "toplat/spectral.hpp"

// Propagation of the classical pump field and of the biphoton amplitude
// matrix along z, including the four-wave-mixing source term, with two
// independent integrators for cross-validation:
//  - split-step: linear part applied exactly in the eigenbasis (interaction
//    picture), source term integrated by composite Gauss-Legendre quadrature
//    with a step-halving convergence certificate;
//  - Crank-Nicolson: second-order finite differences on the vectorized
//    equation with a sparse LU factorization.
//
// Equation of motion (z-independent H_s, H_i; undepleted pump):
//   i dA/dz   = H_p A
//   i dpsi/dz = H_s psi - psi H_i + gamma*psi0*diag(A_p(z)^2)

namespace toplat {

struct NonlinearSource {
    double gamma = 0.0;   // waveguide nonlinearity, 1/(W m)
    double psi0 = 1.0;    // global biphoton generation efficiency (scale)
    // Optional provenance inputs for nonlinear_gamma:
    double n2 = 0.0;      // m^2/W
    double A_eff = 0.0;   // m^2
    double lambda0 = 0.0; // m

    void validate() const;
};

// gamma = omega0 * n2 / (c * A_eff) with omega0 = 2*pi*c/lambda0.
double nonlinear_gamma(double n2, double A_eff, double lambda0);

struct PumpField {
    Eigen::VectorXcd amplitudes;  // sqrt(W) per site
    double z = 0.0;
};

struct PumpTrajectory {
    std::vector<PumpField> snapshots;
};

// Exact pump evolution via the eigendecomposition of H_p. When `frozen` the
// amplitudes are held at their z=0 values (constant undepleted pump, used by
// the closed-form population oracle).
class PumpEvolution {
public:
    PumpEvolution(const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& input,
                  bool frozen = false);

    Eigen::VectorXcd amplitudes(double z) const;
    // Site-wise squared amplitudes A_n(z)^2 (complex: amplitude squared, not
    // modulus squared) entering the source term.
    Eigen::VectorXcd squared_amplitudes(double z) const;
    int size() const { return static_cast<int>(input_.size()); }

private:
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd beta_;
    Eigen::VectorXcd coeffs_;
    Eigen::VectorXcd input_;
    bool frozen_ = false;
};

struct PropagationConfig {
    double length = 0.0;        // L (m)
    int snapshots = 33;         // output sample count including z=0 and z=L
    double local_tol = 1e-8;    // quadrature convergence tolerance (relative)
    double global_tol = 1e-6;   // step-halving certificate target
    int cn_steps = 0;           // Crank-Nicolson steps; 0 = automatic
    bool frozen_pump = false;   // constant undepleted pump

    void validate() const;
};

PumpTrajectory propagate_pump(const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& input,
                              const PropagationConfig& cfg);

struct BiphotonState {
    Eigen::MatrixXcd psi;  // N x N two-photon amplitude (signal x idler)
    double z = 0.0;
};

struct BiphotonTrajectory {
    std::vector<BiphotonState> snapshots;
    int quadrature_panels = 0;   // split-step: final panel count per interval
    double certificate = 0.0;    // split-step: last halving defect; CN: unused
};

// Interaction-picture split-step integrator. psi(0) = 0 (vacuum start).
// Throws if the step-halving certificate cannot reach cfg.global_tol.
BiphotonTrajectory propagate_biphoton(const Eigen::MatrixXd& H_s, const Eigen::MatrixXd& H_i,
                                      const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& pump_in,
                                      const NonlinearSource& src, const PropagationConfig& cfg);

// Independent Crank-Nicolson integrator on the vectorized equation.
BiphotonTrajectory propagate_biphoton_cn(const Eigen::MatrixXd& H_s, const Eigen::MatrixXd& H_i,
                                         const Eigen::MatrixXd& H_p, const Eigen::VectorXcd& pump_in,
                                         const NonlinearSource& src, const PropagationConfig& cfg);

}  // namespace toplat
