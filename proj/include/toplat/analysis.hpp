#pragma once
#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "toplat/dynamics.hpp"
#include "toplat/spectral.hpp"

// Entanglement and mode-structure analysis: correlation maps, eigenmode
// populations (numeric and closed-form), phase-mismatch predictions, parity
// selection, Schmidt number, fidelity, and output-power similarity.

namespace toplat {

struct CorrelationMap {
    Eigen::MatrixXd intensities;  // |psi_nm|^2 over the window, non-negative
    int first_site = 0;           // site index (centered at 0) of row/col 0
};

// Elementwise |psi|^2 cropped to sites [lo, hi] (centered indexing: the
// interface waveguide is 0). normalize scales the peak to 1.
CorrelationMap correlation_map(const BiphotonState& state, int lo, int hi,
                               bool normalize = false);

struct ModePopulationMatrix {
    Eigen::MatrixXd populations;      // B_mn over the selected mode subset
    std::vector<int> mode_indices;    // eigenmode indices, ascending
    std::vector<std::string> labels;  // "A", "B", ... by ascending eigenvalue
    bool normalized = false;
};

// B_mn = |<v_s(m)| psi |v_i(n)>|^2. Empty subset selects the interface-tagged
// modes of eig_s. Throws if either basis is not orthonormal.
ModePopulationMatrix mode_populations(const BiphotonState& state, const EigenSystem& eig_s,
                                      const EigenSystem& eig_i,
                                      std::vector<int> subset = {},
                                      bool normalize = false);

// Closed-form population for a constant undepleted pump:
// B_mn(L) = |2*drive*C_mn/dbeta * sin(dbeta*L/2)|^2, with the analytic
// dbeta -> 0 limit (drive*C_mn*L)^2 below |dbeta*L| < 1e-6.
double analytic_population(double C_mn, double dbeta_mn, double L, double drive);

struct MismatchPrediction {
    int m = 0, n = 0;
    double dbeta = 0.0;   // beta_s(m) - beta_i(n)
    double L_zero = 0.0;  // 2*pi/|dbeta|; infinite flag below
    double L_max = 0.0;   // pi/|dbeta|
    bool matched = false; // dbeta == 0 within tolerance -> L_zero/L_max infinite
};

std::vector<MismatchPrediction> mismatch_predictions(
    const EigenSystem& eig_s, const EigenSystem& eig_i,
    const std::vector<std::pair<int, int>>& pairs);

// Pump-mediated coupling of an eigenmode pair:
// eta = sum_n A2_p(n) * f_alpha(n) * f_beta(n). Both modes must have definite
// parity (mirror overlap within 1e-8 of +-1); throws naming the offender.
std::complex<double> parity_coupling(const Eigen::VectorXd& mode_alpha,
                                     const Eigen::VectorXd& mode_beta,
                                     const Eigen::VectorXcd& pump_squared);

// Schmidt number K = 1/sum p_i^2 with p_i the normalized squared singular
// values of psi. Throws on a zero state.
double schmidt_number(const Eigen::MatrixXcd& psi);

// F = |<psi_ref, psi>|^2 / (||psi_ref||^2 * ||psi||^2), Frobenius inner
// product. Throws if either state is zero.
double fidelity(const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& reference);

// Bhattacharyya coefficient of unit-sum-normalized non-negative inputs.
double intensity_similarity(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2);

// Measured-map ingestion: CSV rows "site_s,site_i,counts" (header optional).
CorrelationMap read_correlation_csv(const std::string& path);

// Schmidt-number estimate from an intensity-only map: elementwise square
// roots with zero phases. Approximate; only for measured maps.
double schmidt_number_from_intensities(const Eigen::MatrixXd& intensities);

}  // namespace toplat
