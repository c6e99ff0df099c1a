#include "toplat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace toplat {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_orthonormal(const EigenSystem& sys, const char* name) {
    const Eigen::MatrixXd gram = sys.vectors.transpose() * sys.vectors;
    if ((gram - Eigen::MatrixXd::Identity(sys.size(), sys.size())).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument(std::string("mode_populations: ") + name +
                                    " basis is not orthonormal");
}

std::string mode_label(int rank) {
    std::string label;
    do {
        label.insert(label.begin(), static_cast<char>('A' + rank % 26));
        rank = rank / 26 - 1;
    } while (rank >= 0);
    return label;
}

int mirror_parity(const Eigen::VectorXd& v, const char* which) {
    const int n = static_cast<int>(v.size());
    double overlap = 0.0;
    for (int i = 0; i < n; ++i) overlap += v(i) * v(n - 1 - i);
    overlap /= v.squaredNorm();
    if (std::abs(overlap - 1.0) < 1e-8) return +1;
    if (std::abs(overlap + 1.0) < 1e-8) return -1;
    throw std::invalid_argument(std::string("parity_coupling: mode ") + which +
                                " has no definite parity");
}

}  // namespace

CorrelationMap correlation_map(const BiphotonState& state, int lo, int hi, bool normalize) {
    const int N = static_cast<int>(state.psi.rows());
    const int center = (N - 1) / 2;
    const int r0 = lo + center, r1 = hi + center;
    if (r0 < 0 || r1 >= N || r1 < r0)
        throw std::invalid_argument("correlation_map: window outside lattice");
    CorrelationMap map;
    map.first_site = lo;
    map.intensities = state.psi.block(r0, r0, r1 - r0 + 1, r1 - r0 + 1).cwiseAbs2();
    if (normalize) {
        const double peak = map.intensities.maxCoeff();
        if (peak > 0.0) map.intensities /= peak;
    }
    return map;
}

ModePopulationMatrix mode_populations(const BiphotonState& state, const EigenSystem& eig_s,
                                      const EigenSystem& eig_i, std::vector<int> subset,
                                      bool normalize) {
    check_orthonormal(eig_s, "signal");
    check_orthonormal(eig_i, "idler");
    if (subset.empty()) subset = eig_s.interface_modes();
    if (subset.empty())
        throw std::invalid_argument("mode_populations: empty mode subset");
    std::sort(subset.begin(), subset.end());

    ModePopulationMatrix out;
    out.mode_indices = subset;
    const int d = static_cast<int>(subset.size());
    out.populations.resize(d, d);
    for (int a = 0; a < d; ++a) {
        out.labels.push_back(mode_label(a));
        for (int b = 0; b < d; ++b) {
            const std::complex<double> amp = eig_s.vectors.col(subset[a]).cast<std::complex<double>>().dot(
                state.psi * eig_i.vectors.col(subset[b]));
            out.populations(a, b) = std::norm(amp);
        }
    }
    if (normalize) {
        const double total = out.populations.sum();
        if (total > 0.0) out.populations /= total;
        out.normalized = true;
    }
    return out;
}

double analytic_population(double C_mn, double dbeta_mn, double L, double drive) {
    const double x = dbeta_mn * L;
    if (std::abs(x) < 1e-6) {
        const double amp = drive * C_mn * L;
        return amp * amp;
    }
    const double amp = 2.0 * drive * C_mn / dbeta_mn * std::sin(0.5 * x);
    return amp * amp;
}

std::vector<MismatchPrediction> mismatch_predictions(
    const EigenSystem& eig_s, const EigenSystem& eig_i,
    const std::vector<std::pair<int, int>>& pairs) {
    std::vector<MismatchPrediction> out;
    out.reserve(pairs.size());
    const double scale = std::max(eig_s.values.cwiseAbs().maxCoeff(),
                                  eig_i.values.cwiseAbs().maxCoeff());
    for (const auto& [m, n] : pairs) {
        if (m < 0 || m >= eig_s.size() || n < 0 || n >= eig_i.size())
            throw std::invalid_argument("mismatch_predictions: invalid mode index");
        MismatchPrediction p;
        p.m = m;
        p.n = n;
        p.dbeta = eig_s.values(m) - eig_i.values(n);
        p.matched = std::abs(p.dbeta) < 1e-12 * std::max(scale, 1.0);
        if (p.matched) {
            p.L_zero = std::numeric_limits<double>::infinity();
            p.L_max = std::numeric_limits<double>::infinity();
        } else {
            p.L_zero = 2.0 * kPi / std::abs(p.dbeta);
            p.L_max = kPi / std::abs(p.dbeta);
        }
        out.push_back(p);
    }
    return out;
}

std::complex<double> parity_coupling(const Eigen::VectorXd& mode_alpha,
                                     const Eigen::VectorXd& mode_beta,
                                     const Eigen::VectorXcd& pump_squared) {
    if (mode_alpha.size() != mode_beta.size() || mode_alpha.size() != pump_squared.size())
        throw std::invalid_argument("parity_coupling: dimension mismatch");
    mirror_parity(mode_alpha, "alpha");
    mirror_parity(mode_beta, "beta");
    std::complex<double> eta = 0.0;
    for (int n = 0; n < mode_alpha.size(); ++n)
        eta += pump_squared(n) * mode_alpha(n) * mode_beta(n);
    return eta;
}

double schmidt_number(const Eigen::MatrixXcd& psi) {
    const double norm2 = psi.squaredNorm();
    if (!(norm2 > 0.0)) throw std::invalid_argument("schmidt_number: zero state");
    const Eigen::VectorXd sv =
        Eigen::JacobiSVD<Eigen::MatrixXcd>(psi).singularValues();
    const Eigen::VectorXd p = sv.array().square() / sv.array().square().sum();
    return 1.0 / p.array().square().sum();
}

double fidelity(const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& reference) {
    const double n1 = psi.squaredNorm(), n2 = reference.squaredNorm();
    if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::invalid_argument("fidelity: zero state");
    const std::complex<double> inner = (reference.conjugate().cwiseProduct(psi)).sum();
    return std::norm(inner) / (n1 * n2);
}

double intensity_similarity(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2) {
    if (p1.rows() != p2.rows() || p1.cols() != p2.cols())
        throw std::invalid_argument("intensity_similarity: shape mismatch");
    if (p1.minCoeff() < 0.0 || p2.minCoeff() < 0.0)
        throw std::invalid_argument("intensity_similarity: negative entries");
    const double s1 = p1.sum(), s2 = p2.sum();
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw std::invalid_argument("intensity_similarity: zero input");
    return ((p1 / s1).cwiseProduct(p2 / s2)).cwiseSqrt().sum();
}

CorrelationMap read_correlation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_correlation_csv: cannot open " + path);
    std::map<std::pair<int, int>, double> entries;
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        int s, i;
        double counts;
        if (!(ss >> s >> i >> counts)) continue;  // skips a header row
        if (counts < 0.0)
            throw std::runtime_error("read_correlation_csv: negative counts");
        entries[{s, i}] = counts;
        lo = std::min({lo, s, i});
        hi = std::max({hi, s, i});
    }
    if (entries.empty()) throw std::runtime_error("read_correlation_csv: no data rows");
    CorrelationMap map;
    map.first_site = lo;
    map.intensities = Eigen::MatrixXd::Zero(hi - lo + 1, hi - lo + 1);
    for (const auto& [key, counts] : entries)
        map.intensities(key.first - lo, key.second - lo) = counts;
    return map;
}

double schmidt_number_from_intensities(const Eigen::MatrixXd& intensities) {
    if (intensities.minCoeff() < 0.0)
        throw std::invalid_argument("schmidt_number_from_intensities: negative entries");
    return schmidt_number(intensities.cwiseSqrt().cast<std::complex<double>>());
}

}  // namespace toplat
