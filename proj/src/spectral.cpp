#include "toplat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace toplat {
namespace {

constexpr double kPi = 3.14159265358979323846;

void fix_vector_signs(Eigen::MatrixXd& V) {
    for (int c = 0; c < V.cols(); ++c) {
        for (int r = 0; r < V.rows(); ++r) {
            if (std::abs(V(r, c)) > 1e-9) {
                if (V(r, c) < 0.0) V.col(c) = -V.col(c);
                break;
            }
        }
    }
}

int classify_parity(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    double overlap = 0.0;
    for (int i = 0; i < n; ++i) overlap += v(i) * v(n - 1 - i);
    if (std::abs(overlap - 1.0) < 1e-8) return +1;
    if (std::abs(overlap + 1.0) < 1e-8) return -1;
    return 0;
}

// Golden-section minimization of f over [lo, hi] to the given x tolerance.
template <typename F>
double golden_min(F f, double lo, double hi, double xtol) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

DecayLength make_xi(const std::string& label, double kappa) {
    DecayLength d;
    d.label = label;
    if (!std::isfinite(kappa) || std::abs(kappa) < 1e-12) {
        d.infinite = true;
        d.xi = std::numeric_limits<double>::infinity();
    } else {
        d.xi = 1.0 / std::abs(kappa);
    }
    return d;
}

// arcosh decay rate; arguments <= 1 mean the formula's momentum is not
// evanescent there (closure or out of validity) -> infinite flag.
DecayLength make_xi_arcosh(const std::string& label, double arg) {
    if (arg <= 1.0) {
        DecayLength d;
        d.label = label;
        d.infinite = true;
        d.xi = std::numeric_limits<double>::infinity();
        return d;
    }
    return make_xi(label, std::acosh(arg));
}

}  // namespace

std::vector<int> EigenSystem::interface_modes() const {
    std::vector<int> idx;
    for (int i = 0; i < size(); ++i)
        if (mode_tags[i].interface_mode) idx.push_back(i);
    return idx;
}

EigenSystem eigensystem(const Eigen::MatrixXd& H) {
    if (H.rows() != H.cols()) throw std::invalid_argument("eigensystem: non-square input");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("eigensystem: non-symmetric input");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensystem: eigensolver failed to converge");

    EigenSystem sys;
    sys.values = solver.eigenvalues();
    sys.vectors = solver.eigenvectors();
    fix_vector_signs(sys.vectors);
    sys.mode_tags.resize(sys.size());
    for (int i = 0; i < sys.size(); ++i) {
        const Eigen::VectorXd v = sys.vectors.col(i);
        sys.mode_tags[i].ipr = v.array().square().square().sum();
        sys.mode_tags[i].parity = classify_parity(v);
    }
    return sys;
}

void tag_interface_modes(EigenSystem& sys, const UnitCellSpec& cell) {
    const BandStructure bs = band_structure(cell, 1024);
    const int J = cell.J;
    // Internal band gaps of the infinite lattice: (max of band j, min of band j+1).
    std::vector<std::pair<double, double>> gaps;
    for (int j = 0; j + 1 < J; ++j) {
        const double hi = bs.bands.col(j).maxCoeff();
        const double lo = bs.bands.col(j + 1).minCoeff();
        if (lo > hi) gaps.emplace_back(hi, lo);
    }
    const int N = sys.size();
    const double ipr_threshold = 4.0 / N;
    for (int i = 0; i < N; ++i) {
        const double e = sys.values(i);
        bool in_gap = false;
        for (const auto& g : gaps)
            if (e > g.first + 1e-12 && e < g.second - 1e-12) { in_gap = true; break; }
        bool central_peak = false;
        if (in_gap) {
            int peak = 0;
            sys.vectors.col(i).cwiseAbs().maxCoeff(&peak);
            central_peak = std::abs(peak - (N - 1) / 2) <= N / 4;
        }
        sys.mode_tags[i].interface_mode =
            in_gap && sys.mode_tags[i].ipr > ipr_threshold && central_peak;
    }
}

EigenSystem eigensystem(const Eigen::MatrixXd& H, const UnitCellSpec& cell) {
    EigenSystem sys = eigensystem(H);
    tag_interface_modes(sys, cell);
    return sys;
}

Eigen::MatrixXcd bloch_hamiltonian(const UnitCellSpec& cell, double k) {
    cell.validate();
    const double a = cell.lattice_constant;
    if (std::abs(k) > kPi / a * (1.0 + 1e-12))
        throw std::invalid_argument("bloch_hamiltonian: |k| must be <= pi/a");
    const int J = cell.J;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(J, J);
    for (int j = 0; j < J - 1; ++j) {
        H(j, j + 1) = cell.intracell[j];
        H(j + 1, j) = cell.intracell[j];
    }
    const std::complex<double> phase(std::cos(k * a), -std::sin(k * a));
    H(0, J - 1) += cell.intercell * phase;
    H(J - 1, 0) += cell.intercell * std::conj(phase);
    return H;
}

BandStructure band_structure(const UnitCellSpec& cell, int n_k) {
    if (n_k < 16) throw std::invalid_argument("band_structure: n_k must be >= 16");
    const double a = cell.lattice_constant;
    BandStructure bs;
    bs.k_grid.resize(n_k);
    bs.bands.resize(n_k, cell.J);
    for (int i = 0; i < n_k; ++i) {
        const double k = -kPi / a + 2.0 * kPi / a * i / (n_k - 1);
        bs.k_grid[i] = k;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(bloch_hamiltonian(cell, k));
        bs.bands.row(i) = solver.eigenvalues().transpose();
    }
    return bs;
}

std::vector<double> numeric_gaps(const UnitCellSpec& cell, int n_k) {
    cell.validate();
    const int J = cell.J;
    const double a = cell.lattice_constant;
    auto band_sep = [&](int gap, double k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(bloch_hamiltonian(cell, k));
        return solver.eigenvalues()(gap + 1) - solver.eigenvalues()(gap);
    };
    // Bands are even in k for inversion-symmetric cells; scan [0, pi/a].
    std::vector<double> gaps(J - 1);
    for (int g = 0; g < J - 1; ++g) {
        double best = std::numeric_limits<double>::infinity();
        int best_i = 0;
        std::vector<double> vals(n_k);
        for (int i = 0; i < n_k; ++i) {
            const double k = kPi / a * i / (n_k - 1);
            vals[i] = band_sep(g, k);
            if (vals[i] < best) { best = vals[i]; best_i = i; }
        }
        const double dk = kPi / a / (n_k - 1);
        const double lo = std::max(0.0, best_i * dk - dk);
        const double hi = std::min(kPi / a, best_i * dk + dk);
        gaps[g] = golden_min([&](double k) { return band_sep(g, k); }, lo, hi,
                             1e-12 * kPi / a);
    }
    return gaps;
}

Eigen::Vector3d cardano_j6_energies(const UnitCellSpec& cell, double k) {
    if (cell.J != 6) throw std::invalid_argument("cardano_j6_energies: J must be 6");
    const double t1 = cell.intracell[0], t2 = cell.intracell[1], t3 = cell.intracell[2];
    const double tau = cell.intercell;
    const double ka = k * cell.lattice_constant;
    const double p = -(2.0 * (t1 * t1 + t2 * t2) + t3 * t3 + tau * tau);
    const double q = std::pow(t1, 4) + 2.0 * t1 * t1 * t2 * t2 + std::pow(t2, 4) +
                     2.0 * t1 * t1 * t3 * t3 + t3 * t3 * tau * tau +
                     2.0 * t2 * t2 * tau * tau;
    const double r = -(std::pow(t1, 4) * t3 * t3 + std::pow(t2, 4) * tau * tau +
                       2.0 * t1 * t1 * t2 * t2 * t3 * tau * std::cos(ka));
    const double Q = (3.0 * q - p * p) / 9.0;
    const double R = (9.0 * p * q - 27.0 * r - 2.0 * p * p * p) / 54.0;
    const double disc = -Q * Q * Q;
    const double theta = std::acos(std::clamp(R / std::sqrt(std::max(disc, 1e-300)), -1.0, 1.0));
    Eigen::Vector3d lambda;
    for (int j = 0; j < 3; ++j)
        lambda(j) = -p / 3.0 + 2.0 * std::sqrt(-Q) * std::cos((theta + 2.0 * kPi * j) / 3.0);
    std::sort(lambda.data(), lambda.data() + 3);
    for (int j = 0; j < 3; ++j) lambda(j) = std::sqrt(std::max(lambda(j), 0.0));
    return lambda;  // ascending positive band energies E0 <= E1 <= E2
}

std::vector<DecayLength> decay_lengths(const UnitCellSpec& cell) {
    cell.validate();
    const double tau = cell.intercell;
    std::vector<DecayLength> out;
    switch (cell.J) {
        case 3: {
            const double t = cell.intracell[0];
            out.push_back(make_xi("xi", std::log(tau / t)));
            break;
        }
        case 4: {
            const double t1 = cell.intracell[0], t2 = cell.intracell[1];
            out.push_back(make_xi("xi_0", std::log(t1 * t1 / (tau * t2))));
            out.push_back(make_xi("xi_1", std::log(t2 / tau)));
            break;
        }
        case 5: {
            const double t1 = cell.intracell[0], t2 = cell.intracell[1];
            const double tau1 = t1 * t2 / std::hypot(t1, t2);
            const double tau2 = std::hypot(t1, t2);
            out.push_back(make_xi_arcosh("xi_1", tau / tau1));
            out.push_back(make_xi_arcosh("xi_2", tau2 / tau));
            break;
        }
        case 6: {
            const double t1 = cell.intracell[0], t2 = cell.intracell[1],
                         t3 = cell.intracell[2];
            out.push_back(make_xi("xi_C", std::log(t1 * t1 * t3 / (t2 * t2 * tau))));
            out.push_back(make_xi_arcosh(
                "xi_pm", (tau * tau + t3 * t3 - t1 * t1) / (2.0 * t2 * t3)));
            break;
        }
        default:
            throw std::invalid_argument("decay_lengths: J must be 3..6");
    }
    return out;
}

GapReport closed_form_report(const UnitCellSpec& cell) {
    cell.validate();
    if (cell.J < 3 || cell.J > 6)
        throw std::invalid_argument("closed_form_report: J must be 3..6");
    GapReport rep;
    rep.J = cell.J;
    const std::vector<double> numeric = numeric_gaps(cell);
    rep.gaps.resize(cell.J - 1);
    for (int g = 0; g < cell.J - 1; ++g) {
        rep.gaps[g].numeric = numeric[g];
        rep.gaps[g].closed = numeric[g] < 1e-9;
    }
    const double tau = cell.intercell;
    switch (cell.J) {
        case 3: {
            const double t = cell.intracell[0];
            const double size =
                std::abs(3.0 * tau - std::sqrt(8.0 * t * t + tau * tau)) / 2.0;
            for (int g : {0, 1}) {
                rep.gaps[g].has_closed_form = true;
                rep.gaps[g].closed_form = size;
            }
            rep.critical.push_back({"tau=t", t});
            break;
        }
        case 4: {
            const double t1 = cell.intracell[0], t2 = cell.intracell[1];
            const double T = std::sqrt(4.0 * t1 * t1 + (t2 - tau) * (t2 - tau));
            const double outer = std::abs(t2 - tau);
            const double central = std::abs(t2 + tau - T);
            rep.gaps[0] = {numeric[0], outer, true, rep.gaps[0].closed};
            rep.gaps[1] = {numeric[1], central, true, rep.gaps[1].closed};
            rep.gaps[2] = {numeric[2], outer, true, rep.gaps[2].closed};
            rep.critical.push_back({"tau=t2", t2});
            rep.critical.push_back({"tau=t1^2/t2", t1 * t1 / t2});
            break;
        }
        case 5: {
            const double t1 = cell.intracell[0], t2 = cell.intracell[1];
            rep.critical.push_back({"tau_1", t1 * t2 / std::hypot(t1, t2)});
            rep.critical.push_back({"tau_2", std::hypot(t1, t2)});
            // The closure formulas are stated as valid for t1/t2 = 4/3.
            rep.conditional = std::abs(t1 / t2 - 4.0 / 3.0) > 1e-12;
            break;
        }
        case 6: {
            const double t1 = cell.intracell[0], t2 = cell.intracell[1],
                         t3 = cell.intracell[2];
            rep.critical.push_back({"tau_C", t1 * t1 * t3 / (t2 * t2)});
            // Outermost-gap closure: t3*tau^2 + (t1^2 - t3^2)*tau - t2^2*t3 = 0.
            // The minus root is always negative, hence unphysical.
            const double d = t1 * t1 - t3 * t3;
            rep.critical.push_back(
                {"tau_+", (-d + std::sqrt(d * d + 4.0 * t2 * t2 * t3 * t3)) / (2.0 * t3)});
            // All five gap sizes via the Cardano eigenvalues of M6(k), each
            // minimized over the Brillouin zone.
            auto min_delta = [&](auto delta) {
                const int n = 512;
                double best = std::numeric_limits<double>::infinity();
                int best_i = 0;
                for (int i = 0; i < n; ++i) {
                    const double k = kPi / cell.lattice_constant * i / (n - 1);
                    const double v = delta(cardano_j6_energies(cell, k));
                    if (v < best) { best = v; best_i = i; }
                }
                const double dk = kPi / cell.lattice_constant / (n - 1);
                return golden_min(
                    [&](double k) { return delta(cardano_j6_energies(cell, k)); },
                    std::max(0.0, best_i * dk - dk),
                    std::min(kPi / cell.lattice_constant, best_i * dk + dk),
                    1e-12 * kPi);
            };
            const double central = min_delta([](const Eigen::Vector3d& e) { return 2.0 * e(0); });
            const double mid = min_delta([](const Eigen::Vector3d& e) { return e(1) - e(0); });
            const double outer = min_delta([](const Eigen::Vector3d& e) { return e(2) - e(1); });
            rep.gaps[0] = {numeric[0], outer, true, rep.gaps[0].closed};
            rep.gaps[1] = {numeric[1], mid, true, rep.gaps[1].closed};
            rep.gaps[2] = {numeric[2], central, true, rep.gaps[2].closed};
            rep.gaps[3] = {numeric[3], mid, true, rep.gaps[3].closed};
            rep.gaps[4] = {numeric[4], outer, true, rep.gaps[4].closed};
            break;
        }
        default:
            break;
    }
    rep.decay = decay_lengths(cell);
    return rep;
}

double fit_decay_length(const Eigen::VectorXd& mode, int first, int last) {
    if (first < 0 || last >= mode.size() || last - first < 2)
        throw std::invalid_argument("fit_decay_length: need at least 3 sites in range");
    // Least squares on log|v_n| = c - n/xi over sites with non-negligible
    // amplitude (avoid the opposite-sublattice zeros of chiral modes).
    const double peak = mode.segment(first, last - first + 1).cwiseAbs().maxCoeff();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = first; i <= last; ++i) {
        const double v = std::abs(mode(i));
        if (v < 1e-13 * peak || v < 1e-300) continue;
        const double x = i, y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 3) throw std::invalid_argument("fit_decay_length: too few usable sites");
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return 1.0 / std::abs(slope);
}

}  // namespace toplat
