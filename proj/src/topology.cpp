#include "toplat/topology.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "toplat/spectral.hpp"

namespace toplat {
namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

// Eigenvectors of H(k) with the phase fixed so component J-1 is real
// positive; columns ascending by eigenvalue. Throws on band degeneracy or a
// vanishing gauge-fix component.
Eigen::MatrixXcd gauge_fixed_vectors(const Eigen::MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
    const Eigen::VectorXd e = solver.eigenvalues();
    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    for (int i = 0; i + 1 < e.size(); ++i)
        if (e(i + 1) - e(i) < 1e-10 * scale)
            throw std::runtime_error("band_winding_wilson: band crossing on grid");
    Eigen::MatrixXcd V = solver.eigenvectors();
    const int last = static_cast<int>(V.rows()) - 1;
    for (int c = 0; c < V.cols(); ++c) {
        const cplx pivot = V(last, c);
        if (std::abs(pivot) < 1e-12)
            throw std::runtime_error("band_winding_wilson: gauge-fix component vanished");
        V.col(c) *= std::conj(pivot) / std::abs(pivot);
    }
    return V;
}

}  // namespace

ChiralBlock chiral_block(const UnitCellSpec& cell) {
    cell.validate();
    const auto& t = cell.intracell;
    const double tau = cell.intercell;
    switch (cell.J) {
        case 3: return {t[0] * t[0], tau * t[0]};
        case 4: return {t[0] * t[0], tau * t[1]};
        case 5: return {t[0] * t[0] * t[1], tau * t[1] * t[1]};
        case 6: return {t[0] * t[0] * t[2], tau * t[1] * t[1]};
        default:
            throw std::invalid_argument("chiral_block: J must be 3..6");
    }
}

int winding_circle(const UnitCellSpec& cell, bool* at_transition) {
    const ChiralBlock cb = chiral_block(cell);
    if (at_transition)
        *at_transition = std::abs(cb.R - std::abs(cb.C)) <
                         1e-12 * std::max(cb.R, std::abs(cb.C));
    return cb.R > std::abs(cb.C) ? 1 : 0;
}

int winding_integral(const UnitCellSpec& cell, int n_k) {
    const ChiralBlock cb = chiral_block(cell);
    const double scale = std::abs(cb.C) + cb.R;
    const bool even = cell.J % 2 == 0;
    const int nA = cell.J / 2;
    const double a = cell.lattice_constant;

    auto det_q = [&](double k) -> cplx {
        if (even) {
            // Sublattice block of the Bloch Hamiltonian: rows = even sites,
            // columns = odd sites of the unit cell.
            const Eigen::MatrixXcd H = bloch_hamiltonian(cell, k);
            Eigen::MatrixXcd q(nA, nA);
            for (int r = 0; r < nA; ++r)
                for (int c = 0; c < nA; ++c) q(r, c) = H(2 * r, 2 * c + 1);
            return q.determinant();
        }
        return cplx(cb.C, 0.0) - cb.R * std::exp(cplx(0.0, -k * a));
    };

    for (int n = std::max(n_k, 16); n <= (1 << 22); n *= 2) {
        double total = 0.0;
        bool ok = true;
        cplx first, prev;
        for (int i = 0; i < n && ok; ++i) {
            const double k = -kPi / a + 2.0 * kPi / a * i / n;
            // Conjugation fixes the orientation so that R > |C| gives +1.
            const cplx d = std::conj(det_q(k));
            if (std::abs(d) < 1e-12 * scale)
                throw std::runtime_error("winding_integral: gap closed (det q vanishes)");
            if (i == 0) {
                first = d;
            } else {
                const double step = std::arg(d / prev);
                if (std::abs(step) >= kPi / 2) ok = false;
                total += step;
            }
            prev = d;
        }
        if (ok) {
            total += std::arg(first / prev);
            return static_cast<int>(std::lround(total / (2.0 * kPi)));
        }
    }
    throw std::runtime_error("winding_integral: phase unwrapping did not converge");
}

std::vector<double> zak_trim(const UnitCellSpec& cell) {
    cell.validate();
    const int J = cell.J;
    const double a = cell.lattice_constant;
    std::vector<Eigen::VectorXd> parities;
    for (double k : {0.0, kPi / a}) {
        const Eigen::MatrixXd H = bloch_hamiltonian(cell, k).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
        const Eigen::VectorXd e = solver.eigenvalues();
        const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
        for (int i = 0; i + 1 < J; ++i)
            if (e(i + 1) - e(i) < 1e-10 * scale)
                throw std::runtime_error("zak_trim: degenerate TRIM eigenvalue");
        Eigen::VectorXd xi(J);
        for (int n = 0; n < J; ++n) {
            const Eigen::VectorXd v = solver.eigenvectors().col(n);
            double overlap = 0.0;
            for (int i = 0; i < J; ++i) overlap += v(i) * v(J - 1 - i);
            if (std::abs(std::abs(overlap) - 1.0) > 1e-6)
                throw std::runtime_error("zak_trim: state without definite parity");
            xi(n) = overlap > 0 ? 1.0 : -1.0;
        }
        parities.push_back(xi);
    }
    std::vector<double> zak(J);
    for (int n = 0; n < J; ++n)
        zak[n] = parities[0](n) * parities[1](n) > 0 ? 0.0 : kPi;
    return zak;
}

std::vector<int> band_winding_wilson(const UnitCellSpec& cell, int n_k) {
    cell.validate();
    const int J = cell.J;
    const double a = cell.lattice_constant;
    std::vector<int> result(J, 0);
    bool have_previous = false;
    for (int n = std::max(n_k, 32); n <= (1 << 18); n *= 2) {
        std::vector<double> total(J, 0.0);
        double max_step = 0.0;
        Eigen::MatrixXcd first, prev;
        for (int i = 0; i < n; ++i) {
            const double k = -kPi / a + 2.0 * kPi / a * i / n;
            const Eigen::MatrixXcd V = gauge_fixed_vectors(bloch_hamiltonian(cell, k));
            if (i == 0) {
                first = V;
            } else {
                for (int b = 0; b < J; ++b) {
                    const double step = -std::arg(prev.col(b).dot(V.col(b)));
                    max_step = std::max(max_step, std::abs(step));
                    total[b] += step;
                }
            }
            prev = V;
        }
        for (int b = 0; b < J; ++b) {
            const double step = -std::arg(prev.col(b).dot(first.col(b)));
            max_step = std::max(max_step, std::abs(step));
            total[b] += step;
        }
        std::vector<int> rounded(J);
        for (int b = 0; b < J; ++b) rounded[b] = static_cast<int>(std::lround(total[b] / kPi));
        if (max_step < kPi / 4 && have_previous && rounded == result) return rounded;
        have_previous = max_step < kPi / 4;
        result = rounded;
    }
    throw std::runtime_error("band_winding_wilson: grid refinement did not converge");
}

namespace {

PhaseDiagram phase_diagram_impl(int J, double t_min, double t_max, double tau_min,
                                double tau_max, int resolution, bool parallel) {
    if (t_min <= 0 || tau_min <= 0 || t_max < t_min || tau_max < tau_min ||
        resolution < 1)
        throw std::invalid_argument("phase_diagram: invalid ranges");
    PhaseDiagram pd;
    pd.t_values.resize(resolution);
    pd.tau_values.resize(resolution);
    for (int i = 0; i < resolution; ++i) {
        const double f = resolution == 1 ? 0.0 : static_cast<double>(i) / (resolution - 1);
        pd.t_values[i] = t_min + (t_max - t_min) * f;
        pd.tau_values[i] = tau_min + (tau_max - tau_min) * f;
    }
    const int total = resolution * resolution;
    pd.nu_total.resize(total);
    pd.at_transition.resize(total);
    pd.band_winding.resize(total);

    auto evaluate = [&](int idx) {
        const double t = pd.t_values[idx / resolution];
        const double tau = pd.tau_values[idx % resolution];
        UnitCellSpec cell;
        cell.J = J;
        cell.intracell.assign(J - 1, t);
        cell.intercell = tau;
        bool transition = false;
        pd.nu_total[idx] = winding_circle(cell, &transition);
        pd.at_transition[idx] = transition;
        if (!transition) {
            try {
                pd.band_winding[idx] = band_winding_wilson(cell, 64);
            } catch (const std::runtime_error&) {
                pd.at_transition[idx] = true;  // gap closure detected on the grid
            }
        }
    };

    if (parallel) {
#ifdef TOPLAT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int idx = 0; idx < total; ++idx) evaluate(idx);
    } else {
        for (int idx = 0; idx < total; ++idx) evaluate(idx);
    }
    return pd;
}

}  // namespace

PhaseDiagram phase_diagram(int J, double t_min, double t_max, double tau_min,
                           double tau_max, int resolution) {
    return phase_diagram_impl(J, t_min, t_max, tau_min, tau_max, resolution, true);
}

PhaseDiagram phase_diagram_serial(int J, double t_min, double t_max, double tau_min,
                                  double tau_max, int resolution) {
    return phase_diagram_impl(J, t_min, t_max, tau_min, tau_max, resolution, false);
}

}  // namespace toplat
