#include "toplat/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "toplat/rng.hpp"

namespace toplat {

void UnitCellSpec::validate() const {
    if (J < 3) throw std::invalid_argument("UnitCellSpec: J must be >= 3");
    if (static_cast<int>(intracell.size()) != J - 1)
        throw std::invalid_argument("UnitCellSpec: need J-1 intracell couplings");
    for (double t : intracell)
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("UnitCellSpec: couplings must be positive and finite");
    if (!(intercell > 0.0) || !std::isfinite(intercell))
        throw std::invalid_argument("UnitCellSpec: intercell coupling must be positive and finite");
    if (!(lattice_constant > 0.0))
        throw std::invalid_argument("UnitCellSpec: lattice constant must be positive");
    for (int j = 0; j < J - 1; ++j) {
        const double a = intracell[j], b = intracell[J - 2 - j];
        if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)))
            throw std::invalid_argument(
                "UnitCellSpec: inversion symmetry t_j = t_{J-j} is required");
    }
}

void PhysicalGeometry::validate() const {
    if (gaps_nm.size() < 3) throw std::invalid_argument("PhysicalGeometry: need J gaps (J >= 3)");
    for (double g : gaps_nm)
        if (!(g >= 70.0))
            throw std::invalid_argument("PhysicalGeometry: gaps below the 70 nm fabrication minimum");
    if (!(width_nm > 0.0) || !(height_nm > 0.0) || !(wavelength_nm > 0.0))
        throw std::invalid_argument("PhysicalGeometry: dimensions must be positive");
    const int J = static_cast<int>(gaps_nm.size());
    for (int j = 0; j < J - 1; ++j) {
        const double a = gaps_nm[j], b = gaps_nm[J - 2 - j];
        if (std::abs(a - b) > 1e-9 * std::max(a, b))
            throw std::invalid_argument("PhysicalGeometry: intracell gap list must be symmetric");
    }
}

void CouplingMap::validate() const {
    if (!(kappa0 > 0.0) || !(g0_nm > 0.0))
        throw std::invalid_argument("CouplingMap: kappa0 and g0 must be positive");
}

double CouplingMap::coupling(double gap_nm) const {
    return kappa0 * std::exp(-gap_nm / g0_nm);
}

void InterfaceLatticeSpec::validate() const {
    cell.validate();
    if (half_cells < 1) throw std::invalid_argument("InterfaceLatticeSpec: half_cells must be >= 1");
    if (interface_offset < 0 || interface_offset >= cell.J)
        throw std::invalid_argument("InterfaceLatticeSpec: interface_offset must be in 0..J-1");
}

bool CouplingSequence::mirror_symmetric(double rel_tol) const {
    const int n = static_cast<int>(values.size());
    for (int i = 0; i < n; ++i) {
        const double a = values[i], b = values[n - 1 - i];
        if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
    }
    return true;
}

UnitCellSpec couplings_from_gaps(const PhysicalGeometry& geom, const CouplingMap& map,
                                 double lattice_constant) {
    geom.validate();
    map.validate();
    UnitCellSpec cell;
    cell.J = static_cast<int>(geom.gaps_nm.size());
    cell.intracell.resize(cell.J - 1);
    for (int j = 0; j < cell.J - 1; ++j) cell.intracell[j] = map.coupling(geom.gaps_nm[j]);
    // Enforce exact symmetry of the output even if the input gaps carry
    // rounding noise within the geometry tolerance.
    for (int j = 0; j < (cell.J - 1) / 2; ++j)
        cell.intracell[cell.J - 2 - j] = cell.intracell[j];
    cell.intercell = map.coupling(geom.gaps_nm.back());
    cell.lattice_constant = lattice_constant;
    cell.validate();
    return cell;
}

CouplingSequence build_interface_sequence(const InterfaceLatticeSpec& spec) {
    spec.validate();
    const int J = spec.cell.J;
    std::vector<double> cycle(spec.cell.intracell);
    cycle.push_back(spec.cell.intercell);

    const int half = spec.half_cells * J;
    std::vector<double> right(half);
    for (int k = 0; k < half; ++k) right[k] = cycle[(spec.interface_offset + k) % J];

    CouplingSequence seq;
    seq.values.resize(2 * half);
    for (int k = 0; k < half; ++k) {
        seq.values[half + k] = right[k];
        seq.values[half - 1 - k] = right[k];
    }
    return seq;
}

CouplingSequence build_open_chain(const UnitCellSpec& cell, int n_cells) {
    cell.validate();
    if (n_cells < 1) throw std::invalid_argument("build_open_chain: need at least one cell");
    std::vector<double> cycle(cell.intracell);
    cycle.push_back(cell.intercell);
    CouplingSequence seq;
    seq.values.resize(n_cells * cell.J - 1);
    for (std::size_t i = 0; i < seq.values.size(); ++i)
        seq.values[i] = cycle[i % cell.J];
    return seq;
}

Eigen::MatrixXd build_hamiltonian(const CouplingSequence& seq) {
    if (seq.values.empty()) throw std::invalid_argument("build_hamiltonian: empty coupling sequence");
    for (double v : seq.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("build_hamiltonian: couplings must be positive and finite");
    const int n = seq.site_count();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        H(i, i + 1) = seq.values[i];
        H(i + 1, i) = seq.values[i];
    }
    return H;
}

std::vector<double> disorder_deltas(int count, const DisorderSpec& d) {
    if (d.level < 0.0) throw std::invalid_argument("disorder_deltas: D must be >= 0");
    std::vector<double> deltas(count, 1.0);
    if (d.level == 0.0) return deltas;
    GaussianStream stream(derive_stream_seed(d.seed, d.realization_index));
    for (int i = 0; i < count; ++i) deltas[i] = stream.normal(1.0, d.level);
    return deltas;
}

CouplingSequence disordered_sequence(const CouplingSequence& seq, const DisorderSpec& d) {
    if (d.level == 0.0) return seq;
    const std::vector<double> deltas =
        disorder_deltas(static_cast<int>(seq.values.size()), d);
    CouplingSequence out = seq;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= deltas[i];
    return out;
}

}  // namespace toplat
