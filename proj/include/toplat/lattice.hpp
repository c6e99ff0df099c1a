#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Superlattice construction: unit cells, gap->coupling conversion, finite
// interface/open lattices, and reproducible multiplicative coupling disorder.

namespace toplat {

struct UnitCellSpec {
    int J = 0;                        // sites per unit cell (3..6 supported, >=3 required)
    std::vector<double> intracell;    // t_1..t_{J-1}  (m^-1)
    double intercell = 0.0;           // tau           (m^-1)
    double lattice_constant = 1.0;    // a             (m; 1 for dimensionless work)

    // Throws std::invalid_argument on violation. Inversion symmetry
    // t_j = t_{J-j} is required: the closed-form results assume it.
    void validate() const;
};

struct PhysicalGeometry {
    std::vector<double> gaps_nm;      // J-1 intracell gaps followed by the intercell gap
    double width_nm = 500.0;
    double height_nm = 220.0;
    double wavelength_nm = 1550.0;

    void validate() const;            // gaps >= 70 nm (fabrication minimum), symmetric
};

struct CouplingMap {
    double kappa0 = 2.0e5;            // coupling at zero gap (m^-1)
    double g0_nm = 100.0;             // evanescent decay scale (nm)

    double coupling(double gap_nm) const;
    void validate() const;
};

struct InterfaceLatticeSpec {
    UnitCellSpec cell;
    int half_cells = 1;               // M unit cells on each side of the center
    int interface_offset = 0;         // 0..J-1: start of the coupling cycle at the center

    // N = 2*M*J + 1 sites, center waveguide indexed 0, sites -(N-1)/2..(N-1)/2.
    int site_count() const { return 2 * half_cells * cell.J + 1; }
    void validate() const;
};

struct CouplingSequence {
    std::vector<double> values;       // N-1 couplings, left to right (m^-1)

    int site_count() const { return static_cast<int>(values.size()) + 1; }
    bool mirror_symmetric(double rel_tol = 1e-12) const;
};

struct DisorderSpec {
    double level = 0.0;               // D: relative standard deviation of delta_i
    std::uint64_t seed = 0;           // stream seed (already mixed with the level index)
    std::uint64_t realization_index = 0;
};

// t(g) = kappa0 * exp(-g / g0): exponential evanescent-coupling model.
UnitCellSpec couplings_from_gaps(const PhysicalGeometry& geom, const CouplingMap& map,
                                 double lattice_constant = 1.0);

// Mirror-symmetric interface lattice: the right half repeats the unit-cell
// coupling cycle starting at interface_offset, the left half is its mirror.
CouplingSequence build_interface_sequence(const InterfaceLatticeSpec& spec);

// Open-boundary chain of n_cells unit cells (N = n_cells*J sites); the
// coupling cycle starts with t_1 at the boundary. Used for edge-mode work.
CouplingSequence build_open_chain(const UnitCellSpec& cell, int n_cells);

// Symmetric tridiagonal Hamiltonian with zero diagonal (chiral symmetry).
Eigen::MatrixXd build_hamiltonian(const CouplingSequence& seq);

// Each coupling multiplied by delta_i ~ N(1, D^2); deterministic per
// (seed, realization_index); D = 0 returns the input unchanged.
CouplingSequence disordered_sequence(const CouplingSequence& seq, const DisorderSpec& d);

// The raw delta vector, reusable across H_p, H_s, H_i.
std::vector<double> disorder_deltas(int count, const DisorderSpec& d);

}  // namespace toplat
