#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "toplat/lattice.hpp"

// Eigendecomposition of finite lattices, Bloch band structures, and the
// closed-form band edges / gap sizes / gap-closure conditions / edge-mode
// decay lengths for J = 3..6, cross-checked against numeric oracles.

namespace toplat {

struct ModeTag {
    bool interface_mode = false;  // energy inside an internal bulk gap + localized at center
    int parity = 0;               // +1 even, -1 odd, 0 unclassified
    double ipr = 0.0;             // inverse participation ratio sum v_n^4
};

struct EigenSystem {
    Eigen::VectorXd values;       // N propagation constants, ascending
    Eigen::MatrixXd vectors;      // columns: orthonormal eigenvectors
    std::vector<ModeTag> mode_tags;

    int size() const { return static_cast<int>(values.size()); }
    // Indices of interface-tagged modes, ascending by eigenvalue.
    std::vector<int> interface_modes() const;
};

// Dense symmetric eigensolver with a deterministic ordering: ascending
// eigenvalue, each vector scaled so its first component of magnitude
// > 1e-9 is positive. Tags carry IPR and (for mirror-symmetric H) parity;
// interface flags require the bulk cell and are set by tag_interface_modes.
EigenSystem eigensystem(const Eigen::MatrixXd& H);

// Interface tagging rule: eigenvalue strictly inside an internal bulk band
// gap of `cell`, IPR > 4/N, and peak amplitude within the central half of
// the lattice (the last clause excludes outer-edge modes of the finite
// mirror lattice, which are equally localized and can sit in the same gaps).
void tag_interface_modes(EigenSystem& sys, const UnitCellSpec& cell);
EigenSystem eigensystem(const Eigen::MatrixXd& H, const UnitCellSpec& cell);

struct BandStructure {
    std::vector<double> k_grid;   // n_k wavevectors spanning [-pi/a, pi/a]
    Eigen::MatrixXd bands;        // n_k x J, ascending per row
};

// Bloch Hamiltonian: tridiagonal intracell couplings with corner elements
// tau*exp(-+ i k a).
Eigen::MatrixXcd bloch_hamiltonian(const UnitCellSpec& cell, double k);

// J bands over a symmetric k grid including both TRIMs (n_k >= 16).
BandStructure band_structure(const UnitCellSpec& cell, int n_k);

// Minimum over k of the separation between adjacent bands, located on a
// grid and refined by golden-section search to 1e-8 absolute.
std::vector<double> numeric_gaps(const UnitCellSpec& cell, int n_k = 512);

struct DecayLength {
    std::string label;            // e.g. "xi", "xi_0", "xi_1", "xi_C", "xi_pm"
    double xi = 0.0;              // units of the lattice constant a
    bool infinite = false;        // set at gap-closure points instead of overflowing
};

struct GapEntry {
    double numeric = 0.0;         // grid+golden minimum of the band separation
    double closed_form = 0.0;     // 0 when !has_closed_form
    bool has_closed_form = false;
    bool closed = false;          // numeric gap below closure tolerance
};

struct CriticalCoupling {
    std::string label;            // e.g. "tau=t", "tau_C", "tau_+"
    double tau = 0.0;
};

struct GapReport {
    int J = 0;
    std::vector<GapEntry> gaps;             // J-1 entries, bottom to top
    std::vector<CriticalCoupling> critical; // closed-form critical couplings
    std::vector<DecayLength> decay;         // closed-form decay lengths
    bool conditional = false;               // J=5 closure formulas outside their
                                            // stated validity ratio t1/t2 = 4/3
};

// Closed-form gap sizes (J=3,4), Cardano-based gap sizes (J=6), numeric-only
// gap sizes (J=5), critical couplings, and decay lengths, with the numeric
// gaps attached for cross-checking. J must be 3..6.
GapReport closed_form_report(const UnitCellSpec& cell);

// The closed-form decay lengths alone (subset of the report).
std::vector<DecayLength> decay_lengths(const UnitCellSpec& cell);

// The three positive band energies of the J=6 cell at wavevector k from the
// characteristic cubic of Q6(k)^dagger Q6(k) solved by the trigonometric
// (Cardano) method; ascending.
Eigen::Vector3d cardano_j6_energies(const UnitCellSpec& cell, double k);

// Log-linear least-squares fit of an exponential tail |v_n| ~ exp(-n a/xi)
// on sites [first, last]; returns xi in units of a.
double fit_decay_length(const Eigen::VectorXd& mode, int first, int last);

}  // namespace toplat
