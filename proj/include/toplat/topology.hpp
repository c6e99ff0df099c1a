#pragma once
#include <Eigen/Dense>
#include <vector>

#include "toplat/lattice.hpp"

// Topological invariants: winding numbers via the circle criterion and the
// integral definition, Zak phases via TRIM parities, band-resolved windings
// via Wilson loops, and phase-diagram grids.

namespace toplat {

struct ChiralBlock {
    double C = 0.0;  // circle center offset of det q(k) = C - R*exp(-ika)
    double R = 0.0;  // circle radius (positive)
};

// The single-harmonic constants of det q(k) for the J-site cell:
// J=3: (t^2, tau*t); J=4: (t1^2, tau*t2); J=5: (t1^2*t2, tau*t2^2);
// J=6: (t1^2*t3, tau*t2^2).
ChiralBlock chiral_block(const UnitCellSpec& cell);

struct InvariantReport {
    int nu_total = 0;              // 1 if R > |C|, else 0
    bool at_transition = false;    // |R - |C|| below relative tolerance 1e-12
    std::vector<double> zak;       // per-band Zak phase in {0, pi}
    std::vector<int> band_winding; // per-band Wilson-loop winding (integer)
};

// Circle criterion: nu = 1 iff R > |C|.
int winding_circle(const UnitCellSpec& cell, bool* at_transition = nullptr);

// Winding of det q(k) across the Brillouin zone: unwrapped phase / 2*pi,
// rounded. For even J the determinant is evaluated numerically from the
// sublattice block of the Bloch Hamiltonian; for odd J the cell has unequal
// sublattices and the analytic single-harmonic determinant is used. The grid
// is refined until every per-step phase increment is < pi. Throws when the
// gap is closed (det q vanishes on the grid).
int winding_integral(const UnitCellSpec& cell, int n_k = 256);

// Per-band Zak phase from parity eigenvalues at the TRIMs k = 0, pi/a:
// gamma_n = arg[xi_n(0) * xi_n(pi/a)] in {0, pi}. Throws if a TRIM
// eigenvalue is degenerate or a state has no definite parity.
std::vector<double> zak_trim(const UnitCellSpec& cell);

// Band-resolved winding: unwrapped discrete Wilson-loop (Berry) phase
// accumulated across the Brillouin zone, divided by pi, rounded. The grid is
// doubled until per-step increments are < pi/4 and the integer is stable.
// Throws on band crossings on the grid.
std::vector<int> band_winding_wilson(const UnitCellSpec& cell, int n_k = 128);

struct PhaseDiagram {
    std::vector<double> t_values;    // intracell sweep values (all t_j equal)
    std::vector<double> tau_values;  // intercell sweep values
    // Row-major [i_t * n_tau + i_tau]:
    std::vector<int> nu_total;
    std::vector<unsigned char> at_transition;  // not vector<bool>: written in parallel
    std::vector<std::vector<int>> band_winding;
};

// Grid sweep of winding_circle + band_winding_wilson for a J-site cell with
// all intracell couplings equal to t. OpenMP-parallel over grid points with
// deterministic output ordering; *_serial is the reference implementation.
PhaseDiagram phase_diagram(int J, double t_min, double t_max, double tau_min,
                           double tau_max, int resolution);
PhaseDiagram phase_diagram_serial(int J, double t_min, double t_max, double tau_min,
                                  double tau_max, int resolution);

}  // namespace toplat
