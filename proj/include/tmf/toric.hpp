#pragma once

#include <tmf/rational.hpp>

#include <string>
#include <vector>

namespace tmf {

struct Facet {
    std::vector<long> normal;  // primitive outward normal v_i
    Rat offset;                // lambda_i
};

struct PolytopeSpec {
    int n = 0;
    std::vector<Facet> facets;

    int d() const { return static_cast<int>(facets.size()); }
};

struct NotDelzant : std::runtime_error {
    explicit NotDelzant(const std::string& why) : std::runtime_error("not Delzant: " + why) {}
};

struct ValidatedPolytope {
    PolytopeSpec spec;
    std::vector<std::vector<Rat>> vertices;          // rational coordinates
    std::vector<std::vector<int>> vertex_facets;     // active facet indices per vertex
};

// Vertex enumeration over facet n-subsets plus the Delzant checks
// (primitive normals, n facets per vertex, unimodular normal bases).
ValidatedPolytope validate_delzant(const PolytopeSpec& spec);

struct KernelLattice {
    int n = 0, d = 0;
    std::vector<std::vector<long>> basis;  // gamma_1..gamma_{d-n}, rows in Z^d
    std::vector<std::vector<long>> proj;   // pi as n x d matrix, pi[r][i] = v_i[r]
    std::vector<long> g_basis;             // g_J(gamma_k) = 2 * sum of coordinates
    std::vector<Rat> h_basis;              // h_J(gamma_k) = <lambda, gamma_k>
    long value_denominator = 1;            // im h_G = (1/value_denominator) Z
    bool h_discrete = true;                // h vanishes on ker(g) tensor Q

    int rank() const { return static_cast<int>(basis.size()); }
};

KernelLattice kernel_lattice(const ValidatedPolytope& vp);

// Coordinates of a lattice vector in the kernel basis; nullopt when u is not in J.
std::optional<std::vector<long>> in_kernel_coords(const KernelLattice& kl,
                                                  const std::vector<long>& u);

struct SpinData {
    std::vector<std::vector<int>> eps_q;   // eq. producing the quadratic form: 0 iff f_i+f_j in J
    std::vector<int> q_basis;              // q(gamma_k) mod 2
    bool orientable = false;               // g_J lands in 4Z
    bool pin = false;                      // q linear on J mod 2
    bool spin = false;                     // orientable && pin
    std::vector<int> sigma_basis;          // background class on the kernel basis
    std::vector<int> sigma_prime_basis;    // sigma - q on the basis
    bool sigma_prime_free = false;
};

// q evaluated from integer J-basis coordinates.
int q_of(const SpinData& sd, const KernelLattice& kl, const std::vector<long>& j_coords);
int sigma_of(const SpinData& sd, const std::vector<long>& j_coords);
// <b, b'> = sum_{i != j} eps_ij b_i b'_j mod 2.
int bilinear_of(const SpinData& sd, const KernelLattice& kl, const std::vector<long>& a,
                const std::vector<long>& b);

SpinData spin_analysis(const KernelLattice& kl, bool is_one_simplex);

struct NotSpin : std::runtime_error {
    NotSpin() : std::runtime_error("polytope is not combinatorially relatively spin") {}
};

struct SpinStructure {
    std::vector<int> s_basis;   // frak-s on gamma_1..gamma_{d-n}; default all zero
    long orbit_size = 1;        // |H_{Z/2}| = 2^{rank J}
};

SpinStructure spin_structures(const SpinData& sd, const KernelLattice& kl);

// Exact linear algebra helpers shared with the model construction.
std::vector<std::vector<long>> integer_kernel(const std::vector<std::vector<long>>& rows_a,
                                              int ncols);
std::optional<std::vector<Rat>> solve_square(std::vector<std::vector<Rat>> a,
                                             std::vector<Rat> b);
Rat det_rational(std::vector<std::vector<Rat>> a);

}  // namespace tmf
