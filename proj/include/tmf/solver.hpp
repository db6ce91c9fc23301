#pragma once

#include <tmf/trace.hpp>

namespace tmf {

struct Unsolvable : std::runtime_error {
    explicit Unsolvable(const std::string& why)
        : std::runtime_error("obstruction slice is unsolvable (object not spherical): " + why) {}
};

struct ClosednessFailure : std::logic_error {
    explicit ClosednessFailure(const std::string& why) : std::logic_error(why) {}
};

// E_1 < E_2 < ... inside the value group, starting at nu(seed).
struct FiltrationLadder {
    int32_t denom = 1;
    std::vector<Rat> levels;
};
FiltrationLadder filtration_ladder(const Model& model, const Rat& start, const Rat& cutoff);

struct BoundingCochainState {
    EndMorphism b;
    NovikovSeries c;
    int level = 0;
    NovikovSeries r;
};

// mc(b) = delta(b) - b^2.
EndMorphism mc(const EndMorphism& b);

struct ObstructionSlice {
    EndMorphism o;       // the (E_l, E_{l+1}] slice of mc(b) - c id
    Rat level_lo, level_hi;
};

// Extracts the next obstruction slice and checks it is delta-closed there.
ObstructionSlice obstruction_slice(const BoundingCochainState& st, const Rat& lo, const Rat& hi);

struct SliceSolution {
    NovikovSeries c_l;
    EndMorphism b_l;
};

// Exact linear solve in the finite monomial window: delta(b_l) = -o + c_l id
// in the associated graded slice.  Deterministic via RREF with a fixed
// monomial order; throws Unsolvable when the class [o] is not c id + exact.
SliceSolution solve_delta(const ObstructionSlice& slice, const DiracPtr& mod);

struct SolverOptions {
    int workers = 1;
    bool parity_prune = true;
    bool final_check = true;  // the full-cutoff trace verification / benchmark
};

struct LevelLog {
    Rat level;
    NovikovSeries c_l;
    NovikovSeries theta_l;
    bool solved = true;
    std::string b_l_text;
};

struct SolveResult {
    EndMorphism b;
    NovikovSeries c;
    std::vector<Invariant> invariants;
    std::vector<LevelLog> levels;
    TraceStats stats;
    std::map<int, uint64_t> residues_by_length;  // word length -> residue count
    bool mc_check = false;
    bool trace_check = false;
    double trace_seconds = 0.0;
};

// The inductive construction: iterates levels up to the cutoff, returns the
// final state and the invariant table read off c.
SolveResult solve_run(const DiracPtr& mod, const NovikovSeries& r, const Rat& cutoff,
                      const SolverOptions& opts = {});

}  // namespace tmf
