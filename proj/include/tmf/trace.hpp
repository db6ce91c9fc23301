#pragma once

#include <tmf/cyclic.hpp>
#include <tmf/residue.hpp>

#include <atomic>

namespace tmf {

struct TraceStats {
    uint64_t residues_evaluated = 0;
    uint64_t words_evaluated = 0;
    uint64_t words_pruned = 0;

    TraceStats& operator+=(const TraceStats& o) {
        residues_evaluated += o.residues_evaluated;
        words_evaluated += o.words_evaluated;
        words_pruned += o.words_pruned;
        return *this;
    }
};

struct TraceOptions {
    int workers = 1;
    bool parity_prune = true;
};

// Theta_l on a single tensor word a_l (x) ... (x) a_1 (factors[0] = a_l),
// truncated to weights below cutoff_num over the model denominator.
NovikovSeries theta_l(const std::vector<EndMorphism>& factors, int64_t cutoff_num,
                      TraceStats* stats = nullptr, const TraceOptions& opts = {});

// Linear extension over a chain; pure-scalar words are dropped.
NovikovSeries theta(const Chain& chain, int64_t cutoff_num, TraceStats* stats = nullptr,
                    const TraceOptions& opts = {});

// Number of residue evaluations Theta_l performs at word length l.
uint64_t theta_word_count(int n, int l);

// True when some monomial s^k T^d of degree 1-n has weight exactly e; the
// solver skips trace evaluation at levels where no correction can exist.
bool theta_weight_admissible(const Model& model, const Rat& e);

}  // namespace tmf
