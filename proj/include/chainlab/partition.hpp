#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainlab/metric.hpp"

namespace chainlab {

// Partition of a declared ground subset into disjoint nonempty blocks.
// Blocks are kept in canonical order (ascending minimum element) so that
// identical partitions compare equal and outputs are reproducible.
class Partition {
public:
    Partition(PointSubset ground, std::vector<PointSubset> blocks);

    static Partition single_block(PointSubset ground);
    static Partition singletons(const PointSubset& ground);

    const PointSubset& ground() const { return ground_; }
    const std::vector<PointSubset>& blocks() const { return blocks_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }

    // Index of the unique block containing t; throws PointNotInGround.
    int block_index_of(int t) const;
    const PointSubset& block_of(int t) const { return blocks_[static_cast<std::size_t>(block_index_of(t))]; }

    bool refines(const Partition& coarser) const;
    bool all_singletons() const;

    bool operator==(const Partition&) const = default;

private:
    PointSubset ground_;
    std::vector<PointSubset> blocks_;
};

// Level-s cardinality budget 2^(2^s), saturated so it never overflows;
// any partition of a representable space fits once s >= 6.
std::uint64_t admissible_budget(int level);

struct AdmissibleSequence {
    PointSubset ground;
    std::vector<Partition> levels;  // P_0, ..., P_L
    double alpha = 2.0;

    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

struct AdmissibilityReport {
    bool root_is_single_block = false;
    bool budgets_ok = false;
    bool refinement_ok = false;
    bool terminal_singletons = false;
    bool grounds_consistent = false;
    bool alpha_ok = false;
    std::vector<std::string> failures;

    bool pass() const {
        return root_is_single_block && budgets_ok && refinement_ok && terminal_singletons &&
               grounds_consistent && alpha_ok;
    }
};

// Per-invariant pass/fail report; never throws, callers decide.
AdmissibilityReport check_admissible(const AdmissibleSequence& seq);

}  // namespace chainlab
