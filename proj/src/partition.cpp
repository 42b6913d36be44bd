#include "chainlab/partition.hpp"

#include <algorithm>
#include <cmath>

namespace chainlab {

Partition::Partition(PointSubset ground, std::vector<PointSubset> blocks)
    : ground_(std::move(ground)), blocks_(std::move(blocks)) {
    for (const auto& block : blocks_) {
        if (block.empty()) {
            throw ValidationError("partition stores an empty block");
        }
    }
    std::sort(blocks_.begin(), blocks_.end(), [](const PointSubset& a, const PointSubset& b) {
        return a.min_element() < b.min_element();
    });
    std::size_t total = 0;
    for (const auto& block : blocks_) {
        total += static_cast<std::size_t>(block.size());
        if (!block.is_subset_of(ground_)) {
            throw ValidationError("partition block is not contained in the ground subset");
        }
    }
    if (total != static_cast<std::size_t>(ground_.size())) {
        throw ValidationError("partition blocks do not cover the ground subset disjointly");
    }
    // Equal sizes + containment + per-block uniqueness leaves only one gap:
    // overlap between blocks, which the size count above already excludes
    // unless two blocks share a point while another ground point is missed.
    for (int t : ground_.members()) {
        int owners = 0;
        for (const auto& block : blocks_) owners += block.contains(t) ? 1 : 0;
        if (owners != 1) {
            throw ValidationError("point " + std::to_string(t) + " lies in " +
                                  std::to_string(owners) + " blocks");
        }
    }
}

Partition Partition::single_block(PointSubset ground) {
    std::vector<PointSubset> blocks{ground};
    return Partition(std::move(ground), std::move(blocks));
}

Partition Partition::singletons(const PointSubset& ground) {
    std::vector<PointSubset> blocks;
    blocks.reserve(static_cast<std::size_t>(ground.size()));
    for (int t : ground.members()) {
        blocks.emplace_back(std::vector<int>{t});
    }
    return Partition(ground, std::move(blocks));
}

int Partition::block_index_of(int t) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].contains(t)) return static_cast<int>(i);
    }
    throw PointNotInGround("point " + std::to_string(t) + " is not in the ground subset");
}

bool Partition::refines(const Partition& coarser) const {
    for (const auto& block : blocks_) {
        bool contained = false;
        for (const auto& big : coarser.blocks()) {
            if (block.is_subset_of(big)) {
                contained = true;
                break;
            }
        }
        if (!contained) return false;
    }
    return true;
}

bool Partition::all_singletons() const {
    return blocks_.size() == static_cast<std::size_t>(ground_.size());
}

std::uint64_t admissible_budget(int level) {
    if (level <= 0) return 1;
    if (level >= 6) return UINT64_MAX;  // 2^64 and beyond: saturate
    return std::uint64_t{1} << (std::uint64_t{1} << level);
}

AdmissibilityReport check_admissible(const AdmissibleSequence& seq) {
    AdmissibilityReport report;
    report.alpha_ok = seq.alpha >= 1.0 && std::isfinite(seq.alpha);
    if (!report.alpha_ok) {
        report.failures.push_back("alpha must be a finite real >= 1");
    }
    if (seq.levels.empty()) {
        report.failures.push_back("sequence has no levels");
        return report;
    }

    report.grounds_consistent = true;
    for (std::size_t s = 0; s < seq.levels.size(); ++s) {
        if (!(seq.levels[s].ground() == seq.ground)) {
            report.grounds_consistent = false;
            report.failures.push_back("level " + std::to_string(s) +
                                      " partitions a different ground subset");
        }
    }

    report.root_is_single_block = seq.levels.front().block_count() == 1;
    if (!report.root_is_single_block) {
        report.failures.push_back("level 0 must be the single-block partition");
    }

    report.budgets_ok = true;
    for (std::size_t s = 1; s < seq.levels.size(); ++s) {
        const auto count = static_cast<std::uint64_t>(seq.levels[s].block_count());
        if (count > admissible_budget(static_cast<int>(s))) {
            report.budgets_ok = false;
            report.failures.push_back("level " + std::to_string(s) + " has " +
                                      std::to_string(count) + " blocks, budget " +
                                      std::to_string(admissible_budget(static_cast<int>(s))));
        }
    }

    report.refinement_ok = true;
    for (std::size_t s = 1; s < seq.levels.size(); ++s) {
        if (!seq.levels[s].refines(seq.levels[s - 1])) {
            report.refinement_ok = false;
            report.failures.push_back("level " + std::to_string(s) +
                                      " does not refine level " + std::to_string(s - 1));
        }
    }

    report.terminal_singletons = seq.levels.back().all_singletons();
    if (!report.terminal_singletons) {
        report.failures.push_back("terminal level is not the partition into singletons");
    }
    return report;
}

}  // namespace chainlab
