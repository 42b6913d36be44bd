#include "chainlab/chaining.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "chainlab/parallel.hpp"

namespace chainlab {

namespace {

double level_weight(int s, double alpha) { return std::exp2(static_cast<double>(s) / alpha); }

void require_alpha(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        throw ValidationError("alpha must be a finite real >= 1");
    }
}

double block_diameter(const FiniteMetricSpace& space, const std::vector<int>& pts) {
    double d = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            d = std::max(d, space.distance(pts[a], pts[b]));
        }
    }
    return d;
}

}  // namespace

ChainingValue chaining_value(const FiniteMetricSpace& space, const AdmissibleSequence& seq) {
    const auto report = check_admissible(seq);
    if (!report.pass()) {
        std::string msg = "sequence is not admissible";
        for (const auto& f : report.failures) msg += "; " + f;
        throw NotAdmissible(msg);
    }
    space.check_subset(seq.ground);

    const auto& pts = seq.ground.members();
    std::vector<double> sums(pts.size(), 0.0);
    for (std::size_t s = 0; s < seq.levels.size(); ++s) {
        const double weight = level_weight(static_cast<int>(s), seq.alpha);
        const auto& level = seq.levels[s];
        for (const auto& block : level.blocks()) {
            const double d = diameter(space, block);
            if (d == 0.0) continue;
            for (int t : block.members()) {
                const auto idx = static_cast<std::size_t>(
                    std::lower_bound(pts.begin(), pts.end(), t) - pts.begin());
                sums[idx] += weight * d;
            }
        }
    }

    ChainingValue out;
    out.value = 0.0;
    out.witness = pts.empty() ? -1 : pts.front();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (sums[i] > out.value) {
            out.value = sums[i];
            out.witness = pts[i];
        }
    }
    return out;
}

namespace {

// Candidate comparison: smaller max diameter wins, ties go to the
// lexicographically smallest restricted growth string. Total order over the
// candidate set, which is what makes parallel pruning deterministic.
bool candidate_better(double value, const std::vector<std::uint8_t>& assign,
                      const MinMaxPartition& best) {
    if (value != best.max_block_diameter) return value < best.max_block_diameter;
    return assign < best.assignment;
}

struct MinMaxSearch {
    const FiniteMetricSpace& space;
    const std::vector<int>& pts;
    int max_blocks;
    // Shared monotone upper bound on the optimum; used only to prune branches
    // that are strictly worse, so every optimal candidate survives in every
    // schedule and the (value, lex) reduction stays deterministic.
    std::atomic<double>* shared_bound = nullptr;

    std::vector<std::uint8_t> assign;
    MinMaxPartition best{std::numeric_limits<double>::infinity(), {}};

    explicit MinMaxSearch(const FiniteMetricSpace& s, const std::vector<int>& p, int mb)
        : space(s), pts(p), max_blocks(mb), assign(p.size(), 0) {}

    double pruning_bound() const {
        double b = best.max_block_diameter;
        if (shared_bound != nullptr) {
            b = std::min(b, shared_bound->load(std::memory_order_relaxed));
        }
        return b;
    }

    void offer(double value) {
        if (shared_bound == nullptr) return;
        double cur = shared_bound->load(std::memory_order_relaxed);
        while (value < cur &&
               !shared_bound->compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
        }
    }

    void run(std::size_t i, int used, double cur_max) {
        if (i == pts.size()) {
            if (candidate_better(cur_max, assign, best)) {
                best.max_block_diameter = cur_max;
                best.assignment = assign;
                offer(cur_max);
            }
            return;
        }
        const int limit = std::min(used, max_blocks - 1);
        for (int b = 0; b <= limit; ++b) {
            double to_block = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                if (assign[j] == b) {
                    to_block = std::max(to_block, space.distance(pts[i], pts[j]));
                }
            }
            const double next_max = std::max(cur_max, to_block);
            if (next_max > pruning_bound()) continue;
            assign[i] = static_cast<std::uint8_t>(b);
            run(i + 1, b == used ? used + 1 : used, next_max);
        }
        assign[i] = 0;
    }
};

struct SearchPrefix {
    std::vector<std::uint8_t> assign;
    int used = 1;
    double cur_max = 0.0;
};

void enumerate_prefixes(const FiniteMetricSpace& space, const std::vector<int>& pts,
                        int max_blocks, std::size_t depth, std::size_t i,
                        SearchPrefix& cur, std::vector<SearchPrefix>& out) {
    if (i == depth) {
        out.push_back(cur);
        return;
    }
    const int limit = std::min(cur.used, max_blocks - 1);
    for (int b = 0; b <= limit; ++b) {
        double to_block = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            if (cur.assign[j] == b) {
                to_block = std::max(to_block, space.distance(pts[i], pts[j]));
            }
        }
        const double saved_max = cur.cur_max;
        const int saved_used = cur.used;
        cur.assign[i] = static_cast<std::uint8_t>(b);
        cur.cur_max = std::max(cur.cur_max, to_block);
        cur.used = (b == saved_used) ? saved_used + 1 : saved_used;
        enumerate_prefixes(space, pts, max_blocks, depth, i + 1, cur, out);
        cur.cur_max = saved_max;
        cur.used = saved_used;
    }
    cur.assign[i] = 0;
}

void check_minmax_inputs(const FiniteMetricSpace& space, const PointSubset& subset,
                         int max_blocks) {
    if (subset.empty()) throw EmptySubset("min-max partition of the empty subset");
    space.check_subset(subset);
    if (max_blocks < 1) throw ValidationError("max_blocks must be >= 1");
}

}  // namespace

MinMaxPartition min_max_block_partition_serial(const FiniteMetricSpace& space,
                                               const PointSubset& subset, int max_blocks) {
    check_minmax_inputs(space, subset, max_blocks);
    MinMaxSearch search(space, subset.members(), max_blocks);
    search.run(0, 1, 0.0);
    return search.best;
}

MinMaxPartition min_max_block_partition_parallel(const FiniteMetricSpace& space,
                                                 const PointSubset& subset, int max_blocks,
                                                 int threads) {
    check_minmax_inputs(space, subset, max_blocks);
    const auto& pts = subset.members();
    const std::size_t depth = std::min<std::size_t>(pts.size(), 7);

    std::vector<SearchPrefix> prefixes;
    SearchPrefix root;
    root.assign.assign(pts.size(), 0);
    enumerate_prefixes(space, pts, max_blocks, depth, 0, root, prefixes);

    std::atomic<double> shared_bound{std::numeric_limits<double>::infinity()};
    std::vector<MinMaxPartition> local(
        prefixes.size(), MinMaxPartition{std::numeric_limits<double>::infinity(), {}});

    parallel_for(static_cast<std::ptrdiff_t>(prefixes.size()), threads, [&](std::ptrdiff_t p) {
        const auto& prefix = prefixes[static_cast<std::size_t>(p)];
        MinMaxSearch search(space, pts, max_blocks);
        search.shared_bound = &shared_bound;
        search.assign = prefix.assign;
        search.run(depth, prefix.used, prefix.cur_max);
        local[static_cast<std::size_t>(p)] = search.best;
    });

    MinMaxPartition best{std::numeric_limits<double>::infinity(), {}};
    for (const auto& cand : local) {
        if (cand.assignment.empty()) continue;
        if (candidate_better(cand.max_block_diameter, cand.assignment, best)) {
            best = cand;
        }
    }
    return best;
}

namespace {

Partition partition_from_assignment(const PointSubset& subset,
                                    const std::vector<std::uint8_t>& assign, int max_blocks) {
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(max_blocks));
    const auto& pts = subset.members();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        groups[assign[i]].push_back(pts[i]);
    }
    std::vector<PointSubset> blocks;
    for (auto& g : groups) {
        if (!g.empty()) blocks.emplace_back(std::move(g));
    }
    return Partition(subset, std::move(blocks));
}

GammaResult finish_gamma(const FiniteMetricSpace& space, AdmissibleSequence seq,
                         GammaMethod method) {
    const auto value = chaining_value(space, seq);
    GammaResult out;
    out.value = value.value;
    out.witness = value.witness;
    out.sequence = std::move(seq);
    out.method = method;
    return out;
}

}  // namespace

GammaResult gamma_exact(const FiniteMetricSpace& space, const PointSubset& subset, double alpha,
                        const GammaExactOptions& options) {
    require_alpha(alpha);
    if (subset.empty()) throw EmptySubset("gamma of the empty subset");
    space.check_subset(subset);
    if (options.cap > 16) {
        throw ValidationError("gamma_exact cap cannot exceed 16: the two-level closed form "
                              "is only optimal while 2^(2^2) covers the subset");
    }
    const int n = subset.size();
    if (n > options.cap) {
        throw TooLarge("gamma_exact limited to " + std::to_string(options.cap) +
                       " points, got " + std::to_string(n));
    }

    AdmissibleSequence seq;
    seq.ground = subset;
    seq.alpha = alpha;
    seq.levels.push_back(Partition::single_block(subset));
    if (n == 1) {
        return finish_gamma(space, std::move(seq), GammaMethod::exact);
    }
    if (n <= 4) {
        seq.levels.push_back(Partition::singletons(subset));
        return finish_gamma(space, std::move(seq), GammaMethod::exact);
    }

    const MinMaxPartition mm =
        options.threads > 1
            ? min_max_block_partition_parallel(space, subset, 4, options.threads)
            : min_max_block_partition_serial(space, subset, 4);
    seq.levels.push_back(partition_from_assignment(subset, mm.assignment, 4));
    seq.levels.push_back(Partition::singletons(subset));
    return finish_gamma(space, std::move(seq), GammaMethod::exact);
}

namespace {

struct GreedyBlock {
    std::vector<int> members;  // sorted
    double diam = 0.0;
};

GreedyBlock make_greedy_block(const FiniteMetricSpace& space, std::vector<int> members) {
    GreedyBlock b;
    b.diam = block_diameter(space, members);
    b.members = std::move(members);
    return b;
}

// Farthest-pair split: centers are the lexicographically smallest pair
// attaining the block diameter, points go to the nearest center (ties and
// the first center's side coincide).
std::pair<GreedyBlock, GreedyBlock> split_block(const FiniteMetricSpace& space,
                                                const GreedyBlock& block) {
    const auto& pts = block.members;
    int c1 = pts[0], c2 = pts[1];
    double best = -1.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double d = space.distance(pts[a], pts[b]);
            if (d > best) {
                best = d;
                c1 = pts[a];
                c2 = pts[b];
            }
        }
    }
    std::vector<int> side1, side2;
    for (int p : pts) {
        if (p == c2) {
            side2.push_back(p);
        } else if (space.distance(p, c1) <= space.distance(p, c2)) {
            side1.push_back(p);
        } else {
            side2.push_back(p);
        }
    }
    return {make_greedy_block(space, std::move(side1)), make_greedy_block(space, std::move(side2))};
}

}  // namespace

GammaResult gamma_greedy(const FiniteMetricSpace& space, const PointSubset& subset, double alpha) {
    require_alpha(alpha);
    if (subset.empty()) throw EmptySubset("gamma of the empty subset");
    space.check_subset(subset);
    const auto n = static_cast<std::uint64_t>(subset.size());

    AdmissibleSequence seq;
    seq.ground = subset;
    seq.alpha = alpha;
    seq.levels.push_back(Partition::single_block(subset));

    std::vector<GreedyBlock> blocks{make_greedy_block(space, subset.members())};
    int level = 1;
    while (blocks.size() < n) {
        const std::uint64_t budget = std::min(admissible_budget(level), n);
        while (blocks.size() < budget) {
            // Split target: largest diameter among size >= 2 blocks, ties to
            // the block with the smallest leading point.
            int target = -1;
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                if (blocks[i].members.size() < 2) continue;
                if (target < 0 || blocks[i].diam > blocks[static_cast<std::size_t>(target)].diam) {
                    target = static_cast<int>(i);
                }
            }
            if (target < 0) break;
            auto [left, right] = split_block(space, blocks[static_cast<std::size_t>(target)]);
            blocks[static_cast<std::size_t>(target)] = std::move(left);
            blocks.push_back(std::move(right));
            std::sort(blocks.begin(), blocks.end(), [](const GreedyBlock& a, const GreedyBlock& b) {
                return a.members.front() < b.members.front();
            });
        }
        std::vector<PointSubset> parts;
        parts.reserve(blocks.size());
        for (const auto& b : blocks) parts.emplace_back(b.members);
        seq.levels.emplace_back(subset, std::move(parts));
        ++level;
    }
    return finish_gamma(space, std::move(seq), GammaMethod::greedy);
}

AdmissibleSequence merge_sequences(const FiniteMetricSpace& space, const PointSubset& t1,
                                   const AdmissibleSequence& seq_a, const PointSubset& t2,
                                   const AdmissibleSequence& seq_b) {
    if (seq_a.alpha != seq_b.alpha) {
        throw AlphaMismatch("sequences use alpha " + std::to_string(seq_a.alpha) + " and " +
                            std::to_string(seq_b.alpha));
    }
    if (!(seq_a.ground == t1) || !(seq_b.ground == t2)) {
        throw GroundMismatch("sequence grounds do not match T1/T2");
    }
    space.check_subset(t1);
    space.check_subset(t2);
    if (!check_admissible(seq_a).pass() || !check_admissible(seq_b).pass()) {
        throw NotAdmissible("merge requires admissible inputs");
    }

    const PointSubset ground = t1.set_union(t2);
    const PointSubset only1 = t1.set_difference(t2);
    const PointSubset only2 = t2.set_difference(t1);

    AdmissibleSequence merged;
    merged.ground = ground;
    merged.alpha = seq_a.alpha;
    merged.levels.push_back(Partition::single_block(ground));
    merged.levels.push_back(Partition::single_block(ground));

    const int depth = std::max(seq_a.depth(), seq_b.depth()) + 2;
    for (int s = 2; s <= depth; ++s) {
        const Partition& part_a = seq_a.levels[static_cast<std::size_t>(std::min(s - 2, seq_a.depth()))];
        const Partition& part_b = seq_b.levels[static_cast<std::size_t>(std::min(s - 2, seq_b.depth()))];
        std::vector<PointSubset> blocks;
        for (const auto& a : part_a.blocks()) {
            if (PointSubset piece = a.set_intersection(only1); !piece.empty()) {
                blocks.push_back(std::move(piece));
            }
        }
        for (const auto& b : part_b.blocks()) {
            if (PointSubset piece = b.set_intersection(only2); !piece.empty()) {
                blocks.push_back(std::move(piece));
            }
        }
        for (const auto& a : part_a.blocks()) {
            for (const auto& b : part_b.blocks()) {
                if (PointSubset piece = a.set_intersection(b); !piece.empty()) {
                    blocks.push_back(std::move(piece));
                }
            }
        }
        merged.levels.emplace_back(ground, std::move(blocks));
    }
    return merged;
}

SubadditivityCertificate subadditivity_certificate(const FiniteMetricSpace& space,
                                                   const PointSubset& t1,
                                                   const AdmissibleSequence& seq_a,
                                                   const PointSubset& t2,
                                                   const AdmissibleSequence& seq_b) {
    const AdmissibleSequence merged = merge_sequences(space, t1, seq_a, t2, seq_b);

    SubadditivityCertificate cert;
    cert.alpha = seq_a.alpha;
    cert.merged_value = chaining_value(space, merged).value;
    cert.value_a = chaining_value(space, seq_a).value;
    cert.value_b = chaining_value(space, seq_b).value;
    cert.diameter_union = diameter(space, merged.ground);

    const double shift = std::exp2(2.0 / cert.alpha);  // reindexing 2^(s/a) = 2^(2/a) 2^((s-2)/a)
    cert.construction_bound = (1.0 + std::exp2(1.0 / cert.alpha)) * cert.diameter_union +
                              shift * (cert.value_a + cert.value_b);
    cert.lemma_bound_3 = 3.0 * (cert.diameter_union + cert.value_a + cert.value_b);
    if (!t1.set_intersection(t2).empty()) {
        cert.lemma_bound_9 = 9.0 * (cert.value_a + cert.value_b);
    }

    // Mathematically merged <= construction_bound; 1e-12 relative slack
    // covers the different summation orders of the two sides.
    if (cert.merged_value > cert.construction_bound * (1.0 + 1e-12)) {
        throw ConstructionBoundViolated(
            "merged value " + std::to_string(cert.merged_value) + " exceeds construction bound " +
            std::to_string(cert.construction_bound));
    }
    return cert;
}

}  // namespace chainlab
