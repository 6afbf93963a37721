#pragma once
// Partitions of an evidence corpus into event subsets, the metaconflict
// criterion, and steepest-descent minimization over single-evidence moves.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dsproto/evidence.hpp"

namespace dsproto {

// Prior masses m(E_0)..m(E_M) over "there are exactly i subsets".
class DomainPrior {
public:
    explicit DomainPrior(std::vector<double> masses);

    // m(E_count); zero beyond M.
    double mass(std::size_t count) const noexcept {
        return count < masses_.size() ? masses_[count] : 0.0;
    }
    // M, the largest subset count the prior can express.
    std::size_t max_subsets() const noexcept { return masses_.size() - 1; }
    std::span<const double> masses() const noexcept { return masses_; }

    friend bool operator==(const DomainPrior&, const DomainPrior&) = default;

private:
    std::vector<double> masses_;
};

// c_0 for a partition into r subsets: sum over i != r of m(E_i).
double domain_conflict(const DomainPrior& prior, std::size_t r);

// Disjoint nonempty subsets covering the corpus, with each subset's joint
// conflict cached. Subsets are kept in canonical order (ascending smallest
// member); members are sorted.
class Partition {
public:
    static Partition from_assignment(std::span<const Bpa> corpus,
                                     std::span<const std::size_t> assignment);
    static Partition from_subsets(std::span<const Bpa> corpus,
                                  std::vector<std::vector<std::size_t>> subsets);

    std::size_t size() const noexcept { return assignment_.size(); }
    std::size_t subset_count() const noexcept { return subsets_.size(); }
    const std::vector<std::vector<std::size_t>>& subsets() const noexcept { return subsets_; }
    const std::vector<double>& conflicts() const noexcept { return conflicts_; }
    const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }
    std::size_t subset_of(std::size_t evidence) const { return assignment_.at(evidence); }

    // True when every cached conflict matches a fresh joint combination.
    bool verify_conflicts(std::span<const Bpa> corpus, double tolerance = 1e-12) const;

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.subsets_ == b.subsets_;
    }

private:
    Partition() = default;
    friend class SearchState;

    std::vector<std::size_t> assignment_;
    std::vector<std::vector<std::size_t>> subsets_;
    std::vector<double> conflicts_;
};

double subset_conflict(std::span<const Bpa> corpus, std::span<const std::size_t> members);

// 1 - (1 - c_0) * prod(1 - c_i).
double metaconflict(const DomainPrior& prior, std::span<const double> conflicts);
double metaconflict(const DomainPrior& prior, const Partition& partition);

inline constexpr std::size_t kNewSubset = std::numeric_limits<std::size_t>::max();

struct MoveEvaluation {
    double delta = 0.0;  // Mcf after minus Mcf before
    double mcf = 0.0;    // Mcf after
    double source_conflict = 0.0;  // c of the source subset without the evidence (0 if it empties)
    double target_conflict = 0.0;  // c of the target subset with the evidence
    std::size_t subset_count = 0;  // r after the move
};

// Pure: the partition is not modified. `target` is a subset index or
// kNewSubset.
MoveEvaluation evaluate_move(std::span<const Bpa> corpus, const DomainPrior& prior,
                             const Partition& partition, std::size_t evidence,
                             std::size_t target);

Partition apply_move(std::span<const Bpa> corpus, const Partition& partition,
                     std::size_t evidence, std::size_t target);

enum class InitStrategy { random, singleton_greedy };

struct SearchConfig {
    std::size_t restarts = 20;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_subsets;
    InitStrategy init = InitStrategy::random;
};

struct SearchResult {
    Partition partition;
    double mcf = 1.0;
    std::size_t best_restart = 0;
    std::size_t moves = 0;  // accepted moves in the winning restart
};

SearchResult minimize_metaconflict(std::span<const Bpa> corpus, const DomainPrior& prior,
                                   const SearchConfig& config);

// Largest subset count the search may use for this corpus.
std::size_t subset_limit(const DomainPrior& prior, std::size_t corpus_size,
                         std::optional<std::size_t> cap);

}  // namespace dsproto
