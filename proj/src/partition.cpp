#include "dsproto/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dsproto/random.hpp"

namespace dsproto {

namespace {

// Accepted moves must lower Mcf by more than this.
// Minimum gain in log (1 - Mcf) for a move to count as an improvement.
constexpr double kImprovement = 1e-12;

// 1 - Mcf = (1 - c_0) * prod(1 - c_i), held as the number of zero factors
// and the log of the others. Large corpora drive Mcf to 1.0 in double
// precision long before the search is done; this keeps moves comparable.
struct Keep {
    std::size_t zeros = 0;
    double log = 0.0;

    void times(double factor) {
        if (factor > 0.0) {
            log += std::log(factor);
        } else {
            ++zeros;
        }
    }
    bool better_than(const Keep& other, double margin) const {
        if (zeros != other.zeros) return zeros < other.zeros;
        return log > other.log + margin;
    }
};

void check_corpus(std::span<const Bpa> corpus) {
    if (corpus.empty()) throw ValidationError("evidence corpus is empty");
    for (const Bpa& m : corpus) {
        if (!same_frame(corpus.front().frame_ptr(), m.frame_ptr())) {
            throw FrameMismatchError("evidence '" + m.id() + "' is on a different frame");
        }
    }
}

double domain_keep(const DomainPrior& prior, std::size_t r) { return prior.mass(r); }

}  // namespace

DomainPrior::DomainPrior(std::vector<double> masses) : masses_(std::move(masses)) {
    if (masses_.size() < 2) throw ValidationError("prior must cover at least m(E_0) and m(E_1)");
    double sum = 0.0;
    for (double m : masses_) {
        if (!std::isfinite(m) || m < 0.0 || m > 1.0) {
            throw ValidationError("prior masses must lie in [0, 1]");
        }
        sum += m;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) {
        throw ValidationError("prior masses sum to " + std::to_string(sum) + ", expected 1");
    }
}

double domain_conflict(const DomainPrior& prior, std::size_t r) {
    if (r > prior.max_subsets()) return 1.0;
    double sum = 0.0;
    const auto masses = prior.masses();
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (i != r) sum += masses[i];
    }
    return std::clamp(sum, 0.0, 1.0);
}

double subset_conflict(std::span<const Bpa> corpus, std::span<const std::size_t> members) {
    if (members.empty()) return 0.0;
    Accumulator acc(corpus[members.front()].frame_ptr());
    for (std::size_t idx : members) {
        acc.add(corpus[idx]);
        if (acc.total()) break;
    }
    return acc.conflict();
}

double metaconflict(const DomainPrior& prior, std::span<const double> conflicts) {
    double keep = 1.0 - domain_conflict(prior, conflicts.size());
    for (double c : conflicts) keep *= 1.0 - c;
    return std::clamp(1.0 - keep, 0.0, 1.0);
}

double metaconflict(const DomainPrior& prior, const Partition& partition) {
    return metaconflict(prior, partition.conflicts());
}

Partition Partition::from_subsets(std::span<const Bpa> corpus,
                                  std::vector<std::vector<std::size_t>> subsets) {
    std::vector<std::size_t> assignment(corpus.size(), kNewSubset);
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        if (subsets[s].empty()) throw ValidationError("subset " + std::to_string(s + 1) + " is empty");
        for (std::size_t idx : subsets[s]) {
            if (idx >= corpus.size()) throw ValidationError("evidence index out of range");
            if (assignment[idx] != kNewSubset) {
                throw ValidationError("evidence '" + corpus[idx].id() + "' appears in two subsets");
            }
            assignment[idx] = s;
        }
    }
    for (std::size_t idx = 0; idx < assignment.size(); ++idx) {
        if (assignment[idx] == kNewSubset) {
            throw ValidationError("evidence '" + corpus[idx].id() + "' is not assigned to a subset");
        }
    }
    return from_assignment(corpus, assignment);
}

Partition Partition::from_assignment(std::span<const Bpa> corpus,
                                     std::span<const std::size_t> assignment) {
    if (assignment.size() != corpus.size()) {
        throw ValidationError("assignment covers " + std::to_string(assignment.size()) +
                              " evidence, corpus has " + std::to_string(corpus.size()));
    }
    check_corpus(corpus);
    // Label -> members in ascending index order; a subset's position is the
    // order of its smallest member.
    std::map<std::size_t, std::size_t> relabel;
    Partition p;
    p.assignment_.resize(assignment.size());
    for (std::size_t idx = 0; idx < assignment.size(); ++idx) {
        auto [it, inserted] = relabel.try_emplace(assignment[idx], p.subsets_.size());
        if (inserted) p.subsets_.emplace_back();
        p.subsets_[it->second].push_back(idx);
        p.assignment_[idx] = it->second;
    }
    p.conflicts_.reserve(p.subsets_.size());
    for (const auto& members : p.subsets_) p.conflicts_.push_back(subset_conflict(corpus, members));
    return p;
}

bool Partition::verify_conflicts(std::span<const Bpa> corpus, double tolerance) const {
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
        if (std::abs(subset_conflict(corpus, subsets_[i]) - conflicts_[i]) > tolerance) return false;
    }
    return true;
}

MoveEvaluation evaluate_move(std::span<const Bpa> corpus, const DomainPrior& prior,
                             const Partition& partition, std::size_t evidence,
                             std::size_t target) {
    if (evidence >= partition.size()) throw ValidationError("evidence index out of range");
    const std::size_t source = partition.subset_of(evidence);
    if (target != kNewSubset && target >= partition.subset_count()) {
        throw ValidationError("target subset index out of range");
    }
    if (target == source) throw ValidationError("target subset equals the current subset");

    MoveEvaluation ev;
    std::vector<double> conflicts;
    conflicts.reserve(partition.subset_count() + 1);
    for (std::size_t i = 0; i < partition.subset_count(); ++i) {
        const auto& members = partition.subsets()[i];
        if (i == source) {
            std::vector<std::size_t> rest;
            std::copy_if(members.begin(), members.end(), std::back_inserter(rest),
                         [&](std::size_t m) { return m != evidence; });
            if (rest.empty()) continue;
            ev.source_conflict = subset_conflict(corpus, rest);
            conflicts.push_back(ev.source_conflict);
        } else if (i == target) {
            std::vector<std::size_t> grown = members;
            grown.insert(std::upper_bound(grown.begin(), grown.end(), evidence), evidence);
            ev.target_conflict = subset_conflict(corpus, grown);
            conflicts.push_back(ev.target_conflict);
        } else {
            conflicts.push_back(partition.conflicts()[i]);
        }
    }
    if (target == kNewSubset) {
        ev.target_conflict = 0.0;
        conflicts.push_back(0.0);
    }
    ev.subset_count = conflicts.size();
    ev.mcf = metaconflict(prior, conflicts);
    ev.delta = ev.mcf - metaconflict(prior, partition);
    return ev;
}

Partition apply_move(std::span<const Bpa> corpus, const Partition& partition,
                     std::size_t evidence, std::size_t target) {
    if (evidence >= partition.size()) throw ValidationError("evidence index out of range");
    if (target != kNewSubset && target >= partition.subset_count()) {
        throw ValidationError("target subset index out of range");
    }
    std::vector<std::size_t> assignment = partition.assignment();
    assignment[evidence] = target == kNewSubset ? partition.subset_count() : target;
    return Partition::from_assignment(corpus, assignment);
}

std::size_t subset_limit(const DomainPrior& prior, std::size_t corpus_size,
                         std::optional<std::size_t> cap) {
    // Counts past the last one the prior supports always give Mcf = 1.
    std::size_t top = prior.max_subsets();
    while (top > 1 && prior.mass(top) == 0.0) --top;
    std::size_t limit = std::min(top, corpus_size);
    if (cap) limit = std::min(limit, *cap);
    return std::max<std::size_t>(limit, 1);
}

// Mutable search state with one running combination per subset, so that
// adding an evidence to a subset costs a single pairwise combination.
class SearchState {
public:
    SearchState(std::span<const Bpa> corpus, const DomainPrior& prior, std::size_t limit)
        : corpus_(corpus), prior_(prior), limit_(limit), frame_(corpus.front().frame_ptr()) {}

    void assign(std::vector<std::size_t> labels) {
        assignment_ = std::move(labels);
        canonicalize();
    }

    double mcf() const { return metaconflict(prior_, conflicts_); }

    Keep keep() const {
        Keep k;
        k.times(domain_keep(prior_, subsets_.size()));
        for (double s : survival_) k.times(s);
        return k;
    }

    std::size_t subset_count() const { return subsets_.size(); }

    // Greedy agglomeration: forced merges while r exceeds the limit, then
    // merges that strictly lower Mcf. Returns whether anything merged.
    bool merge_down() {
        bool merged = false;
        while (subsets_.size() > 1) {
            const std::size_t r = subsets_.size();
            std::optional<Keep> best;
            double best_survival = -1.0;
            std::size_t best_a = 0, best_b = 0;
            for (std::size_t a = 0; a < r; ++a) {
                for (std::size_t b = a + 1; b < r; ++b) {
                    Accumulator joined = accs_[a];
                    joined.merge(accs_[b]);
                    const double joined_survival = joined.survival();
                    Keep k;
                    k.times(domain_keep(prior_, r - 1));
                    k.times(joined_survival);
                    for (std::size_t i = 0; i < r; ++i) {
                        if (i != a && i != b) k.times(survival_[i]);
                    }
                    const bool tie = best && !k.better_than(*best, 0.0) && !best->better_than(k, 0.0);
                    if (!best || k.better_than(*best, 0.0) || (tie && joined_survival > best_survival)) {
                        best = k;
                        best_survival = joined_survival;
                        best_a = a;
                        best_b = b;
                    }
                }
            }
            if (r <= limit_ && !best->better_than(keep(), kImprovement)) break;
            for (std::size_t idx : subsets_[best_b]) assignment_[idx] = best_a;
            canonicalize();
            merged = true;
        }
        return merged;
    }

    // One steepest-descent step. Returns false at a local minimum.
    bool descend() {
        const std::size_t r = subsets_.size();
        const Keep current = keep();
        std::vector<double> removal(corpus_.size(), 1.0);
        for (std::size_t s = 0; s < r; ++s) removal_survivals(s, removal);

        Keep best = current;
        std::size_t best_evidence = kNewSubset, best_target = kNewSubset;
        for (std::size_t e = 0; e < corpus_.size(); ++e) {
            const std::size_t src = assignment_[e];
            const bool empties = subsets_[src].size() == 1;
            for (std::size_t k = 0; k <= r; ++k) {
                if (k == src) continue;
                const bool fresh = k == r;
                if (fresh && (empties || r >= limit_)) continue;
                const std::size_t r_after = r - (empties ? 1 : 0) + (fresh ? 1 : 0);
                Keep after;
                after.times(domain_keep(prior_, r_after));
                for (std::size_t i = 0; i < r; ++i) {
                    if (i == src) {
                        if (!empties) after.times(removal[e]);
                    } else if (i == k) {
                        after.times(accs_[k].survival_with(corpus_[e]));
                    } else {
                        after.times(survival_[i]);
                    }
                }
                if (after.better_than(best, 0.0)) {
                    best = after;
                    best_evidence = e;
                    best_target = k;
                }
            }
        }
        if (best_evidence == kNewSubset || !best.better_than(current, kImprovement)) return false;

        const auto saved = assignment_;
        assignment_[best_evidence] = best_target;
        canonicalize();
        if (!keep().better_than(current, 0.0)) {
            assignment_ = saved;
            canonicalize();
            return false;
        }
        return true;
    }

    Partition to_partition() const {
        Partition p;
        p.assignment_ = assignment_;
        p.subsets_ = subsets_;
        p.conflicts_ = conflicts_;
        return p;
    }

private:
    // Survival of each member's subset with that member removed, from
    // prefix and suffix combinations.
    void removal_survivals(std::size_t s, std::vector<double>& out) const {
        const auto& members = subsets_[s];
        const std::size_t size = members.size();
        if (size < 2) return;
        std::vector<Accumulator> suffix(size + 1, Accumulator(frame_));
        for (std::size_t t = size; t-- > 0;) {
            suffix[t] = suffix[t + 1];
            suffix[t].add(corpus_[members[t]]);
        }
        Accumulator prefix(frame_);
        for (std::size_t t = 0; t < size; ++t) {
            Accumulator rest = prefix;
            rest.merge(suffix[t + 1]);
            out[members[t]] = rest.survival();
            prefix.add(corpus_[members[t]]);
        }
    }

    // Relabels subsets by smallest member and rebuilds every combination
    // from scratch in member order.
    void canonicalize() {
        std::map<std::size_t, std::size_t> relabel;
        subsets_.clear();
        for (std::size_t idx = 0; idx < assignment_.size(); ++idx) {
            auto [it, inserted] = relabel.try_emplace(assignment_[idx], subsets_.size());
            if (inserted) subsets_.emplace_back();
            subsets_[it->second].push_back(idx);
            assignment_[idx] = it->second;
        }
        accs_.assign(subsets_.size(), Accumulator(frame_));
        conflicts_.resize(subsets_.size());
        survival_.resize(subsets_.size());
        for (std::size_t s = 0; s < subsets_.size(); ++s) {
            for (std::size_t idx : subsets_[s]) accs_[s].add(corpus_[idx]);
            conflicts_[s] = accs_[s].conflict();
            survival_[s] = accs_[s].survival();
        }
    }

    std::span<const Bpa> corpus_;
    const DomainPrior& prior_;
    std::size_t limit_;
    FramePtr frame_;
    std::vector<std::size_t> assignment_;
    std::vector<std::vector<std::size_t>> subsets_;
    std::vector<Accumulator> accs_;
    std::vector<double> conflicts_;
    std::vector<double> survival_;
};

namespace {

std::vector<std::size_t> random_assignment(std::size_t n, const DomainPrior& prior,
                                           std::size_t limit, Rng& rng) {
    std::vector<std::size_t> support;
    for (std::size_t r = 1; r <= limit; ++r) {
        if (prior.mass(r) > 0.0) support.push_back(r);
    }
    if (support.empty()) {
        support.resize(limit);
        std::iota(support.begin(), support.end(), std::size_t{1});
    }
    const std::size_t r =
        support[std::uniform_int_distribution<std::size_t>(0, support.size() - 1)(rng)];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> labels(n);
    std::uniform_int_distribution<std::size_t> pick(0, r - 1);
    for (std::size_t t = 0; t < n; ++t) labels[order[t]] = t < r ? t : pick(rng);
    return labels;
}

}  // namespace

SearchResult minimize_metaconflict(std::span<const Bpa> corpus, const DomainPrior& prior,
                                   const SearchConfig& config) {
    check_corpus(corpus);
    if (config.restarts < 1) throw ValidationError("restarts must be at least 1");
    const std::size_t limit = subset_limit(prior, corpus.size(), config.max_subsets);
    const std::size_t runs = config.init == InitStrategy::singleton_greedy ? 1 : config.restarts;

    std::optional<SearchResult> best;
    Keep best_keep;
    for (std::size_t run = 0; run < runs; ++run) {
        SearchState state(corpus, prior, limit);
        if (config.init == InitStrategy::singleton_greedy) {
            std::vector<std::size_t> labels(corpus.size());
            std::iota(labels.begin(), labels.end(), std::size_t{0});
            state.assign(std::move(labels));
            state.merge_down();
        } else {
            Rng rng = make_rng(derive_seed(config.seed, stream::search), run);
            state.assign(random_assignment(corpus.size(), prior, limit, rng));
        }
        // Single moves cannot join two multi-member subsets (an event split
        // in two is a local minimum), so converged states also try merges.
        std::size_t moves = 0;
        do {
            while (state.descend()) ++moves;
        } while (state.merge_down() && ++moves);

        const Keep keep = state.keep();
        if (!best || keep.better_than(best_keep, 0.0)) {
            best = SearchResult{state.to_partition(), state.mcf(), run, moves};
            best_keep = keep;
        }
    }
    return std::move(*best);
}

}  // namespace dsproto
