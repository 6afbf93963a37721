#pragma once
// Metalevel evidence about where a piece of evidence belongs, derived from
// the conflict changes caused by hypothetically moving it, and the partial
// specification (Bel, Pls, credibility) obtained by combining that evidence.
//
// Subset positions are 0-based. For a partition with n subsets, position n
// is the fresh subset chi_{n+1}.

#include <cstddef>
#include <span>
#include <vector>

#include "dsproto/evidence.hpp"
#include "dsproto/partition.hpp"

namespace dsproto {

// Negative deltas within this of zero are float error and read as zero.
inline constexpr double kDeltaClamp = 1e-12;

// (after - before) / (1 - before): evidence that a member does not belong to
// a subset whose conflict rises from `before` to `after` when it joins.
double conflict_increase(double before, double after);
// (before - after) / (1 - after): evidence against a member whose removal
// lowers its subset's conflict from `before` to `after`.
double conflict_decrease(double before, double after);

double out_delta(std::span<const Bpa> corpus, const Partition& partition, std::size_t evidence);
double in_delta(std::span<const Bpa> corpus, const Partition& partition, std::size_t evidence,
                std::size_t subset);

enum class DomainCase {
    shared,            // own subset has other members: mass against the fresh subset
    singleton_lower,   // removal lowers domain conflict: mass against own subset
    singleton_higher,  // removal raises domain conflict: mass for own subset
    singleton_equal,   // no domain evidence
};

struct DomainDelta {
    DomainCase kind = DomainCase::singleton_equal;
    double mass = 0.0;
};

DomainDelta domain_delta(const DomainPrior& prior, const Partition& partition,
                         std::size_t evidence);

struct MetaEvidence {
    std::size_t evidence = 0;
    std::size_t own_subset = 0;
    // a_j = m(e not in chi_j) for j = 0..n; the last entry is the fresh subset.
    std::vector<double> against;
    // m(e in chi_own); nonzero only in the singleton_higher domain case.
    double in_own = 0.0;
    DomainCase domain = DomainCase::shared;

    std::size_t positions() const noexcept { return against.size(); }
};

MetaEvidence meta_evidence(std::span<const Bpa> corpus, const DomainPrior& prior,
                           const Partition& partition, std::size_t evidence);
// All rows at once; removals use prefix/suffix combinations, so the cost is
// linear in corpus size per subset.
std::vector<MetaEvidence> meta_evidence_all(std::span<const Bpa> corpus, const DomainPrior& prior,
                                            const Partition& partition);

// The metalevel items as one BPA on the frame {chi_1, ..., chi_{n+1}},
// combined by Dempster's rule. Throws TotalConflictError("evidence fits
// nowhere") when the items contradict completely.
Bpa combine_metalevel(const MetaEvidence& meta);

struct SpecificationRow {
    std::size_t evidence = 0;
    std::size_t own_subset = 0;
    std::vector<double> bel;    // Bel(e in chi_j), j = 0..n
    std::vector<double> pls;    // Pls(e in chi_j)
    std::vector<double> alpha;  // credibility of e in chi_j
    double k = 0.0;             // sum of Pls over all positions
};

SpecificationRow specify(const MetaEvidence& meta);
SpecificationRow specify(std::span<const Bpa> corpus, const DomainPrior& prior,
                         const Partition& partition, std::size_t evidence);

// alpha_j from a row's Bel/Pls. Throws Error when K is zero.
std::vector<double> credibility(const SpecificationRow& row);

// Pls(e in chi_k) = (1 - a_k) / (1 - prod a_j), valid when there is no
// positive item. Throws TotalConflictError when every a_j is 1.
std::vector<double> closed_form_plausibility(std::span<const double> against);

struct SpecificationReport {
    std::vector<MetaEvidence> meta;
    std::vector<SpecificationRow> rows;
};

SpecificationReport specify_all(std::span<const Bpa> corpus, const DomainPrior& prior,
                                const Partition& partition);

}  // namespace dsproto
