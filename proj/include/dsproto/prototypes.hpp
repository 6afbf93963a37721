#pragma once
// Prototype selection: every evidence nominates the subset it most
// credibly belongs to, each subset keeps its N most credible nominees, and
// those are combined into one BPA per subset.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dsproto/evidence.hpp"
#include "dsproto/metalevel.hpp"
#include "dsproto/partition.hpp"

namespace dsproto {

enum class NominationBasis {
    positive,  // largest m(e in chi_j)
    negative,  // smallest m(e not in chi_j)
};

struct PotentialPrototype {
    std::size_t evidence = 0;
    std::size_t subset = 0;
    NominationBasis basis = NominationBasis::negative;
    double credibility = 0.0;
};

inline constexpr std::size_t kDefaultBudget = 5;

// One nominee per row; `meta` and `rows` are parallel. Only real subsets
// 0..n-1 are candidates, ties go to the lower index.
std::vector<PotentialPrototype> nominate(std::span<const SpecificationRow> rows,
                                         std::span<const MetaEvidence> meta);

// Per subset, up to `budget` nominees by descending credibility (ties to the
// lower evidence index). Throws UnrepresentableSubsetError for a subset
// without nominees.
std::vector<std::vector<PotentialPrototype>> select_prototypes(
    std::span<const PotentialPrototype> nominees, std::size_t subset_count, std::size_t budget);

struct SubsetModel {
    std::vector<std::string> prototype_ids;
    Bpa combined;
    double conflict = 0.0;  // c_j of the prototype combination
};

struct PrototypeModel {
    static constexpr int kFormatVersion = 1;

    FramePtr frame;
    DomainPrior prior;
    std::size_t budget = kDefaultBudget;
    std::vector<SubsetModel> subsets;

    std::size_t subset_count() const noexcept { return subsets.size(); }
};

struct ModelBuild {
    PrototypeModel model;
    std::vector<std::vector<PotentialPrototype>> chosen;
    SpecificationReport report;
    std::vector<std::string> warnings;
};

// Runs specification, nomination, selection and per-subset combination.
// Throws UnrepresentableSubsetError, or TotalConflictError when a subset's
// prototypes contradict each other completely.
ModelBuild build_model(std::span<const Bpa> corpus, const Partition& partition,
                       const DomainPrior& prior, std::size_t budget = kDefaultBudget);

}  // namespace dsproto
