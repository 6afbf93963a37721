#include "dsproto/prototypes.hpp"

#include <algorithm>

namespace dsproto {

std::vector<PotentialPrototype> nominate(std::span<const SpecificationRow> rows,
                                         std::span<const MetaEvidence> meta) {
    if (rows.size() != meta.size()) throw ValidationError("specification rows and metalevel evidence differ in length");
    std::vector<PotentialPrototype> out;
    out.reserve(rows.size());
    for (std::size_t q = 0; q < rows.size(); ++q) {
        const MetaEvidence& me = meta[q];
        const SpecificationRow& row = rows[q];
        const std::size_t n = me.positions() - 1;
        PotentialPrototype p;
        p.evidence = me.evidence;
        if (me.in_own > 0.0) {
            // The only positive item is for the evidence's own subset.
            p.subset = me.own_subset;
            p.basis = NominationBasis::positive;
        } else {
            p.subset = 0;
            for (std::size_t j = 1; j < n; ++j) {
                if (me.against[j] < me.against[p.subset]) p.subset = j;
            }
            p.basis = NominationBasis::negative;
        }
        p.credibility = row.alpha.at(p.subset);
        out.push_back(p);
    }
    return out;
}

std::vector<std::vector<PotentialPrototype>> select_prototypes(
    std::span<const PotentialPrototype> nominees, std::size_t subset_count, std::size_t budget) {
    if (budget < 1) throw ValidationError("prototype budget must be at least 1");
    std::vector<std::vector<PotentialPrototype>> per_subset(subset_count);
    for (const PotentialPrototype& p : nominees) {
        if (p.subset >= subset_count) throw ValidationError("nominee for an unknown subset");
        per_subset[p.subset].push_back(p);
    }
    for (std::size_t j = 0; j < subset_count; ++j) {
        auto& list = per_subset[j];
        if (list.empty()) throw UnrepresentableSubsetError(j);
        std::sort(list.begin(), list.end(), [](const PotentialPrototype& a, const PotentialPrototype& b) {
            if (a.credibility != b.credibility) return a.credibility > b.credibility;
            return a.evidence < b.evidence;
        });
        if (list.size() > budget) list.resize(budget);
    }
    return per_subset;
}

ModelBuild build_model(std::span<const Bpa> corpus, const Partition& partition,
                       const DomainPrior& prior, std::size_t budget) {
    if (corpus.empty()) throw ValidationError("evidence corpus is empty");
    if (budget < 1) throw ValidationError("prototype budget must be at least 1");
    SpecificationReport report = specify_all(corpus, prior, partition);
    const auto nominees = nominate(report.rows, report.meta);
    auto chosen = select_prototypes(nominees, partition.subset_count(), budget);

    std::vector<std::string> warnings;
    std::vector<SubsetModel> subsets;
    subsets.reserve(chosen.size());
    for (std::size_t j = 0; j < chosen.size(); ++j) {
        std::vector<Bpa> members;
        SubsetModel sm{{}, Bpa::vacuous(corpus.front().frame_ptr()), 0.0};
        bool all_zero = true;
        for (const PotentialPrototype& p : chosen[j]) {
            members.push_back(corpus[p.evidence]);
            sm.prototype_ids.push_back(corpus[p.evidence].id());
            if (p.credibility > 0.0) all_zero = false;
        }
        if (all_zero) {
            warnings.push_back("subset " + std::to_string(j + 1) +
                               " is represented only by zero-credibility prototypes");
        }
        if (chosen[j].size() < budget) {
            warnings.push_back("subset " + std::to_string(j + 1) + " has " +
                               std::to_string(chosen[j].size()) + " prototypes, fewer than N = " +
                               std::to_string(budget));
        }
        Accumulator acc(corpus.front().frame_ptr());
        for (const Bpa& m : members) acc.add(m);
        if (acc.total()) {
            throw TotalConflictError("prototype set self-contradictory in subset " +
                                     std::to_string(j + 1));
        }
        sm.combined = acc.combined();
        sm.conflict = acc.conflict();
        subsets.push_back(std::move(sm));
    }

    ModelBuild build{PrototypeModel{corpus.front().frame_ptr(), prior, budget, std::move(subsets)},
                     std::move(chosen), std::move(report), std::move(warnings)};
    return build;
}

}  // namespace dsproto
