#include "dsproto/metalevel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dsproto {

namespace {

double clamp_delta(double d) {
    if (d < 0.0 && d > -kDeltaClamp) return 0.0;
    return std::clamp(d, 0.0, 1.0);
}

// Metalevel frames {chi1, ..., chiK}, shared by all rows of the same width.
const FramePtr& metalevel_frame(std::size_t positions) {
    static const std::array<FramePtr, kMaxFrameSize> frames = [] {
        std::array<FramePtr, kMaxFrameSize> out;
        for (std::size_t k = 1; k <= kMaxFrameSize; ++k) {
            std::vector<std::string> labels;
            for (std::size_t j = 1; j <= k; ++j) labels.push_back("chi" + std::to_string(j));
            out[k - 1] = Frame::make(std::move(labels));
        }
        return out;
    }();
    if (positions == 0 || positions > kMaxFrameSize) {
        throw ValidationError("metalevel frame needs between 1 and " +
                              std::to_string(kMaxFrameSize) + " positions");
    }
    return frames[positions - 1];
}

Bpa simple_support(const FramePtr& frame, FocalSet focal, double mass) {
    if (mass >= 1.0) return make_bpa(frame, {{focal, 1.0}});
    return make_bpa(frame, {{focal, mass}, {frame->full(), 1.0 - mass}});
}

DomainDelta domain_delta_for(const DomainPrior& prior, std::size_t n, bool singleton) {
    DomainDelta out;
    const double c0 = domain_conflict(prior, n);
    if (!singleton) {
        const double c0_star = domain_conflict(prior, n + 1);
        if (c0 >= 1.0) {
            throw TotalConflictError("domain conflict is total for " + std::to_string(n) + " subsets");
        }
        out.kind = DomainCase::shared;
        out.mass = clamp_delta((c0_star - c0) / (1.0 - c0));
        return out;
    }
    const double c0_star = domain_conflict(prior, n - 1);
    if (c0_star < c0) {
        out.kind = DomainCase::singleton_lower;
        out.mass = clamp_delta((c0 - c0_star) / (1.0 - c0_star));
    } else if (c0_star > c0) {
        out.kind = DomainCase::singleton_higher;
        out.mass = clamp_delta(c0 / c0_star);
    } else {
        out.kind = DomainCase::singleton_equal;
    }
    return out;
}

void apply_domain(MetaEvidence& meta, const DomainDelta& domain) {
    meta.domain = domain.kind;
    switch (domain.kind) {
        case DomainCase::shared:
            meta.against.back() = domain.mass;
            break;
        case DomainCase::singleton_lower: {
            double& a = meta.against[meta.own_subset];
            a = 1.0 - (1.0 - a) * (1.0 - domain.mass);
            break;
        }
        case DomainCase::singleton_higher:
            meta.in_own = domain.mass;
            break;
        case DomainCase::singleton_equal:
            break;
    }
}

}  // namespace

double conflict_increase(double before, double after) {
    if (before >= 1.0) throw TotalConflictError("subset conflict is already total");
    return clamp_delta((after - before) / (1.0 - before));
}

double conflict_decrease(double before, double after) {
    if (after >= 1.0) throw TotalConflictError("subset conflict stays total without the evidence");
    return clamp_delta((before - after) / (1.0 - after));
}

double out_delta(std::span<const Bpa> corpus, const Partition& partition, std::size_t evidence) {
    const std::size_t own = partition.subset_of(evidence);
    const auto& members = partition.subsets()[own];
    if (members.size() == 1) return 0.0;
    std::vector<std::size_t> rest;
    std::copy_if(members.begin(), members.end(), std::back_inserter(rest),
                 [&](std::size_t m) { return m != evidence; });
    return conflict_decrease(partition.conflicts()[own], subset_conflict(corpus, rest));
}

double in_delta(std::span<const Bpa> corpus, const Partition& partition, std::size_t evidence,
                std::size_t subset) {
    if (subset >= partition.subset_count()) throw ValidationError("subset index out of range");
    if (subset == partition.subset_of(evidence)) {
        throw ValidationError("in_delta needs a subset other than the evidence's own");
    }
    std::vector<std::size_t> grown = partition.subsets()[subset];
    grown.insert(std::upper_bound(grown.begin(), grown.end(), evidence), evidence);
    return conflict_increase(partition.conflicts()[subset], subset_conflict(corpus, grown));
}

DomainDelta domain_delta(const DomainPrior& prior, const Partition& partition,
                         std::size_t evidence) {
    const std::size_t own = partition.subset_of(evidence);
    return domain_delta_for(prior, partition.subset_count(),
                            partition.subsets()[own].size() == 1);
}

MetaEvidence meta_evidence(std::span<const Bpa> corpus, const DomainPrior& prior,
                           const Partition& partition, std::size_t evidence) {
    const std::size_t n = partition.subset_count();
    MetaEvidence meta;
    meta.evidence = evidence;
    meta.own_subset = partition.subset_of(evidence);
    meta.against.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        meta.against[j] = j == meta.own_subset ? out_delta(corpus, partition, evidence)
                                               : in_delta(corpus, partition, evidence, j);
    }
    apply_domain(meta, domain_delta(prior, partition, evidence));
    return meta;
}

std::vector<MetaEvidence> meta_evidence_all(std::span<const Bpa> corpus, const DomainPrior& prior,
                                            const Partition& partition) {
    const std::size_t n = partition.subset_count();
    if (partition.size() != corpus.size()) {
        throw ValidationError("partition does not cover the corpus");
    }
    const FramePtr& frame = corpus.front().frame_ptr();

    std::vector<Accumulator> subsets;
    subsets.reserve(n);
    std::vector<double> removal(corpus.size(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const auto& members = partition.subsets()[s];
        std::vector<Accumulator> suffix(members.size() + 1, Accumulator(frame));
        for (std::size_t t = members.size(); t-- > 0;) {
            suffix[t] = suffix[t + 1];
            suffix[t].add(corpus[members[t]]);
        }
        Accumulator prefix(frame);
        for (std::size_t t = 0; t < members.size(); ++t) {
            Accumulator rest = prefix;
            rest.merge(suffix[t + 1]);
            removal[members[t]] = rest.conflict();
            prefix.add(corpus[members[t]]);
        }
        subsets.push_back(std::move(prefix));
    }

    std::vector<MetaEvidence> out;
    out.reserve(corpus.size());
    for (std::size_t e = 0; e < corpus.size(); ++e) {
        MetaEvidence meta;
        meta.evidence = e;
        meta.own_subset = partition.subset_of(e);
        meta.against.assign(n + 1, 0.0);
        const bool singleton = partition.subsets()[meta.own_subset].size() == 1;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = partition.conflicts()[j];
            if (j != meta.own_subset) {
                meta.against[j] = conflict_increase(c, subsets[j].conflict_with(corpus[e]));
            } else if (!singleton) {
                meta.against[j] = conflict_decrease(c, removal[e]);
            }
        }
        apply_domain(meta, domain_delta_for(prior, n, singleton));
        out.push_back(std::move(meta));
    }
    return out;
}

Bpa combine_metalevel(const MetaEvidence& meta) {
    const std::size_t positions = meta.positions();
    if (meta.own_subset >= positions) throw ValidationError("own subset outside the metalevel frame");
    const FramePtr& frame = metalevel_frame(positions);
    Accumulator acc(frame);
    for (std::size_t j = 0; j < positions; ++j) {
        const double a = meta.against[j];
        if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("metalevel mass outside [0, 1]");
        if (a > 0.0) acc.add(simple_support(frame, frame->full() & ~(FocalSet{1} << j), a));
    }
    if (meta.in_own > 0.0) {
        if (meta.in_own > 1.0) throw ValidationError("metalevel mass outside [0, 1]");
        acc.add(simple_support(frame, FocalSet{1} << meta.own_subset, meta.in_own));
    }
    if (acc.total()) throw TotalConflictError("evidence fits nowhere");
    return acc.combined();
}

SpecificationRow specify(const MetaEvidence& meta) {
    const Bpa combined = combine_metalevel(meta);
    SpecificationRow row;
    row.evidence = meta.evidence;
    row.own_subset = meta.own_subset;
    const std::size_t positions = meta.positions();
    row.bel.resize(positions);
    row.pls.resize(positions);
    for (std::size_t j = 0; j < positions; ++j) {
        const FocalSet single = FocalSet{1} << j;
        row.bel[j] = combined.mass(single);
        row.pls[j] = std::min(combined.plausibility(single), 1.0);
        row.k += row.pls[j];
    }
    row.alpha = credibility(row);
    return row;
}

SpecificationRow specify(std::span<const Bpa> corpus, const DomainPrior& prior,
                         const Partition& partition, std::size_t evidence) {
    return specify(meta_evidence(corpus, prior, partition, evidence));
}

std::vector<double> credibility(const SpecificationRow& row) {
    if (!(row.k > 0.0)) throw TotalConflictError("evidence is impossible in every subset");
    const std::size_t i = row.own_subset;
    const double bel_own = row.bel.at(i);
    std::vector<double> alpha(row.pls.size());
    for (std::size_t j = 0; j < row.pls.size(); ++j) {
        const double share = (1.0 - bel_own) * row.pls[j] * row.pls[j] / row.k;
        alpha[j] = std::clamp(j == i ? bel_own + share : share, 0.0, 1.0);
    }
    return alpha;
}

std::vector<double> closed_form_plausibility(std::span<const double> against) {
    double product = 1.0;
    for (double a : against) product *= a;
    if (product >= 1.0) throw TotalConflictError("evidence fits nowhere");
    std::vector<double> pls;
    pls.reserve(against.size());
    for (double a : against) pls.push_back((1.0 - a) / (1.0 - product));
    return pls;
}

SpecificationReport specify_all(std::span<const Bpa> corpus, const DomainPrior& prior,
                                const Partition& partition) {
    SpecificationReport report;
    report.meta = meta_evidence_all(corpus, prior, partition);
    report.rows.reserve(report.meta.size());
    for (const MetaEvidence& meta : report.meta) report.rows.push_back(specify(meta));
    return report;
}

}  // namespace dsproto
