#include "dsproto/classifier.hpp"

#include <sstream>

#include "dsproto/partition.hpp"

namespace dsproto {

double rejection_threshold(const DomainPrior& prior, std::size_t subset_count) {
    if (!(prior.mass(subset_count) > 0.0)) {
        throw ValidationError("model subset count unsupported by prior: m(E_" +
                    std::to_string(subset_count) + ") = 0");
    }
    const double c0 = domain_conflict(prior, subset_count);
    const double c0_star = domain_conflict(prior, subset_count + 1);
    return (c0_star - c0) / (1.0 - c0);
}

double rejection_threshold(const PrototypeModel& model) {
    return rejection_threshold(model.prior, model.subset_count());
}

double compose_conflict(double recorded, double pairwise) {
    return 1.0 - (1.0 - recorded) * (1.0 - pairwise);
}

double subset_score(double recorded, double pairwise) {
    const double keep = 1.0 - recorded;
    if (!(keep > 0.0)) throw TotalConflictError("recorded prototype conflict is total");
    const double keep_after = keep * (1.0 - pairwise);
    return (keep - keep_after) / keep;
}

Classifier::Classifier(PrototypeModel model) : model_(std::move(model)) {
    if (model_.subsets.empty()) throw ValidationError("prototype model has no subsets");
    for (const SubsetModel& s : model_.subsets) {
        if (!same_frame(s.combined.frame_ptr(), model_.frame)) throw FrameMismatchError();
        if (!(s.conflict < 1.0)) throw TotalConflictError("recorded prototype conflict is total");
    }
    threshold_ = rejection_threshold(model_);
    if (threshold_ < 0.0) {
        std::ostringstream msg;
        msg << "rejection threshold " << threshold_
            << " is negative: every evidence with any conflict will be rejected";
        warnings_.push_back(msg.str());
    }
}

Classification Classifier::classify(const Bpa& evidence) const {
    const auto start = std::chrono::steady_clock::now();
    Classification out;
    out.evidence_id = evidence.id();
    out.threshold = threshold_;

    const bool on_model_frame = same_frame(evidence.frame_ptr(), model_.frame);
    const std::optional<Bpa> reframed =
        on_model_frame ? std::nullopt : std::optional<Bpa>(evidence.reframe(model_.frame));
    const Bpa& e = on_model_frame ? evidence : *reframed;

    out.scores.reserve(model_.subsets.size());
    std::size_t best = 0;
    for (std::size_t j = 0; j < model_.subsets.size(); ++j) {
        const SubsetModel& s = model_.subsets[j];
        // The prototype combination is usually the smaller BPA; keep the
        // longer loop inside.
        out.scores.push_back(subset_score(s.conflict, conflict_between(s.combined, e)));
        if (out.scores[j] < out.scores[best]) best = j;
    }
    if (out.scores[best] > threshold_) {
        out.outcome = Outcome::rejected;
    } else {
        out.outcome = Outcome::assigned;
        out.subset = best;
    }
    out.elapsed = std::chrono::steady_clock::now() - start;
    return out;
}

Classification classify(const PrototypeModel& model, const Bpa& evidence) {
    return Classifier(model).classify(evidence);
}

std::vector<StreamResult> classify_stream(const Classifier& classifier,
                                          std::span<const Bpa> evidence) {
    std::vector<StreamResult> out;
    out.reserve(evidence.size());
    for (const Bpa& e : evidence) {
        StreamResult item;
        item.evidence_id = e.id();
        try {
            item.result = classifier.classify(e);
        } catch (const std::exception& ex) {
            item.error = ex.what();
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace dsproto
