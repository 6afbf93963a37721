#pragma once
// Classification of incoming evidence against a prototype model: one
// pairwise combination per subset, so the work depends only on the model
// (n <= M subsets, each a fixed combination of at most N prototypes), never
// on how much evidence was clustered to build it.

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsproto/evidence.hpp"
#include "dsproto/prototypes.hpp"

namespace dsproto {

enum class Outcome { assigned, rejected };

struct Classification {
    std::string evidence_id;
    Outcome outcome = Outcome::rejected;
    std::size_t subset = 0;  // meaningful when assigned
    std::vector<double> scores;  // m(e not in chi_j) per subset
    double threshold = 0.0;
    std::chrono::nanoseconds elapsed{0};
};

// Mass against opening a fresh subset: (c0* - c0) / (1 - c0) with
// c0 = 1 - m(E_n), c0* = 1 - m(E_{n+1}). Throws Error when m(E_n) = 0.
double rejection_threshold(const DomainPrior& prior, std::size_t subset_count);
double rejection_threshold(const PrototypeModel& model);

// c* = 1 - (1 - c)(1 - k): the recorded prototype conflict extended by one
// more combination.
double compose_conflict(double recorded, double pairwise);

// (c* - c) / (1 - c) with c* = compose_conflict(c, k), evaluated on the
// complements so the cancellation stays exact for c near 1.
double subset_score(double recorded, double pairwise);

class Classifier {
public:
    explicit Classifier(PrototypeModel model);

    const PrototypeModel& model() const noexcept { return model_; }
    double threshold() const noexcept { return threshold_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Evidence on a subframe of the model frame is re-expressed on the
    // model frame; unknown labels raise FrameMismatchError.
    Classification classify(const Bpa& evidence) const;

private:
    PrototypeModel model_;
    double threshold_ = 0.0;
    std::vector<std::string> warnings_;
};

Classification classify(const PrototypeModel& model, const Bpa& evidence);

struct StreamResult {
    std::string evidence_id;
    std::optional<Classification> result;
    std::string error;  // set when result is empty
};

// Per-item errors are reported in place; the stream continues.
std::vector<StreamResult> classify_stream(const Classifier& classifier,
                                          std::span<const Bpa> evidence);

}  // namespace dsproto
