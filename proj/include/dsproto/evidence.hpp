#pragma once
// Frames of discernment, basic probability assignments and Dempster's rule.
//
// Focal elements are bitmasks over the ordered frame, so intersection is a
// single AND. A BPA keeps its focal elements sorted by mask value; every
// operation below iterates in that order, which makes all results
// bit-for-bit reproducible.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsproto/error.hpp"

#ifndef DSPROTO_MAX_FRAME_SIZE
#define DSPROTO_MAX_FRAME_SIZE 64
#endif

namespace dsproto {

using FocalSet = std::uint64_t;

inline constexpr std::size_t kMaxFrameSize = DSPROTO_MAX_FRAME_SIZE;
static_assert(kMaxFrameSize >= 1 && kMaxFrameSize <= 64,
              "focal sets are encoded in a 64-bit mask");

// Accepted deviation of a BPA's total mass from 1.
inline constexpr double kMassTolerance = 1e-9;
// Combined masses below this are dropped and the rest renormalized.
inline constexpr double kPruneThreshold = 1e-12;

class Frame {
public:
    explicit Frame(std::vector<std::string> labels);

    static std::shared_ptr<const Frame> make(std::vector<std::string> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    FocalSet full() const noexcept { return full_; }

    std::optional<std::size_t> index_of(std::string_view label) const;

    // Throws ValidationError naming the first unknown label.
    FocalSet encode(std::span<const std::string> labels) const;
    std::vector<std::string> decode(FocalSet set) const;

    bool contains(FocalSet set) const noexcept { return (set & ~full_) == 0; }

    friend bool operator==(const Frame& a, const Frame& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
    FocalSet full_ = 0;
};

using FramePtr = std::shared_ptr<const Frame>;

bool same_frame(const FramePtr& a, const FramePtr& b);

struct FocalMass {
    FocalSet focal = 0;
    double mass = 0.0;

    friend bool operator==(const FocalMass&, const FocalMass&) = default;
};

class Bpa;

Bpa make_bpa(FramePtr frame, std::vector<FocalMass> entries, std::string id = {});
Bpa make_bpa(FramePtr frame,
             const std::vector<std::pair<std::vector<std::string>, double>>& entries,
             std::string id = {});

// An immutable mass function. Construct through make_bpa.
class Bpa {
public:
    static Bpa vacuous(FramePtr frame, std::string id = {});

    const Frame& frame() const noexcept { return *frame_; }
    const FramePtr& frame_ptr() const noexcept { return frame_; }
    std::span<const FocalMass> focal() const noexcept { return focal_; }
    std::size_t focal_count() const noexcept { return focal_.size(); }
    const std::string& id() const noexcept { return id_; }

    Bpa with_id(std::string id) const;

    double mass(FocalSet set) const;
    double belief(FocalSet set) const;
    double plausibility(FocalSet set) const;
    double total_mass() const;
    bool is_vacuous() const;

    // Re-express on a larger frame by label name. Labels missing from
    // `target` raise FrameMismatchError.
    Bpa reframe(FramePtr target) const;

private:
    friend Bpa make_bpa(FramePtr, std::vector<FocalMass>, std::string);
    friend class Accumulator;
    friend struct BpaAccess;

    Bpa(FramePtr frame, std::vector<FocalMass> focal, std::string id)
        : frame_(std::move(frame)), focal_(std::move(focal)), id_(std::move(id)) {}

    FramePtr frame_;
    std::vector<FocalMass> focal_;
    std::string id_;
};

// A corpus of evidence on one frame.
struct EvidenceSet {
    FramePtr frame;
    std::vector<Bpa> items;
};

struct CombinationResult {
    Bpa combined;     // normalized
    double conflict;  // empty-set mass before normalization
};

// Dempster's rule. Throws FrameMismatchError, TotalConflictError.
CombinationResult conjunctive_combine(const Bpa& a, const Bpa& b);

// As conjunctive_combine, but total conflict yields nullopt.
std::optional<CombinationResult> try_combine(const Bpa& a, const Bpa& b);

// Conflict only; identical to conjunctive_combine(a, b).conflict.
double conflict_between(const Bpa& a, const Bpa& b);

// Joint combination of any number of BPAs. The reported conflict is the
// empty-set mass of the unnormalized joint combination, i.e.
// 1 - prod(1 - k_step) over any sequential order.
CombinationResult combine_all(const FramePtr& frame, std::span<const Bpa> evidence);

// Joint conflict that saturates at 1 instead of throwing.
double joint_conflict(const FramePtr& frame, std::span<const Bpa> evidence);

Bpa discount(const Bpa& m, double alpha);

// Running joint combination. Once total conflict is reached the
// accumulator saturates: conflict() stays 1 and combined() throws.
class Accumulator {
public:
    explicit Accumulator(FramePtr frame);

    void add(const Bpa& m);
    // Joins another accumulator's evidence into this one.
    void merge(const Accumulator& other);

    double conflict() const noexcept { return total_ ? 1.0 : 1.0 - survival_; }
    // Product of (1 - k_step); the unnormalized non-empty mass.
    double survival() const noexcept { return total_ ? 0.0 : survival_; }
    bool total() const noexcept { return total_; }
    std::size_t count() const noexcept { return count_; }

    const Bpa& combined() const;
    CombinationResult result() const;

    // Conflict of the joint combination if `m` were added.
    double conflict_with(const Bpa& m) const;
    // 1 - conflict_with(m), without the cancellation near total conflict.
    double survival_with(const Bpa& m) const;

private:
    FramePtr frame_;
    Bpa combined_;
    double survival_ = 1.0;
    bool total_ = false;
    std::size_t count_ = 0;
};

}  // namespace dsproto
