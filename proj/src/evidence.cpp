#include "dsproto/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace dsproto {

struct BpaAccess {
    static Bpa make(FramePtr frame, std::vector<FocalMass> focal, std::string id = {}) {
        return Bpa(std::move(frame), std::move(focal), std::move(id));
    }
};

namespace {

bool is_reserved_label(std::string_view label) { return label == "*"; }

void check_same_frame(const Bpa& a, const Bpa& b) {
    if (!same_frame(a.frame_ptr(), b.frame_ptr())) throw FrameMismatchError();
}

// Sorts by focal set and sums duplicates. Stable, so duplicate masses are
// summed in the order they were produced.
void merge_sorted(std::vector<FocalMass>& entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const FocalMass& x, const FocalMass& y) { return x.focal < y.focal; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (out > 0 && entries[out - 1].focal == entries[i].focal) {
            entries[out - 1].mass += entries[i].mass;
        } else {
            entries[out++] = entries[i];
        }
    }
    entries.resize(out);
}

struct RawCombination {
    std::vector<FocalMass> normalized;
    double conflict = 0.0;
    bool total = false;
};

RawCombination raw_combine(const Bpa& a, const Bpa& b) {
    RawCombination raw;
    std::vector<FocalMass> products;
    products.reserve(a.focal_count() * b.focal_count());
    for (const FocalMass& x : a.focal()) {
        for (const FocalMass& y : b.focal()) {
            const double p = x.mass * y.mass;
            const FocalSet s = x.focal & y.focal;
            if (s == 0) {
                raw.conflict += p;
            } else {
                products.push_back({s, p});
            }
        }
    }
    merge_sorted(products);

    double total = 0.0;
    for (const FocalMass& fm : products) total += fm.mass;
    if (products.empty() || !(total > 0.0)) {
        raw.total = true;
        raw.conflict = 1.0;
        return raw;
    }

    bool pruned = false;
    std::size_t out = 0;
    for (const FocalMass& fm : products) {
        const double m = fm.mass / total;
        if (m < kPruneThreshold) {
            pruned = true;
            continue;
        }
        products[out++] = {fm.focal, m};
    }
    products.resize(out);
    if (pruned) {
        double kept = 0.0;
        for (const FocalMass& fm : products) kept += fm.mass;
        for (FocalMass& fm : products) fm.mass /= kept;
    }
    raw.normalized = std::move(products);
    return raw;
}

}  // namespace

Frame::Frame(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("frame must contain at least one label");
    if (labels_.size() > kMaxFrameSize) {
        throw ValidationError("frame has " + std::to_string(labels_.size()) +
                              " labels; the maximum is " + std::to_string(kMaxFrameSize));
    }
    std::unordered_set<std::string_view> seen;
    for (const std::string& label : labels_) {
        if (label.empty()) throw ValidationError("frame labels must be non-empty");
        if (is_reserved_label(label)) throw ValidationError("'*' is reserved for the full frame");
        if (!seen.insert(label).second) throw ValidationError("duplicate frame label '" + label + "'");
    }
    full_ = labels_.size() == 64 ? ~FocalSet{0} : ((FocalSet{1} << labels_.size()) - 1);
}

std::shared_ptr<const Frame> Frame::make(std::vector<std::string> labels) {
    return std::make_shared<const Frame>(std::move(labels));
}

std::optional<std::size_t> Frame::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) return i;
    }
    return std::nullopt;
}

FocalSet Frame::encode(std::span<const std::string> labels) const {
    FocalSet set = 0;
    for (const std::string& label : labels) {
        const auto idx = index_of(label);
        if (!idx) throw ValidationError("label '" + label + "' is not in the frame");
        set |= FocalSet{1} << *idx;
    }
    return set;
}

std::vector<std::string> Frame::decode(FocalSet set) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (set & (FocalSet{1} << i)) out.push_back(labels_[i]);
    }
    return out;
}

bool same_frame(const FramePtr& a, const FramePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

Bpa make_bpa(FramePtr frame, std::vector<FocalMass> entries, std::string id) {
    if (!frame) throw ValidationError("BPA requires a frame");
    if (entries.empty()) throw ValidationError("BPA requires at least one focal element");
    for (const FocalMass& fm : entries) {
        if (fm.focal == 0) throw ValidationError("empty focal element");
        if (!frame->contains(fm.focal)) throw ValidationError("focal element outside the frame");
        if (!std::isfinite(fm.mass)) throw ValidationError("non-finite mass");
        if (fm.mass < 0.0) throw ValidationError("negative mass");
    }
    merge_sorted(entries);
    std::erase_if(entries, [](const FocalMass& fm) { return fm.mass == 0.0; });
    double sum = 0.0;
    for (const FocalMass& fm : entries) sum += fm.mass;
    if (entries.empty() || std::abs(sum - 1.0) > kMassTolerance) {
        throw ValidationError("masses sum to " + std::to_string(sum) + ", expected 1");
    }
    return Bpa(std::move(frame), std::move(entries), std::move(id));
}

Bpa make_bpa(FramePtr frame,
             const std::vector<std::pair<std::vector<std::string>, double>>& entries,
             std::string id) {
    if (!frame) throw ValidationError("BPA requires a frame");
    std::vector<FocalMass> encoded;
    encoded.reserve(entries.size());
    for (const auto& [labels, mass] : entries) {
        encoded.push_back({frame->encode(labels), mass});
    }
    return make_bpa(std::move(frame), std::move(encoded), std::move(id));
}

Bpa Bpa::vacuous(FramePtr frame, std::string id) {
    if (!frame) throw ValidationError("BPA requires a frame");
    const FocalSet full = frame->full();
    return Bpa(std::move(frame), {{full, 1.0}}, std::move(id));
}

Bpa Bpa::with_id(std::string id) const { return Bpa(frame_, focal_, std::move(id)); }

double Bpa::mass(FocalSet set) const {
    for (const FocalMass& fm : focal_) {
        if (fm.focal == set) return fm.mass;
    }
    return 0.0;
}

double Bpa::belief(FocalSet set) const {
    double sum = 0.0;
    for (const FocalMass& fm : focal_) {
        if ((fm.focal & ~set) == 0) sum += fm.mass;
    }
    return sum;
}

double Bpa::plausibility(FocalSet set) const {
    double sum = 0.0;
    for (const FocalMass& fm : focal_) {
        if ((fm.focal & set) != 0) sum += fm.mass;
    }
    return sum;
}

double Bpa::total_mass() const {
    double sum = 0.0;
    for (const FocalMass& fm : focal_) sum += fm.mass;
    return sum;
}

bool Bpa::is_vacuous() const { return focal_.size() == 1 && focal_[0].focal == frame_->full(); }

Bpa Bpa::reframe(FramePtr target) const {
    if (!target) throw ValidationError("reframe requires a target frame");
    if (same_frame(frame_, target)) return Bpa(std::move(target), focal_, id_);
    std::vector<FocalSet> bit_map(frame_->size());
    for (std::size_t i = 0; i < frame_->size(); ++i) {
        const auto idx = target->index_of(frame_->labels()[i]);
        if (!idx) {
            throw FrameMismatchError("label '" + frame_->labels()[i] +
                                     "' is not in the target frame");
        }
        bit_map[i] = FocalSet{1} << *idx;
    }
    std::vector<FocalMass> mapped;
    mapped.reserve(focal_.size());
    for (const FocalMass& fm : focal_) {
        FocalSet s = 0;
        for (std::size_t i = 0; i < bit_map.size(); ++i) {
            if (fm.focal & (FocalSet{1} << i)) s |= bit_map[i];
        }
        mapped.push_back({s, fm.mass});
    }
    merge_sorted(mapped);
    return Bpa(std::move(target), std::move(mapped), id_);
}

std::optional<CombinationResult> try_combine(const Bpa& a, const Bpa& b) {
    check_same_frame(a, b);
    if (b.is_vacuous()) return CombinationResult{BpaAccess::make(a.frame_ptr(), {a.focal().begin(), a.focal().end()}), 0.0};
    if (a.is_vacuous()) return CombinationResult{BpaAccess::make(a.frame_ptr(), {b.focal().begin(), b.focal().end()}), 0.0};
    RawCombination raw = raw_combine(a, b);
    if (raw.total) return std::nullopt;
    return CombinationResult{BpaAccess::make(a.frame_ptr(), std::move(raw.normalized)),
                             raw.conflict};
}

CombinationResult conjunctive_combine(const Bpa& a, const Bpa& b) {
    auto result = try_combine(a, b);
    if (!result) throw TotalConflictError();
    return std::move(*result);
}

double conflict_between(const Bpa& a, const Bpa& b) {
    check_same_frame(a, b);
    double k = 0.0;
    bool overlap = false;
    for (const FocalMass& x : a.focal()) {
        for (const FocalMass& y : b.focal()) {
            // Branch-free: disjointness is data dependent and mispredicts.
            // Adding 0.0 for overlapping pairs leaves the sum unchanged.
            const bool disjoint = (x.focal & y.focal) == 0;
            k += static_cast<double>(disjoint) * (x.mass * y.mass);
            overlap |= !disjoint;
        }
    }
    return overlap ? k : 1.0;
}

CombinationResult combine_all(const FramePtr& frame, std::span<const Bpa> evidence) {
    Accumulator acc(frame);
    for (const Bpa& m : evidence) acc.add(m);
    return acc.result();
}

double joint_conflict(const FramePtr& frame, std::span<const Bpa> evidence) {
    Accumulator acc(frame);
    for (const Bpa& m : evidence) {
        acc.add(m);
        if (acc.total()) break;
    }
    return acc.conflict();
}

Bpa discount(const Bpa& m, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("discount rate must lie in [0, 1]");
    const FocalSet full = m.frame().full();
    std::vector<FocalMass> out;
    out.reserve(m.focal_count() + 1);
    bool has_full = false;
    for (const FocalMass& fm : m.focal()) {
        if (fm.focal == full) {
            out.push_back({full, alpha * fm.mass + (1.0 - alpha)});
            has_full = true;
        } else if (alpha * fm.mass > 0.0) {
            out.push_back({fm.focal, alpha * fm.mass});
        }
    }
    if (!has_full && alpha < 1.0) out.push_back({full, 1.0 - alpha});
    return BpaAccess::make(m.frame_ptr(), std::move(out), m.id());
}

Accumulator::Accumulator(FramePtr frame) : frame_(frame), combined_(Bpa::vacuous(std::move(frame))) {}

void Accumulator::add(const Bpa& m) {
    if (!same_frame(frame_, m.frame_ptr())) throw FrameMismatchError();
    ++count_;
    if (total_ || m.is_vacuous()) return;
    if (combined_.is_vacuous()) {
        combined_ = BpaAccess::make(frame_, {m.focal().begin(), m.focal().end()});
        return;
    }
    RawCombination raw = raw_combine(combined_, m);
    if (raw.total) {
        total_ = true;
        return;
    }
    survival_ *= 1.0 - raw.conflict;
    combined_ = BpaAccess::make(frame_, std::move(raw.normalized));
}

void Accumulator::merge(const Accumulator& other) {
    if (!same_frame(frame_, other.frame_)) throw FrameMismatchError();
    const double other_survival = other.survival_;
    const bool other_total = other.total_;
    const std::size_t other_count = other.count_;
    if (other_total) {
        total_ = true;
    } else {
        add(other.combined_);
        --count_;
        survival_ *= other_survival;
    }
    count_ += other_count;
}

const Bpa& Accumulator::combined() const {
    if (total_) throw TotalConflictError();
    return combined_;
}

CombinationResult Accumulator::result() const { return {combined(), conflict()}; }

double Accumulator::conflict_with(const Bpa& m) const { return 1.0 - survival_with(m); }

double Accumulator::survival_with(const Bpa& m) const {
    if (total_) return 0.0;
    const double k = conflict_between(combined_, m);
    if (k >= 1.0) return 0.0;
    return survival_ * (1.0 - k);
}

}  // namespace dsproto
