#include "dsproto/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dsproto/random.hpp"
#include "json.hpp"

namespace dsproto::synth {

namespace {

void check_spec(const GeneratorSpec& spec) {
    if (spec.events < 1) throw ValidationError("generator needs at least one event");
    if (spec.count < 1) throw ValidationError("generator needs a positive evidence count");
    if (spec.labels < spec.events) throw ValidationError("generator needs at least one label per event");
    if (spec.labels > kMaxFrameSize) {
        throw ValidationError("generator frame exceeds " + std::to_string(kMaxFrameSize) + " labels");
    }
    if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) throw ValidationError("noise must lie in [0, 1]");
    if (!(spec.nonspecificity >= 0.0 && spec.nonspecificity <= 1.0)) {
        throw ValidationError("nonspecificity must lie in [0, 1]");
    }
}

}  // namespace

GeneratedCorpus generate(const GeneratorSpec& spec) {
    check_spec(spec);
    Rng rng = make_rng(spec.seed, stream::generator);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= spec.labels; ++i) labels.push_back("h" + std::to_string(i));
    const FramePtr frame = Frame::make(std::move(labels));

    // Block e covers labels [begin[e], begin[e + 1]).
    std::vector<std::size_t> begin(spec.events + 1, 0);
    for (std::size_t e = 0; e < spec.events; ++e) {
        begin[e + 1] = begin[e] + spec.labels / spec.events + (e < spec.labels % spec.events ? 1 : 0);
    }

    GeneratedCorpus out;
    out.evidence.frame = frame;
    std::vector<FocalSet> core(spec.events), block(spec.events);
    std::vector<double> support(spec.events);
    for (std::size_t e = 0; e < spec.events; ++e) {
        const std::size_t size = begin[e + 1] - begin[e];
        const auto width = 1 + static_cast<std::size_t>(
                                   std::lround(spec.nonspecificity * static_cast<double>(size - 1)));
        for (std::size_t i = begin[e]; i < begin[e + 1]; ++i) {
            block[e] |= FocalSet{1} << i;
            if (i < begin[e] + width) core[e] |= FocalSet{1} << i;
        }
        support[e] = 0.6 + 0.3 * unit(rng);
        out.ground_truth.push_back(
            make_bpa(frame, {{core[e], support[e]}, {frame->full(), 1.0 - support[e]}},
                     "truth" + std::to_string(e + 1)));
    }

    out.event_of.resize(spec.count);
    for (std::size_t q = 0; q < spec.count; ++q) out.event_of[q] = q % spec.events;
    std::shuffle(out.event_of.begin(), out.event_of.end(), rng);

    for (std::size_t q = 0; q < spec.count; ++q) {
        const std::size_t e = out.event_of[q];
        std::string id = "e" + std::to_string(q + 1);
        if (spec.noise == 0.0) {
            out.evidence.items.push_back(out.ground_truth[e].with_id(std::move(id)));
            continue;
        }
        const double s = std::clamp(support[e] + spec.noise * 0.6 * (unit(rng) - 0.5), 0.05, 0.95);
        std::vector<FocalMass> entries{{core[e], s}, {frame->full(), 1.0 - s}};
        const std::size_t outside = spec.labels - (begin[e + 1] - begin[e]);
        if (outside > 0 && unit(rng) < spec.noise / 2.0) {
            auto pick = std::uniform_int_distribution<std::size_t>(0, outside - 1)(rng);
            std::size_t label = 0;
            for (; label < spec.labels; ++label) {
                if (block[e] & (FocalSet{1} << label)) continue;
                if (pick-- == 0) break;
            }
            const double stray = s * spec.noise * (0.2 + 0.4 * unit(rng));
            entries[0].mass = s - stray;
            entries.push_back({FocalSet{1} << label, stray});
        }
        out.evidence.items.push_back(make_bpa(frame, std::move(entries), std::move(id)));
    }
    return out;
}

void write_truth(std::ostream& out, const GeneratedCorpus& corpus) {
    for (std::size_t q = 0; q < corpus.evidence.items.size(); ++q) {
        nlohmann::ordered_json rec{{"id", corpus.evidence.items[q].id()},
                                   {"event", corpus.event_of[q] + 1}};
        out << rec.dump() << '\n';
    }
}

}  // namespace dsproto::synth
