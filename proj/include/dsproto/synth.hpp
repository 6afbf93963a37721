#pragma once
// Seeded synthetic corpora: several events observed by mixed-up evidence.
//
// The frame's labels are split into one contiguous block per event. An
// event's ground truth is a simple support function on the first labels
// of its block (more of them as `nonspecificity` rises), so ground truths
// of different events never intersect. Evidence is drawn round-robin over
// events, shuffled, and perturbed by `noise`: jittered support and, with
// probability noise/2, a stray share of mass on a label outside the block.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dsproto/evidence.hpp"

namespace dsproto::synth {

struct GeneratorSpec {
    std::size_t labels = 6;
    std::size_t events = 3;
    std::size_t count = 60;
    double noise = 0.0;           // [0, 1]
    double nonspecificity = 0.0;  // [0, 1]
    std::uint64_t seed = 0;
};

struct GeneratedCorpus {
    EvidenceSet evidence;
    std::vector<std::size_t> event_of;  // 0-based event per evidence
    std::vector<Bpa> ground_truth;      // one per event
};

GeneratedCorpus generate(const GeneratorSpec& spec);

// {"id": ..., "event": k} per line, events 1-based.
void write_truth(std::ostream& out, const GeneratedCorpus& corpus);

}  // namespace dsproto::synth
