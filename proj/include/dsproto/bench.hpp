#pragma once
// Front/back comparison. The training split is clustered once and turned
// into a prototype model; every held-out item is then classified twice:
// against the model (front process), and by re-clustering the training
// split with the item added (back process). A re-clustered subset is matched
// to the model subset sharing the most training ids; an item that lands in
// a subset with no training ids counts as rejected.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsproto/classifier.hpp"
#include "dsproto/evidence.hpp"
#include "dsproto/partition.hpp"

namespace dsproto {

struct BenchConfig {
    std::size_t budget = kDefaultBudget;
    double holdout = 0.2;
    std::uint64_t seed = 0;
    std::size_t restarts = 20;
    std::optional<std::size_t> max_subsets;
};

struct LatencyStats {
    double mean_us = 0.0;
    double median_us = 0.0;
    double p95_us = 0.0;
    double max_us = 0.0;
};

LatencyStats summarize_latency(std::vector<double> micros);

struct BenchItem {
    std::string id;
    Classification prototype;
    Outcome recluster_outcome = Outcome::rejected;
    std::size_t recluster_subset = 0;
    double recluster_us = 0.0;
    bool agree = false;
};

struct BenchReport {
    std::size_t training_size = 0;
    std::size_t holdout_size = 0;
    std::size_t subsets = 0;
    double training_mcf = 0.0;
    double threshold = 0.0;
    std::size_t agreements = 0;
    double agreement_rate = 0.0;
    double chance_rate = 0.0;
    std::vector<BenchItem> items;
    LatencyStats prototype_latency;
    LatencyStats recluster_latency;
    std::vector<std::string> warnings;
};

BenchReport run_bench(std::span<const Bpa> corpus, const DomainPrior& prior,
                      const BenchConfig& config);

// Writes the report as JSON. Latency fields are wall-clock measurements;
// everything else is a function of the inputs and the seed.
void write_bench_report(std::ostream& out, const BenchReport& report);

}  // namespace dsproto
