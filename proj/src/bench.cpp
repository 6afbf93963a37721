#include "dsproto/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dsproto/prototypes.hpp"
#include "dsproto/random.hpp"
#include "json.hpp"

namespace dsproto {

LatencyStats summarize_latency(std::vector<double> micros) {
    LatencyStats stats;
    if (micros.empty()) return stats;
    std::sort(micros.begin(), micros.end());
    stats.mean_us = std::accumulate(micros.begin(), micros.end(), 0.0) / static_cast<double>(micros.size());
    stats.median_us = micros[micros.size() / 2];
    stats.p95_us = micros[std::min(micros.size() - 1,
                                   static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(micros.size()))) - 1)];
    stats.max_us = micros.back();
    return stats;
}

BenchReport run_bench(std::span<const Bpa> corpus, const DomainPrior& prior,
                      const BenchConfig& config) {
    if (corpus.size() < 2) throw ValidationError("bench needs at least two evidence");
    if (!(config.holdout > 0.0 && config.holdout < 1.0)) {
        throw ValidationError("holdout fraction must lie in (0, 1)");
    }
    const auto holdout_count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(config.holdout * static_cast<double>(corpus.size()))), 1,
        corpus.size() - 1);

    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng = make_rng(config.seed, stream::bench_split);
    std::shuffle(order.begin(), order.end(), split_rng);
    std::vector<std::size_t> held(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout_count));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(holdout_count), order.end());
    std::sort(held.begin(), held.end());
    std::sort(train.begin(), train.end());

    std::vector<Bpa> training;
    training.reserve(train.size() + 1);
    for (std::size_t idx : train) training.push_back(corpus[idx]);

    SearchConfig search{config.restarts, config.seed, config.max_subsets, InitStrategy::random};
    const SearchResult clustered = minimize_metaconflict(training, prior, search);
    ModelBuild build = build_model(training, clustered.partition, prior, config.budget);

    BenchReport report;
    report.training_size = training.size();
    report.holdout_size = held.size();
    report.subsets = clustered.partition.subset_count();
    report.training_mcf = clustered.mcf;
    report.chance_rate = 1.0 / static_cast<double>(report.subsets);
    report.warnings = build.warnings;

    // The front process sees the model only.
    const Classifier classifier(std::move(build.model));
    report.threshold = classifier.threshold();
    for (const std::string& w : classifier.warnings()) report.warnings.push_back(w);

    std::vector<double> proto_us, recluster_us;
    for (std::size_t t = 0; t < held.size(); ++t) {
        const Bpa& item = corpus[held[t]];
        BenchItem out;
        out.id = item.id();
        out.prototype = classifier.classify(item);
        proto_us.push_back(std::chrono::duration<double, std::micro>(out.prototype.elapsed).count());

        training.push_back(item);
        SearchConfig again = search;
        again.seed = derive_seed(derive_seed(config.seed, stream::bench_recluster), t);
        const auto start = std::chrono::steady_clock::now();
        const SearchResult redone = minimize_metaconflict(training, prior, again);
        out.recluster_us =
            std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
        recluster_us.push_back(out.recluster_us);

        const std::size_t item_index = training.size() - 1;
        const auto& home = redone.partition.subsets()[redone.partition.subset_of(item_index)];
        std::vector<std::size_t> overlap(report.subsets, 0);
        for (std::size_t idx : home) {
            if (idx != item_index) ++overlap[clustered.partition.subset_of(idx)];
        }
        const auto best = std::max_element(overlap.begin(), overlap.end());
        if (*best == 0) {
            out.recluster_outcome = Outcome::rejected;
        } else {
            out.recluster_outcome = Outcome::assigned;
            out.recluster_subset = static_cast<std::size_t>(best - overlap.begin());
        }
        training.pop_back();

        out.agree = out.prototype.outcome == out.recluster_outcome &&
                    (out.recluster_outcome == Outcome::rejected ||
                     out.prototype.subset == out.recluster_subset);
        if (out.agree) ++report.agreements;
        report.items.push_back(std::move(out));
    }
    report.agreement_rate = static_cast<double>(report.agreements) / static_cast<double>(held.size());
    report.prototype_latency = summarize_latency(std::move(proto_us));
    report.recluster_latency = summarize_latency(std::move(recluster_us));
    return report;
}

namespace {

nlohmann::ordered_json latency_json(const LatencyStats& s) {
    return {{"mean_us", s.mean_us}, {"median_us", s.median_us}, {"p95_us", s.p95_us}, {"max_us", s.max_us}};
}

std::string outcome_name(Outcome o) { return o == Outcome::assigned ? "assigned" : "rejected"; }

}  // namespace

void write_bench_report(std::ostream& out, const BenchReport& report) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json items = ordered_json::array();
    for (const BenchItem& item : report.items) {
        ordered_json proto{{"outcome", outcome_name(item.prototype.outcome)}};
        if (item.prototype.outcome == Outcome::assigned) proto["subset"] = item.prototype.subset + 1;
        proto["scores"] = item.prototype.scores;
        ordered_json redo{{"outcome", outcome_name(item.recluster_outcome)}};
        if (item.recluster_outcome == Outcome::assigned) redo["subset"] = item.recluster_subset + 1;
        items.push_back({{"id", item.id},
                         {"prototype", std::move(proto)},
                         {"recluster", std::move(redo)},
                         {"agree", item.agree},
                         {"prototype_us", std::chrono::duration<double, std::micro>(item.prototype.elapsed).count()},
                         {"recluster_us", item.recluster_us}});
    }
    ordered_json doc{{"training", report.training_size},
                     {"holdout", report.holdout_size},
                     {"subsets", report.subsets},
                     {"training_mcf", report.training_mcf},
                     {"threshold", report.threshold},
                     {"agreements", report.agreements},
                     {"agreement_rate", report.agreement_rate},
                     {"chance_rate", report.chance_rate},
                     {"prototype_latency", latency_json(report.prototype_latency)},
                     {"recluster_latency", latency_json(report.recluster_latency)},
                     {"warnings", report.warnings},
                     {"items", std::move(items)}};
    out << doc.dump(2) << '\n';
}

}  // namespace dsproto
