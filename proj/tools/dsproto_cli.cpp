// dsproto: cluster nonspecific evidence, build prototypes, classify streams.
//
// Exit codes: 0 success, 2 malformed input or usage, 3 total conflict,
// 4 a subset without prototypes, 1 anything else.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dsproto/bench.hpp"
#include "dsproto/classifier.hpp"
#include "dsproto/io.hpp"
#include "dsproto/metalevel.hpp"
#include "dsproto/partition.hpp"
#include "dsproto/prototypes.hpp"
#include "dsproto/synth.hpp"

namespace {

using namespace dsproto;

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kTotalConflict = 3, kUnrepresentable = 4 };

// Whole-document outputs are written only once complete, so a failing
// command leaves no partial file behind.
void emit(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw ValidationError("failed writing '" + path + "'");
}

struct Options {
    std::string evidence;
    std::string prior;
    std::string partition;
    std::string model;
    std::string out = "-";
    std::string truth;
    std::size_t budget = kDefaultBudget;
    std::size_t restarts = 20;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_subsets;
    std::string init = "random";
    double holdout = 0.2;
    synth::GeneratorSpec gen;
};

int run_cluster(const Options& opt) {
    const EvidenceSet evidence = io::read_evidence_file(opt.evidence);
    const DomainPrior prior = io::read_prior_file(opt.prior);
    SearchConfig config{opt.restarts, opt.seed, opt.max_subsets,
                        opt.init == "singleton-greedy" ? InitStrategy::singleton_greedy
                                                       : InitStrategy::random};
    const SearchResult result = minimize_metaconflict(evidence.items, prior, config);
    std::ostringstream text;
    io::write_partition(text, evidence.items, result.partition, {result.mcf, opt.seed, opt.restarts});
    emit(opt.out, text.str());
    std::cerr << "subsets: " << result.partition.subset_count() << "  Mcf: " << std::setprecision(17)
              << result.mcf << '\n';
    return kOk;
}

int run_specify(const Options& opt) {
    const EvidenceSet evidence = io::read_evidence_file(opt.evidence);
    const DomainPrior prior = io::read_prior_file(opt.prior);
    const Partition partition = io::read_partition_file(opt.partition, evidence.items);
    const SpecificationReport report = specify_all(evidence.items, prior, partition);
    std::ostringstream text;
    io::write_report(text, evidence.items, report);
    emit(opt.out, text.str());
    return kOk;
}

int run_prototypes(const Options& opt) {
    const EvidenceSet evidence = io::read_evidence_file(opt.evidence);
    const DomainPrior prior = io::read_prior_file(opt.prior);
    const Partition partition = io::read_partition_file(opt.partition, evidence.items);
    if (opt.budget > evidence.items.size()) {
        std::cerr << "warning: N = " << opt.budget << " exceeds the corpus size "
                  << evidence.items.size() << "; every nominee is kept\n";
    }
    const ModelBuild build = build_model(evidence.items, partition, prior, opt.budget);
    std::ostringstream text;
    io::write_model(text, build.model);
    emit(opt.out, text.str());

    for (const std::string& w : build.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << std::setprecision(6);
    for (std::size_t j = 0; j < build.chosen.size(); ++j) {
        std::cerr << "subset " << j + 1 << "  c = " << build.model.subsets[j].conflict << "  prototypes:";
        for (const PotentialPrototype& p : build.chosen[j]) {
            std::cerr << ' ' << evidence.items[p.evidence].id() << " (alpha " << p.credibility << ')';
        }
        std::cerr << '\n';
    }
    return kOk;
}

int run_classify(const Options& opt) {
    const Classifier classifier(io::read_model_file(opt.model));
    for (const std::string& w : classifier.warnings()) std::cerr << "warning: " << w << '\n';

    std::ifstream file;
    std::istream* in = &std::cin;
    if (opt.evidence != "-") {
        file.open(opt.evidence);
        if (!file) throw ValidationError("cannot open '" + opt.evidence + "'");
        in = &file;
    }
    std::ofstream out_file;
    std::ostream* out = &std::cout;
    if (opt.out != "-") {
        out_file.open(opt.out, std::ios::binary | std::ios::trunc);
        if (!out_file) throw ValidationError("cannot write '" + opt.out + "'");
        out = &out_file;
    }

    io::EvidenceReader reader(*in, classifier.model().frame);
    while (auto rec = reader.next()) {
        if (!rec->bpa) {
            *out << io::error_record(rec->id, rec->error) << '\n';
            continue;
        }
        StreamResult item{rec->id, std::nullopt, {}};
        try {
            item.result = classifier.classify(*rec->bpa);
        } catch (const std::exception& e) {
            item.error = e.what();
        }
        *out << io::classification_record(item) << '\n';
        if (out == &std::cout) out->flush();
    }
    return kOk;
}

int run_gen(const Options& opt) {
    const synth::GeneratedCorpus corpus = synth::generate(opt.gen);
    std::ostringstream text;
    io::write_evidence(text, corpus.evidence);
    std::string truth_path = opt.truth;
    if (truth_path.empty() && opt.out != "-") truth_path = opt.out + ".truth";
    std::ostringstream truth;
    synth::write_truth(truth, corpus);
    emit(opt.out, text.str());
    if (!truth_path.empty()) emit(truth_path, truth.str());
    return kOk;
}

int run_bench(const Options& opt) {
    const EvidenceSet evidence = io::read_evidence_file(opt.evidence);
    const DomainPrior prior = io::read_prior_file(opt.prior);
    BenchConfig config{opt.budget, opt.holdout, opt.seed, opt.restarts, opt.max_subsets};
    const BenchReport report = dsproto::run_bench(evidence.items, prior, config);
    std::ostringstream text;
    write_bench_report(text, report);
    emit(opt.out, text.str());
    std::cerr << "agreement: " << report.agreements << '/' << report.holdout_size << "  prototype mean "
              << report.prototype_latency.mean_us << " us  recluster mean "
              << report.recluster_latency.mean_us << " us\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dempster-Shafer evidence clustering with prototype classification"};
    app.require_subcommand(1);
    Options opt;

    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", opt.out, "Output path, '-' for stdout")->capture_default_str();
    };
    auto add_search = [&](CLI::App* cmd) {
        cmd->add_option("--restarts", opt.restarts, "Random restarts")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
        cmd->add_option("--max-subsets", opt.max_subsets, "Cap on the number of subsets")->check(CLI::PositiveNumber);
    };

    auto* cluster = app.add_subcommand("cluster", "Partition evidence by minimizing metaconflict");
    cluster->add_option("--evidence", opt.evidence, "Evidence file")->required();
    cluster->add_option("--prior", opt.prior, "Prior over the number of subsets")->required();
    cluster->add_option("--init", opt.init, "Initialization")
        ->capture_default_str()
        ->check(CLI::IsMember({"random", "singleton-greedy"}));
    add_search(cluster);
    add_out(cluster);

    auto* specify = app.add_subcommand("specify", "Bel, Pls and credibility per evidence and subset");
    specify->add_option("--evidence", opt.evidence, "Evidence file")->required();
    specify->add_option("--partition", opt.partition, "Partition file")->required();
    specify->add_option("--prior", opt.prior, "Prior file")->required();
    add_out(specify);

    auto* prototypes = app.add_subcommand("prototypes", "Select N prototypes per subset and write a model");
    prototypes->add_option("--evidence", opt.evidence, "Evidence file")->required();
    prototypes->add_option("--partition", opt.partition, "Partition file")->required();
    prototypes->add_option("--prior", opt.prior, "Prior file")->required();
    prototypes->add_option("--n", opt.budget, "Prototypes per subset")->capture_default_str()->check(CLI::PositiveNumber);
    add_out(prototypes);

    auto* classify = app.add_subcommand("classify", "Classify an evidence stream against a model");
    classify->add_option("--model", opt.model, "Model file")->required();
    opt.evidence = "-";
    classify->add_option("--evidence", opt.evidence, "Evidence stream, '-' for stdin")->capture_default_str();
    add_out(classify);

    auto* gen = app.add_subcommand("gen", "Generate a seeded synthetic corpus");
    gen->add_option("--labels", opt.gen.labels, "Frame size")->capture_default_str();
    gen->add_option("--events", opt.gen.events, "Number of events")->capture_default_str();
    gen->add_option("--count", opt.gen.count, "Number of evidence")->capture_default_str();
    gen->add_option("--noise", opt.gen.noise, "Mass noise in [0, 1]")->capture_default_str();
    gen->add_option("--nonspecificity", opt.gen.nonspecificity, "Focal widening in [0, 1]")->capture_default_str();
    gen->add_option("--seed", opt.gen.seed, "Random seed")->capture_default_str();
    gen->add_option("--truth", opt.truth, "Ground-truth sidecar (default <out>.truth)");
    add_out(gen);

    auto* bench = app.add_subcommand("bench", "Compare prototype classification with full re-clustering");
    bench->add_option("--evidence", opt.evidence, "Evidence file")->required();
    bench->add_option("--prior", opt.prior, "Prior file")->required();
    bench->add_option("--n", opt.budget, "Prototypes per subset")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--holdout", opt.holdout, "Held-out fraction")->capture_default_str();
    add_search(bench);
    add_out(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (cluster->parsed()) return run_cluster(opt);
        if (specify->parsed()) return run_specify(opt);
        if (prototypes->parsed()) return run_prototypes(opt);
        if (classify->parsed()) return run_classify(opt);
        if (gen->parsed()) return run_gen(opt);
        if (bench->parsed()) return run_bench(opt);
    } catch (const UnrepresentableSubsetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUnrepresentable;
    } catch (const TotalConflictError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kTotalConflict;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
