#include "dsproto/io.hpp"

#include <fstream>
#include <iostream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace dsproto::io {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kPartitionFormat = "dsproto-partition";
constexpr const char* kModelFormat = "dsproto-model";
constexpr int kPartitionVersion = 1;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

json parse_line(std::string_view text, std::size_t line) {
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw ParseError(line, "expected a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
}

json parse_document(std::istream& in, const std::string& what) {
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw ParseError(0, what + ": expected a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(0, what + ": malformed JSON: " + e.what());
    }
}

bool is_header(const json& j) { return j.contains("frame") && !j.contains("id"); }

std::vector<std::string> string_list(const json& j, std::size_t line, const std::string& what) {
    if (!j.is_array()) throw ParseError(line, what + " must be a list of strings");
    std::vector<std::string> out;
    for (const json& item : j) {
        if (!item.is_string()) throw ParseError(line, what + " must be a list of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

FramePtr header_frame(const json& j, std::size_t line) {
    try {
        return Frame::make(string_list(j.at("frame"), line, "frame"));
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ParseError(line, e.what());
    }
}

std::string record_id(const json& j, std::size_t line) {
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
        throw ParseError(line, "record needs a non-empty string \"id\"");
    }
    return j["id"].get<std::string>();
}

const json& record_masses(const json& j, std::size_t line) {
    if (!j.contains("masses") || !j["masses"].is_array() || j["masses"].empty()) {
        throw ParseError(line, "record needs a non-empty \"masses\" list");
    }
    return j["masses"];
}

// Labels named by a record, in order; "*" contributes none.
void collect_labels(const json& j, std::size_t line, std::vector<std::string>& labels,
                    std::unordered_set<std::string>& seen) {
    for (const json& entry : record_masses(j, line)) {
        if (!entry.is_object() || !entry.contains("focal")) {
            throw ParseError(line, "mass entry needs \"focal\" and \"mass\"");
        }
        const json& focal = entry["focal"];
        if (focal.is_string() && focal.get<std::string>() == "*") continue;
        for (const std::string& label : string_list(focal, line, "focal")) {
            if (seen.insert(label).second) labels.push_back(label);
        }
    }
}

Bpa record_bpa(const json& j, const FramePtr& frame, std::size_t line) {
    std::string id = record_id(j, line);
    std::vector<FocalMass> entries;
    for (const json& entry : record_masses(j, line)) {
        if (!entry.is_object() || !entry.contains("focal") || !entry.contains("mass")) {
            throw ParseError(line, "mass entry needs \"focal\" and \"mass\"");
        }
        if (!entry["mass"].is_number()) throw ParseError(line, "\"mass\" must be a number");
        const json& focal = entry["focal"];
        FocalSet set = 0;
        try {
            if (focal.is_string()) {
                if (focal.get<std::string>() != "*") {
                    throw ParseError(line, "\"focal\" must be a label list or \"*\"");
                }
                set = frame->full();
            } else {
                set = frame->encode(string_list(focal, line, "focal"));
            }
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ParseError(line, e.what());
        }
        entries.push_back({set, entry["mass"].get<double>()});
    }
    try {
        return make_bpa(frame, std::move(entries), std::move(id));
    } catch (const ValidationError& e) {
        throw ParseError(line, "evidence '" + j["id"].get<std::string>() + "': " + e.what());
    }
}

Bpa to_target(const Bpa& m, const FramePtr& target, std::size_t line) {
    try {
        return m.reframe(target);
    } catch (const ValidationError& e) {
        throw ParseError(line, e.what());
    }
}

ordered_json focal_json(const Frame& frame, FocalSet set) {
    if (set == frame.full()) return "*";
    return frame.decode(set);
}

ordered_json masses_json(const Bpa& m) {
    ordered_json masses = ordered_json::array();
    for (const FocalMass& fm : m.focal()) {
        masses.push_back({{"focal", focal_json(m.frame(), fm.focal)}, {"mass", fm.mass}});
    }
    return masses;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return in;
}

}  // namespace

EvidenceSet read_evidence(std::istream& in, FramePtr frame) {
    std::vector<std::pair<std::size_t, json>> records;
    FramePtr declared;
    std::string text;
    for (std::size_t line = 1; std::getline(in, text); ++line) {
        const std::string_view body = trim(text);
        if (body.empty()) continue;
        json j = parse_line(body, line);
        if (is_header(j)) {
            if (!records.empty() || declared) throw ParseError(line, "frame header must come first");
            declared = header_frame(j, line);
            continue;
        }
        records.emplace_back(line, std::move(j));
    }

    FramePtr record_frame = declared ? declared : frame;
    if (!record_frame) {
        std::vector<std::string> labels;
        std::unordered_set<std::string> seen;
        for (const auto& [line, j] : records) collect_labels(j, line, labels, seen);
        if (labels.empty()) throw ParseError(0, "cannot infer a frame: no labels in the evidence");
        record_frame = Frame::make(std::move(labels));
    }
    const FramePtr target = frame ? frame : record_frame;

    EvidenceSet out{target, {}};
    out.items.reserve(records.size());
    std::unordered_set<std::string> ids;
    for (const auto& [line, j] : records) {
        Bpa m = record_bpa(j, record_frame, line);
        if (!ids.insert(m.id()).second) throw ParseError(line, "duplicate evidence id '" + m.id() + "'");
        out.items.push_back(to_target(m, target, line));
    }
    return out;
}

EvidenceSet read_evidence_file(const std::string& path, FramePtr frame) {
    if (path == "-") return read_evidence(std::cin, std::move(frame));
    std::ifstream in = open_input(path);
    return read_evidence(in, std::move(frame));
}

void write_evidence(std::ostream& out, const EvidenceSet& evidence) {
    out << ordered_json{{"frame", evidence.frame->labels()}}.dump() << '\n';
    for (const Bpa& m : evidence.items) {
        out << ordered_json{{"id", m.id()}, {"masses", masses_json(m)}}.dump() << '\n';
    }
}

EvidenceReader::EvidenceReader(std::istream& in, FramePtr target)
    : in_(in), target_(std::move(target)) {}

std::optional<EvidenceReader::Record> EvidenceReader::next() {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        const std::string_view body = trim(text);
        if (body.empty()) continue;
        Record rec;
        rec.line = line_;
        try {
            json j = parse_line(body, line_);
            if (is_header(j)) {
                FramePtr declared = header_frame(j, line_);
                for (const std::string& label : declared->labels()) {
                    if (!target_->index_of(label)) {
                        throw ParseError(line_, "header label '" + label + "' is not in the model frame");
                    }
                }
                stream_frame_ = std::move(declared);
                continue;
            }
            if (j.contains("id") && j["id"].is_string()) rec.id = j["id"].get<std::string>();
            const FramePtr& frame = stream_frame_ ? stream_frame_ : target_;
            rec.bpa = to_target(record_bpa(j, frame, line_), target_, line_);
        } catch (const ParseError& e) {
            rec.error = e.what();
        }
        return rec;
    }
    return std::nullopt;
}

DomainPrior read_prior(std::istream& in) {
    const json j = parse_document(in, "prior");
    if (!j.contains("masses") || !j["masses"].is_array()) {
        throw ParseError(0, "prior needs a \"masses\" list");
    }
    std::vector<double> masses;
    for (const json& m : j["masses"]) {
        if (!m.is_number()) throw ParseError(0, "prior masses must be numbers");
        masses.push_back(m.get<double>());
    }
    return DomainPrior(std::move(masses));
}

DomainPrior read_prior_file(const std::string& path) {
    if (path == "-") return read_prior(std::cin);
    std::ifstream in = open_input(path);
    return read_prior(in);
}

void write_prior(std::ostream& out, const DomainPrior& prior) {
    out << ordered_json{{"masses", std::vector<double>(prior.masses().begin(), prior.masses().end())}}.dump()
        << '\n';
}

void write_partition(std::ostream& out, std::span<const Bpa> corpus, const Partition& partition,
                     const PartitionInfo& info) {
    ordered_json subsets = ordered_json::array();
    for (std::size_t s = 0; s < partition.subset_count(); ++s) {
        std::vector<std::string> ids;
        for (std::size_t idx : partition.subsets()[s]) ids.push_back(corpus[idx].id());
        subsets.push_back({{"subset", s + 1}, {"conflict", partition.conflicts()[s]}, {"ids", ids}});
    }
    ordered_json doc{{"format", kPartitionFormat},
                     {"version", kPartitionVersion},
                     {"mcf", info.mcf},
                     {"seed", info.seed},
                     {"restarts", info.restarts},
                     {"subsets", std::move(subsets)}};
    out << doc.dump(2) << '\n';
}

Partition read_partition(std::istream& in, std::span<const Bpa> corpus) {
    const json j = parse_document(in, "partition");
    if (j.value("format", "") != kPartitionFormat) throw ParseError(0, "not a partition file");
    if (j.value("version", -1) != kPartitionVersion) {
        throw ParseError(0, "unsupported partition version");
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < corpus.size(); ++i) index.emplace(corpus[i].id(), i);

    std::vector<std::vector<std::size_t>> subsets;
    for (const json& s : j.at("subsets")) {
        std::vector<std::size_t> members;
        for (const std::string& id : string_list(s.at("ids"), 0, "ids")) {
            const auto it = index.find(id);
            if (it == index.end()) throw ValidationError("partition names unknown evidence '" + id + "'");
            members.push_back(it->second);
        }
        if (members.empty()) throw ValidationError("partition contains an empty subset");
        subsets.push_back(std::move(members));
    }
    return Partition::from_subsets(corpus, std::move(subsets));
}

Partition read_partition_file(const std::string& path, std::span<const Bpa> corpus) {
    if (path == "-") return read_partition(std::cin, corpus);
    std::ifstream in = open_input(path);
    return read_partition(in, corpus);
}

void write_report(std::ostream& out, std::span<const Bpa> corpus, const SpecificationReport& report) {
    for (std::size_t q = 0; q < report.rows.size(); ++q) {
        const SpecificationRow& row = report.rows[q];
        const MetaEvidence& meta = report.meta[q];
        const std::size_t positions = row.pls.size();
        for (std::size_t j = 0; j < positions; ++j) {
            ordered_json rec{{"id", corpus[row.evidence].id()},
                             {"subset", j + 1},
                             {"fresh", j + 1 == positions},
                             {"own", j == row.own_subset},
                             {"against", meta.against[j]},
                             {"in", j == row.own_subset ? meta.in_own : 0.0},
                             {"bel", row.bel[j]},
                             {"pls", row.pls[j]},
                             {"alpha", row.alpha[j]},
                             {"k", row.k}};
            out << rec.dump() << '\n';
        }
    }
}

void write_model(std::ostream& out, const PrototypeModel& model) {
    ordered_json subsets = ordered_json::array();
    for (const SubsetModel& s : model.subsets) {
        subsets.push_back({{"prototypes", s.prototype_ids},
                           {"conflict", s.conflict},
                           {"masses", masses_json(s.combined)}});
    }
    ordered_json doc{
        {"format", kModelFormat},
        {"version", PrototypeModel::kFormatVersion},
        {"frame", model.frame->labels()},
        {"prior", std::vector<double>(model.prior.masses().begin(), model.prior.masses().end())},
        {"n", model.subset_count()},
        {"N", model.budget},
        {"subsets", std::move(subsets)}};
    out << doc.dump(2) << '\n';
}

PrototypeModel read_model(std::istream& in) {
    const json j = parse_document(in, "model");
    if (j.value("format", "") != kModelFormat) throw ParseError(0, "not a model file");
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != PrototypeModel::kFormatVersion) {
        throw ParseError(0, "unsupported model version");
    }
    try {
        FramePtr frame = Frame::make(string_list(j.at("frame"), 0, "frame"));
        DomainPrior prior(j.at("prior").get<std::vector<double>>());
        const auto budget = j.at("N").get<std::size_t>();
        const auto n = j.at("n").get<std::size_t>();
        std::vector<SubsetModel> subsets;
        for (const json& s : j.at("subsets")) {
            json record{{"id", "model"}, {"masses", s.at("masses")}};
            SubsetModel sm{string_list(s.at("prototypes"), 0, "prototypes"),
                           record_bpa(record, frame, 0).with_id({}),
                           s.at("conflict").get<double>()};
            if (!(sm.conflict >= 0.0 && sm.conflict < 1.0)) {
                throw ParseError(0, "subset conflict must lie in [0, 1)");
            }
            subsets.push_back(std::move(sm));
        }
        if (subsets.size() != n) throw ParseError(0, "subset count does not match \"n\"");
        if (budget < 1) throw ParseError(0, "\"N\" must be at least 1");
        return PrototypeModel{std::move(frame), std::move(prior), budget, std::move(subsets)};
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("model: ") + e.what());
    }
}

PrototypeModel read_model_file(const std::string& path) {
    if (path == "-") return read_model(std::cin);
    std::ifstream in = open_input(path);
    return read_model(in);
}

std::string classification_record(const StreamResult& item) {
    if (!item.result) return error_record(item.evidence_id, item.error);
    const Classification& c = *item.result;
    ordered_json rec{{"id", c.evidence_id}};
    if (c.outcome == Outcome::assigned) {
        rec["outcome"] = "assigned";
        rec["subset"] = c.subset + 1;
    } else {
        rec["outcome"] = "rejected";
    }
    rec["scores"] = c.scores;
    rec["threshold"] = c.threshold;
    rec["micros"] = std::chrono::duration<double, std::micro>(c.elapsed).count();
    return rec.dump();
}

std::string error_record(std::string_view id, std::string_view error) {
    ordered_json rec{{"id", id.empty() ? ordered_json(nullptr) : ordered_json(std::string(id))},
                     {"error", std::string(error)}};
    return rec.dump();
}

}  // namespace dsproto::io
