#pragma once
// Text formats. Evidence, specification reports and classifications are
// JSON Lines (one record per line) so they can be streamed through pipes;
// priors, partitions and models are single JSON documents.
//
//   evidence:  {"frame": ["A", "B", "C"]}                       optional header
//              {"id": "e1", "masses": [{"focal": ["A"], "mass": 0.6},
//                                      {"focal": "*", "mass": 0.4}]}
//   prior:     {"masses": [m(E_0), m(E_1), ..., m(E_M)]}
//
// "*" stands for the whole frame. Doubles are written in shortest
// round-trip form, so every stored mass reads back bit-identical.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsproto/classifier.hpp"
#include "dsproto/evidence.hpp"
#include "dsproto/metalevel.hpp"
#include "dsproto/partition.hpp"
#include "dsproto/prototypes.hpp"

namespace dsproto::io {

class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& message)
        : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Without a header and without `frame`, the frame is every label in order
// of first appearance. With `frame`, records must use a subset of its
// labels and are re-expressed on it.
EvidenceSet read_evidence(std::istream& in, FramePtr frame = nullptr);
EvidenceSet read_evidence_file(const std::string& path, FramePtr frame = nullptr);
void write_evidence(std::ostream& out, const EvidenceSet& evidence);

// Incremental reader for classification streams. Each call returns the next
// record (or nullopt at end of input); a header line switches the stream's
// frame, which must be a subset of the target frame.
class EvidenceReader {
public:
    EvidenceReader(std::istream& in, FramePtr target);

    struct Record {
        std::size_t line = 0;
        std::string id;
        std::optional<Bpa> bpa;
        std::string error;
    };

    std::optional<Record> next();

private:
    std::istream& in_;
    FramePtr target_;
    FramePtr stream_frame_;
    std::size_t line_ = 0;
};

DomainPrior read_prior(std::istream& in);
DomainPrior read_prior_file(const std::string& path);
void write_prior(std::ostream& out, const DomainPrior& prior);

struct PartitionInfo {
    double mcf = 0.0;
    std::uint64_t seed = 0;
    std::size_t restarts = 0;
};

void write_partition(std::ostream& out, std::span<const Bpa> corpus, const Partition& partition,
                     const PartitionInfo& info);
Partition read_partition(std::istream& in, std::span<const Bpa> corpus);
Partition read_partition_file(const std::string& path, std::span<const Bpa> corpus);

void write_report(std::ostream& out, std::span<const Bpa> corpus, const SpecificationReport& report);

void write_model(std::ostream& out, const PrototypeModel& model);
PrototypeModel read_model(std::istream& in);
PrototypeModel read_model_file(const std::string& path);

std::string classification_record(const StreamResult& item);
std::string error_record(std::string_view id, std::string_view error);

}  // namespace dsproto::io
