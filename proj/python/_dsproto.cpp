#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "dsproto/classifier.hpp"
#include "dsproto/io.hpp"
#include "dsproto/metalevel.hpp"
#include "dsproto/partition.hpp"
#include "dsproto/prototypes.hpp"
#include "dsproto/synth.hpp"

namespace py = pybind11;
using namespace dsproto;

namespace {

// Keys are "*" for the whole frame, a single label, or a sequence of labels.
Bpa bpa_from_dict(const FramePtr& frame, const py::dict& masses, std::string id) {
    std::vector<FocalMass> entries;
    for (auto [key, value] : masses) {
        FocalSet set = 0;
        if (py::isinstance<py::str>(key)) {
            const auto label = key.cast<std::string>();
            if (label == "*") {
                set = frame->full();
            } else {
                set = frame->encode(std::vector<std::string>{label});
            }
        } else {
            set = frame->encode(key.cast<std::vector<std::string>>());
        }
        entries.push_back({set, value.cast<double>()});
    }
    return make_bpa(frame, std::move(entries), std::move(id));
}

py::dict bpa_to_dict(const Bpa& m) {
    py::dict out;
    for (const FocalMass& f : m.focal()) {
        out[py::tuple(py::cast(m.frame().decode(f.focal)))] = f.mass;
    }
    return out;
}

py::dict classification_to_dict(const Classification& c) {
    py::dict out;
    out["id"] = c.evidence_id;
    out["outcome"] = c.outcome == Outcome::assigned ? "assigned" : "rejected";
    out["subset"] = c.outcome == Outcome::assigned ? py::cast(c.subset) : py::none();
    out["scores"] = c.scores;
    out["threshold"] = c.threshold;
    return out;
}

std::string write_to_string(auto&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_dsproto, mod) {
    mod.doc() = "Dempster-Shafer evidence clustering and prototype classification";

    auto base = py::register_exception<Error>(mod, "DsprotoError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(mod, "ValidationError", PyExc_ValueError);
    py::register_exception<TotalConflictError>(mod, "TotalConflictError", base.ptr());
    py::register_exception<UnrepresentableSubsetError>(mod, "UnrepresentableSubsetError", base.ptr());

    py::class_<Frame, std::shared_ptr<Frame>>(mod, "Frame")
        .def(py::init([](std::vector<std::string> labels) {
            return std::const_pointer_cast<Frame>(Frame::make(std::move(labels)));
        }))
        .def_property_readonly("labels", &Frame::labels)
        .def("__len__", &Frame::size);

    py::class_<Bpa>(mod, "Bpa")
        .def(py::init([](std::shared_ptr<Frame> frame, const py::dict& masses, std::string id) {
                 return bpa_from_dict(frame, masses, std::move(id));
             }),
             py::arg("frame"), py::arg("masses"), py::arg("id") = "")
        .def_property_readonly("id", &Bpa::id)
        .def_property_readonly("frame", [](const Bpa& m) { return std::const_pointer_cast<Frame>(m.frame_ptr()); })
        .def("masses", &bpa_to_dict)
        .def("mass", [](const Bpa& m, std::vector<std::string> s) { return m.mass(m.frame().encode(s)); })
        .def("belief", [](const Bpa& m, std::vector<std::string> s) { return m.belief(m.frame().encode(s)); })
        .def("plausibility",
             [](const Bpa& m, std::vector<std::string> s) { return m.plausibility(m.frame().encode(s)); });

    mod.def("combine", [](const Bpa& a, const Bpa& b) {
        CombinationResult r = conjunctive_combine(a, b);
        return py::make_tuple(r.combined, r.conflict);
    });
    mod.def("conflict", &conflict_between);
    mod.def("joint_conflict", [](const std::vector<Bpa>& evidence) {
        if (evidence.empty()) throw ValidationError("no evidence");
        return joint_conflict(evidence.front().frame_ptr(), evidence);
    });

    py::class_<DomainPrior>(mod, "DomainPrior")
        .def(py::init<std::vector<double>>())
        .def("mass", &DomainPrior::mass)
        .def_property_readonly("masses", &DomainPrior::masses)
        .def_property_readonly("max_subsets", &DomainPrior::max_subsets);

    py::class_<Partition>(mod, "Partition")
        .def_static("from_subsets", [](const std::vector<Bpa>& evidence,
                                       std::vector<std::vector<std::size_t>> subsets) {
            return Partition::from_subsets(evidence, std::move(subsets));
        })
        .def_property_readonly("subsets", &Partition::subsets)
        .def_property_readonly("conflicts", &Partition::conflicts)
        .def("subset_of", &Partition::subset_of)
        .def("__len__", &Partition::subset_count);

    mod.def("metaconflict", py::overload_cast<const DomainPrior&, const Partition&>(&metaconflict));

    mod.def(
        "cluster",
        [](const std::vector<Bpa>& evidence, const DomainPrior& prior, std::size_t restarts,
           std::uint64_t seed, std::optional<std::size_t> max_subsets, const std::string& init) {
            if (init != "random" && init != "singleton-greedy") throw ValidationError("unknown init '" + init + "'");
            SearchConfig config{restarts, seed, max_subsets,
                                init == "random" ? InitStrategy::random : InitStrategy::singleton_greedy};
            SearchResult r = minimize_metaconflict(evidence, prior, config);
            return py::make_tuple(r.partition, r.mcf);
        },
        py::arg("evidence"), py::arg("prior"), py::arg("restarts") = 20, py::arg("seed") = 0,
        py::arg("max_subsets") = py::none(), py::arg("init") = "random");

    mod.def("specify", [](const std::vector<Bpa>& evidence, const DomainPrior& prior, const Partition& partition) {
        const SpecificationReport report = specify_all(evidence, prior, partition);
        py::list rows;
        for (const SpecificationRow& row : report.rows) {
            py::dict d;
            d["id"] = evidence[row.evidence].id();
            d["subset"] = row.own_subset;
            d["bel"] = row.bel;
            d["pls"] = row.pls;
            d["alpha"] = row.alpha;
            rows.append(d);
        }
        return rows;
    });

    py::class_<PrototypeModel>(mod, "PrototypeModel")
        .def_property_readonly("subset_count", &PrototypeModel::subset_count)
        .def_property_readonly("prototype_ids",
                               [](const PrototypeModel& m) {
                                   std::vector<std::vector<std::string>> ids;
                                   for (const SubsetModel& s : m.subsets) ids.push_back(s.prototype_ids);
                                   return ids;
                               })
        .def("to_json", [](const PrototypeModel& m) {
            return write_to_string([&](std::ostream& out) { io::write_model(out, m); });
        })
        .def_static("from_json", [](const std::string& text) {
            std::istringstream in(text);
            return io::read_model(in);
        });

    mod.def(
        "build_model",
        [](const std::vector<Bpa>& evidence, const Partition& partition, const DomainPrior& prior,
           std::size_t n) { return build_model(evidence, partition, prior, n).model; },
        py::arg("evidence"), py::arg("partition"), py::arg("prior"), py::arg("n") = kDefaultBudget);

    py::class_<Classifier>(mod, "Classifier")
        .def(py::init<PrototypeModel>())
        .def_property_readonly("threshold", &Classifier::threshold)
        .def_property_readonly("warnings", &Classifier::warnings)
        .def("classify", [](const Classifier& c, const Bpa& e) { return classification_to_dict(c.classify(e)); });

    mod.def("classify", [](const PrototypeModel& model, const Bpa& e) {
        return classification_to_dict(classify(model, e));
    });

    mod.def("read_evidence", [](const std::string& path) { return io::read_evidence_file(path).items; });
    mod.def("read_evidence_text", [](const std::string& text) {
        std::istringstream in(text);
        return io::read_evidence(in).items;
    });

    mod.def(
        "generate",
        [](std::size_t labels, std::size_t events, std::size_t count, double noise, double nonspecificity,
           std::uint64_t seed) {
            synth::GeneratedCorpus c = synth::generate({labels, events, count, noise, nonspecificity, seed});
            return py::make_tuple(c.evidence.items, c.event_of);
        },
        py::arg("labels") = 6, py::arg("events") = 3, py::arg("count") = 60, py::arg("noise") = 0.0,
        py::arg("nonspecificity") = 0.0, py::arg("seed") = 0);
}
