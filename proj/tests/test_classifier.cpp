#include <algorithm>
#include <random>

#include "doctest.h"
#include "dsproto/classifier.hpp"
#include "frozen.hpp"
#include "oracles.hpp"

using namespace dsproto;
using Labels = std::vector<std::string>;

namespace {

SubsetModel subset_of(const Bpa& combined, double conflict) { return {{combined.id()}, combined, conflict}; }

// Two subsets with categorical {A} and {C}; n = 2.
PrototypeModel fixture_model(std::vector<double> prior_masses) {
    const auto f = oracle::letters(3);
    PrototypeModel m{f, DomainPrior(std::move(prior_masses)), 1, {}};
    m.subsets.push_back(subset_of(make_bpa(f, {{f->encode(Labels{"A"}), 1.0}}, "p1"), 0.0));
    m.subsets.push_back(subset_of(make_bpa(f, {{f->encode(Labels{"C"}), 1.0}}, "p2"), 0.0));
    return m;
}

}  // namespace

TEST_CASE("rejection threshold") {
    CHECK(rejection_threshold(DomainPrior({0.0, 0.0, 0.7, 0.1, 0.2}), 2) ==
          doctest::Approx(frozen::threshold_example).epsilon(1e-14));
    CHECK(rejection_threshold(DomainPrior({0.0, 0.0, 0.5, 0.5}), 2) == 0.0);
    CHECK(rejection_threshold(DomainPrior({0.0, 0.0, 1.0}), 2) == 1.0);
    CHECK_THROWS_AS(rejection_threshold(DomainPrior({0.0, 1.0, 0.0}), 2), ValidationError);
}

TEST_CASE("score equals the pairwise conflict") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double c = unit(rng) * 0.999;
        const double k = unit(rng);
        CHECK(oracle::near(subset_score(c, k), k, 1e-12));
        CHECK(oracle::near(compose_conflict(c, k), 1.0 - (1.0 - c) * (1.0 - k), 1e-15));
    }
    CHECK(subset_score(0.3, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(subset_score(1.0, 0.5), TotalConflictError);
}

TEST_CASE("documented classifications") {
    const PrototypeModel model = fixture_model({0.0, 0.0, 0.7, 0.1, 0.2});
    const Classifier c(model);
    const auto& f = model.frame;
    SUBCASE("vacuous evidence lands in subset 1") {
        const auto r = c.classify(Bpa::vacuous(f, "v"));
        CHECK(r.outcome == Outcome::assigned);
        CHECK(r.subset == 0);
        CHECK(r.scores == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("identical to subset 2") {
        const auto r = c.classify(make_bpa(f, {{f->encode(Labels{"C"}), 1.0}}));
        CHECK(r.scores == std::vector<double>{1.0, 0.0});
        CHECK(r.outcome == Outcome::assigned);
        CHECK(r.subset == 1);
    }
    SUBCASE("scores 0.9 and 0.92 exceed 6/7") {
        const Bpa e = make_bpa(f, {{f->encode(Labels{"B"}), 0.9}, {f->encode(Labels{"A", "B"}), 0.02},
                                   {f->full(), 0.08}},
                               "x");
        const auto r = c.classify(e);
        CHECK(r.scores[0] == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(r.scores[1] == doctest::Approx(0.92).epsilon(1e-14));
        CHECK(r.threshold == doctest::Approx(frozen::threshold_example).epsilon(1e-14));
        CHECK(r.outcome == Outcome::rejected);
        CHECK(r.evidence_id == "x");
    }
}

TEST_CASE("ties go to the lower subset and frames are reconciled") {
    const PrototypeModel model = fixture_model({0.0, 0.0, 1.0});
    const Classifier c(model);
    const auto small = Frame::make({"B"});
    const auto r = c.classify(make_bpa(small, {{small->full(), 1.0}}));
    CHECK(r.scores[0] == r.scores[1]);
    CHECK(r.subset == 0);
    const auto foreign = Frame::make({"Z"});
    CHECK_THROWS_AS(c.classify(make_bpa(foreign, {{foreign->full(), 1.0}})), FrameMismatchError);
}

TEST_CASE("model guards") {
    SUBCASE("unsupported subset count") {
        CHECK_THROWS_AS(Classifier(fixture_model({0.0, 1.0, 0.0})), ValidationError);
    }
    SUBCASE("negative threshold warns") {
        const Classifier c(fixture_model({0.0, 0.0, 0.2, 0.8}));
        CHECK(c.threshold() < 0.0);
        CHECK(c.warnings().size() == 1);
    }
    SUBCASE("total recorded conflict") {
        auto m = fixture_model({0.0, 0.0, 1.0});
        m.subsets[0].conflict = 1.0;
        CHECK_THROWS_AS(Classifier(std::move(m)), TotalConflictError);
    }
}

TEST_CASE("decision is independent of subset order") {
    std::mt19937_64 rng(52);
    const auto f = oracle::letters(4);
    for (int trial = 0; trial < 200; ++trial) {
        PrototypeModel m{f, DomainPrior({0.0, 0.0, 0.0, 0.5, 0.3, 0.2}), 1, {}};
        for (int j = 0; j < 3; ++j) m.subsets.push_back(subset_of(oracle::random_bpa(f, rng, 2), 0.1 * j));
        const Bpa e = oracle::random_bpa(f, rng, 3);
        const auto r = Classifier(m).classify(e);
        std::vector<std::size_t> order{0, 1, 2};
        std::shuffle(order.begin(), order.end(), rng);
        PrototypeModel shuffled = m;
        shuffled.subsets.clear();
        for (auto j : order) shuffled.subsets.push_back(m.subsets[j]);
        const auto s = Classifier(shuffled).classify(e);
        CHECK(r.outcome == s.outcome);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(r.scores[order[j]] == s.scores[j]);
            CHECK(r.scores[j] >= 0.0);
            CHECK(r.scores[j] <= 1.0);
            CHECK(oracle::near(r.scores[j], oracle::combine({e, m.subsets[j].combined}).conflict, 1e-12));
        }
        if (r.outcome == Outcome::assigned) {
            CHECK(r.scores[r.subset] == s.scores[static_cast<std::size_t>(
                                            std::find(order.begin(), order.end(), r.subset) - order.begin())]);
        }
        const auto again = Classifier(m).classify(e);
        CHECK(again.scores == r.scores);
        CHECK(again.subset == r.subset);
    }
}

TEST_CASE("streams keep order and isolate errors") {
    const PrototypeModel model = fixture_model({0.0, 0.0, 0.7, 0.1, 0.2});
    const Classifier c(model);
    CHECK(classify_stream(c, {}).empty());
    const auto foreign = Frame::make({"Z"});
    const std::vector<Bpa> in{Bpa::vacuous(model.frame, "a"), make_bpa(foreign, {{foreign->full(), 1.0}}, "bad"),
                              Bpa::vacuous(model.frame, "c")};
    const auto out = classify_stream(c, in);
    REQUIRE(out.size() == 3);
    CHECK(out[0].result->subset == 0);
    CHECK_FALSE(out[1].result.has_value());
    CHECK_FALSE(out[1].error.empty());
    CHECK(out[2].evidence_id == "c");
    CHECK(classify(model, in[0]).subset == 0);
}
