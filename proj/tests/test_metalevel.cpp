#include <algorithm>
#include <random>

#include "doctest.h"
#include "dsproto/metalevel.hpp"
#include "frozen.hpp"
#include "oracles.hpp"

using namespace dsproto;
using Labels = std::vector<std::string>;

namespace {

Bpa categorical(const FramePtr& f, const std::string& label) {
    return make_bpa(f, {{f->encode(Labels{label}), 1.0}});
}

MetaEvidence meta_of(std::vector<double> against, std::size_t own, double in_own = 0.0) {
    MetaEvidence m;
    m.own_subset = own;
    m.against = std::move(against);
    m.in_own = in_own;
    return m;
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmin(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("delta formulas") {
    CHECK(conflict_decrease(0.3, 0.1) == doctest::Approx(0.2 / 0.9).epsilon(1e-15));
    CHECK(conflict_decrease(0.4, 0.4) == 0.0);
    CHECK(conflict_increase(0.2, 0.6) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(conflict_increase(0.0, 1.0) == 1.0);
    CHECK(conflict_increase(0.5, 0.5 - 1e-14) == 0.0);
    CHECK_THROWS_AS(conflict_increase(1.0, 1.0), TotalConflictError);
    CHECK_THROWS_AS(conflict_decrease(1.0, 1.0), TotalConflictError);
}

TEST_CASE("deltas on small corpora") {
    const auto f = oracle::letters(2);
    const std::vector<Bpa> corpus{categorical(f, "B"), categorical(f, "A"), Bpa::vacuous(f)};
    const Partition part = Partition::from_subsets(corpus, {{0}, {1, 2}});
    CHECK(in_delta(corpus, part, 1, 0) == 1.0);   // {A} joining {B}
    CHECK(in_delta(corpus, part, 2, 0) == 0.0);   // vacuous joining anything
    CHECK(out_delta(corpus, part, 0) == 0.0);     // singleton
    CHECK(out_delta(corpus, part, 2) == 0.0);     // removal changes nothing
    CHECK_THROWS_AS(in_delta(corpus, part, 1, 1), ValidationError);
}

TEST_CASE("domain delta cases") {
    const auto f = oracle::letters(2);
    const std::vector<Bpa> corpus{Bpa::vacuous(f), Bpa::vacuous(f), Bpa::vacuous(f)};
    const Partition part = Partition::from_subsets(corpus, {{0, 1}, {2}});
    SUBCASE("shared subset") {
        const DomainPrior prior({0.0, 0.0, 0.8, 0.2});
        const auto d = domain_delta(prior, part, 0);
        CHECK(d.kind == DomainCase::shared);
        CHECK(d.mass == doctest::Approx(0.75).epsilon(1e-15));
        const DomainPrior flat({0.0, 0.0, 0.5, 0.5});
        CHECK(domain_delta(flat, part, 0).mass == 0.0);
    }
    SUBCASE("singleton, removal lowers domain conflict") {
        const DomainPrior prior({0.0, 0.8, 0.2});
        const auto d = domain_delta(prior, part, 2);
        CHECK(d.kind == DomainCase::singleton_lower);
        CHECK(d.mass == doctest::Approx(0.6 / 0.8).epsilon(1e-15));
        const auto meta = meta_evidence(corpus, prior, part, 2);
        CHECK(meta.against[1] == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(meta.against[2] == 0.0);
    }
    SUBCASE("singleton, removal raises domain conflict") {
        const DomainPrior prior({0.0, 0.2, 0.8});
        const auto d = domain_delta(prior, part, 2);
        CHECK(d.kind == DomainCase::singleton_higher);
        CHECK(d.mass == doctest::Approx(0.25).epsilon(1e-15));
        const auto meta = meta_evidence(corpus, prior, part, 2);
        CHECK(meta.in_own == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(meta.against[2] == 0.0);
    }
    SUBCASE("singleton, no domain change") {
        const DomainPrior prior({0.0, 0.5, 0.5});
        CHECK(domain_delta(prior, part, 2).kind == DomainCase::singleton_equal);
    }
}

TEST_CASE("metalevel combination of the a = (0.2, 0.5, 0.9) fixture") {
    const auto row = specify(meta_of({0.2, 0.5, 0.9}, 0));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(row.pls[j] == doctest::Approx(frozen::meta_pls[j]).epsilon(1e-13));
        CHECK(row.bel[j] == doctest::Approx(frozen::meta_bel[j]).epsilon(1e-13));
        CHECK(row.alpha[j] == doctest::Approx(frozen::meta_alpha[j]).epsilon(1e-13));
    }
    const std::vector<double> a{0.2, 0.5, 0.9};
    const auto closed = closed_form_plausibility(a);
    for (std::size_t j = 0; j < 3; ++j) CHECK(closed[j] == doctest::Approx(frozen::meta_pls[j]).epsilon(1e-13));
}

TEST_CASE("credibility by direct substitution") {
    SpecificationRow row;
    row.own_subset = 0;
    row.bel = {0.0, 0.0, 0.0};
    row.pls = {frozen::meta_pls[0], frozen::meta_pls[1], frozen::meta_pls[2]};
    row.k = row.pls[0] + row.pls[1] + row.pls[2];
    CHECK(row.k == doctest::Approx(frozen::closed_K).epsilon(1e-14));
    const auto alpha = credibility(row);
    CHECK(alpha[0] == doctest::Approx(frozen::alpha_zero_bel_0).epsilon(1e-14));

    row.pls[2] = 0.0;
    row.k = row.pls[0] + row.pls[1];
    CHECK(credibility(row)[2] == 0.0);

    row.pls = {0.0, 0.0, 0.0};
    row.k = 0.0;
    CHECK_THROWS_AS(credibility(row), TotalConflictError);
}

TEST_CASE("trivial metalevel evidence") {
    SUBCASE("vacuous") {
        const auto row = specify(meta_of({0.0, 0.0, 0.0}, 1));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(row.pls[j] == 1.0);
            CHECK(row.bel[j] == 0.0);
        }
    }
    SUBCASE("categorical positive") {
        const auto row = specify(meta_of({0.0, 0.0, 0.0}, 1, 1.0));
        CHECK(row.bel[1] == 1.0);
        CHECK(row.pls[1] == 1.0);
        CHECK(row.pls[0] == 0.0);
        CHECK(row.pls[2] == 0.0);
        CHECK(row.alpha[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("fits nowhere") {
        CHECK_THROWS_AS(specify(meta_of({1.0, 1.0, 1.0}, 0)), TotalConflictError);
    }
}

TEST_CASE("singleton with positive domain mass") {
    const auto row = specify(meta_of({0.0, 0.3, 0.6}, 0, 0.25));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(row.bel[j] == doctest::Approx(frozen::pos_bel[j]).epsilon(1e-13));
        CHECK(row.pls[j] == doctest::Approx(frozen::pos_pls[j]).epsilon(1e-13));
    }
}

TEST_CASE("closed forms and the brute-force metalevel oracle agree") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t positions = 2 + trial % 5;
        std::vector<double> a(positions);
        for (auto& x : a) x = unit(rng);
        const std::size_t own = rng() % positions;
        const auto row = specify(meta_of(a, own));
        const auto expect = oracle::metalevel(a);
        const auto closed = closed_form_plausibility(a);
        for (std::size_t j = 0; j < positions; ++j) {
            CHECK(oracle::near(row.pls[j], expect.pls[j], 1e-9));
            CHECK(oracle::near(row.bel[j], expect.bel[j], 1e-9));
            CHECK(oracle::near(closed[j], expect.pls[j], 1e-9));
            CHECK(row.bel[j] <= row.pls[j] + 1e-12);
            CHECK(row.alpha[j] >= 0.0);
            CHECK(row.alpha[j] <= 1.0);
        }
    }
}

TEST_CASE("positive own-subset evidence") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t positions = 2 + trial % 5;
        const std::size_t own = rng() % positions;
        std::vector<double> a(positions);
        for (auto& x : a) x = unit(rng);
        a[own] = 0.0;
        const double p = unit(rng);
        const auto row = specify(meta_of(a, own, p));
        const auto expect = oracle::metalevel(a, std::pair{own, p});
        double product = 1.0;
        for (std::size_t j = 0; j < positions; ++j) {
            if (j != own) product *= a[j];
            CHECK(oracle::near(row.bel[j], expect.bel[j], 1e-9));
            CHECK(oracle::near(row.pls[j], expect.pls[j], 1e-9));
        }
        CHECK(row.bel[own] > 0.0);
        CHECK(oracle::near(row.pls[own], 1.0, 1e-12));
        CHECK(oracle::near(row.bel[own], p + (1.0 - p) * product, 1e-9));
        for (std::size_t j = 0; j < positions; ++j) {
            if (j != own) CHECK(row.alpha[own] > row.alpha[j]);
        }
    }
}

TEST_CASE("with zero belief in the own subset, credibility ranks by smallest negative mass") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t positions = 2 + trial % 5;
        const std::size_t own = rng() % positions;
        std::vector<double> a(positions);
        for (auto& x : a) x = unit(rng);
        if (trial % 2 == 0) {
            a[own] = 1.0;
        } else {
            std::size_t z = rng() % positions;
            if (z == own) z = (z + 1) % positions;
            a[z] = 0.0;
        }
        const auto row = specify(meta_of(a, own));
        REQUIRE(row.bel[own] == 0.0);
        CHECK(argmax(row.alpha) == argmin(a));
    }
}

TEST_CASE("batch metalevel evidence equals per-evidence derivation") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = oracle::letters(4);
        std::vector<Bpa> corpus;
        for (int i = 0; i < 7; ++i) corpus.push_back(oracle::random_bpa(f, rng, 2));
        std::vector<std::size_t> assign(7);
        for (auto& x : assign) x = rng() % 3;
        const Partition part = Partition::from_assignment(corpus, assign);
        const std::size_t n = part.subset_count();
        std::vector<double> prior(n + 2, 0.0);
        prior[n] = 0.6;
        prior[n + 1] = 0.3;
        prior[n - 1] += 0.1;
        const DomainPrior p(prior);
        const auto all = meta_evidence_all(corpus, p, part);
        for (std::size_t e = 0; e < corpus.size(); ++e) {
            const auto one = meta_evidence(corpus, p, part, e);
            CHECK(all[e].own_subset == one.own_subset);
            CHECK(all[e].domain == one.domain);
            CHECK(oracle::near(all[e].in_own, one.in_own, 1e-12));
            for (std::size_t j = 0; j <= n; ++j) {
                CHECK(oracle::near(all[e].against[j], one.against[j], 1e-12));
                CHECK(one.against[j] >= 0.0);
                CHECK(one.against[j] <= 1.0);
            }
        }
        const auto report = specify_all(corpus, p, part);
        CHECK(report.rows.size() == corpus.size());
    }
}
