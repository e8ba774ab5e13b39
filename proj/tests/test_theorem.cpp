#include <catch2/catch_amalgamated.hpp>

#include "ontolab/theorem.hpp"
#include "oracle_utils.hpp"

using namespace ontolab;

namespace {

// Y := A with independent B, C, Z, lambda: breaks NS, keeps ST intact.
JointTable<Rational> signalling_toy() {
    Scenario sc = canonical_scenario({2, 2, 1, 2, 2, 1, 2});
    const Rational half = Rational(1) / 2;
    std::vector<ConditionalKernel<Rational>> factors;
    factors.push_back(distribution_kernel<Rational>("lambda", {half, half}));
    factors.push_back(distribution_kernel<Rational>("A", {half, half}));
    factors.push_back(distribution_kernel<Rational>("B", {half, half}));
    factors.push_back(distribution_kernel<Rational>("C", {Rational(1)}));
    factors.push_back(distribution_kernel<Rational>("Z", {Rational(1)}));
    std::vector<std::size_t> copy_l{0, 1};
    factors.push_back(deterministic_kernel<Rational>("X", 2, {"lambda"}, {2}, copy_l));
    std::vector<std::size_t> copy_a{0, 1};
    factors.push_back(deterministic_kernel<Rational>("Y", 2, {"A"}, {2}, copy_a));
    return compose_product(sc, factors);
}

} // namespace

TEST_CASE("sweep: n = 0 is the vacuous report") {
    auto r = verify_implication_sweep<double>(0, {}, 1);
    CHECK(r.n_models == 0);
    CHECK(r.max_fr_deviation == 0.0);
    CHECK(r.quantiles.empty());
}

TEST_CASE("sweep: float backend stays at rounding noise, premises certified") {
    auto r = verify_implication_sweep<double>(200, {}, 7);
    CHECK(r.n_models == 200);
    CHECK(r.certified_models == 200);
    CHECK(r.max_fr_deviation <= 1e-12);
    CHECK(r.backend == "float");
    REQUIRE(r.quantiles.size() == 4);
    CHECK(r.quantiles.back().second == r.max_fr_deviation);
}

TEST_CASE("sweep: exact backend concludes FR deviation exactly 0") {
    auto r = verify_implication_sweep<Rational>(25, {}, 11);
    CHECK(r.max_fr_deviation == Rational(0));
    CHECK(r.certified_models == 25);
}

TEST_CASE("sweep: alphabet sizes 3") {
    auto r = verify_implication_sweep<double>(50, PremiseSizes::uniform(3), 13);
    CHECK(r.max_fr_deviation <= 1e-12);
}

TEST_CASE("sweep: argmax seed reproduces the reported deviation") {
    auto r = verify_implication_sweep<double>(100, {}, 21);
    auto model = premise_model_random<double>(r.argmax_seed);
    auto fr = assumption_deviation(model, AssumptionId::FR);
    CHECK(fr.deviation == r.max_fr_deviation);
}

TEST_CASE("trace: premise models have all residuals exactly 0") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto tr = derivation_trace(premise_model_random<Rational>(seed));
        CHECK(tr.residual_chain_rule == Rational(0));
        CHECK(tr.residual_st_step == Rational(0));
        CHECK(tr.residual_ns_frprime_step == Rational(0));
        CHECK(tr.residual_conclusion == Rational(0));
    }
    // float backend: the chain rule is evaluated exactly and stays 0
    auto trf = derivation_trace(premise_model_random<double>(4));
    CHECK(trf.residual_chain_rule == 0.0);
    CHECK(trf.residual_st_step <= 1e-12);
    CHECK(trf.residual_ns_frprime_step <= 1e-12);
    CHECK(trf.residual_conclusion <= 1e-12);
}

TEST_CASE("trace: adaptive C model localizes the ST step") {
    auto tr = derivation_trace(adaptive_c_model<Rational>(Rational(1)));
    CHECK(tr.residual_chain_rule == Rational(0));
    CHECK(tr.residual_st_step == Rational(1) / 2);
    CHECK(tr.residual_ns_frprime_step == Rational(0));
    CHECK(tr.residual_conclusion == Rational(1) / 2);
    REQUIRE(tr.witness_st_step.has_value());
}

TEST_CASE("trace: signalling toy model localizes the NS/FRprime step") {
    auto tr = derivation_trace(signalling_toy());
    CHECK(tr.residual_chain_rule == Rational(0));
    CHECK(tr.residual_st_step == Rational(0));
    CHECK(tr.residual_ns_frprime_step == Rational(1) / 2);
    CHECK(tr.residual_conclusion == Rational(1) / 2);
}

TEST_CASE("trace: conclusion never exceeds st_step + ns_frprime_step") {
    Scenario sc = canonical_scenario();
    Rng rng(606);
    for (int rep = 0; rep < 10; ++rep) {
        auto values = oracle::random_joint<Rational>(rng, sc.table_size());
        auto j = JointTable<Rational>::from_values(sc, values);
        auto tr = derivation_trace(j);
        CHECK(tr.residual_conclusion <= tr.residual_st_step + tr.residual_ns_frprime_step);
        CHECK(tr.residual_chain_rule == Rational(0));
    }
}

TEST_CASE("trace requires the canonical variables") {
    Scenario sc({{"A", Role::setting, 2, {}}, {"B", Role::setting, 2, {}}});
    auto j = build_joint<Rational>(sc, {{{{"A", 0}, {"B", 0}}, Rational(1)}});
    CHECK_THROWS_AS(derivation_trace(j), UnknownVariable);
}

TEST_CASE("search: input validation") {
    CHECK_THROWS_AS(penalized_search(SearchMode::no_st, 0, 1000.0, 1), InvalidBudget);
    CHECK_THROWS_AS(penalized_search(SearchMode::no_st, 10, 0.0, 1), InvalidBudget);
    CHECK_THROWS_AS(penalized_search(SearchMode::no_st, 10, -5.0, 1), InvalidBudget);
}

TEST_CASE("search: identical inputs give identical results") {
    auto a = penalized_search(SearchMode::no_st, 2500, 1000.0, 42);
    auto b = penalized_search(SearchMode::no_st, 2500, 1000.0, 42);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.best_model.probabilities() == b.best_model.probabilities());
    CHECK(a.evaluations_used == b.evaluations_used);
    CHECK(a.evaluations_used == 2500);
}

TEST_CASE("search: best objective is non-decreasing in budget for nested runs") {
    double prev = -1e300;
    for (std::size_t budget : {500u, 1000u, 2000u, 4000u, 8000u}) {
        auto r = penalized_search(SearchMode::no_st, budget, 1000.0, 1812);
        CHECK(r.objective_value >= prev);
        prev = r.objective_value;
    }
}

TEST_CASE("search: deviation profile is reproducible from the best model") {
    auto r = penalized_search(SearchMode::no_st, 2000, 1000.0, 77);
    CHECK(assumption_deviation(r.best_model, AssumptionId::FR).deviation == r.profile.fr);
    CHECK(assumption_deviation(r.best_model, AssumptionId::NS).deviation == r.profile.ns);
    CHECK(assumption_deviation(r.best_model, AssumptionId::ST).deviation == r.profile.st);
}

TEST_CASE("search: no_st quickly finds free-choice-preserving FR violations") {
    auto r = penalized_search(SearchMode::no_st, 10000, 1000.0, 3);
    CHECK(r.objective_value > 0.2);
    CHECK(r.profile.frprime <= 1e-9);
    CHECK(r.profile.ns <= 1e-9);
}

TEST_CASE("search: full_premises stays near zero FR deviation") {
    auto r = penalized_search(SearchMode::full_premises, 10000, 1000.0, 3);
    CHECK(r.profile.fr <= 1e-3);
}

TEST_CASE("search: fr_implies_ns cannot manufacture signalling") {
    auto r = penalized_search(SearchMode::fr_implies_ns, 10000, 1000.0, 3);
    CHECK(r.profile.ns <= 1e-6);
}
