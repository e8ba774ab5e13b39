#include <catch2/catch_amalgamated.hpp>

#include "ontolab/gallery.hpp"
#include "ontolab/independence.hpp"
#include "oracle_utils.hpp"

using namespace ontolab;

namespace {

Scenario two_bits() {
    return Scenario({{"A", Role::outcome, 2, {}}, {"B", Role::outcome, 2, {}}});
}

} // namespace

TEST_CASE("ci_deviation: product distribution is independent") {
    auto j = build_joint<Rational>(two_bits(), {{{{"A", 0}, {"B", 0}}, Rational(21) / 100},
                                                {{{"A", 0}, {"B", 1}}, Rational(9) / 100},
                                                {{{"A", 1}, {"B", 0}}, Rational(49) / 100},
                                                {{{"A", 1}, {"B", 1}}, Rational(21) / 100}});
    auto rep = ci_deviation(j, CIQuery{{"A"}, {"B"}});
    CHECK(rep.deviation == Rational(0));
    CHECK_FALSE(rep.witness.has_value());
    CHECK(rep.vacuous_events == 0);
}

TEST_CASE("ci_deviation: perfectly correlated bits deviate by 1/2") {
    auto j = build_joint<Rational>(two_bits(),
                                   {{{{"A", 0}, {"B", 0}}, Rational(1) / 2}, {{{"A", 1}, {"B", 1}}, Rational(1) / 2}});
    auto rep = ci_deviation(j, CIQuery{{"A"}, {"B"}});
    CHECK(rep.deviation == Rational(1) / 2);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->at("A") == 0);
    CHECK(rep.witness->at("B") == 0);
    // the witness re-evaluates to the reported deviation
    CHECK(ci_deviation_at(j, CIQuery{{"A"}, {"B"}}, *rep.witness) == rep.deviation);
}

TEST_CASE("ci_deviation rejects malformed queries") {
    auto j = build_joint<double>(two_bits(), {{{{"A", 0}, {"B", 0}}, 0.5}, {{{"A", 1}, {"B", 1}}, 0.5}});
    CHECK_THROWS_AS(ci_deviation(j, CIQuery{{"A"}, {"A"}}), SchemaError);
    CHECK_THROWS_AS(ci_deviation(j, CIQuery{{}, {"B"}}), SchemaError);
    CHECK_THROWS_AS(ci_deviation(j, CIQuery{{"A"}, {"W"}}), UnknownVariable);
}

TEST_CASE("ci_deviation matches the brute-force oracle on random joints") {
    Scenario sc({{"A", Role::outcome, 2, {}},
                 {"B", Role::outcome, 3, {}},
                 {"C", Role::outcome, 2, {}}});
    Rng rng(314159);
    for (int rep = 0; rep < 30; ++rep) {
        auto values = oracle::random_joint<Rational>(rng, sc.table_size());
        auto j = JointTable<Rational>::from_values(sc, values);
        auto engine = ci_deviation(j, CIQuery{{"A"}, {"B", "C"}}).deviation;
        auto brute = oracle::ci_deviation(values, {2, 3, 2}, {0}, {1, 2});
        CHECK(engine == brute); // bit-exact on the exact backend
        auto engine2 = ci_deviation(j, CIQuery{{"A", "C"}, {"B"}}).deviation;
        auto brute2 = oracle::ci_deviation(values, {2, 3, 2}, {0, 2}, {1});
        CHECK(engine2 == brute2);
    }
}

TEST_CASE("assumption_deviation: premise models satisfy FRprime, NS, ST and FR") {
    for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
        auto j = premise_model_random<Rational>(seed);
        CHECK(assumption_deviation(j, AssumptionId::FRprime).deviation == Rational(0));
        CHECK(assumption_deviation(j, AssumptionId::NS).deviation == Rational(0));
        CHECK(assumption_deviation(j, AssumptionId::ST).deviation == Rational(0));
        CHECK(assumption_deviation(j, AssumptionId::FR).deviation == Rational(0));
        CHECK(assumption_deviation(j, AssumptionId::FACT).deviation == Rational(0));
        // the fast integer certifier agrees
        for (auto id : {AssumptionId::FRprime, AssumptionId::NS, AssumptionId::ST, AssumptionId::FR,
                        AssumptionId::FACT})
            CHECK(assumption_holds_exactly(j, id));
    }
}

TEST_CASE("assumption_deviation: adaptive C model at p_copy = 1") {
    auto j = adaptive_c_model<Rational>(Rational(1));
    auto fr = assumption_deviation(j, AssumptionId::FR);
    CHECK(fr.deviation == Rational(1) / 2);
    // the C-freedom component is broken
    REQUIRE(fr.per_component.size() == 3);
    CHECK(fr.per_component[2].label == "FR[C]");
    CHECK(fr.per_component[2].deviation == Rational(1) / 2);
    CHECK(assumption_deviation(j, AssumptionId::FRprime).deviation == Rational(0));
    CHECK(assumption_deviation(j, AssumptionId::NS).deviation == Rational(0));
    CHECK(assumption_deviation(j, AssumptionId::ST).deviation == Rational(1) / 2);
    CHECK_FALSE(assumption_holds_exactly(j, AssumptionId::ST));
}

TEST_CASE("assumption_deviation: PR box with uniform settings has NS deviation 0") {
    auto j = box_with_uniform_settings(pr_box_kernel<Rational>());
    CHECK(assumption_deviation(j, AssumptionId::NS).deviation == Rational(0));
    // lambda-dependent assumptions name variables this scenario lacks
    CHECK_THROWS_AS(assumption_deviation(j, AssumptionId::FRprime), UnknownVariable);
    CHECK_THROWS_AS(assumption_deviation(j, AssumptionId::FACT), UnknownVariable);
}

TEST_CASE("NS deviation matches the conditional oracle on a signalling model") {
    // X := B (direct signalling from the remote setting)
    Scenario sc({{"A", Role::setting, 2, {}}, {"B", Role::setting, 2, {}},
                 {"X", Role::outcome, 2, {}}, {"Y", Role::outcome, 2, {}}});
    std::vector<ConditionalKernel<Rational>> factors;
    factors.push_back(distribution_kernel<Rational>("A", {Rational(1) / 2, Rational(1) / 2}));
    factors.push_back(distribution_kernel<Rational>("B", {Rational(1) / 4, Rational(3) / 4}));
    std::vector<std::size_t> copy{0, 1};
    factors.push_back(deterministic_kernel<Rational>("X", 2, {"B"}, {2}, copy));
    factors.push_back(distribution_kernel<Rational>("Y", {Rational(1) / 2, Rational(1) / 2}));
    auto j = compose_product(sc, factors);
    auto ns = assumption_deviation(j, AssumptionId::NS);
    auto brute = oracle::conditional_ci_deviation(j.probabilities(), {2, 2, 2, 2}, {2}, {1}, {0});
    CHECK(ns.per_component[0].deviation == brute);
    CHECK(ns.deviation == Rational(3) / 4); // |P(X=0|B=0) - P(X=0|...)| = |1 - 1/4|
}

TEST_CASE("vacuous conditioning events are counted and flagged") {
    // B is deterministic, so 1 of 2 conditioning events for A _||_ B is vacuous
    auto j = build_joint<Rational>(two_bits(),
                                   {{{{"A", 0}, {"B", 0}}, Rational(1) / 2}, {{{"A", 1}, {"B", 0}}, Rational(1) / 2}});
    auto rep = ci_deviation(j, CIQuery{{"A"}, {"B"}});
    CHECK(rep.deviation == Rational(0));
    CHECK(rep.vacuous_events == 1);
    CHECK(rep.conditioning_events == 2);
    CHECK_FALSE(rep.degenerate);

    // with a 4-symbol deterministic conditioner, 3/4 of events are vacuous
    Scenario sc({{"A", Role::outcome, 2, {}}, {"B", Role::outcome, 4, {}}});
    auto j2 = build_joint<Rational>(sc, {{{{"A", 0}, {"B", 0}}, Rational(1) / 2},
                                         {{{"A", 1}, {"B", 0}}, Rational(1) / 2}});
    auto rep2 = ci_deviation(j2, CIQuery{{"A"}, {"B"}});
    CHECK(rep2.vacuous_events == 3);
    CHECK(rep2.degenerate);
}

TEST_CASE("property: deviations are invariant under alphabet relabeling") {
    Scenario sc = two_bits();
    Rng rng(8);
    auto values = oracle::random_joint<Rational>(rng, 4);
    auto j = JointTable<Rational>::from_values(sc, values);
    // swap both symbols of B
    std::vector<Rational> swapped = {values[1], values[0], values[3], values[2]};
    auto j2 = JointTable<Rational>::from_values(sc, swapped);
    CHECK(ci_deviation(j, CIQuery{{"A"}, {"B"}}).deviation ==
          ci_deviation(j2, CIQuery{{"A"}, {"B"}}).deviation);
}

TEST_CASE("property: deviations are invariant under variable reordering") {
    Scenario sc = two_bits();
    Scenario rev({{"B", Role::outcome, 2, {}}, {"A", Role::outcome, 2, {}}});
    Rng rng(9);
    auto values = oracle::random_joint<Rational>(rng, 4);
    auto j = JointTable<Rational>::from_values(sc, values);
    // transpose into (B, A) order
    std::vector<Rational> t = {values[0], values[2], values[1], values[3]};
    auto j2 = JointTable<Rational>::from_values(rev, t);
    CHECK(ci_deviation(j, CIQuery{{"A"}, {"B"}}).deviation ==
          ci_deviation(j2, CIQuery{{"A"}, {"B"}}).deviation);
}

TEST_CASE("property: FRprime deviation 0 implies FACT deviation 0") {
    // product models with assorted marginals
    Scenario sc({{"A", Role::setting, 2, {}}, {"B", Role::setting, 2, {}}, {"lambda", Role::ontic, 3, {}}});
    for (std::uint64_t seed : {21ull, 22ull, 23ull, 24ull}) {
        std::vector<ConditionalKernel<Rational>> factors;
        factors.push_back(random_kernel<Rational>(sc, {"A"}, {}, derive_seed(seed, 0)));
        factors.push_back(random_kernel<Rational>(sc, {"B"}, {}, derive_seed(seed, 1)));
        factors.push_back(random_kernel<Rational>(sc, {"lambda"}, {}, derive_seed(seed, 2)));
        auto j = compose_product(sc, factors);
        REQUIRE(assumption_deviation(j, AssumptionId::FRprime).deviation == Rational(0));
        CHECK(assumption_deviation(j, AssumptionId::FACT).deviation == Rational(0));
    }
}

TEST_CASE("total variation is bounded by the sup-norm times alphabet size and vanishes together") {
    auto indep = build_joint<Rational>(two_bits(), {{{{"A", 0}, {"B", 0}}, Rational(1) / 4},
                                                    {{{"A", 0}, {"B", 1}}, Rational(1) / 4},
                                                    {{{"A", 1}, {"B", 0}}, Rational(1) / 4},
                                                    {{{"A", 1}, {"B", 1}}, Rational(1) / 4}});
    CHECK(ci_total_variation(indep, CIQuery{{"A"}, {"B"}}) == Rational(0));
    auto corr = build_joint<Rational>(two_bits(),
                                      {{{{"A", 0}, {"B", 0}}, Rational(1) / 2}, {{{"A", 1}, {"B", 1}}, Rational(1) / 2}});
    CHECK(ci_total_variation(corr, CIQuery{{"A"}, {"B"}}) == Rational(1) / 2);
}

TEST_CASE("deviation metric is discontinuous at vanishing-mass conditioning events") {
    // A documented property of sup-norm deviations over positive-mass events:
    // a near-copy C with a one-in-a-million stray keeps ST tiny while FR
    // jumps to ~1. At stray mass exactly 0 the event is vacuous and FR is 0.
    const Rational eps = Rational(1) / 1000000;
    OntModelSpec<Rational> spec;
    const Rational half = Rational(1) / 2;
    spec.p_a = {eps, 1 - eps};
    spec.p_b = {half, half};
    spec.p_lambda = {half, half};
    spec.x_response = ResponseFunction::xor_response();
    spec.y_response = ResponseFunction::xor_response();
    spec.z_response = ResponseFunction::constant(0);
    spec.z_source = ZSource::response_c_lambda;
    spec.adaptive_c = ConditionalKernel<Rational>::from_rows({"C"}, {"A"}, {2}, {2},
                                                             {{eps, 1 - eps}, {Rational(0), Rational(1)}});
    auto j = build_ont_model(spec);
    auto fr = assumption_deviation(j, AssumptionId::FR);
    auto st = assumption_deviation(j, AssumptionId::ST);
    CHECK(fr.deviation > Rational(9) / 10);    // conditioning on C=0 pins A=0
    CHECK(st.deviation < Rational(1) / 100000); // while ST stays within ~eps

    // closing the gap exactly removes the event and the theorem applies
    spec.adaptive_c = ConditionalKernel<Rational>::from_rows(
        {"C"}, {"A"}, {2}, {2}, {{Rational(0), Rational(1)}, {Rational(0), Rational(1)}});
    auto j0 = build_ont_model(spec);
    CHECK(assumption_deviation(j0, AssumptionId::ST).deviation == Rational(0));
    CHECK(assumption_deviation(j0, AssumptionId::FR).deviation == Rational(0));
}
