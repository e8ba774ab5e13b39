#include <catch2/catch_amalgamated.hpp>

#include "ontolab/joint.hpp"
#include "ontolab/rng.hpp"
#include "oracle_utils.hpp"

using namespace ontolab;

namespace {

Scenario two_bits() {
    return Scenario({{"A", Role::outcome, 2, {}}, {"B", Role::outcome, 2, {}}});
}

JointTable<double> correlated_bits() {
    return build_joint<double>(two_bits(), {{{{"A", 0}, {"B", 0}}, 0.5}, {{{"A", 1}, {"B", 1}}, 0.5}});
}

} // namespace

TEST_CASE("build_joint: uniform entries over a 2x2 scenario") {
    std::vector<std::pair<Assignment, double>> entries;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) entries.push_back({{{"A", a}, {"B", b}}, 0.25});
    auto j = build_joint(two_bits(), entries);
    for (std::size_t i = 0; i < 4; ++i) CHECK(j[i] == 0.25);
}

TEST_CASE("build_joint rejects bad tables") {
    CHECK_THROWS_AS(build_joint<double>(two_bits(), {{{{"A", 0}, {"B", 0}}, 0.9}}), NotNormalized);
    CHECK_THROWS_AS(build_joint<double>(two_bits(),
                                        {{{{"A", 0}, {"B", 0}}, -0.1}, {{{"A", 1}, {"B", 1}}, 1.1}}),
                    NegativeEntry);
    CHECK_THROWS_AS(build_joint<double>(two_bits(), {{{{"A", 0}, {"W", 0}}, 1.0}}), UnknownVariable);
    // partial assignments and duplicates are rejected
    CHECK_THROWS_AS(build_joint<double>(two_bits(), {{{{"A", 0}}, 1.0}}), MissingVariable);
    CHECK_THROWS_AS(build_joint<double>(two_bits(),
                                        {{{{"A", 0}, {"B", 0}}, 0.5}, {{{"A", 0}, {"B", 0}}, 0.5}}),
                    InconsistentSpec);
}

TEST_CASE("exact backend performs no rounding") {
    Scenario sc = two_bits();
    auto third = Rational(1) / 3;
    auto j = build_joint<Rational>(sc, {{{{"A", 0}, {"B", 0}}, third},
                                        {{{"A", 0}, {"B", 1}}, third},
                                        {{{"A", 1}, {"B", 0}}, third}});
    std::vector<std::string> keep{"A"};
    auto m = j.marginalize(keep);
    CHECK(m[0] == Rational(2) / 3);
    CHECK(m[1] == Rational(1) / 3);
    // sum != 1 exactly is an error on the exact backend
    CHECK_THROWS_AS(build_joint<Rational>(sc, {{{{"A", 0}, {"B", 0}}, Rational(999999999) / 1000000000}}),
                    NotNormalized);
}

TEST_CASE("marginalize: product and correlated examples") {
    // product P_A (x) P_B with P_A = (0.5, 0.5)
    auto p = build_joint<double>(two_bits(), {{{{"A", 0}, {"B", 0}}, 0.35},
                                              {{{"A", 0}, {"B", 1}}, 0.15},
                                              {{{"A", 1}, {"B", 0}}, 0.35},
                                              {{{"A", 1}, {"B", 1}}, 0.15}});
    std::vector<std::string> keep{"A"};
    auto ma = p.marginalize(keep);
    CHECK(ma[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(ma[1] == Catch::Approx(0.5).margin(1e-15));

    auto mc = correlated_bits().marginalize(keep);
    CHECK(mc[0] == 0.5);
    CHECK(mc[1] == 0.5);

    // keeping every variable is the identity
    std::vector<std::string> all{"A", "B"};
    auto same = correlated_bits().marginalize(all);
    CHECK(same.probabilities() == correlated_bits().probabilities());

    CHECK_THROWS_AS(correlated_bits().marginalize(std::vector<std::string>{"W"}), UnknownVariable);
}

TEST_CASE("condition: independence, perfect correlation, zero-mass event") {
    auto p = build_joint<double>(two_bits(), {{{{"A", 0}, {"B", 0}}, 0.35},
                                              {{{"A", 0}, {"B", 1}}, 0.15},
                                              {{{"A", 1}, {"B", 0}}, 0.35},
                                              {{{"A", 1}, {"B", 1}}, 0.15}});
    std::vector<std::string> ta{"A"};
    auto c = p.condition(ta, {{"B", 0}});
    CHECK(c[0] == Catch::Approx(0.5).margin(1e-15));

    auto corr = correlated_bits();
    auto c2 = corr.condition(ta, {{"B", 0}});
    CHECK(c2[0] == 1.0);
    CHECK(c2[1] == 0.0);

    CHECK_THROWS_AS(corr.condition(ta, Assignment{{"A", 0}, {"B", 1}}), SchemaError); // overlap
    // the zero-mass event (A=0, B=1) raises the dedicated error
    Scenario three({{"A", Role::outcome, 2, {}}, {"B", Role::outcome, 2, {}}, {"C", Role::outcome, 2, {}}});
    auto j3 = build_joint<double>(three, {{{{"A", 0}, {"B", 0}, {"C", 0}}, 0.5},
                                          {{{"A", 1}, {"B", 1}, {"C", 1}}, 0.5}});
    std::vector<std::string> tc{"C"};
    CHECK_THROWS_AS(j3.condition(tc, Assignment{{"A", 0}, {"B", 1}}), ZeroProbabilityEvent);
}

TEST_CASE("alias invariant: aliased variables never differ") {
    Scenario sc({{"lambda", Role::ontic, 2, {}}, {"Z", Role::outcome, 2, std::string("lambda")}});
    auto ok = build_joint<double>(sc, {{{{"lambda", 0}, {"Z", 0}}, 0.5}, {{{"lambda", 1}, {"Z", 1}}, 0.5}});
    CHECK(ok.size() == 4);
    CHECK_THROWS_AS(
        build_joint<double>(sc, {{{{"lambda", 0}, {"Z", 1}}, 0.5}, {{{"lambda", 1}, {"Z", 1}}, 0.5}}),
        AliasViolation);
}

TEST_CASE("property: nested marginalization is bit-exact on the exact backend") {
    Scenario sc({{"A", Role::outcome, 2, {}},
                 {"B", Role::outcome, 3, {}},
                 {"C", Role::outcome, 2, {}},
                 {"D", Role::outcome, 2, {}}});
    Rng rng(2024);
    for (int rep = 0; rep < 20; ++rep) {
        auto values = oracle::random_joint<Rational>(rng, sc.table_size());
        auto j = JointTable<Rational>::from_values(sc, values);
        std::vector<std::string> s{"A", "B", "C"};
        std::vector<std::string> t{"A", "C"};
        auto via = j.marginalize(s).marginalize(t);
        auto direct = j.marginalize(t);
        CHECK(via.probabilities() == direct.probabilities());
    }
}

TEST_CASE("property: chain rule P(t,s) = P(t|s) P(s)") {
    Scenario sc({{"A", Role::outcome, 3, {}}, {"B", Role::outcome, 2, {}}, {"C", Role::outcome, 2, {}}});
    Rng rng(99);
    auto values = oracle::random_joint<Rational>(rng, sc.table_size());
    auto j = JointTable<Rational>::from_values(sc, values);
    std::vector<std::string> ta{"A"};
    std::vector<std::string> sb{"B", "C"};
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t c = 0; c < 2; ++c) {
            Assignment given{{"B", b}, {"C", c}};
            auto cond = j.condition(ta, given);
            auto ms = j.marginalize(sb);
            for (std::size_t a = 0; a < 3; ++a) {
                Assignment full{{"A", a}, {"B", b}, {"C", c}};
                CHECK(j.at(full) == cond[a] * ms.at(given));
            }
        }
}

TEST_CASE("property: exact results converted to float match the float backend within 1e-12") {
    Scenario sc({{"A", Role::outcome, 4, {}}, {"B", Role::outcome, 4, {}}, {"C", Role::outcome, 4, {}}});
    Rng rng(5150);
    auto exact_values = oracle::random_joint<Rational>(rng, sc.table_size());
    std::vector<double> float_values;
    for (const auto& v : exact_values) float_values.push_back(numeric_traits<Rational>::to_double(v));
    auto je = JointTable<Rational>::from_values(sc, exact_values);
    auto jf = JointTable<double>::from_values(sc, float_values);

    std::vector<std::string> keep{"A", "C"};
    auto me = je.marginalize(keep);
    auto mf = jf.marginalize(keep);
    for (std::size_t i = 0; i < me.size(); ++i)
        CHECK(std::abs(numeric_traits<Rational>::to_double(me[i]) - mf[i]) <= 1e-12);

    std::vector<std::string> ta{"A"};
    Assignment given{{"B", 2}, {"C", 3}};
    auto ce = je.condition(ta, given);
    auto cf = jf.condition(ta, given);
    for (std::size_t i = 0; i < ce.size(); ++i)
        CHECK(std::abs(numeric_traits<Rational>::to_double(ce[i]) - cf[i]) <= 1e-12);
}
