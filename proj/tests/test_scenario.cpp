#include <catch2/catch_amalgamated.hpp>

#include "ontolab/scenario.hpp"

using namespace ontolab;

TEST_CASE("scenario validates names and sizes") {
    CHECK_THROWS_AS(Scenario({{"A", Role::setting, 2, {}}, {"A", Role::setting, 2, {}}}), SchemaError);
    CHECK_THROWS_AS(Scenario({{"A", Role::setting, 0, {}}}), SchemaError);
    CHECK_THROWS_AS(Scenario({{"", Role::setting, 2, {}}}), SchemaError);
}

TEST_CASE("alias validation") {
    // valid alias
    Scenario ok({{"lambda", Role::ontic, 3, {}}, {"Z", Role::outcome, 3, std::string("lambda")}});
    CHECK(ok.size() == 2);
    // dangling target
    CHECK_THROWS_AS(Scenario({{"Z", Role::outcome, 2, std::string("lambda")}}), UnknownVariable);
    // size mismatch
    CHECK_THROWS_AS(Scenario({{"lambda", Role::ontic, 2, {}}, {"Z", Role::outcome, 3, std::string("lambda")}}),
                    SchemaError);
    // cycle
    CHECK_THROWS_AS(Scenario({{"P", Role::outcome, 2, std::string("Q")}, {"Q", Role::outcome, 2, std::string("P")}}),
                    SchemaError);
}

TEST_CASE("flatten and unflatten round-trip") {
    Scenario sc({{"A", Role::setting, 2, {}}, {"B", Role::setting, 3, {}}, {"C", Role::setting, 4, {}}});
    REQUIRE(sc.table_size() == 24);
    std::vector<std::size_t> symbols(3);
    for (std::size_t i = 0; i < 24; ++i) {
        sc.unflatten(i, symbols);
        CHECK(sc.flatten(symbols) == i);
        for (std::size_t v = 0; v < 3; ++v) CHECK(sc.symbol_at(i, v) == symbols[v]);
    }
}

TEST_CASE("table cap is enforced") {
    // 2^24 > 10^7
    std::vector<VariableSpec> vars;
    for (int i = 0; i < 24; ++i) vars.push_back({"v" + std::to_string(i), Role::outcome, 2, {}});
    CHECK_THROWS_AS(Scenario(vars), CapExceeded);
}

TEST_CASE("canonical scenario has the expected shape") {
    Scenario sc = canonical_scenario();
    REQUIRE(sc.size() == 7);
    CHECK(sc.variable(0).name == "A");
    CHECK(sc.variable(6).name == "lambda");
    CHECK(sc.variable(6).role == Role::ontic);
    CHECK(sc.table_size() == 128);
    CHECK(sc.index_of("Z") == 5);
    CHECK_THROWS_AS(sc.index_of("W"), UnknownVariable);
}

TEST_CASE("assignment formatting follows scenario order") {
    Scenario sc = canonical_scenario();
    Assignment a{{"Z", 1}, {"A", 0}, {"lambda", 1}};
    CHECK(format_assignment(sc, a) == "A=0;Z=1;lambda=1");
}
