#include <doctest.h>

#include <cmath>

#include "config.hpp"

using namespace toda;
using namespace toda::cli;

namespace {

RunConfig parse(const std::string& yaml, const std::string& command = "scan") {
    return parse_config(YAML::Load(yaml), command);
}

std::string error_key(const std::string& yaml, const std::string& command = "scan") {
    try {
        parse(yaml, command);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults") {
    const auto c = parse("");
    CHECK(c.command == "scan");
    CHECK(c.leaf == std::vector<int>{3, 6});
    CHECK(c.renorm.J == 70);
    CHECK(c.renorm.alpha == 2);
    CHECK(c.renorm.beta == 1);
    CHECK(c.threads == 1);
}

TEST_CASE("values are read from nested sections") {
    const auto c = parse(R"(
leaf: [2, 4]
zeta: [0.1, [-0.01, 0.02]]
q: 2
renorm: {J: 10, alpha: 3}
delta: {min: 0.001, max: 0.1, n: 3}
)");
    CHECK(c.leaf == std::vector<int>{2, 4});
    CHECK(c.zeta[1] == cplx(-0.01, 0.02));
    CHECK(c.q == std::vector<int>{2});
    CHECK(c.renorm.J == 10);
    CHECK(c.renorm.alpha == 3);
    const auto d = c.delta.values();
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(0.1));
    CHECK(d[1] == doctest::Approx(0.01));
    CHECK(d[2] == doctest::Approx(0.001));
}

TEST_CASE("errors name the offending key") {
    CHECK(error_key("renorm: {J: 0}") == "renorm.J");
    CHECK(error_key("renorm: {J: ten}") == "renorm.J");
    CHECK(error_key("renorm: {alpha: 1}") == "renorm.alpha");
    CHECK(error_key("renorm: {gamma: 1}") == "renorm.gamma");
    CHECK(error_key("bogus: 1") == "bogus");
    CHECK(error_key("q: [1, 4]") == "q");
    CHECK(error_key("leaf: [1, 2]\nzeta: [0.1, 0.1]") == "leaf");
    CHECK(error_key("zeta: [0.1]") == "zeta");
    CHECK(error_key("zeta: [[0.1, 0.2, 0.3], 0.01]") == "zeta");
    CHECK(error_key("delta: {min: 0}") == "delta.min");
    CHECK(error_key("delta: {max: 2}") == "delta.max");
    CHECK(error_key("lg: {delta: {n: 0}}", "lg") == "lg.delta.n");
    CHECK(error_key("leaves: {kind: ring}", "leaves") == "leaves.kind");
    CHECK(error_key("threads: 0") == "threads");
    CHECK(error_key("renorm: 3") == "renorm");
    CHECK(error_key("", "plot") == "command");
    // Weights beyond double range are rejected before any computation.
    CHECK(error_key("renorm: {J: 2000, alpha: 10}") == "renorm");
}

TEST_CASE("flags override file values") {
    YAML::Node node = YAML::Load("renorm: {J: 70, beta: 2}\nleaf: [3, 6]");
    set_key(node, "renorm.J", "12");
    set_key(node, "q", "[1, 3]");
    set_key(node, "lg.delta.min", "0.01");
    const auto c = parse_config(node, "scan");
    CHECK(c.renorm.J == 12);
    CHECK(c.renorm.beta == 2);
    CHECK(c.q == std::vector<int>{1, 3});
    CHECK(c.lg.delta.min == 0.01);

    YAML::Node empty;
    set_key(empty, "renorm.alpha", "4");
    CHECK(parse_config(empty, "scan").renorm.alpha == 4);

    YAML::Node scalar = YAML::Load("renorm: 3");
    CHECK_THROWS_AS(set_key(scalar, "renorm.J", "4"), ConfigError);
}

TEST_CASE("echoed config parses back to the same run") {
    const auto c = parse(R"(
leaf: [2, 4]
zeta: [[0.1, 0.03], -0.01]
q: [1]
renorm: {J: 16, alpha: 2.5, beta: 0.75, tail_tol: 1e-10}
path: {vary: 1, bracket: [0.01, 0.3]}
delta: {min: 1e-3, max: 0.2, n: 7}
lg: {r0: 1.5, a0: [0.1, 0.01], dT: 0.25, T_max: 3, scan: true}
leaves: {kind: log, nb: 5, ny: 4}
)");
    const std::string dump = to_json(c).dump();
    const auto back = parse_config(YAML::Load(dump), "scan");
    CHECK(to_json(back).dump() == dump);
    CHECK(back.zeta == c.zeta);
    CHECK(back.renorm.tail_tol == c.renorm.tail_tol);
    CHECK(back.lg.a0 == c.lg.a0);
    CHECK(back.leaves.kind == "log");
}
