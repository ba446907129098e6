#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "entlab/error.hpp"
#include "entlab/harness.hpp"
#include "test_util.hpp"

using namespace entlab;
using testutil::q;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("rationals round trip through JSON") {
  for (const Rational& r : {q(0, 1), q(1, 3), q(-5, 8), q(7, 1)}) CHECK(rational_from_json(rational_json(r)) == r);
  CHECK(rational_from_json(Json(3)) == 3);
  CHECK_THROWS_AS(rational_from_json(Json(0.5)), Error);
  CHECK_THROWS_AS(rational_from_json(Json("1/0")), Error);
}

TEST_CASE("scenario parses tables, dsl members and params") {
  const Json j = Json::parse(R"({
    "x_bits": 1, "z_bits": 1,
    "probs": ["1/4", "1/4", "1/4", "1/4"],
    "class": ["x0", {"kind": "table", "values": [1, 0, 0, 1]}, {"kind": "complement", "of": "z0"}],
    "params": {"k": 1, "epsilon": "1/8"},
    "seed": 9
  })");
  const Scenario s = scenario_from_json(j);
  CHECK(s.joint.at(1, 0) == q(1, 4));
  REQUIRE(s.cls.size() == 3);
  // x-major layout: value index x * |Z| + z.
  CHECK(s.cls[0].at(1, 0) == 1);
  CHECK(s.cls[0].at(0, 1) == 0);
  CHECK(s.cls[1].at(0, 1) == 0);
  CHECK(s.cls[2].at(0, 1) == 0);
  CHECK(s.cls[2].at(0, 0) == 1);
  CHECK(s.params.gamma == q(1, 2));
  CHECK(s.params.epsilon == q(1, 8));
  CHECK(s.seed == 9u);

  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(std::equal(back.joint.probs().begin(), back.joint.probs().end(), s.joint.probs().begin()));
  REQUIRE(back.cls.size() == s.cls.size());
  for (std::size_t i = 0; i < s.cls.size(); ++i) CHECK(back.cls[i].same_table(s.cls[i]));
}

TEST_CASE("paired z domains survive serialization") {
  const Scenario s = generate_instance(InstanceSpec{1, 1, 1, 2}, 3);
  REQUIRE(s.joint.pair().has_value());
  const Joint back = joint_from_json(joint_to_json(s.joint));
  REQUIRE(back.pair().has_value());
  CHECK(*back.pair() == *s.joint.pair());
}

TEST_CASE("malformed scenarios raise ParseError") {
  auto kind_of = [](const std::string& text) {
    try {
      read_scenario(write_temp("entlab_bad.json", text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  CHECK(kind_of("{not json") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"z_bits": 0, "probs": ["1"]})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"x_bits": 1, "z_bits": 0, "probs": ["1"]})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"x_bits": 1, "z_bits": 0, "probs": ["1/2", "1/2"], "class": [{"kind": "bogus"}]})") ==
        ErrorKind::ParseError);
  CHECK(kind_of(R"({"x_bits": 1, "z_bits": 0, "probs": ["1/2", "1/2"], "params": {"k": 0.5}})") ==
        ErrorKind::ParseError);
  CHECK_THROWS_AS(read_scenario("/nonexistent/entlab.json"), Error);
}

TEST_CASE("generated instances are deterministic with exact unit mass") {
  const InstanceSpec spec;  // n = m = 2
  const Scenario a = generate_instance(spec, 42), b = generate_instance(spec, 42), c = generate_instance(spec, 43);
  CHECK(a.joint.x_domain().bits() == 2);
  CHECK(a.joint.z_domain().bits() == 2);
  CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());
  CHECK(scenario_to_json(a).dump() != scenario_to_json(c).dump());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    InstanceSpec s;
    s.n = 1 + seed % 3;
    s.m1 = seed % 4;
    s.support = seed % 5;
    s.complement_closed = seed % 2 == 0;
    const Scenario g = generate_instance(s, seed);
    Rational total(0);
    for (const auto& p : g.joint.probs()) {
      CHECK(p >= 0);
      CHECK(mpz_sizeinbase(p.get_den_mpz_t(), 2) <= 11);  // denominators divide 2^10
      total += p;
    }
    CHECK(total == 1);
    if (s.complement_closed) CHECK(is_complement_closed(g.cls));
  }
}

TEST_CASE("random_dyadic sums to one") {
  std::mt19937_64 rng(5);
  for (std::size_t len : {1u, 2u, 7u, 64u}) {
    const auto v = random_dyadic(rng, len, 10);
    CHECK(v.size() == len);
    Rational total(0);
    for (const auto& p : v) total += p;
    CHECK(total == 1);
  }
}

TEST_CASE("suites pass at small scale and reject unknown ids") {
  for (const auto& id : suite_ids()) {
    if (id == "COUNT-MOD" || id == "SAMP-MOD") continue;  // heavier; covered by the acceptance run
    const auto r = run_suite(id, 10, 1);
    CHECK_MESSAGE(r.pass(), id);
    CHECK(r.certificates.size() == 10);
  }
  CHECK_THROWS_AS(run_suite("NOPE", 1, 1), Error);
}

TEST_CASE("suite reports are identical across runs and thread counts") {
  for (const char* id : {"IT-CHAIN", "CORE", "MET-MOD"}) {
    const auto one = report_to_json(run_suite(id, 12, 77, 1)).dump();
    CHECK(one == report_to_json(run_suite(id, 12, 77, 1)).dump());
    CHECK(one == report_to_json(run_suite(id, 12, 77, 3)).dump());
  }
}

TEST_CASE("separation search") {
  SUBCASE("one z value leaves nothing to find") {
    const auto r = search_separation("metric-vs-modulus", 300, 1, InstanceSpec{2, 0, 0, 1});
    CHECK_FALSE(r.found);
    CHECK(r.best_gap == 0);
  }
  SUBCASE("opposite-sign two-z example within budget") {
    const auto r = search_separation("metric-vs-modulus", 10000, 1);
    REQUIRE(r.found);
    REQUIRE(r.witness.has_value());
    // Re-check the witness: metric-avg holds at eps = weaker optimum, modulus-avg fails there.
    const Scenario& w = *r.witness;
    CHECK(metric_cond_avg(w.joint, w.cls, w.params).holds);
    CHECK_FALSE(modulus_cond(w.joint, w.cls, w.params, true).holds);
    CHECK(r.best_gap > 0);
  }
  SUBCASE("deterministic per seed") {
    const auto a = separation_to_json(search_separation("metric-vs-decomposable", 700, 5));
    const auto b = separation_to_json(search_separation("metric-vs-decomposable", 700, 5));
    CHECK(a.dump() == b.dump());
  }
  CHECK_THROWS_AS(search_separation("hill-vs-metric", 10, 1), Error);
}
