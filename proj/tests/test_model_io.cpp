#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "gamemine/featurize.hpp"
#include "gamemine/model_io.hpp"
#include "gamemine/synthetic.hpp"
#include "test_util.hpp"

using namespace gamemine;
using testutil::tiny_nominal_dataset;

namespace {

Dataset rps_training_data(std::uint64_t seed, double adherence = 0.9) {
  RpsSynthParams p;
  p.n_subjects = 3;
  p.n_threads = 1;
  p.n_turns = 25;
  p.rule.adherence = adherence;
  p.seed = seed;
  return featurize_rps(synth_rps(p), WindowConfig{2});
}

Dataset ct_training_data(std::uint64_t seed) {
  CtSynthParams p;
  p.n_subjects = 5;
  p.n_records = 40;
  p.seed = seed;
  return featurize_ct(synth_ct(p));
}

// Round-trips through text twice and checks stability plus behavior.
void check_round_trip(const TrainedModel& m, const Dataset& probe) {
  const std::string text1 = write_model(m);
  const TrainedModel back = read_model(text1);
  const std::string text2 = write_model(back);
  CHECK(text1 == text2);
  CHECK(back.schema == m.schema);
  CHECK(back.class_attribute == m.class_attribute);
  CHECK(back.spec.id == m.spec.id);
  for (const Instance& inst : probe.instances) CHECK(predict(back, inst) == predict(m, inst));
}

} // namespace

TEST_CASE("model text starts with the format line and ends with end") {
  const Dataset d = tiny_nominal_dataset({"a"}, {"p", "q"}, {{0, 0}});
  const std::string text = write_model(fit_zero_r(d));
  CHECK(text.rfind("gamemine-model 1\n", 0) == 0);
  CHECK(text.find("\nend\n") != std::string::npos);
}

TEST_CASE("majority model round-trips") {
  const Dataset d = rps_training_data(3);
  check_round_trip(fit_zero_r(d), d);
}

TEST_CASE("seeded random model round-trips and keeps its seed") {
  const Dataset d = rps_training_data(4);
  const TrainedModel m = fit_uniform_random(d, 777);
  const std::string text = write_model(m);
  const TrainedModel back = read_model(text);
  CHECK(write_model(back) == text);
  // both copies start their draw streams at zero, so sequences agree
  std::vector<std::size_t> a, b;
  for (int i = 0; i < 50; ++i) {
    a.push_back(predict(m, d.instances[0]));
    b.push_back(predict(back, d.instances[0]));
  }
  CHECK(a == b);
}

TEST_CASE("single-attribute rule models round-trip, nominal and numeric") {
  const Dataset rps = rps_training_data(5);
  check_round_trip(fit_one_r(rps), rps);

  const Dataset ct = ct_training_data(6);
  check_round_trip(fit_one_r(ct, OneRParams{3}), ct);
  // rule text survives the trip
  const TrainedModel m = fit_one_r(ct, OneRParams{3});
  CHECK(extract_rule_text(read_model(write_model(m))) == extract_rule_text(m));
}

TEST_CASE("rule models with unseen values round-trip the gaps") {
  const Dataset d = tiny_nominal_dataset({"a", "b", "c"}, {"p", "q"},
                                         {{0, 0}, {0, 0}, {1, 1}});
  const TrainedModel m = fit_one_r(d);
  const TrainedModel back = read_model(write_model(m));
  const OneRModel& s = std::get<OneRModel>(back.state);
  REQUIRE(s.value_map.size() == 3);
  CHECK(s.value_map[0] == 0);
  CHECK(s.value_map[1] == 1);
  CHECK_FALSE(s.value_map[2].has_value());
}

TEST_CASE("decision table models round-trip") {
  const Dataset rps = rps_training_data(7);
  check_round_trip(fit_decision_table(rps), rps);
  const Dataset ct = ct_training_data(8);
  check_round_trip(fit_decision_table(ct), ct);
}

TEST_CASE("margin classifier models round-trip bit-exactly") {
  const Dataset ct = ct_training_data(9);
  check_round_trip(fit_smo_binary(ct), ct);
  const Dataset rps = rps_training_data(10, 0.8);
  check_round_trip(fit_smo_multiclass(rps), rps);

  // decision values, not just argmax, survive the %.17g round-trip
  const TrainedModel m = fit_smo_binary(ct);
  const TrainedModel back = read_model(write_model(m));
  const SmoModel& s1 = std::get<SmoModel>(m.state);
  const SmoModel& s2 = std::get<SmoModel>(back.state);
  REQUIRE(s1.pairwise.size() == s2.pairwise.size());
  for (std::size_t i = 0; i < s1.pairwise.size(); ++i) {
    CHECK(s1.pairwise[i].bias == s2.pairwise[i].bias);
    CHECK(s1.pairwise[i].coefficients == s2.pairwise[i].coefficients);
    CHECK(s1.pairwise[i].support_points == s2.pairwise[i].support_points);
  }
}

TEST_CASE("acceptance-threshold model round-trips") {
  const Dataset ct = ct_training_data(11);
  check_round_trip(fit_equilibrium_responder(ct), ct);
}

TEST_CASE("reader rejects other format versions") {
  const Dataset d = tiny_nominal_dataset({"a"}, {"p", "q"}, {{0, 0}});
  std::string text = write_model(fit_zero_r(d));
  text.replace(text.find("gamemine-model 1"), 16, "gamemine-model 2");
  try {
    read_model(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("reader rejects a wrong magic word") {
  CHECK_THROWS_AS(read_model(std::string("other-format 1\nend\n")), ParseError);
}

TEST_CASE("truncated model files fail with the line number") {
  const Dataset d = rps_training_data(12);
  const std::string text = write_model(fit_one_r(d));
  // cut the file shortly after the header
  const std::size_t cut = text.find('\n', text.find("classifier"));
  try {
    read_model(text.substr(0, cut + 1));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() > 1);
  }
}

TEST_CASE("corrupt numeric tokens fail as parse errors") {
  const Dataset d = tiny_nominal_dataset({"a"}, {"p", "q"}, {{0, 0}});
  std::string text = write_model(fit_zero_r(d));
  const std::size_t at = text.find("majority 0");
  REQUIRE(at != std::string::npos);
  text.replace(at, 10, "majority x");
  CHECK_THROWS_AS(read_model(text), ParseError);
}

TEST_CASE("unknown classifier names fail as parse errors") {
  const Dataset d = tiny_nominal_dataset({"a"}, {"p", "q"}, {{0, 0}});
  std::string text = write_model(fit_zero_r(d));
  const std::size_t at = text.find("classifier zero_r");
  REQUIRE(at != std::string::npos);
  text.replace(at, 17, "classifier what_r");
  CHECK_THROWS_AS(read_model(text), ParseError);
}

TEST_CASE("attribute names with spaces survive") {
  Dataset d;
  d.schema = {nominal_attribute("first move", {"left x", "right y"}),
              nominal_attribute("the class", {"yes", "no"})};
  d.class_attribute = 1;
  d.instances.push_back({Cell::nominal(0), Cell::nominal(0)});
  d.instances.push_back({Cell::nominal(1), Cell::nominal(1)});
  const TrainedModel m = fit_one_r(d);
  const TrainedModel back = read_model(write_model(m));
  CHECK(back.schema == d.schema);
  CHECK(predict(back, d.instances[0]) == 0);
  CHECK(predict(back, d.instances[1]) == 1);
}

TEST_CASE("stream overloads match the string overloads") {
  const Dataset d = rps_training_data(13);
  const TrainedModel m = fit_one_r(d);
  std::ostringstream out;
  write_model(out, m);
  CHECK(out.str() == write_model(m));
  std::istringstream in(out.str());
  const TrainedModel back = read_model(in);
  CHECK(write_model(back) == out.str());
}
