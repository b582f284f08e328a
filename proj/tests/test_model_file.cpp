#include <sstream>

#include "doctest.h"

#include "cyclic/error.hpp"
#include "cyclic/model_file.hpp"

using namespace cyclic;

namespace {

NullModel parse(const std::string& text) {
  std::istringstream in(text);
  return parse_null_model(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.line();
  }
  return SIZE_MAX;
}

}  // namespace

TEST_CASE("markov model files") {
  const auto model = parse(
      "# two states\n"
      "model = markov\n"
      "name = flip\n"
      "\n"
      "states = 0 1   # trailing comment\n"
      "transition = 0.9 0.1\n"
      "transition = 0.2 0.8\n");
  const auto& spec = std::get<MarkovChainSpec>(model);
  CHECK(spec.name() == "flip");
  CHECK(spec.states() == std::vector<double>{0, 1});
  CHECK(spec.transition()(0, 1) == 0.1);
  CHECK(spec.stationary()[0] == doctest::Approx(2.0 / 3.0));
  CHECK(model_name(model) == "flip");
}

TEST_CASE("ar1 model files") {
  const auto model = parse("model = ar1\nmean = 1.5\nsd = 2\nphi = -0.3\n");
  const auto& spec = std::get<AR1Spec>(model);
  CHECK(spec.name == "ar1");
  CHECK(spec.mean == 1.5);
  CHECK(spec.sd == 2.0);
  CHECK(spec.phi == -0.3);
  CHECK_THROWS_AS(parse("model = ar1\nmean = 0\nsd = 1\nphi = 1\n"), DomainError);
  CHECK_THROWS_AS(parse("model = ar1\nmean = 0\nsd = -1\nphi = 0\n"), DomainError);
}

TEST_CASE("malformed model files report the offending line") {
  CHECK(error_line("model = markov\ncolour = red\n") == 2);
  CHECK(error_line("model = ar1\nmean = 0\nmean = 1\n") == 3);
  CHECK(error_line("model = ar1\nmean = zero\n") == 2);
  CHECK(error_line("model = ar1\nsd 1\n") == 2);
  CHECK(error_line("model = hmm\n") == 1);
  CHECK(error_line("model = markov\nstates = 0 1\nphi = 0.2\ntransition = 1 0\ntransition = 0 1\n") == 3);
  CHECK_THROWS_AS(parse("states = 0 1\n"), InputError);
  CHECK_THROWS_AS(parse("model = markov\nstates = 0 1\ntransition = 0.5 0.5\n"), InputError);
  CHECK_THROWS_AS(parse("model = ar1\nmean = 0\nsd = 1\n"), InputError);
}

TEST_CASE("invalid parameters are domain or condition errors") {
  CHECK_THROWS_AS(parse("model = markov\nstates = 0 1\ntransition = 0.5 0.6\ntransition = 0.5 0.5\n"), DomainError);
  CHECK_THROWS_AS(load_null_model(CYCLICSHIFT_DATA_DIR "/specs/periodic2.txt"), ConditionError);
  CHECK_THROWS_AS(load_null_model("/nonexistent/model.txt"), InputError);
}

TEST_CASE("format_null_model round-trips") {
  for (const char* name : {"markov3", "markov5", "ar1"}) {
    const auto model = load_null_model(std::string(CYCLICSHIFT_DATA_DIR "/specs/") + name + ".txt");
    const auto again = parse(format_null_model(model));
    CHECK(format_null_model(again) == format_null_model(model));
    if (const auto* a = std::get_if<MarkovChainSpec>(&model)) {
      const auto& b = std::get<MarkovChainSpec>(again);
      CHECK(a->states() == b.states());
      CHECK(a->transition() == b.transition());
    }
  }
}
