#include "cyclic/model_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "cyclic/error.hpp"

namespace cyclic {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& text, std::size_t line) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw InputError("not a number: '" + tok + "'", line);
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError("expected at least one number", line);
  return out;
}

double parse_scalar(const std::string& text, std::size_t line) {
  const auto v = parse_numbers(text, line);
  if (v.size() != 1) throw InputError("expected a single number", line);
  return v.front();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

NullModel parse_null_model(std::istream& in) {
  std::optional<std::string> model;
  std::optional<std::string> name;
  std::optional<std::vector<double>> states;
  std::vector<std::vector<double>> transition;
  std::map<std::string, double> scalars;
  std::map<std::string, std::size_t> seen_at;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InputError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key != "transition") {
      if (seen_at.count(key) != 0) throw InputError("duplicate key '" + key + "'", line);
      seen_at[key] = line;
    }
    if (key == "model") {
      if (value != "markov" && value != "ar1") {
        throw InputError("model must be 'markov' or 'ar1', got '" + value + "'", line);
      }
      model = value;
    } else if (key == "name") {
      if (value.empty()) throw InputError("empty name", line);
      name = value;
    } else if (key == "states") {
      states = parse_numbers(value, line);
    } else if (key == "transition") {
      transition.push_back(parse_numbers(value, line));
    } else if (key == "mean" || key == "sd" || key == "phi") {
      scalars[key] = parse_scalar(value, line);
    } else {
      throw InputError("unknown key '" + key + "'", line);
    }
  }
  if (!model) throw InputError("missing 'model' key");

  if (*model == "markov") {
    for (const auto& [key, at] : seen_at) {
      if (key == "mean" || key == "sd" || key == "phi") {
        throw InputError("key '" + key + "' does not apply to a markov model", at);
      }
    }
    if (!states) throw InputError("markov model needs 'states'");
    if (transition.size() != states->size()) {
      throw InputError("expected " + std::to_string(states->size()) + " transition rows, got " +
                       std::to_string(transition.size()));
    }
    return MarkovChainSpec(name.value_or("markov"), *states, TransitionMatrix(transition));
  }

  if (states || !transition.empty()) {
    throw InputError("'states'/'transition' do not apply to an ar1 model");
  }
  for (const char* key : {"mean", "sd", "phi"}) {
    if (scalars.count(key) == 0) throw InputError(std::string("ar1 model needs '") + key + "'");
  }
  AR1Spec spec{name.value_or("ar1"), scalars["mean"], scalars["sd"], scalars["phi"]};
  spec.validate();
  return spec;
}

NullModel load_null_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path.string() + "'");
  return parse_null_model(in);
}

std::string format_null_model(const NullModel& model) {
  std::ostringstream os;
  if (const auto* chain = std::get_if<MarkovChainSpec>(&model)) {
    os << "model = markov\nname = " << chain->name() << "\nstates =";
    for (double s : chain->states()) os << ' ' << fmt(s);
    os << '\n';
    for (std::size_t v = 0; v < chain->size(); ++v) {
      os << "transition =";
      for (double p : chain->transition().row(v)) os << ' ' << fmt(p);
      os << '\n';
    }
  } else {
    const auto& ar = std::get<AR1Spec>(model);
    os << "model = ar1\nname = " << ar.name << "\nmean = " << fmt(ar.mean) << "\nsd = " << fmt(ar.sd)
       << "\nphi = " << fmt(ar.phi) << '\n';
  }
  return os.str();
}

}  // namespace cyclic
