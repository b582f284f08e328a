#include "cyclic/report.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cyclic/error.hpp"
#include "cyclic/version.hpp"

namespace cyclic {

using Json = nlohmann::ordered_json;

namespace {

Json annotation_json(std::size_t index, const ColumnAnnotation& c) {
  Json j;
  j["index"] = index;
  j["marker_id"] = c.marker_id;
  j["chrom"] = c.chromosome ? Json(*c.chromosome) : Json(nullptr);
  j["pos"] = c.position_bp ? Json(*c.position_bp) : Json(nullptr);
  return j;
}

ColumnAnnotation annotation_from(const Json& j, std::size_t& index) {
  index = j.at("index").get<std::size_t>();
  ColumnAnnotation c;
  c.marker_id = j.at("marker_id").get<std::string>();
  if (!j.at("chrom").is_null()) c.chromosome = j.at("chrom").get<std::string>();
  if (!j.at("pos").is_null()) c.position_bp = j.at("pos").get<std::uint64_t>();
  return c;
}

Json parse_document(const std::string& text, const char* schema, int version) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
    throw SchemaError(std::string("not a ") + schema + " document (no schema field)");
  }
  if (j["schema"] != schema) {
    throw SchemaError("expected a " + std::string(schema) + " document, found '" +
                      j["schema"].get<std::string>() + "'");
  }
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw SchemaError(std::string(schema) + ": missing schema_version");
  }
  if (j["schema_version"].get<int>() != version) {
    throw SchemaError(std::string(schema) + " version " + j["schema_version"].dump() +
                      " is not supported (this build reads version " + std::to_string(version) + ")");
  }
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

Report make_report(const MarkerMatrix& x, const TestResult& result,
                   std::vector<InputProvenance> inputs) {
  Report r;
  r.tool_version = kToolVersion;
  r.n_samples = x.rows();
  r.n_markers = x.cols();
  r.test = result;
  r.inputs = std::move(inputs);
  return r;
}

std::string report_to_json(const Report& r) {
  const TestResult& t = r.test;
  Json j;
  j["schema"] = kReportSchema;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = r.tool_version;
  j["command"] = r.command;
  j["n_samples"] = r.n_samples;
  j["n_markers"] = r.n_markers;
  j["direction"] = to_string(t.direction);
  j["local_stat"] = t.local_stat;
  j["null_scheme"] = to_string(t.scheme);
  j["exhaustive"] = t.exhaustive;
  j["t0"] = t.t0;
  j["p_value"] = t.p_value;
  j["exceed_count"] = t.exceed_count;
  j["N"] = t.num_shifts;
  j["seed"] = t.seed;
  j["peak"] = annotation_json(t.peak_index, t.peak);
  j["null_values"] = t.null_values ? Json(*t.null_values) : Json(nullptr);
  if (r.peel && r.peel_config) {
    Json p;
    p["rule"] = r.peel->rule;
    p["alpha"] = r.peel_config->alpha;
    p["max_iterations"] = r.peel_config->max_iterations;
    p["baseline_quantile"] = r.peel_config->baseline_quantile;
    p["findings"] = Json::array();
    for (const auto& f : r.peel->findings) {
      Json fj;
      fj["iteration"] = f.iteration;
      fj["seed"] = f.seed;
      fj["peak"] = annotation_json(f.peak_index, f.peak);
      fj["t0"] = f.t0;
      fj["p_value"] = f.p_value;
      fj["exceed_count"] = f.exceed_count;
      fj["region"] = {f.region_left, f.region_right};
      fj["peeled"] = f.peeled;
      p["findings"].push_back(std::move(fj));
    }
    j["peel"] = std::move(p);
  } else {
    j["peel"] = nullptr;
  }
  j["inputs"] = Json::array();
  for (const auto& in : r.inputs) {
    j["inputs"].push_back({{"path", in.path},
                           {"sha256", in.sha256},
                           {"na_policy", in.na_policy},
                           {"imputed_cells", in.imputed_cells},
                           {"transform", in.transform},
                           {"clamped_cells", in.clamped_cells}});
  }
  return dump(j);
}

Report report_from_json(const std::string& text) {
  const Json j = parse_document(text, kReportSchema, kReportSchemaVersion);
  try {
    Report r;
    r.tool_version = j.at("tool_version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.n_markers = j.at("n_markers").get<std::size_t>();
    TestResult& t = r.test;
    t.direction = parse_direction(j.at("direction").get<std::string>());
    t.local_stat = j.at("local_stat").get<std::string>();
    t.scheme = parse_null_scheme(j.at("null_scheme").get<std::string>());
    t.exhaustive = j.at("exhaustive").get<bool>();
    t.t0 = j.at("t0").get<double>();
    t.p_value = j.at("p_value").get<double>();
    t.exceed_count = j.at("exceed_count").get<std::uint64_t>();
    t.num_shifts = j.at("N").get<std::uint64_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.peak = annotation_from(j.at("peak"), t.peak_index);
    if (!j.at("null_values").is_null()) t.null_values = j.at("null_values").get<std::vector<double>>();
    if (const Json& p = j.at("peel"); !p.is_null()) {
      PeelConfig cfg;
      cfg.alpha = p.at("alpha").get<double>();
      cfg.max_iterations = p.at("max_iterations").get<std::size_t>();
      cfg.baseline_quantile = p.at("baseline_quantile").get<double>();
      PeelReport pr;
      pr.rule = p.at("rule").get<std::string>();
      for (const Json& fj : p.at("findings")) {
        PeelFinding f{};
        f.iteration = fj.at("iteration").get<std::size_t>();
        f.seed = fj.at("seed").get<std::uint64_t>();
        f.peak = annotation_from(fj.at("peak"), f.peak_index);
        f.t0 = fj.at("t0").get<double>();
        f.p_value = fj.at("p_value").get<double>();
        f.exceed_count = fj.at("exceed_count").get<std::uint64_t>();
        const auto region = fj.at("region").get<std::vector<std::size_t>>();
        if (region.size() != 2) throw SchemaError(std::string(kReportSchema) + ": region must have two entries");
        f.region_left = region[0];
        f.region_right = region[1];
        f.peeled = fj.at("peeled").get<bool>();
        pr.findings.push_back(std::move(f));
      }
      r.peel_config = cfg;
      r.peel = std::move(pr);
    }
    for (const Json& ij : j.at("inputs")) {
      InputProvenance in;
      in.path = ij.at("path").get<std::string>();
      in.sha256 = ij.at("sha256").get<std::string>();
      in.na_policy = ij.at("na_policy").get<std::string>();
      in.imputed_cells = ij.at("imputed_cells").get<std::uint64_t>();
      in.transform = ij.at("transform").get<std::string>();
      in.clamped_cells = ij.at("clamped_cells").get<std::uint64_t>();
      r.inputs.push_back(std::move(in));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string(kReportSchema) + " version 1: " + e.what());
  } catch (const DomainError& e) {
    throw SchemaError(std::string(kReportSchema) + " version 1: " + e.what());
  }
}

void write_report(const Report& r, const std::filesystem::path& path) {
  write_text_file(path, report_to_json(r));
}

Report read_report(const std::filesystem::path& path) { return report_from_json(read_text_file(path)); }

std::string comparison_to_json(const DistributionComparison& c) {
  Json j;
  j["schema"] = kComparisonSchema;
  j["schema_version"] = kComparisonSchemaVersion;
  j["meta"] = {{"n", c.meta.n},
               {"m", c.meta.m},
               {"spec", c.meta.spec},
               {"seed", c.meta.seed},
               {"replicate", c.meta.replicate},
               {"method", c.meta.method},
               {"num_samples", c.meta.num_samples},
               {"full", c.meta.full}};
  j["grid"] = c.grid;
  j["cdf_p"] = c.cdf_p;
  j["cdf_q"] = c.cdf_q;
  j["sup_distance"] = c.sup_distance;
  return dump(j);
}

DistributionComparison comparison_from_json(const std::string& text) {
  const Json j = parse_document(text, kComparisonSchema, kComparisonSchemaVersion);
  try {
    DistributionComparison c;
    const Json& m = j.at("meta");
    c.meta.n = m.at("n").get<std::size_t>();
    c.meta.m = m.at("m").get<std::size_t>();
    c.meta.spec = m.at("spec").get<std::string>();
    c.meta.seed = m.at("seed").get<std::uint64_t>();
    c.meta.replicate = m.at("replicate").get<std::size_t>();
    c.meta.method = m.at("method").get<std::string>();
    c.meta.num_samples = m.at("num_samples").get<std::uint64_t>();
    c.meta.full = m.at("full").get<bool>();
    c.grid = j.at("grid").get<std::vector<double>>();
    c.cdf_p = j.at("cdf_p").get<std::vector<double>>();
    c.cdf_q = j.at("cdf_q").get<std::vector<double>>();
    c.sup_distance = j.at("sup_distance").get<double>();
    if (c.cdf_p.size() != c.grid.size() || c.cdf_q.size() != c.grid.size()) {
      throw SchemaError(std::string(kComparisonSchema) + ": grid and CDF lengths differ");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string(kComparisonSchema) + " version 1: " + e.what());
  }
}

void write_comparison(const DistributionComparison& c, const std::filesystem::path& path) {
  write_text_file(path, comparison_to_json(c));
}

DistributionComparison read_comparison(const std::filesystem::path& path) {
  return comparison_from_json(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write to '" + path.string() + "' failed");
}

}  // namespace cyclic
