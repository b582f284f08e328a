// cyclicshift: command-line front end.
//
// Exit codes: 0 success, 1 replay mismatch or internal failure, 2 input
// error, 3 null model fails the ergodicity/consistency conditions,
// 4 enumeration budget exceeded.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyclic/error.hpp"
#include "cyclic/exact_resampling.hpp"
#include "cyclic/io.hpp"
#include "cyclic/model_file.hpp"
#include "cyclic/peeling.hpp"
#include "cyclic/perm_engine.hpp"
#include "cyclic/report.hpp"
#include "cyclic/version.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace cyclic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitCondition = 3;
constexpr int kExitBudget = 4;

constexpr const char* kManifestSchema = "cyclicshift-manifest";
constexpr int kManifestSchemaVersion = 1;

std::string text_of(const std::string& v) { return v; }
std::string text_of(double v) { return format_double(v); }
std::string text_of(int v) { return std::to_string(v); }
std::string text_of(std::uint64_t v) { return std::to_string(v); }
std::string text_of(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

/// Registers options and remembers how to write their final values back as
/// a canonical argument list for the manifest.
class Recorder {
 public:
  explicit Recorder(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* option(const std::string& name, T& var, const std::string& desc) {
    items_.push_back([name, &var](Json& flags, std::vector<std::string>& argv) {
      const std::string v = text_of(var);
      flags[name] = v;
      if (v.empty()) return;
      argv.push_back("--" + name);
      argv.push_back(v);
    });
    return app_->add_option("--" + name, var, desc);
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    items_.push_back([name, &var](Json& flags, std::vector<std::string>& argv) {
      flags[name] = var;
      if (var) argv.push_back("--" + name);
    });
    return app_->add_flag("--" + name, var, desc);
  }

  void record(Json& flags, std::vector<std::string>& argv) const {
    for (const auto& f : items_) f(flags, argv);
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::function<void(Json&, std::vector<std::string>&)>> items_;
};

struct Runtime {
  int threads = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;

  void add(Recorder& r) {
    r.option("threads", threads, "Worker threads (0 = OpenMP default)")
        ->envname("CYCLICSHIFT_THREADS")
        ->check(CLI::NonNegativeNumber);
    r.option("budget", budget, "Maximum number of shift vectors to enumerate")
        ->envname("CYCLICSHIFT_BUDGET")
        ->check(CLI::PositiveNumber);
  }
};

struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_manifest(const fs::path& path, const Manifest& m, const Recorder& rec) {
  Json j;
  j["schema"] = kManifestSchema;
  j["schema_version"] = kManifestSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["subcommand"] = m.subcommand;
  j["seed"] = m.seed;
  Json flags = Json::object();
  std::vector<std::string> argv{m.subcommand};
  rec.record(flags, argv);
  j["flags"] = std::move(flags);
  j["argv"] = argv;
  j["inputs"] = Json::array();
  for (const auto& p : m.inputs) j["inputs"].push_back({{"path", p}, {"sha256", file_sha256(p)}});
  j["outputs"] = Json::array();
  for (const auto& p : m.outputs) j["outputs"].push_back({{"path", p}, {"sha256", file_sha256(p)}});
  write_text_file(path, j.dump(2) + "\n");
}

fs::path manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

// ---------------------------------------------------------------------------
// test / peel

struct TestOptions {
  std::string input;
  std::string direction = "gain";
  std::string stat = "sum";
  std::uint64_t n_shifts = 10'000;
  std::uint64_t seed = 0;
  std::string out;
  std::string na_policy = "reject";
  std::string null_scheme = "cyclic-shift";
  std::string chrom;
  std::string column_stats;
  std::string transform = "none";
  double floor = 0.0;
  bool store_null = false;
  bool exhaustive = false;
  Runtime rt;

  void add(Recorder& r, bool allow_exhaustive) {
    r.option("input", input, "Marker table (TSV, optionally gzip)")->required();
    r.option("direction", direction, "gain or loss")->check(CLI::IsMember({"gain", "loss"}));
    r.option("stat", stat, "Local statistic")->check(CLI::IsMember({"sum", "mean"}));
    r.option("n-shifts", n_shifts, "Number of random shift vectors N")->check(CLI::PositiveNumber);
    r.option("seed", seed, "Seed for all randomness");
    r.option("out", out, "Report JSON path");
    r.option("na-policy", na_policy, "reject or impute-row-median")
        ->check(CLI::IsMember({"reject", "impute-row-median"}));
    r.option("null", null_scheme, "cyclic-shift or row-permutation (baseline)")
        ->check(CLI::IsMember({"cyclic-shift", "row-permutation"}));
    r.option("chrom", chrom, "Restrict the test to one chromosome");
    r.option("column-stats", column_stats, "Write observed column statistics as CSV");
    r.option("transform", transform, "none or zscore (input holds p-values)")
        ->check(CLI::IsMember({"none", "zscore"}));
    r.option("floor", floor, "Floor applied after the zscore transform");
    r.flag("store-null", store_null, "Include the null statistics in the report");
    if (allow_exhaustive) {
      r.flag("exhaustive", exhaustive, "Enumerate all m^n shift vectors instead of sampling");
    }
    rt.add(r);
  }

  LocalStatistic local() const { return stat == "mean" ? LocalStatistic::mean() : LocalStatistic::sum(); }

  TestConfig config() const {
    TestConfig cfg;
    cfg.num_shifts = n_shifts;
    cfg.seed = seed;
    cfg.direction = parse_direction(direction);
    cfg.local = local();
    cfg.store_null = store_null;
    cfg.scheme = parse_null_scheme(null_scheme);
    cfg.threads = rt.threads;
    return cfg;
  }
};

MarkerMatrix restrict_to_chromosome(const MarkerMatrix& x, const std::string& chrom) {
  const auto& cols = x.columns();
  std::size_t first = cols.size();
  std::size_t last = 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].chromosome == chrom) {
      first = std::min(first, j);
      last = j + 1;
    }
  }
  if (first == cols.size()) throw InputError("no markers on chromosome '" + chrom + "'");
  if (last - first < 2) throw InputError("chromosome '" + chrom + "' has fewer than two markers");
  return x.column_range(first, last);
}

LoadedMatrix load_for_test(const TestOptions& o) {
  LoadedMatrix in = load_matrix(o.input, parse_na_policy(o.na_policy));
  if (o.transform == "zscore") {
    ZscoreResult z = zscore_transform(in.matrix, o.floor);
    if (z.clamped_cells > 0) {
      std::cerr << "warning: " << z.clamped_cells << " p-values equal to 1 clamped to 1 - 2^-53\n";
    }
    in.matrix = std::move(z.matrix);
    in.provenance.transform = "zscore";
    in.provenance.clamped_cells = z.clamped_cells;
  }
  if (!o.chrom.empty()) in.matrix = restrict_to_chromosome(in.matrix, o.chrom);
  return in;
}

std::string describe_marker(const ColumnAnnotation& c) {
  return c.marker_id + " (chrom " + c.chromosome.value_or(".") + ", pos " +
         (c.position_bp ? std::to_string(*c.position_bp) : std::string(".")) + ")";
}

void finish_outputs(const std::string& subcommand, const TestOptions& o, const Recorder& rec,
                    const MarkerMatrix& x, const Report& report) {
  Manifest man{subcommand, o.seed, {o.input}, {}};
  if (!o.out.empty()) {
    write_report(report, o.out);
    man.outputs.push_back(o.out);
    std::cout << "report: " << o.out << "\n";
  }
  if (!o.column_stats.empty()) {
    write_column_stats(x, column_stats(x, o.local()), fs::path(o.column_stats));
    man.outputs.push_back(o.column_stats);
    std::cout << "column statistics: " << o.column_stats << "\n";
  }
  if (!man.outputs.empty()) write_manifest(manifest_path_for(man.outputs.front()), man, rec);
}

int cmd_test(const TestOptions& o, const Recorder& rec) {
  const LoadedMatrix in = load_for_test(o);
  const MarkerMatrix& x = in.matrix;
  const TestConfig cfg = o.config();
  TestResult r;
  if (o.exhaustive) {
    if (cfg.scheme != NullScheme::cyclic_shift) {
      throw InputError("--exhaustive is only defined for the cyclic-shift null");
    }
    r = exhaustive_result(x, cfg.direction, cfg.local, o.rt.budget, cfg.threads);
    r.seed = o.seed;
  } else {
    r = cyclic_shift_test(x, cfg);
  }
  std::cout << "cyclic shift test: " << x.rows() << " samples x " << x.cols() << " markers, "
            << o.direction << ", stat " << o.stat << ", null " << o.null_scheme << "\n"
            << "T0 = " << format_double(r.t0) << " at " << describe_marker(r.peak) << "\n"
            << "p = " << format_double(r.p_value) << " (" << r.exceed_count << " of " << r.num_shifts
            << (r.exhaustive ? " shift vectors, exhaustive)" : " shift vectors, seed " + std::to_string(r.seed) + ")")
            << "\n";
  finish_outputs("test", o, rec, x, make_report(x, r, {in.provenance}));
  return kExitOk;
}

struct PeelOptions {
  TestOptions test;
  double alpha = 0.05;
  std::uint64_t max_iter = 5;
  double baseline_quantile = 0.5;

  void add(Recorder& r) {
    test.add(r, false);
    r.option("alpha", alpha, "Stop once p exceeds alpha")->check(CLI::Range(0.0, 1.0));
    r.option("max-iter", max_iter, "Maximum number of peeling iterations")->check(CLI::PositiveNumber);
    r.option("baseline-quantile", baseline_quantile, "Quantile of column sums used as baseline")
        ->check(CLI::Range(0.0, 1.0));
  }
};

int cmd_peel(const PeelOptions& o, const Recorder& rec) {
  const LoadedMatrix in = load_for_test(o.test);
  const MarkerMatrix& x = in.matrix;
  const TestConfig cfg = o.test.config();
  PeelConfig pc;
  pc.alpha = o.alpha;
  pc.max_iterations = o.max_iter;
  pc.baseline_quantile = o.baseline_quantile;
  const PeelReport peel = iterative_detection(x, cfg, pc);

  const PeelFinding& first = peel.findings.front();
  TestResult r;
  r.t0 = first.t0;
  r.p_value = first.p_value;
  r.exceed_count = first.exceed_count;
  r.num_shifts = cfg.num_shifts;
  r.seed = first.seed;
  r.direction = cfg.direction;
  r.local_stat = cfg.local.name();
  r.scheme = cfg.scheme;
  r.peak_index = first.peak_index;
  r.peak = first.peak;
  Report report = make_report(x, r, {in.provenance});
  report.command = "peel";
  report.peel_config = pc;
  report.peel = peel;

  std::cout << "peeling (" << peel.rule << "), alpha " << format_double(o.alpha) << "\n";
  for (const auto& f : peel.findings) {
    std::cout << "  " << f.iteration << ": T0 = " << format_double(f.t0) << " at "
              << describe_marker(f.peak) << ", p = " << format_double(f.p_value)
              << (f.peeled ? ", peeled markers " + std::to_string(f.region_left + 1) + "-" +
                                 std::to_string(f.region_right + 1)
                           : std::string())
              << "\n";
  }
  finish_outputs("peel", o.test, rec, x, report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate / validate

void check_model_kind(const NullModel& model, const std::string& kind) {
  if (kind.empty()) return;
  const bool markov = std::holds_alternative<MarkovChainSpec>(model);
  if ((kind == "markov") != markov) {
    throw InputError("--model " + kind + " does not match the spec file (" +
                     (markov ? "markov" : "ar1") + ")");
  }
}

struct SimulateOptions {
  std::string model;
  std::string spec;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  std::string out;
  Runtime rt;

  void add(Recorder& r) {
    r.option("model", model, "markov or ar1 (checked against the spec file)")
        ->check(CLI::IsMember({"markov", "ar1"}));
    r.option("spec", spec, "Null model file")->required();
    r.option("n", n, "Rows (samples)")->required()->check(CLI::PositiveNumber);
    r.option("m", m, "Columns (markers)")->required()->check(CLI::Range(2ULL, 1ULL << 40));
    r.option("seed", seed, "Seed");
    r.option("out", out, "Output marker table")->required();
    rt.add(r);
  }
};

int cmd_simulate(const SimulateOptions& o, const Recorder& rec) {
  const NullModel model = load_null_model(o.spec);
  check_model_kind(model, o.model);
  const MarkerMatrix x = simulate(model, o.n, o.m, o.seed);
  write_matrix(x, fs::path(o.out));
  std::cout << "simulated " << o.n << " x " << o.m << " from " << model_name(model) << ", seed "
            << o.seed << "\n"
            << "matrix: " << o.out << "\n";
  write_manifest(manifest_path_for(o.out), {"simulate", o.seed, {o.spec}, {o.out}}, rec);
  return kExitOk;
}

struct ValidateOptions {
  std::string model;
  std::string spec;
  std::uint64_t n = 4;
  std::vector<std::size_t> m_list{10, 50};
  std::uint64_t replicates = 20;
  std::uint64_t seed = 0;
  std::uint64_t samples = 10'000;
  std::string out_dir;
  Runtime rt;

  void add(Recorder& r) {
    r.option("model", model, "markov or ar1 (checked against the spec file)")
        ->check(CLI::IsMember({"markov", "ar1"}));
    r.option("spec", spec, "Null model file")->required();
    r.option("n", n, "Rows per simulated matrix")->check(CLI::PositiveNumber);
    r.option("m-list", m_list, "Comma-separated column counts")->delimiter(',');
    r.option("replicates", replicates, "Matrices per m")->check(CLI::PositiveNumber);
    r.option("seed", seed, "Seed");
    r.option("samples", samples, "Monte Carlo shift vectors when m^n exceeds the budget")
        ->check(CLI::PositiveNumber);
    r.option("out-dir", out_dir, "Directory for the comparison JSON files")->required();
    rt.add(r);
  }
};

int cmd_validate(const ValidateOptions& o, const Recorder& rec) {
  const NullModel model = load_null_model(o.spec);
  check_model_kind(model, o.model);
  for (std::size_t m : o.m_list) {
    if (m < 2) throw InputError("every m in --m-list must be at least 2");
  }
  ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.m_values = o.m_list;
  cfg.replicates = o.replicates;
  cfg.seed = o.seed;
  cfg.budget = o.rt.budget;
  cfg.num_samples = o.samples;
  cfg.threads = o.rt.threads;
  const auto results = convergence_experiment(model, cfg);

  fs::create_directories(o.out_dir);
  Manifest man{"validate", o.seed, {o.spec}, {}};
  for (const auto& c : results) {
    char name[64];
    std::snprintf(name, sizeof name, "comparison_m%zu_r%03zu.json", c.meta.m, c.meta.replicate);
    const std::string path = (fs::path(o.out_dir) / name).string();
    write_comparison(c, path);
    man.outputs.push_back(path);
  }
  std::cout << "P vs Q sup distance, " << model_name(model) << ", n = " << o.n << ", "
            << o.replicates << " replicates\n";
  for (std::size_t k = 0; k < o.m_list.size(); ++k) {
    std::vector<double> sup;
    std::size_t full = 0;
    for (std::size_t r = 0; r < o.replicates; ++r) {
      const auto& c = results[k * o.replicates + r];
      sup.push_back(c.sup_distance);
      full += c.meta.full ? 1 : 0;
    }
    std::cout << "  m = " << o.m_list[k] << " (" << results[k * o.replicates].meta.method
              << "): median " << format_double(median(sup)) << ", full " << full << "/"
              << o.replicates << "\n";
  }
  write_manifest(fs::path(o.out_dir) / "manifest.json", man, rec);
  std::cout << "comparisons: " << o.out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// transform

struct TransformOptions {
  std::string mode;
  std::string input;
  std::string tumor;
  std::string normal;
  double floor = 0.0;
  std::string na_policy = "reject";
  std::string out;
  Runtime rt;

  void add(Recorder& r) {
    r.option("mode", mode, "zscore or paired-diff")
        ->required()
        ->check(CLI::IsMember({"zscore", "paired-diff"}));
    r.option("input", input, "p-value table (zscore)");
    r.option("tumor", tumor, "Tumor table (paired-diff)");
    r.option("normal", normal, "Normal table (paired-diff)");
    r.option("floor", floor, "Lower floor for z-scores");
    r.option("na-policy", na_policy, "reject or impute-row-median")
        ->check(CLI::IsMember({"reject", "impute-row-median"}));
    r.option("out", out, "Output marker table")->required();
    rt.add(r);
  }
};

int cmd_transform(const TransformOptions& o, const Recorder& rec) {
  const NaPolicy policy = parse_na_policy(o.na_policy);
  Manifest man{"transform", 0, {}, {o.out}};
  MarkerMatrix result = [&] {
    if (o.mode == "zscore") {
      if (o.input.empty()) throw InputError("--mode zscore needs --input");
      man.inputs.push_back(o.input);
      ZscoreResult z = zscore_transform(load_matrix(o.input, policy).matrix, o.floor);
      if (z.clamped_cells > 0) {
        std::cerr << "warning: " << z.clamped_cells << " p-values equal to 1 clamped to 1 - 2^-53\n";
      }
      return std::move(z.matrix);
    }
    if (o.tumor.empty() || o.normal.empty()) throw InputError("--mode paired-diff needs --tumor and --normal");
    man.inputs = {o.tumor, o.normal};
    return paired_difference(load_matrix(o.tumor, policy).matrix, load_matrix(o.normal, policy).matrix);
  }();
  write_matrix(result, fs::path(o.out));
  std::cout << o.mode << ": " << result.rows() << " samples x " << result.cols() << " markers\n"
            << "matrix: " << o.out << "\n";
  write_manifest(manifest_path_for(o.out), man, rec);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, bool allow_replay);

int cmd_replay(const std::string& manifest_path) {
  const Json j = Json::parse(read_text_file(manifest_path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("schema", "") != kManifestSchema) {
    throw SchemaError("'" + manifest_path + "' is not a " + kManifestSchema + " document");
  }
  if (j.value("schema_version", 0) != kManifestSchemaVersion) {
    throw SchemaError(std::string(kManifestSchema) + " version " + j["schema_version"].dump() +
                      " is not supported");
  }
  if (j.value("tool_version", "") != kToolVersion) {
    std::cerr << "warning: manifest written by version " << j.value("tool_version", "?")
              << ", replaying with " << kToolVersion << "\n";
  }
  for (const auto& in : j.at("inputs")) {
    const std::string path = in.at("path").get<std::string>();
    if (file_sha256(path) != in.at("sha256").get<std::string>()) {
      throw InputError("input '" + path + "' changed since the manifest was written");
    }
  }
  const int rc = run(j.at("argv").get<std::vector<std::string>>(), false);
  if (rc != kExitOk) return rc;
  int mismatches = 0;
  for (const auto& out : j.at("outputs")) {
    const std::string path = out.at("path").get<std::string>();
    if (file_sha256(path) != out.at("sha256").get<std::string>()) {
      std::cerr << "replay mismatch: " << path << "\n";
      ++mismatches;
    }
  }
  std::cout << "replay: " << j.at("outputs").size() - static_cast<std::size_t>(mismatches) << " of "
            << j.at("outputs").size() << " outputs reproduced byte-identically\n";
  return mismatches == 0 ? kExitOk : kExitFailure;
}

int run(const std::vector<std::string>& args, bool allow_replay) {
  CLI::App app{"Cyclic-shift permutation testing for recurrent aberrations in marker matrices",
               "cyclicshift"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  TestOptions test_opts;
  Recorder test_rec(app.add_subcommand("test", "Run the cyclic shift test on a marker table"));
  test_opts.add(test_rec, true);

  PeelOptions peel_opts;
  Recorder peel_rec(app.add_subcommand("peel", "Iterated testing with peeling of detected peaks"));
  peel_opts.add(peel_rec);

  SimulateOptions sim_opts;
  Recorder sim_rec(app.add_subcommand("simulate", "Simulate a matrix from a null model"));
  sim_opts.add(sim_rec);

  ValidateOptions val_opts;
  Recorder val_rec(app.add_subcommand("validate", "Compare P and Q distributions on simulated matrices"));
  val_opts.add(val_rec);

  TransformOptions tr_opts;
  Recorder tr_rec(app.add_subcommand("transform", "z-score or paired-difference transforms"));
  tr_opts.add(tr_rec);

  std::string manifest;
  CLI::App* replay = nullptr;
  if (allow_replay) {
    replay = app.add_subcommand("replay", "Re-run a manifest and check its outputs");
    replay->add_option("manifest", manifest, "Manifest JSON")->required();
  }

  std::vector<const char*> argv{"cyclicshift"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (test_rec.app()->parsed()) return cmd_test(test_opts, test_rec);
    if (peel_rec.app()->parsed()) return cmd_peel(peel_opts, peel_rec);
    if (sim_rec.app()->parsed()) return cmd_simulate(sim_opts, sim_rec);
    if (val_rec.app()->parsed()) return cmd_validate(val_opts, val_rec);
    if (tr_rec.app()->parsed()) return cmd_transform(tr_opts, tr_rec);
    if (replay != nullptr && replay->parsed()) return cmd_replay(manifest);
  } catch (const ConditionError& e) {
    std::cerr << "cyclicshift: condition check failed: " << e.what() << "\n";
    return kExitCondition;
  } catch (const BudgetError& e) {
    std::cerr << "cyclicshift: " << e.what() << "\n";
    return kExitBudget;
  } catch (const cyclic::Error& e) {
    std::cerr << "cyclicshift: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "cyclicshift: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "cyclicshift: internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc), true);
}
