#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>
#include <tuple>

#include "CLI11.hpp"
#include "json.hpp"
#include "locfit/bench.hpp"
#include "locfit/distributions.hpp"
#include "locfit/errors.hpp"
#include "locfit/ingest.hpp"
#include "locfit/mle.hpp"
#include "locfit/selection.hpp"
#include "report.hpp"

namespace {

using nlohmann::json;
using namespace locfit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAllFailed = 2;
constexpr int kExitIo = 3;

struct Settings {
  std::string families = "all";
  std::string methods = "all";
  std::string grid = "adaptive";
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  EstimatorConfig estimator;
  OptimizerSettings optimizer;
  std::size_t resamples = 1000;
  double level = 0.95;
};

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<const Family*> parse_families(const std::string& list) {
  std::vector<const Family*> out;
  if (list == "all") {
    for (auto name : family_names()) out.push_back(&family_by_name(name));
    return out;
  }
  for (const auto& name : split(list)) out.push_back(&family_by_name(name));
  return out;
}

std::vector<Method> parse_methods(const std::string& list) {
  if (list == "all") return {all_methods().begin(), all_methods().end()};
  std::vector<Method> out;
  for (const auto& name : split(list)) {
    const auto m = parse_method(name);
    if (!m) {
      std::string valid;
      for (Method v : all_methods()) valid += (valid.empty() ? "" : ", ") + std::string(method_name(v));
      throw ContractError("unknown method '" + name + "'; valid methods: " + valid);
    }
    out.push_back(*m);
  }
  return out;
}

ParamVector parse_params(const std::string& list) {
  ParamVector out;
  for (const auto& item : split(list)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ContractError("not a number in --params: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

FitOptions fit_options(const Settings& s) {
  FitOptions o;
  if (s.grid == "fixed") {
    o.grid_policy = GridPolicy::fixed;
  } else if (s.grid != "adaptive") {
    throw ContractError("--grid must be 'adaptive' or 'fixed'");
  }
  o.estimator = s.estimator;
  o.optimizer = s.optimizer;
  s.estimator.validate();
  s.optimizer.validate();
  return o;
}

unsigned cell_threads() {
  if (const char* env = std::getenv("LOCFIT_THREADS")) {
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec != std::errc() || *ptr != '\0' || v == 0) throw ContractError("LOCFIT_THREADS must be a positive integer");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json settings_json(const Settings& s) {
  return {{"families", s.families},
          {"methods", s.methods},
          {"grid", s.grid},
          {"folds", s.folds},
          {"seed", s.seed},
          {"k_base", s.estimator.k_base},
          {"nu", s.estimator.nu},
          {"q_min", s.estimator.q_min},
          {"max_iterations", s.optimizer.max_iterations},
          {"f_rel_tol", s.optimizer.f_rel_tol},
          {"x_abs_tol", s.optimizer.x_abs_tol},
          {"penalty_value", s.optimizer.penalty_value},
          {"bootstrap_resamples", s.resamples},
          {"bootstrap_level", s.level}};
}

json sample_json(const Sample& s, const std::string& path) {
  return {{"path", path}, {"label", s.label}, {"n", s.values.size()}, {"metadata", s.metadata}};
}

struct Cell {
  json doc;
  std::vector<FitOutcome> starts;
  std::optional<MetricSet> metrics;
};

Cell run_cell(const Family& family, Method method, const Sample& sample, const Settings& s, const FitOptions& opts) {
  Cell cell;
  json& j = cell.doc;
  j["family"] = family.name();
  j["method"] = std::string(method_name(method));
  try {
    const FitResult r = fit(family, method, sample.values, opts);
    const FitOutcome& b = r.best;
    MetricSet m = metrics(b, sample.values.size());
    std::optional<std::string> cv_error;
    if (s.folds > 0) {
      try {
        m.cv_neg2l = cross_validated_neg2l(family, method, sample.values, s.folds, s.seed, opts);
      } catch (const std::exception& e) {
        cv_error = e.what();
      }
    }
    std::size_t converged = 0;
    for (const auto& o : r.starts) converged += o.converged ? 1 : 0;
    j["status"] = "ok";
    j["params"] = b.params;
    j["c_hat"] = b.c_hat ? json(*b.c_hat) : json(nullptr);
    j["loglik"] = b.loglik;
    j["neg2l"] = b.neg2l;
    j["converged"] = b.converged;
    j["best_from_converged"] = r.best_from_converged;
    j["n_evaluations"] = b.n_evaluations;
    j["elapsed_ns"] = static_cast<std::int64_t>(b.elapsed.count());
    j["init_point"] = b.init_point;
    j["n_starts"] = r.starts.size();
    j["n_converged"] = converged;
    j["warnings"] = r.warnings;
    j["metrics"] = {{"neg2l", m.neg2l}, {"aic", m.aic},   {"caic", m.caic},
                    {"hqic", m.hqic},   {"bic", m.bic},   {"cv_neg2l", m.cv_neg2l ? json(*m.cv_neg2l) : json(nullptr)},
                    {"k", m.k},         {"n", m.n}};
    if (cv_error) j["cv_error"] = *cv_error;
    cell.starts = r.starts;
    cell.metrics = m;
  } catch (const FitFailed& e) {
    j["status"] = "failed";
    j["error"] = e.what();
  } catch (const ContractError& e) {
    j["status"] = "failed";
    j["error"] = e.what();
  } catch (const DomainError& e) {
    j["status"] = "failed";
    j["error"] = e.what();
  }
  return cell;
}

struct Job {
  std::size_t sample_set;
  const Family* family;
  Method method;
};

std::vector<Cell> run_jobs(const std::vector<Job>& jobs, const std::vector<Sample>& samples, const Settings& s,
                           const FitOptions& opts) {
  std::vector<Cell> cells(jobs.size());
  const unsigned workers = std::min<unsigned>(cell_threads(), static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      cells[i] = run_cell(*job.family, job.method, samples[job.sample_set], s, opts);
      cells[i].doc["sample_set"] = job.sample_set;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return cells;
}

void write_json(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write error on '" + path + "'");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------- commands

struct MeasureArgs {
  std::string cmd;
  std::size_t runs = 100;
  std::size_t warmup = 0;
  std::string out;
  std::string label;
  bool export_seed = false;
  std::uint64_t seed = 0;
};

int cmd_measure(const MeasureArgs& a) {
  Sample s = measure_command(a.cmd, a.runs, a.warmup, {a.export_seed, a.seed, true});
  if (!a.label.empty()) s.label = a.label;
  write_sample(s, a.out);
  return kExitOk;
}

struct SynthArgs {
  std::string family;
  std::string params;
  double c = 0.0;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string label;
};

int cmd_synth(const SynthArgs& a) {
  const Family& f = family_by_name(a.family);
  const ParamVector p = parse_params(a.params);
  if (p.size() != f.param_count()) {
    throw ContractError(f.name() + " takes " + std::to_string(f.param_count()) + " parameters, got " +
                        std::to_string(p.size()));
  }
  Sample s = synth_sample(f, p, a.c, a.n, a.seed);
  if (!a.label.empty()) s.label = a.label;
  write_sample(s, a.out);
  return kExitOk;
}

struct FitArgs {
  std::string input;
  std::string out;
  Settings settings;
};

int cmd_fit(const FitArgs& a) {
  const auto families = parse_families(a.settings.families);
  const auto methods = parse_methods(a.settings.methods);
  const FitOptions opts = fit_options(a.settings);
  const std::vector<Sample> samples{read_sample(a.input)};

  std::vector<Job> jobs;
  for (const Family* f : families) {
    for (Method m : methods) jobs.push_back({0, f, m});
  }
  const auto cells = run_jobs(jobs, samples, a.settings, opts);
  json doc = {{"schema", 1}, {"command", "fit"}, {"input", sample_json(samples[0], a.input)},
              {"settings", settings_json(a.settings)}};
  doc["cells"] = json::array();
  bool any_ok = false;
  for (const auto& c : cells) {
    json cell = c.doc;
    cell.erase("sample_set");
    any_ok = any_ok || cell["status"] == "ok";
    doc["cells"].push_back(std::move(cell));
  }
  write_json(doc, a.out);
  return any_ok ? kExitOk : kExitAllFailed;
}

struct CompareArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  bool per_family = false;
  Settings settings;
};

int cmd_compare(const CompareArgs& a) {
  const auto families = parse_families(a.settings.families);
  const auto methods = parse_methods(a.settings.methods);
  const FitOptions opts = fit_options(a.settings);
  std::vector<Sample> samples;
  for (const auto& p : a.inputs) samples.push_back(read_sample(p));

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const Family* f : families) {
      for (Method m : methods) jobs.push_back({i, f, m});
    }
  }
  const auto cells = run_jobs(jobs, samples, a.settings, opts);

  json doc = {{"schema", 1}, {"command", "compare"}};
  doc["settings"] = settings_json(a.settings);
  doc["settings"]["per_family"] = a.per_family;
  doc["sample_sets"] = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    json s = sample_json(samples[i], a.inputs[i]);
    s["index"] = i;
    doc["sample_sets"].push_back(std::move(s));
  }

  std::vector<ReportRow> rows;
  std::map<std::pair<std::string, Method>, std::vector<FitOutcome>> starts;
  doc["cells"] = json::array();
  bool any_ok = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    doc["cells"].push_back(cells[i].doc);
    if (!cells[i].metrics) continue;
    any_ok = true;
    rows.push_back({jobs[i].sample_set, jobs[i].family->name(), jobs[i].method, *cells[i].metrics});
    auto& bucket = starts[{jobs[i].family->name(), jobs[i].method}];
    bucket.insert(bucket.end(), cells[i].starts.begin(), cells[i].starts.end());
  }

  std::vector<Metric> metric_list = {Metric::neg2l, Metric::aic, Metric::caic, Metric::hqic, Metric::bic};
  if (a.settings.folds > 0) metric_list.push_back(Metric::cv_neg2l);
  doc["deltas"] = json::object();
  doc["wins"] = json::object();
  for (Metric metric : metric_list) {
    const std::string name(metric_name(metric));
    std::vector<ReportRow> used = a.per_family ? rows : best_family_per_method(rows, metric);
    std::stable_sort(used.begin(), used.end(), [](const ReportRow& x, const ReportRow& y) {
      return std::tie(x.sample_set, x.method) < std::tie(y.sample_set, y.method);
    });
    const auto deltas = quality_deltas(used, metric);
    json d = json::array();
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (!deltas[i]) continue;
      d.push_back({{"sample_set", used[i].sample_set},
                   {"family", used[i].family},
                   {"method", std::string(method_name(used[i].method))},
                   {"value", *used[i].metrics.value(metric)},
                   {"delta", *deltas[i]}});
    }
    doc["deltas"][name] = std::move(d);

    const auto first = win_counts(used, metric, 1);
    const auto second = win_counts(used, metric, 2);
    json w = json::array();
    for (const auto& [key, count] : first) {
      w.push_back({{"family", key.first},
                   {"method", std::string(method_name(key.second))},
                   {"first", count},
                   {"second", second.at(key)}});
    }
    doc["wins"][name] = std::move(w);
  }

  doc["timings"] = json::array();
  const BootstrapOptions boot{a.settings.level, a.settings.resamples, a.settings.seed};
  for (const Family* f : families) {
    for (Method m : methods) {
      const auto it = starts.find({f->name(), m});
      if (it == starts.end() || it->second.empty()) continue;
      const TimingAggregate t = aggregate_timings(it->second, boot);
      json ci_conv = nullptr;
      if (t.ci_converged) ci_conv = {t.ci_converged->low, t.ci_converged->high};
      doc["timings"].push_back({{"family", t.family},
                                {"method", t.method},
                                {"n_starts", t.n_starts},
                                {"n_converged", t.n_converged},
                                {"mean_all_ns", t.mean_all_ns},
                                {"mean_conv_ns", t.mean_converged_ns ? json(*t.mean_converged_ns) : json(nullptr)},
                                {"ci_all_ns", {t.ci_all.low, t.ci_all.high}},
                                {"ci_conv_ns", ci_conv}});
    }
  }

  std::filesystem::create_directories(a.out_dir);
  write_json(doc, (std::filesystem::path(a.out_dir) / "report.json").string());
  cli::write_report_csvs(doc, a.out_dir);
  return any_ok ? kExitOk : kExitAllFailed;
}

int cmd_render(const std::string& report, const std::string& out_dir) {
  const json doc = read_json(report);
  if (!doc.contains("schema") || doc["schema"] != 1 || doc.value("command", "") != "compare") {
    throw ContractError("'" + report + "' is not a schema 1 compare report");
  }
  cli::write_report_csvs(doc, out_dir);
  return kExitOk;
}

int cmd_check(const std::string& input) {
  const Sample s = read_sample(input);
  const HalvesReport r = split_halves_check(s.values);
  auto half = [](const HalfSummary& h) {
    return json{{"mean", h.mean}, {"sd", h.sd}, {"deciles", h.deciles}};
  };
  write_json({{"schema", 1},
              {"command", "check"},
              {"input", sample_json(s, input)},
              {"first_half", half(r.first)},
              {"second_half", half(r.second)},
              {"sup_distance", r.sup_distance}},
             "-");
  return kExitOk;
}

void add_fit_settings(CLI::App* app, Settings& s) {
  app->add_option("--families", s.families, "Comma-separated family names, or 'all'")->capture_default_str();
  app->add_option("--methods", s.methods, "Comma-separated inference methods, or 'all'")->capture_default_str();
  app->add_option("--grid", s.grid, "Start grid: adaptive (from the data) or fixed (generic)")
      ->check(CLI::IsMember({"adaptive", "fixed"}))
      ->capture_default_str();
  app->add_option("--folds", s.folds, "Cross-validation folds (0 disables)")->capture_default_str();
  app->add_option("--seed", s.seed, "Seed for fold assignment and bootstrap")->capture_default_str();
  app->add_option("--k-base", s.estimator.k_base, "Log base of the c1 estimator")->capture_default_str();
  app->add_option("--nu", s.estimator.nu, "Confidence level of the c4 estimator")->capture_default_str();
  app->add_option("--q-min", s.estimator.q_min, "Quantile of the minimum used by iteratedC")->capture_default_str();
  app->add_option("--max-iter", s.optimizer.max_iterations, "Optimizer iteration cap")->capture_default_str();
  app->add_option("--f-rel-tol", s.optimizer.f_rel_tol, "Relative spread of simplex values")->capture_default_str();
  app->add_option("--x-abs-tol", s.optimizer.x_abs_tol, "Simplex diameter")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locfit: fit positive-support distributions to samples with a large unknown minimum"};
  app.require_subcommand(1);

  MeasureArgs measure;
  auto* m = app.add_subcommand("measure", "Time repeated runs of a shell command");
  m->add_option("--cmd", measure.cmd, "Command run through /bin/sh -c")->required();
  m->add_option("--runs", measure.runs, "Measured runs")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--warmup", measure.warmup, "Discarded runs before measuring")->capture_default_str();
  m->add_option("--out", measure.out, "Sample file to write")->required();
  m->add_option("--label", measure.label, "Sample label");
  m->add_flag("--export-seed", measure.export_seed, "Set LOCFIT_SEED in the child environment");
  m->add_option("--seed", measure.seed, "Value exported with --export-seed");

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Write a synthetic sample");
  sy->add_option("--family", synth.family, "Family name")->required();
  sy->add_option("--params", synth.params, "Comma-separated parameters, in the family's order")->required();
  sy->add_option("--c", synth.c, "Location added to every draw")->capture_default_str();
  sy->add_option("--n", synth.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
  sy->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  sy->add_option("--out", synth.out, "Sample file to write")->required();
  sy->add_option("--label", synth.label, "Sample label");

  FitArgs fit_args;
  auto* f = app.add_subcommand("fit", "Fit families with inference methods to one sample");
  f->add_option("--input", fit_args.input, "Sample file")->required();
  f->add_option("--out", fit_args.out, "JSON report path (default: stdout)");
  add_fit_settings(f, fit_args.settings);

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "Compare methods over several samples");
  c->add_option("--inputs", compare.inputs, "Sample files")->required()->expected(1, -1);
  c->add_option("--out-dir", compare.out_dir, "Directory for report.json and CSV tables")->required();
  c->add_flag("--per-family", compare.per_family, "Rank (family, method) pairs instead of each method's best family");
  c->add_option("--resamples", compare.settings.resamples, "Bootstrap resamples")->capture_default_str();
  c->add_option("--level", compare.settings.level, "Bootstrap interval level")->capture_default_str();
  add_fit_settings(c, compare.settings);

  std::string render_report;
  std::string render_dir;
  auto* r = app.add_subcommand("render", "Regenerate the CSV tables of a compare report");
  r->add_option("--report", render_report, "report.json written by compare")->required();
  r->add_option("--out-dir", render_dir, "Directory for the CSV tables")->required();

  std::string check_input;
  auto* ck = app.add_subcommand("check", "First-half versus second-half summary of a sample");
  ck->add_option("--input", check_input, "Sample file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*m) return cmd_measure(measure);
    if (*sy) return cmd_synth(synth);
    if (*f) return cmd_fit(fit_args);
    if (*c) return cmd_compare(compare);
    if (*r) return cmd_render(render_report, render_dir);
    if (*ck) return cmd_check(check_input);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const MeasurementError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
