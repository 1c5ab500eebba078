#include "locfit/ingest.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "locfit/errors.hpp"

extern char** environ;

namespace locfit {
namespace {

double quantile7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

HalfSummary summarize(std::span<const double> xs) {
  HalfSummary s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 9; ++i) s.deciles[i] = quantile7(sorted, (i + 1) / 10.0);
  return s;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// One child from spawn to exit; returns seconds.
double run_once(const std::string& command, const std::string& run_name, const MeasureOptions& options) {
  std::vector<std::string> env_strings;
  for (char** e = environ; *e; ++e) {
    if (options.export_seed && std::strncmp(*e, "LOCFIT_SEED=", 12) == 0) continue;
    env_strings.emplace_back(*e);
  }
  if (options.export_seed) env_strings.push_back("LOCFIT_SEED=" + std::to_string(options.seed));
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);

  std::string sh = "sh";
  std::string dash_c = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  if (options.quiet) posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);

  pid_t pid = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, envp.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw MeasurementError(run_name, std::string("spawn failed: ") + std::strerror(rc));
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw MeasurementError(run_name, std::string("wait failed: ") + std::strerror(errno));
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (!WIFEXITED(status)) throw MeasurementError(run_name, "child terminated by a signal");
  if (WEXITSTATUS(status) != 0) {
    throw MeasurementError(run_name, "command exited with status " + std::to_string(WEXITSTATUS(status)));
  }
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::measured: return "measured";
    case Provenance::file: return "file";
    case Provenance::synthetic: return "synthetic";
  }
  return "";
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Sample measure_command(const std::string& command, std::size_t runs, std::size_t warmup,
                       const MeasureOptions& options) {
  if (command.empty()) throw ContractError("measure_command: empty command");
  if (runs < 1) throw ContractError("measure_command: runs must be at least 1");
  for (std::size_t i = 0; i < warmup; ++i) run_once(command, "warmup " + std::to_string(i + 1), options);
  Sample s;
  s.provenance = Provenance::measured;
  s.label = command;
  s.values.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) s.values.push_back(run_once(command, "run " + std::to_string(i + 1), options));
  s.metadata["command"] = command;
  s.metadata["runs"] = std::to_string(runs);
  s.metadata["warmup"] = std::to_string(warmup);
  s.metadata["unit"] = "seconds";
  if (options.export_seed) s.metadata["seed"] = std::to_string(options.seed);
  return s;
}

HalvesReport split_halves_check(std::span<const double> values) {
  if (values.size() < 20) throw SampleTooSmall("split_halves_check: need at least 20 observations");
  const std::size_t half = values.size() / 2;
  const auto a = values.first(half);
  const auto b = values.subspan(half);
  HalvesReport r;
  r.first = summarize(a);
  r.second = summarize(b);
  r.sup_distance = ks_distance({a.begin(), a.end()}, {b.begin(), b.end()});
  return r;
}

Sample read_sample(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Sample s;
  s.provenance = Provenance::file;
  s.label = path.stem().string();
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view body = trim(text.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string_view::npos && colon > 0) {
        const std::string key(trim(body.substr(0, colon)));
        const std::string value(trim(body.substr(colon + 1)));
        if (key.find(' ') == std::string::npos) {
          if (key == "label") s.label = value;
          s.metadata[key] = value;
        }
      }
      continue;
    }
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError(number, "not a number: '" + std::string(text) + "'");
    if (!std::isfinite(v)) throw ParseError(number, "value is not finite");
    s.values.push_back(v);
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return s;
}

void write_sample(const Sample& sample, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "# label: " << sample.label << '\n';
  out << "# provenance: " << provenance_name(sample.provenance) << '\n';
  for (const auto& [k, v] : sample.metadata) {
    if (k == "label" || k == "provenance") continue;
    out << "# " << k << ": " << v << '\n';
  }
  for (double v : sample.values) out << format_double(v) << '\n';
  out.flush();
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

Sample synth_sample(const Family& family, const ParamVector& params, double c, std::size_t n, std::uint64_t seed) {
  if (!std::isfinite(c)) throw DomainError("synth_sample: c must be finite");
  Sample s;
  s.values = family.draw(params, n, seed);
  for (double& v : s.values) v += c;
  s.provenance = Provenance::synthetic;
  s.label = family.name() + "-seed" + std::to_string(seed);
  std::string p;
  for (std::size_t i = 0; i < params.size(); ++i) p += (i ? "," : "") + format_double(params[i]);
  s.metadata["family"] = family.name();
  s.metadata["params"] = p;
  s.metadata["c"] = format_double(c);
  s.metadata["n"] = std::to_string(n);
  s.metadata["seed"] = std::to_string(seed);
  return s;
}

}  // namespace locfit
