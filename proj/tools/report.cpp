#include "report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "locfit/errors.hpp"
#include "locfit/ingest.hpp"

namespace locfit::cli {
namespace {

using nlohmann::json;

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

std::string text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return csv_number(v);
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string joined(const json& arr) {
  std::string s;
  for (std::size_t i = 0; i < arr.size(); ++i) s += (i ? ";" : "") + csv_number(arr[i]);
  return s;
}

}  // namespace

std::string csv_number(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  return format_double(v.get<double>());
}

void write_report_csvs(const json& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& sets = report.at("sample_sets");

  {
    const auto path = dir / "metrics.csv";
    auto out = open_csv(path);
    out << "sample_set,label,family,method,status,k,n,neg2l,aic,caic,hqic,bic,cv_neg2l,c_hat,converged,params\n";
    for (const auto& c : report.at("cells")) {
      const auto set = c.at("sample_set").get<std::size_t>();
      out << set << ',' << quoted(sets.at(set).at("label").get<std::string>()) << ',' << text(c.at("family")) << ','
          << text(c.at("method")) << ',' << text(c.at("status"));
      if (c.at("status") == "ok") {
        const auto& m = c.at("metrics");
        out << ',' << text(m.at("k")) << ',' << text(m.at("n")) << ',' << text(m.at("neg2l")) << ','
            << text(m.at("aic")) << ',' << text(m.at("caic")) << ',' << text(m.at("hqic")) << ','
            << text(m.at("bic")) << ',' << text(m.at("cv_neg2l")) << ',' << text(c.at("c_hat")) << ','
            << text(c.at("converged")) << ',' << joined(c.at("params"));
      } else {
        out << ",,,,,,,,,,,";
      }
      out << '\n';
    }
    finish(out, path);
  }

  {
    const auto path = dir / "deltas.csv";
    auto out = open_csv(path);
    out << "metric,sample_set,family,method,value,delta\n";
    for (const auto& [metric, rows] : report.at("deltas").items()) {
      for (const auto& r : rows) {
        out << metric << ',' << text(r.at("sample_set")) << ',' << text(r.at("family")) << ','
            << text(r.at("method")) << ',' << text(r.at("value")) << ',' << text(r.at("delta")) << '\n';
      }
    }
    finish(out, path);
  }

  {
    // one column per method (or family:method), one row per (metric, sample set)
    const bool per_family = report.at("settings").at("per_family").get<bool>();
    const auto path = dir / "boxplot.csv";
    auto out = open_csv(path);
    auto column = [per_family](const json& r) {
      return per_family ? text(r.at("family")) + ":" + text(r.at("method")) : text(r.at("method"));
    };
    std::set<std::string> present;
    for (const auto& [metric, rows] : report.at("deltas").items()) {
      for (const auto& r : rows) present.insert(column(r));
    }
    // columns follow the cell order of the report
    std::vector<std::string> columns;
    for (const auto& c : report.at("cells")) {
      const std::string key = column(c);
      if (present.count(key) && std::find(columns.begin(), columns.end(), key) == columns.end()) {
        columns.push_back(key);
      }
    }
    out << "metric,sample_set";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (const auto& [metric, rows] : report.at("deltas").items()) {
      std::map<std::size_t, std::map<std::string, std::string>> table;
      for (const auto& r : rows) {
        table[r.at("sample_set").get<std::size_t>()][column(r)] = text(r.at("delta"));
      }
      for (const auto& [set, cells] : table) {
        out << metric << ',' << set;
        for (const auto& c : columns) {
          const auto it = cells.find(c);
          out << ',' << (it == cells.end() ? "" : it->second);
        }
        out << '\n';
      }
    }
    finish(out, path);
  }

  {
    const auto path = dir / "wins.csv";
    auto out = open_csv(path);
    out << "metric,family,method,first,second\n";
    for (const auto& [metric, rows] : report.at("wins").items()) {
      for (const auto& r : rows) {
        out << metric << ',' << text(r.at("family")) << ',' << text(r.at("method")) << ',' << text(r.at("first"))
            << ',' << text(r.at("second")) << '\n';
      }
    }
    finish(out, path);
  }

  {
    const auto path = dir / "timings.csv";
    auto out = open_csv(path);
    out << "family,method,n_starts,n_converged,mean_all_ns,mean_conv_ns,ci_all_lo_ns,ci_all_hi_ns,ci_conv_lo_ns,"
           "ci_conv_hi_ns\n";
    for (const auto& t : report.at("timings")) {
      const json none;
      const auto& ci_all = t.at("ci_all_ns");
      const auto& ci_conv = t.at("ci_conv_ns");
      out << text(t.at("family")) << ',' << text(t.at("method")) << ',' << text(t.at("n_starts")) << ','
          << text(t.at("n_converged")) << ',' << text(t.at("mean_all_ns")) << ',' << text(t.at("mean_conv_ns"))
          << ',' << text(ci_all.at(0)) << ',' << text(ci_all.at(1)) << ','
          << text(ci_conv.is_null() ? none : ci_conv.at(0)) << ',' << text(ci_conv.is_null() ? none : ci_conv.at(1))
          << '\n';
    }
    finish(out, path);
  }
}

}  // namespace locfit::cli
