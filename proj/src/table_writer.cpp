#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "twoway/experiment.hpp"

namespace twoway {

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> cells(const ResultRow& r, const std::string& null_mark) {
  auto opt = [&](const std::optional<double>& v) {
    if (!v) return null_mark;
    const std::string s = number(*v);
    return s.empty() ? null_mark : s;
  };
  return {r.mode,
          std::to_string(r.B),
          opt(r.rho),
          opt(r.alpha),
          opt(r.lambda),
          opt(r.mu),
          opt(r.e_over_n0_db),
          opt(r.bound_lower),
          opt(r.bound_upper_1round),
          opt(r.bound_upper_2round),
          opt(r.mc_mse),
          opt(r.mc_stderr),
          opt(r.avg_energy),
          opt(r.retx_rate)};
}

}  // namespace

void write_table(const ResultTable& table, OutputFormat format, std::ostream& out) {
  const auto& cols = result_columns();
  if (format == OutputFormat::CSV) {
    for (const auto& [k, v] : table.header) out << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : table.rows) {
      const auto c = cells(r, "NA");
      for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
      out << '\n';
    }
    return;
  }
  nlohmann::ordered_json head = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.header) head[k] = v;
  out << nlohmann::ordered_json{{"header", head}}.dump() << '\n';
  for (const auto& r : table.rows) {
    const auto c = cells(r, "null");
    out << '{';
    for (std::size_t i = 0; i < c.size(); ++i) {
      out << (i ? "," : "") << '"' << cols[i] << "\":";
      if (i == 0) out << nlohmann::json(c[i]).dump();
      else out << c[i];
    }
    out << "}\n";
  }
}

}  // namespace twoway
