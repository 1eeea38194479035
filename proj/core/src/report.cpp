#include "sdmrt/report.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "sdmrt/error.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

namespace {

std::string iteration_text(const std::optional<std::size_t>& it) {
  return it ? std::to_string(*it) : std::string("-");
}

std::vector<std::string> metrics_cells(const MetricsRow& r) {
  return {r.system,
          r.dataset,
          iteration_text(r.iteration),
          format_fixed(r.bleu, 6),
          format_fixed(r.ter, 6),
          format_fixed(r.repeated_rate, 6),
          format_fixed(r.ppl, 6),
          std::to_string(r.seed),
          r.config_hash};
}

std::string join_tabs(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += '\t';
    line += cells[i];
  }
  return line;
}

}  // namespace

void ExperimentReport::append(const ExperimentReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
  stage_log.insert(stage_log.end(), other.stage_log.begin(), other.stage_log.end());
}

const MetricsRow& ExperimentReport::row(std::string_view system, std::string_view dataset,
                                        std::uint64_t seed,
                                        std::optional<std::size_t> iteration) const {
  for (const auto& r : rows)
    if (r.system == system && r.dataset == dataset && r.seed == seed &&
        (!iteration || r.iteration == iteration))
      return r;
  throw Error("report has no row for " + std::string(system) + "/" + std::string(dataset) +
              " seed " + std::to_string(seed));
}

double ExperimentReport::diagnostic(std::string_view name, std::string_view system,
                                    std::uint64_t seed) const {
  for (const auto& d : diagnostics)
    if (d.name == name && d.system == system && d.seed == seed) return d.value;
  throw Error("report has no diagnostic " + std::string(name) + " for " + std::string(system) +
              " seed " + std::to_string(seed));
}

std::string format_metrics_tsv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const auto& r : rows) out += join_tabs(metrics_cells(r)) + '\n';
  return out;
}

std::vector<MetricsRow> parse_metrics_tsv(std::string_view text, const std::string& source_name) {
  std::vector<MetricsRow> rows;
  std::size_t line_no = 0;
  bool header = false;
  for (auto line : split_on(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kMetricsHeader) throw FormatError(source_name, line_no, "unexpected header");
      header = true;
      continue;
    }
    auto f = split_on(line, '\t');
    if (f.size() != 9) throw FormatError(source_name, line_no, "expected 9 columns");
    try {
      MetricsRow r;
      r.system = std::string(f[0]);
      r.dataset = std::string(f[1]);
      if (f[2] != "-") r.iteration = static_cast<std::size_t>(parse_int(f[2]));
      r.bleu = parse_double(f[3]);
      r.ter = parse_double(f[4]);
      r.repeated_rate = parse_double(f[5]);
      r.ppl = parse_double(f[6]);
      r.seed = static_cast<std::uint64_t>(parse_int(f[7]));
      r.config_hash = std::string(f[8]);
      rows.push_back(std::move(r));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(source_name, line_no, e.what());
    }
  }
  if (!header) throw FormatError(source_name, line_no, "missing header");
  return rows;
}

std::string format_diagnostics_tsv(const std::vector<DiagnosticRow>& rows) {
  std::string out(kDiagnosticsHeader);
  out += '\n';
  for (const auto& d : rows)
    out += join_tabs({d.name, d.system, format_fixed(d.value, 6), std::to_string(d.seed),
                      d.config_hash}) +
           '\n';
  return out;
}

std::string format_aligned(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  }
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string line;
    for (std::size_t j = 0; j < cells[i].size(); ++j) {
      if (j) line += "  ";
      line += cells[i][j];
      if (j + 1 < cells[i].size()) line.append(width[j] - cells[i][j].size(), ' ');
    }
    out += line + '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t j = 0; j < width.size(); ++j) total += width[j] + (j ? 2 : 0);
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

std::string format_metrics_table(const std::vector<MetricsRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"system", "dataset", "iter", "bleu", "ter", "rep_rate", "ppl", "seed", "config"});
  for (const auto& r : rows)
    cells.push_back({r.system, r.dataset, iteration_text(r.iteration), format_fixed(r.bleu, 2),
                     format_fixed(r.ter, 4), format_fixed(r.repeated_rate, 4),
                     format_fixed(r.ppl, 3), r.seed ? std::to_string(r.seed) : "median",
                     r.config_hash});
  return format_aligned(cells);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty set");
  std::sort(values.begin(), values.end());
  auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<MetricsRow> aggregate_median(const std::vector<MetricsRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::optional<std::size_t>>;
  std::vector<Key> order;
  std::map<Key, std::vector<const MetricsRow*>> groups;
  for (const auto& r : rows) {
    Key key{r.system, r.dataset, r.iteration};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<MetricsRow> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    auto collect = [&](auto member) {
      std::vector<double> v;
      for (const auto* r : g) v.push_back(r->*member);
      return median(std::move(v));
    };
    MetricsRow m;
    m.system = std::get<0>(key);
    m.dataset = std::get<1>(key);
    m.iteration = std::get<2>(key);
    m.bleu = collect(&MetricsRow::bleu);
    m.ter = collect(&MetricsRow::ter);
    m.repeated_rate = collect(&MetricsRow::repeated_rate);
    m.ppl = collect(&MetricsRow::ppl);
    m.seed = 0;
    m.config_hash = g.front()->config_hash;
    for (const auto* r : g)
      if (r->config_hash != m.config_hash) m.config_hash = "mixed";
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace sdmrt
