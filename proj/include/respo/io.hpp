#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "numeric.hpp"
#include "solver.hpp"

namespace respo {

namespace detail {

/// CSV/JSON identifiers are restricted to [A-Za-z0-9_.-] so they can be
/// embedded in CSV headers without quoting.
inline bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

/// Whole-field real parse; trailing garbage (including '\r') is malformed.
inline std::optional<double> parse_real(std::string_view field) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

/// Lines split on '\n'; a final trailing newline does not create a line.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] inline void malformed(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + what);
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace detail

/// Edge-list CSV with header `source,target,weight`. Players are collected in
/// first-appearance order; absent pairs have weight 0.
inline RawWeightMatrix parse_edges_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines[0] != "source,target,weight") {
    detail::malformed(1, "expected header 'source,target,weight'");
  }

  std::vector<std::string> ids;
  std::map<std::string, std::size_t, std::less<>> index;
  const auto intern = [&](std::string_view id, std::size_t line_no) {
    if (!detail::valid_id(id)) {
      detail::malformed(line_no, "invalid player id '" + std::string(id) +
                                     "' (allowed characters: A-Z a-z 0-9 _ . -)");
    }
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    ids.emplace_back(id);
    index.emplace(std::string(id), ids.size() - 1);
    return ids.size() - 1;
  };

  struct Edge {
    std::size_t source, target;
    double weight;
  };
  std::vector<Edge> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto fields = detail::split_fields(lines[li]);
    if (fields.size() != 3) {
      detail::malformed(line_no, "expected 3 fields 'source,target,weight', got " +
                                     std::to_string(fields.size()));
    }
    const std::size_t s = intern(fields[0], line_no);
    const std::size_t t = intern(fields[1], line_no);
    const auto w = detail::parse_real(fields[2]);
    if (!w) detail::malformed(line_no, "cannot parse weight '" + std::string(fields[2]) + "'");
    if (!(*w >= 0.0) || !std::isfinite(*w)) {
      fail(ErrorCode::NegativeWeight, "line " + std::to_string(line_no) + ": weight " +
                                          format_real(*w) + " must be finite and nonnegative");
    }
    if (!seen.emplace(s, t).second) {
      fail(ErrorCode::DuplicateEdge, "line " + std::to_string(line_no) + ": duplicate edge " +
                                         ids[s] + " -> " + ids[t]);
    }
    edges.push_back({s, t, *w});
  }
  if (edges.empty()) detail::malformed(lines.size() + 1, "empty instance: no edge rows");

  const std::size_t n = ids.size();
  std::vector<double> weights(n * n, 0.0);
  for (const Edge& e : edges) weights[e.source * n + e.target] = e.weight;
  return RawWeightMatrix(PlayerSet(std::move(ids)), std::move(weights));
}

/// Impacts CSV with header `node,impact`; exactly one value per declared
/// player. Missing players are an error, never an implicit zero.
inline ImpactVector parse_impacts_csv(std::string_view text, const PlayerSet& players) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines[0] != "node,impact") {
    detail::malformed(1, "expected header 'node,impact'");
  }
  std::vector<double> values(players.size(), 0.0);
  std::vector<bool> present(players.size(), false);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto fields = detail::split_fields(lines[li]);
    if (fields.size() != 2) {
      detail::malformed(line_no, "expected 2 fields 'node,impact', got " + std::to_string(fields.size()));
    }
    if (!detail::valid_id(fields[0])) {
      detail::malformed(line_no, "invalid player id '" + std::string(fields[0]) + "'");
    }
    const auto idx = players.index_of(fields[0]);
    if (!idx) {
      fail(ErrorCode::UnknownPlayer,
           "line " + std::to_string(line_no) + ": player '" + std::string(fields[0]) +
               "' is not declared in the graph");
    }
    if (present[*idx]) {
      detail::malformed(line_no, "duplicate impact for player '" + std::string(fields[0]) + "'");
    }
    const auto v = detail::parse_real(fields[1]);
    if (!v) detail::malformed(line_no, "cannot parse impact '" + std::string(fields[1]) + "'");
    values[*idx] = *v;
    present[*idx] = true;
  }
  for (std::size_t i = 0; i < players.size(); ++i) {
    if (!present[i]) {
      fail(ErrorCode::MissingPlayer, "no impact given for player '" + players.id(i) + "'");
    }
  }
  return ImpactVector(players, std::move(values));
}

/// Single-file instance: players, a matrix (dense rows or edge list), and
/// impacts, plus optional gamma default and free-form metadata. The
/// row_stochastic flag decides whether entries are validated as given or
/// normalized from raw weights.
struct InstanceDocument {
  PlayerSet players;
  std::vector<double> entries;  // row-major n*n adjacency weights
  bool row_stochastic = false;
  std::vector<double> impacts;  // aligned with players
  std::optional<double> gamma;
  std::optional<std::string> name;
  std::optional<std::string> period;
};

inline InstanceDocument parse_instance_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::SchemaViolation, "instance: expected a JSON object");

  static const std::set<std::string> known = {"name",   "period", "players",       "matrix",
                                              "edges",  "impacts", "row_stochastic", "gamma"};
  for (const auto& [key, value] : doc.items()) {
    if (known.find(key) == known.end()) {
      fail(ErrorCode::SchemaViolation, "instance: unknown key '" + key + "'");
    }
  }

  if (!doc.contains("players") || !doc["players"].is_array() || doc["players"].empty()) {
    fail(ErrorCode::SchemaViolation, "players: expected a nonempty array of ids");
  }
  std::vector<std::string> ids;
  std::set<std::string> uniq;
  for (std::size_t i = 0; i < doc["players"].size(); ++i) {
    const auto& p = doc["players"][i];
    const std::string path = "players[" + std::to_string(i) + "]";
    if (!p.is_string()) fail(ErrorCode::SchemaViolation, path + ": expected a string id");
    const std::string id = p.get<std::string>();
    if (!detail::valid_id(id)) {
      fail(ErrorCode::SchemaViolation, path + ": invalid id '" + id +
                                           "' (allowed characters: A-Z a-z 0-9 _ . -)");
    }
    if (!uniq.insert(id).second) {
      fail(ErrorCode::SchemaViolation, path + ": duplicate id '" + id + "'");
    }
    ids.push_back(id);
  }
  PlayerSet players(std::move(ids));
  const std::size_t n = players.size();

  const bool has_matrix = doc.contains("matrix");
  const bool has_edges = doc.contains("edges");
  if (has_matrix == has_edges) {
    fail(ErrorCode::SchemaViolation,
         has_matrix ? "instance: keys 'matrix' and 'edges' are mutually exclusive"
                    : "instance: one of 'matrix' or 'edges' is required");
  }

  std::vector<double> entries(n * n, 0.0);
  if (has_matrix) {
    const auto& m = doc["matrix"];
    if (!m.is_array() || m.size() != n) {
      fail(ErrorCode::SchemaViolation,
           "matrix: expected " + std::to_string(n) + " rows, got " +
               (m.is_array() ? std::to_string(m.size()) : std::string("a non-array")));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = m[i];
      if (!row.is_array() || row.size() != n) {
        fail(ErrorCode::SchemaViolation, "matrix[" + std::to_string(i) + "]: expected " +
                                             std::to_string(n) + " entries");
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!row[j].is_number()) {
          fail(ErrorCode::SchemaViolation,
               "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]: expected a number");
        }
        entries[i * n + j] = row[j].get<double>();
      }
    }
  } else {
    const auto& edges = doc["edges"];
    if (!edges.is_array()) fail(ErrorCode::SchemaViolation, "edges: expected an array");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      const std::string path = "edges[" + std::to_string(k) + "]";
      if (!e.is_object()) fail(ErrorCode::SchemaViolation, path + ": expected an object");
      for (const auto& [key, value] : e.items()) {
        if (key != "source" && key != "target" && key != "weight") {
          fail(ErrorCode::SchemaViolation, path + ": unknown key '" + key + "'");
        }
      }
      const auto endpoint = [&](const char* key) {
        if (!e.contains(key) || !e[key].is_string()) {
          fail(ErrorCode::SchemaViolation, path + "." + key + ": expected a player id string");
        }
        const std::string id = e[key].get<std::string>();
        const auto idx = players.index_of(id);
        if (!idx) fail(ErrorCode::SchemaViolation, path + "." + key + ": unknown player '" + id + "'");
        return *idx;
      };
      const std::size_t s = endpoint("source");
      const std::size_t t = endpoint("target");
      if (!e.contains("weight") || !e["weight"].is_number()) {
        fail(ErrorCode::SchemaViolation, path + ".weight: expected a number");
      }
      const double w = e["weight"].get<double>();
      if (!(w >= 0.0) || !std::isfinite(w)) {
        fail(ErrorCode::SchemaViolation, path + ".weight: must be finite and nonnegative");
      }
      if (!seen.emplace(s, t).second) {
        fail(ErrorCode::SchemaViolation, path + ": duplicate edge " + players.id(s) + " -> " + players.id(t));
      }
      entries[s * n + t] = w;
    }
  }

  bool row_stochastic = has_matrix;  // dense rows claim to be the adjacency matrix itself
  if (doc.contains("row_stochastic")) {
    if (!doc["row_stochastic"].is_boolean()) {
      fail(ErrorCode::SchemaViolation, "row_stochastic: expected a boolean");
    }
    row_stochastic = doc["row_stochastic"].get<bool>();
  }

  if (!doc.contains("impacts") || !doc["impacts"].is_object()) {
    fail(ErrorCode::SchemaViolation, "impacts: expected an object mapping player id to impact");
  }
  std::vector<double> impacts(n, 0.0);
  std::vector<bool> present(n, false);
  for (const auto& [key, value] : doc["impacts"].items()) {
    const auto idx = players.index_of(key);
    if (!idx) fail(ErrorCode::SchemaViolation, "impacts." + key + ": unknown player");
    if (!value.is_number()) fail(ErrorCode::SchemaViolation, "impacts." + key + ": expected a number");
    impacts[*idx] = value.get<double>();
    present[*idx] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!present[i]) {
      fail(ErrorCode::SchemaViolation, "impacts: missing impact for player '" + players.id(i) + "'");
    }
  }

  std::optional<double> gamma;
  if (doc.contains("gamma")) {
    if (!doc["gamma"].is_number()) fail(ErrorCode::SchemaViolation, "gamma: expected a number");
    const double g = doc["gamma"].get<double>();
    if (!(g > 0.0 && g < 1.0)) {
      fail(ErrorCode::SchemaViolation, "gamma: must lie strictly inside (0,1), got " + format_real(g));
    }
    gamma = g;
  }

  std::optional<std::string> name;
  std::optional<std::string> period;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(ErrorCode::SchemaViolation, "name: expected a string");
    name = doc["name"].get<std::string>();
  }
  if (doc.contains("period")) {
    if (!doc["period"].is_string()) fail(ErrorCode::SchemaViolation, "period: expected a string");
    period = doc["period"].get<std::string>();
  }

  return InstanceDocument{std::move(players), std::move(entries), row_stochastic,
                          std::move(impacts), gamma,  std::move(name), std::move(period)};
}

/// Route the document's entries to validation (claimed row-stochastic) or to
/// normalization (raw weights).
inline RowStochasticMatrix instance_matrix(const InstanceDocument& doc, double row_tolerance = 1e-6,
                                           ZeroRowPolicy policy = ZeroRowPolicy::Reject) {
  if (doc.row_stochastic) {
    return validate(doc.entries, doc.players, row_tolerance);
  }
  return normalize(RawWeightMatrix(doc.players, doc.entries), policy);
}

inline ImpactVector instance_impacts(const InstanceDocument& doc) {
  return ImpactVector(doc.players, doc.impacts);
}

/// Stable single-file rendering of an instance; parse_instance_json of the
/// output reproduces players, entries, and impacts bit-exactly.
inline std::string write_instance_json(const InstanceDocument& doc) {
  const std::size_t n = doc.players.size();
  std::string out = "{\n";
  if (doc.name) out += "  \"name\": \"" + detail::json_escape(*doc.name) + "\",\n";
  if (doc.period) out += "  \"period\": \"" + detail::json_escape(*doc.period) + "\",\n";
  out += "  \"players\": [";
  for (std::size_t i = 0; i < n; ++i) {
    out += (i ? ", " : "") + ("\"" + doc.players.id(i) + "\"");
  }
  out += "],\n  \"matrix\": [\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += "    [";
    for (std::size_t j = 0; j < n; ++j) {
      out += (j ? ", " : "") + format_real(doc.entries[i * n + j]);
    }
    out += i + 1 < n ? "],\n" : "]\n";
  }
  out += "  ],\n";
  out += std::string("  \"row_stochastic\": ") + (doc.row_stochastic ? "true" : "false") + ",\n";
  out += "  \"impacts\": {";
  for (std::size_t i = 0; i < n; ++i) {
    out += (i ? ", " : "") + ("\"" + doc.players.id(i) + "\": " + format_real(doc.impacts[i]));
  }
  out += "}";
  if (doc.gamma) out += ",\n  \"gamma\": " + format_real(*doc.gamma);
  out += "\n}\n";
  return out;
}

/// Report JSON with stable key order: players in instance order, then the
/// global fields. Reals carry 17 significant digits.
inline std::string write_report_json(const ResponsibilityReport& report) {
  std::string out = "{\n  \"players\": [\n";
  const std::size_t n = report.players.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += "    {\"id\": \"" + report.players.id(i) + "\", \"total\": " + format_real(report.total[i]) +
           ", \"direct\": " + format_real(report.direct[i]) +
           ", \"indirect\": " + format_real(report.indirect[i]) + "}";
    out += i + 1 < n ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"gamma\": " + format_real(report.gamma) + ",\n";
  out += "  \"method\": \"" + std::string(to_string(report.method)) + "\",\n";
  if (report.q_used) out += "  \"q\": " + std::to_string(*report.q_used) + ",\n";
  if (report.certified_error) {
    out += "  \"certified_error\": " + format_real(*report.certified_error) + ",\n";
  }
  out += "  \"impact_total\": " + format_real(report.impact_total) + ",\n";
  out += "  \"sum_total\": " + format_real(compensated_sum(report.total)) + "\n";
  out += "}\n";
  return out;
}

/// Plot-ready CSV: header `gamma,<player ids...>`, one row per gamma holding
/// the per-player totals.
inline std::string write_sweep_csv(const SweepTable& table) {
  std::string out = "gamma";
  for (const std::string& id : table.players.ids()) out += "," + id;
  out += "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += format_real(table.gammas[r]);
    for (double v : table.rows[r].total) out += "," + format_real(v);
    out += "\n";
  }
  return out;
}

/// Dense matrix dump with row/column ids: header `player,<ids...>`.
inline std::string write_matrix_csv(const PlayerSet& players, std::span<const double> grid) {
  const std::size_t n = players.size();
  std::string out = "player";
  for (const std::string& id : players.ids()) out += "," + id;
  out += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += players.id(i);
    for (std::size_t j = 0; j < n; ++j) out += "," + format_real(grid[i * n + j]);
    out += "\n";
  }
  return out;
}

}  // namespace respo
