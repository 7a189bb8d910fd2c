#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "svc/error.hpp"
#include "svc/graph.hpp"
#include "svc/lowerbound.hpp"
#include "svc/model.hpp"

namespace svc {

// Instance files are line oriented; '#' starts a comment.
//
//   svc-instance 1
//   vertices <n>
//   edge <u> <v> <p>                 p as a decimal or "a/b"
//   correlated <i> <i> ...           edge indices in file order
//   budget <b>                       optional, correlated block size per vertex
//   scenario <prob> [: <i> <i> ...]  correlated edges present in this scenario
//   rs <side> <eps2> <copies>        optional lower-bound provenance, followed by
//   rs-edge <l> <r>
//   matching <i> <i> ...
//
// RS files use "svc-rs 1", "side <n>", then rs-edge and matching lines.

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorKind::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

struct ParsedInstance {
  StochasticModel model;
  std::optional<RSGraph> rs{};
  double eps2 = kDefaultEps2;
  std::size_t copies = 1;
};

namespace io {

struct Token {
  std::string_view text;
  std::size_t column;
};

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

inline std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++number;
    std::string_view line(text.data() + pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Line l{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) l.tokens.push_back({line.substr(start, i - start), start + 1});
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

template <class T>
T number(const Line& line, std::size_t i, const char* what) {
  if (i >= line.tokens.size()) {
    const auto col = line.tokens.empty() ? 1 : line.tokens.back().column + line.tokens.back().text.size();
    throw ParseError(line.number, col, std::string("missing ") + what);
  }
  const auto& tok = line.tokens[i];
  T value{};
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
  if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
    throw ParseError(line.number, tok.column, std::string("expected ") + what + ", got '" + std::string(tok.text) + "'");
  }
  return value;
}

struct Probability {
  double value;
  std::optional<Rational> exact;
};

inline Probability probability(const Line& line, std::size_t i) {
  if (i < line.tokens.size() && line.tokens[i].text.find('/') != std::string_view::npos) {
    auto r = Rational::parse(line.tokens[i].text);
    if (!r) throw ParseError(line.number, line.tokens[i].column, "malformed rational probability");
    return {r->value(), r};
  }
  return {number<double>(line, i, "probability"), std::nullopt};
}

inline void expect_arity(const Line& line, std::size_t count) {
  if (line.tokens.size() > count) {
    throw ParseError(line.number, line.tokens[count].column, "unexpected token '" + std::string(line.tokens[count].text) + "'");
  }
}

inline void expect_header(const std::vector<Line>& lines, std::string_view tag) {
  if (lines.empty()) throw ParseError(1, 1, "empty file");
  const auto& first = lines.front();
  if (first.tokens[0].text != tag) {
    throw ParseError(first.number, first.tokens[0].column, "expected header '" + std::string(tag) + "'");
  }
  if (number<int>(first, 1, "version") != 1) throw ParseError(first.number, first.tokens[1].column, "unsupported version");
  expect_arity(first, 2);
}

/// Rewraps construction failures as ValidationError naming the violated invariant.
template <class F>
auto validated(F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    throw Error(ErrorKind::ValidationError, e.what());
  }
}

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::string format_probability(double p, const std::optional<Rational>& exact) {
  return exact ? exact->str() : format_double(p);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// rs-edge / matching lines shared by both file kinds.
inline bool rs_line(const Line& line, RSGraph& rs) {
  const auto key = line.tokens[0].text;
  if (key == "rs-edge") {
    rs.edges.emplace_back(number<Vertex>(line, 1, "left vertex"), number<Vertex>(line, 2, "right vertex"));
    expect_arity(line, 3);
    return true;
  }
  if (key == "matching") {
    std::vector<std::size_t> m;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) m.push_back(number<std::size_t>(line, i, "edge index"));
    rs.matchings.push_back(std::move(m));
    return true;
  }
  return false;
}

inline void write_rs_lines(std::ostream& out, const RSGraph& rs) {
  for (const auto& [l, r] : rs.edges) out << "rs-edge " << l << ' ' << r << '\n';
  for (const auto& m : rs.matchings) {
    out << "matching";
    for (auto e : m) out << ' ' << e;
    out << '\n';
  }
}

}  // namespace io

inline ParsedInstance parse_instance_text(const std::string& text) {
  const auto lines = io::tokenize(text);
  io::expect_header(lines, "svc-instance");
  std::optional<std::size_t> n;
  std::vector<WeightedEdge> edges;
  std::optional<std::vector<std::size_t>> correlated;
  std::size_t correlated_line = 0;
  double budget = kDefaultCorrelationBudget;
  struct RawScenario {
    io::Probability p;
    std::vector<std::size_t> present;
    std::size_t line;
  };
  std::vector<RawScenario> scenarios;
  ParsedInstance out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto key = line.tokens[0].text;
    if (key == "vertices") {
      if (n) throw ParseError(line.number, line.tokens[0].column, "vertex count given twice");
      n = io::number<std::size_t>(line, 1, "vertex count");
      io::expect_arity(line, 2);
    } else if (key == "edge") {
      const auto u = io::number<Vertex>(line, 1, "vertex");
      const auto v = io::number<Vertex>(line, 2, "vertex");
      const auto p = io::probability(line, 3);
      io::expect_arity(line, 4);
      edges.push_back({u, v, p.value, p.exact});
    } else if (key == "correlated") {
      correlated.emplace();
      correlated_line = line.number;
      for (std::size_t i = 1; i < line.tokens.size(); ++i) {
        correlated->push_back(io::number<std::size_t>(line, i, "edge index"));
      }
    } else if (key == "budget") {
      budget = io::number<double>(line, 1, "budget");
      io::expect_arity(line, 2);
    } else if (key == "scenario") {
      RawScenario s{io::probability(line, 1), {}, line.number};
      if (line.tokens.size() > 2) {
        if (line.tokens[2].text != ":") throw ParseError(line.number, line.tokens[2].column, "expected ':'");
        for (std::size_t i = 3; i < line.tokens.size(); ++i) {
          s.present.push_back(io::number<std::size_t>(line, i, "edge index"));
        }
      }
      scenarios.push_back(std::move(s));
    } else if (key == "rs") {
      out.rs = RSGraph{io::number<std::size_t>(line, 1, "side size"), {}, {}};
      out.eps2 = io::number<double>(line, 2, "eps2");
      out.copies = io::number<std::size_t>(line, 3, "copies");
      io::expect_arity(line, 4);
    } else if (!out.rs || !io::rs_line(line, *out.rs)) {
      throw ParseError(line.number, line.tokens[0].column, "unknown keyword '" + std::string(key) + "'");
    }
  }
  if (!n) throw ParseError(lines.front().number, 1, "missing 'vertices' line");
  if (!correlated && !scenarios.empty()) {
    throw ParseError(scenarios.front().line, 1, "scenario without a correlated block");
  }
  BaseGraph g = io::validated([&] { return build_graph(*n, edges); });
  // Map file order to the canonical edge order.
  std::vector<std::size_t> canonical(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) canonical[i] = *g.find_edge(edges[i].u, edges[i].v);
  auto to_mask = [&](const std::vector<std::size_t>& idx, std::size_t line) {
    EdgeMask m(g.edge_count());
    for (auto i : idx) {
      if (i >= edges.size()) throw ParseError(line, 1, "edge index " + std::to_string(i) + " out of range");
      m.set(canonical[i]);
    }
    return m;
  };
  if (!correlated) {
    out.model = StochasticModel::independent(std::move(g));
  } else {
    EdgeMask e2 = to_mask(*correlated, correlated_line);
    std::vector<Scenario> list;
    for (const auto& s : scenarios) list.push_back({s.p.value, s.p.exact, to_mask(s.present, s.line)});
    out.model = io::validated(
        [&] { return StochasticModel::correlated(std::move(g), std::move(e2), std::move(list), budget); });
  }
  if (out.rs) {
    if (auto report = validate_rs_graph(*out.rs); !report) {
      fail(ErrorKind::ValidationError, "rs block: " + report.violation);
    }
  }
  return out;
}

inline ParsedInstance parse_instance(const std::string& path) { return parse_instance_text(io::read_file(path)); }

inline void write_instance(std::ostream& out, const ParsedInstance& inst) {
  const auto& m = inst.model;
  if (!m.has_scenario_space()) fail(ErrorKind::ScenarioSpaceUnavailable, "sampler-defined models cannot be written");
  const auto& g = m.graph();
  out << "svc-instance 1\nvertices " << g.vertex_count() << '\n';
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    out << "edge " << g.edge(e).u << ' ' << g.edge(e).v << ' '
        << io::format_probability(g.probability(e), g.exact_probability(e)) << '\n';
  }
  if (!m.is_independent()) {
    out << "correlated";
    const auto& e2 = m.correlated_edges();
    for (auto e = e2.find_first(); e != EdgeMask::npos; e = e2.find_next(e)) out << ' ' << e;
    out << "\nbudget " << io::format_double(m.correlation_budget()) << '\n';
    for (const auto& s : m.scenarios()) {
      out << "scenario " << io::format_probability(s.probability, s.exact);
      if (s.present.any()) {
        out << " :";
        for (auto e = s.present.find_first(); e != EdgeMask::npos; e = s.present.find_next(e)) out << ' ' << e;
      }
      out << '\n';
    }
  }
  if (inst.rs) {
    out << "rs " << inst.rs->side << ' ' << io::format_double(inst.eps2) << ' ' << inst.copies << '\n';
    io::write_rs_lines(out, *inst.rs);
  }
}

inline void write_instance(const std::string& path, const ParsedInstance& inst) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ValidationError, "cannot write " + path);
  write_instance(out, inst);
}

inline std::string instance_text(const ParsedInstance& inst) {
  std::ostringstream ss;
  write_instance(ss, inst);
  return ss.str();
}

/// The file form of a lower-bound instance: its model plus the RS block.
inline ParsedInstance to_parsed(const LowerBoundInstance& inst) { return {inst.model, inst.rs, inst.eps2, inst.copies}; }

/// Parses an RS file without validating the RS properties; see validate_rs_graph.
inline RSGraph parse_rs_text(const std::string& text) {
  const auto lines = io::tokenize(text);
  io::expect_header(lines, "svc-rs");
  RSGraph rs;
  bool have_side = false;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.tokens[0].text == "side") {
      rs.side = io::number<std::size_t>(line, 1, "side size");
      io::expect_arity(line, 2);
      have_side = true;
    } else if (!io::rs_line(line, rs)) {
      throw ParseError(line.number, line.tokens[0].column, "unknown keyword '" + std::string(line.tokens[0].text) + "'");
    }
  }
  if (!have_side) throw ParseError(lines.front().number, 1, "missing 'side' line");
  return rs;
}

inline RSGraph parse_rs(const std::string& path) { return parse_rs_text(io::read_file(path)); }

inline void write_rs(std::ostream& out, const RSGraph& rs) {
  out << "svc-rs 1\nside " << rs.side << '\n';
  io::write_rs_lines(out, rs);
}

inline std::string rs_text(const RSGraph& rs) {
  std::ostringstream ss;
  write_rs(ss, rs);
  return ss.str();
}

}  // namespace svc
