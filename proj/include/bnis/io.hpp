#pragma once

#include <bnis/graph.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace bnis {

// Network text format (line oriented, '#' starts a comment):
//
//   net <name>
//   node <name> states <s1> <s2> ...
//   parents <node> <p1> <p2> ...
//   cpt <node> <p_1> ... <p_k>
//
// CPT entries run row-major over parent configurations (parents in declared order,
// last fastest); each row lists the child's state probabilities in state order.
//
// Case files:
//
//   case <id>
//   <node> = <state>

struct EvidenceCase {
  std::string id;
  Evidence evidence;
};

struct CaseFile {
  std::vector<EvidenceCase> cases;
};

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

namespace detail {

inline std::vector<std::string> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_probability(const std::string& token, std::size_t line) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(x))
    throw ParseError(line, "invalid number '" + token + "'");
  return x;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

}  // namespace detail

/// Parses and validates a network; any defect raises ParseError with the offending line.
inline BayesianNetwork parse_network(std::string_view text) {
  struct NodeDecl {
    std::vector<std::string> states;
    std::size_t line = 0;
    std::vector<std::string> parents;
    std::size_t parents_line = 0;
    std::vector<double> cpt;
    std::size_t cpt_line = 0;
  };
  std::string name = "network";
  std::vector<std::string> order;
  std::map<std::string, NodeDecl> nodes;

  auto lines = detail::split_lines(text);
  for (std::size_t ln = 1; ln <= lines.size(); ++ln) {
    auto tok = detail::tokenize(lines[ln - 1]);
    if (tok.empty()) continue;
    const auto& kw = tok[0];
    if (kw == "net") {
      if (tok.size() != 2) throw ParseError(ln, "expected 'net <name>'");
      name = tok[1];
    } else if (kw == "node") {
      if (tok.size() < 3 || tok[2] != "states") throw ParseError(ln, "expected 'node <name> states <s1> <s2> ...'");
      if (nodes.contains(tok[1])) throw ParseError(ln, "duplicate node " + tok[1]);
      NodeDecl d;
      d.states.assign(tok.begin() + 3, tok.end());
      d.line = ln;
      if (d.states.size() < 2) throw ParseError(ln, "node " + tok[1] + " needs at least two states");
      for (std::size_t i = 0; i < d.states.size(); ++i)
        for (std::size_t j = i + 1; j < d.states.size(); ++j)
          if (d.states[i] == d.states[j]) throw ParseError(ln, "node " + tok[1] + " repeats state " + d.states[i]);
      order.push_back(tok[1]);
      nodes.emplace(tok[1], std::move(d));
    } else if (kw == "parents") {
      if (tok.size() < 2) throw ParseError(ln, "expected 'parents <node> ...'");
      auto it = nodes.find(tok[1]);
      if (it == nodes.end()) throw ParseError(ln, "parents for undefined node " + tok[1]);
      if (it->second.parents_line != 0) throw ParseError(ln, "parents of " + tok[1] + " given twice");
      it->second.parents.assign(tok.begin() + 2, tok.end());
      it->second.parents_line = ln;
    } else if (kw == "cpt") {
      if (tok.size() < 2) throw ParseError(ln, "expected 'cpt <node> <p_1> ...'");
      auto it = nodes.find(tok[1]);
      if (it == nodes.end()) throw ParseError(ln, "cpt for undefined node " + tok[1]);
      if (it->second.cpt_line != 0) throw ParseError(ln, "cpt of " + tok[1] + " given twice");
      for (std::size_t i = 2; i < tok.size(); ++i) it->second.cpt.push_back(detail::parse_probability(tok[i], ln));
      it->second.cpt_line = ln;
    } else {
      throw ParseError(ln, "unknown statement '" + kw + "'");
    }
  }

  std::map<std::string, VarId> ids;
  std::vector<Variable> variables;
  for (const auto& n : order) {
    ids.emplace(n, variables.size());
    variables.push_back({variables.size(), n, nodes.at(n).states});
  }
  std::vector<Cpt> cpts;
  for (const auto& n : order) {
    const auto& d = nodes.at(n);
    if (d.cpt_line == 0) throw ParseError(d.line, "missing CPT for " + n);
    std::vector<VarId> parents;
    std::vector<std::size_t> cards;
    for (const auto& p : d.parents) {
      auto it = ids.find(p);
      if (it == ids.end()) throw ParseError(d.parents_line, "undefined parent " + p + " of " + n);
      if (std::find(parents.begin(), parents.end(), it->second) != parents.end())
        throw ParseError(d.parents_line, "parent " + p + " of " + n + " listed twice");
      parents.push_back(it->second);
      cards.push_back(variables[it->second].cardinality());
    }
    const std::size_t expected = d.states.size() * configuration_count(cards);
    if (d.cpt.size() != expected)
      throw ParseError(d.cpt_line, "cpt " + n + ": expected " + std::to_string(expected) + " entries, got " +
                                       std::to_string(d.cpt.size()));
    Cpt cpt(ids.at(n), d.states.size(), std::move(parents), std::move(cards), d.cpt);
    for (std::size_t r = 0; r < cpt.row_count(); ++r) {
      double sum = 0.0;
      for (double p : cpt.row(r)) {
        if (p < 0.0 || p > 1.0) throw ParseError(d.cpt_line, "cpt " + n + ": entry outside [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kProbabilityTolerance)
        throw ParseError(d.cpt_line, "cpt " + n + ": row " + std::to_string(r) + " sums to " + format_double(sum));
    }
    cpts.push_back(std::move(cpt));
  }

  BayesianNetwork net(name, std::move(variables), std::move(cpts));
  auto report = validate_network(net);
  if (!report.ok()) throw ParseError(0, report.issues.front().message);
  return net;
}

inline std::string serialize_network(const BayesianNetwork& net) {
  std::ostringstream out;
  out << "net " << net.name() << '\n';
  for (const auto& v : net.variables()) {
    out << "node " << v.name << " states";
    for (const auto& s : v.states) out << ' ' << s;
    out << '\n';
  }
  for (VarId v = 0; v < net.size(); ++v) {
    if (net.parents(v).empty()) continue;
    out << "parents " << net.variable(v).name;
    for (auto p : net.parents(v)) out << ' ' << net.variable(p).name;
    out << '\n';
  }
  for (VarId v = 0; v < net.size(); ++v) {
    out << "cpt " << net.variable(v).name;
    for (double p : net.cpt(v).table()) out << ' ' << format_double(p);
    out << '\n';
  }
  return out.str();
}

/// Parses a case file against its network.
inline CaseFile parse_cases(std::string_view text, const BayesianNetwork& net) {
  CaseFile file;
  auto lines = detail::split_lines(text);
  auto finish = [&](std::size_t ln) {
    if (!file.cases.empty() && file.cases.back().evidence.size() >= net.size() && net.size() > 0)
      throw ParseError(ln, "case " + file.cases.back().id + " observes every variable");
  };
  for (std::size_t ln = 1; ln <= lines.size(); ++ln) {
    auto tok = detail::tokenize(lines[ln - 1]);
    if (tok.empty()) continue;
    if (tok[0] == "case") {
      if (tok.size() != 2) throw ParseError(ln, "expected 'case <id>'");
      finish(ln);
      for (const auto& c : file.cases)
        if (c.id == tok[1]) throw ParseError(ln, "duplicate case id " + tok[1]);
      file.cases.push_back({tok[1], {}});
      continue;
    }
    // Accept "X = s", "X= s", "X =s" and "X=s".
    std::string joined;
    for (const auto& t : tok) joined += t;
    auto eq = joined.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == joined.size() || joined.find('=', eq + 1) != std::string::npos)
      throw ParseError(ln, "expected '<node> = <state>'");
    if (file.cases.empty()) throw ParseError(ln, "finding before any 'case' line");
    const auto var_name = joined.substr(0, eq);
    const auto state_name = joined.substr(eq + 1);
    auto var = net.find(var_name);
    if (!var) throw ParseError(ln, "unknown variable " + var_name);
    auto state = net.variable(*var).state_index(state_name);
    if (!state) throw ParseError(ln, "unknown state " + state_name + " of " + var_name);
    auto& c = file.cases.back();
    if (!c.evidence.emplace(*var, *state).second)
      throw ParseError(ln, "duplicate variable " + var_name + " in case " + c.id);
  }
  finish(lines.size());
  return file;
}

inline std::string serialize_cases(const CaseFile& file, const BayesianNetwork& net) {
  std::ostringstream out;
  for (const auto& c : file.cases) {
    out << "case " << c.id << '\n';
    for (const auto& [v, s] : c.evidence) out << net.variable(v).name << " = " << net.variable(v).states[s] << '\n';
  }
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
}

}  // namespace bnis
