#include "cheq/cli/spec_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cheq/errors.hpp"

namespace cheq::cli {

using nlohmann::json;

namespace {

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Complex entry_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ParseError("matrix entries must be [re, im] pairs");
}

double tolerance_field(const json& t, const char* key, double fallback) {
  if (!t.contains(key)) return fallback;
  if (!t[key].is_number() || !(t[key].get<double>() > 0.0)) {
    throw ParseError(std::string("tolerance ") + key + " must be a positive number");
  }
  return t[key].get<double>();
}

}  // namespace

RawSpec parse_raw_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("spec parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what(),
                     line, col);
  }
  if (!doc.is_object()) throw ParseError("spec must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<int>() < 1) {
    throw ParseError("spec field \"n\" must be an integer >= 1");
  }
  RawSpec raw;
  raw.n = doc["n"].get<int>();
  const Eigen::Index dim = raw.n + 1;

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ParseError("\"tolerances\" must be an object");
    raw.tolerances.unitary = tolerance_field(t, "tau_unitary", raw.tolerances.unitary);
    raw.tolerances.rank = tolerance_field(t, "tau_rank", raw.tolerances.rank);
    raw.tolerances.null = tolerance_field(t, "tau_null", raw.tolerances.null);
    raw.tolerances.classify = tolerance_field(t, "tau_class", raw.tolerances.classify);
    raw.tolerances.fix = tolerance_field(t, "tau_fix", raw.tolerances.fix);
  }

  if (!doc.contains("generators") || !doc["generators"].is_array()) {
    throw ParseError("spec field \"generators\" must be an array");
  }
  for (const json& g : doc["generators"]) {
    if (!g.is_object() || !g.contains("name") || !g["name"].is_string()) {
      throw ParseError("each generator needs a string \"name\"");
    }
    RawGenerator gen;
    gen.name = g["name"].get<std::string>();
    if (gen.name.empty() || gen.name.find_first_of(" \t\n^") != std::string::npos) {
      throw ParseError("generator name \"" + gen.name + "\" must be non-empty without spaces or '^'");
    }
    const json& m = g.value("matrix", json());
    if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != dim) {
      throw ParseError("generator " + gen.name + ": matrix must have n+1 = " + std::to_string(dim) + " rows");
    }
    gen.matrix = Matrix(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const json& row = m[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
        throw ParseError("generator " + gen.name + ": row " + std::to_string(r) + " must have " +
                         std::to_string(dim) + " entries");
      }
      for (Eigen::Index c = 0; c < dim; ++c) gen.matrix(r, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
    }
    for (const auto& other : raw.generators) {
      if (other.name == gen.name) throw ParseError("duplicate generator name " + gen.name);
    }
    raw.generators.push_back(std::move(gen));
  }
  return raw;
}

GroupSpec validate_spec(const RawSpec& raw) {
  GroupSpec spec;
  spec.n = raw.n;
  spec.tolerances = raw.tolerances;
  for (const auto& gen : raw.generators) {
    try {
      spec.generators.push_back({gen.name, make_element(gen.matrix, raw.tolerances.unitary)});
    } catch (const ValidationError& e) {
      throw GeneratorRejected(gen.name, e.what());
    } catch (const ArgumentError& e) {
      throw GeneratorRejected(gen.name, e.what());
    }
  }
  spec.check();
  return spec;
}

RawSpec load_raw_spec(const std::string& path) { return parse_raw_spec(read_file(path)); }

GroupSpec load_group_spec(const std::string& path) { return validate_spec(load_raw_spec(path)); }

json spec_to_json(const std::vector<RawGenerator>& generators, int n) {
  json doc;
  doc["n"] = n;
  doc["generators"] = json::array();
  for (const auto& g : generators) doc["generators"].push_back({{"name", g.name}, {"matrix", to_json(g.matrix)}});
  return doc;
}

namespace {
constexpr long kMaxWordExponent = 1000000;
}  // namespace

Word parse_word(const GroupSpec& spec, std::string_view text) {
  Word out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    std::string name = token;
    long exponent = 1;
    if (const auto caret = token.find('^'); caret != std::string::npos) {
      name = token.substr(0, caret);
      const std::string power = token.substr(caret + 1);
      std::size_t used = 0;
      try {
        exponent = std::stol(power, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (power.empty() || used != power.size()) throw ParseError("bad exponent in word token \"" + token + "\"");
      if (std::labs(exponent) > kMaxWordExponent) throw ParseError("exponent too large in word token \"" + token + "\"");
    }
    int id = 0;
    for (std::size_t k = 0; k < spec.generators.size(); ++k) {
      if (spec.generators[k].name == name) id = static_cast<int>(k) + 1;
    }
    if (id == 0) throw ParseError("unknown generator \"" + name + "\" in word");
    const int letter = exponent >= 0 ? id : -id;
    for (long k = 0; k < std::labs(exponent); ++k) out.push_back(letter);
  }
  return out;
}

Complex parse_complex(std::string_view raw) {
  std::string s;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw ParseError("empty complex number");
  auto number = [&](const std::string& part, bool imaginary) -> double {
    if (imaginary && (part.empty() || part == "+")) return 1.0;
    if (imaginary && part == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size()) throw ParseError("bad complex number \"" + std::string(raw) + "\"");
    return v;
  };
  if (s.back() != 'i') return {number(s, false), 0.0};
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading one.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(s, true)};
  return {number(s.substr(0, split), false), number(s.substr(split), true)};
}

Vector parse_complex_vector(std::string_view text, Eigen::Index dim) {
  std::vector<Complex> entries;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    entries.push_back(parse_complex(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (static_cast<Eigen::Index>(entries.size()) != dim) {
    throw ParseError("expected " + std::to_string(dim) + " complex entries in \"" + std::string(text) + "\"");
  }
  Vector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v[k] = entries[static_cast<std::size_t>(k)];
  return v;
}

std::string cloud_to_csv(const LimitSetCloud& cloud) {
  std::string out;
  const Eigen::Index dim = cloud.empty() ? 0 : cloud.points.front().dim();
  const Eigen::Index header_dim = dim == 0 && cloud.provenance.base ? cloud.provenance.base->dim() : dim;
  for (Eigen::Index k = 0; k < header_dim; ++k) {
    out += (k ? "," : "") + std::string("re") + std::to_string(k) + ",im" + std::to_string(k);
  }
  out += '\n';
  char buf[64];
  for (const auto& p : cloud.points) {
    for (Eigen::Index k = 0; k < p.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", k ? "," : "", p.rep()[k].real() + 0.0, p.rep()[k].imag() + 0.0);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<ProjectivePoint> points_from_csv(std::string_view text, double tau_null) {
  std::vector<ProjectivePoint> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> values;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() < 4 || values.size() % 2 != 0) throw ParseError("bad cloud row: " + line);
    Vector v(static_cast<Eigen::Index>(values.size() / 2));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      v[k] = Complex(values[static_cast<std::size_t>(2 * k)], values[static_cast<std::size_t>(2 * k + 1)]);
    }
    out.push_back(project(v, tau_null));
  }
  return out;
}

json to_json(const Tolerances& t) {
  return {{"tau_unitary", t.unitary}, {"tau_rank", t.rank}, {"tau_null", t.null}, {"tau_class", t.classify},
          {"tau_fix", t.fix}};
}

json to_json(const ProjectivePoint& p) {
  json out = json::array();
  for (Eigen::Index k = 0; k < p.dim(); ++k) out.push_back({p.rep()[k].real() + 0.0, p.rep()[k].imag() + 0.0});
  return out;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real() + 0.0, m(r, c).imag() + 0.0});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cheq::cli
