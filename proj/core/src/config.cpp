#include "varlex/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace varlex {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || (!std::isalpha(static_cast<unsigned char>(k[0])) && k[0] != '_')) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-')
      return false;
  return true;
}

double parse_double(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw std::runtime_error(where + ": expected a number, got '" + text + "'");
  return v;
}

std::vector<double> split_numbers(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) {
        out.push_back(parse_double(cur, where));
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(parse_double(cur, where));
  return out;
}

// splits "name(a, b, ...)" into its pieces; bare names get no arguments
void split_call(const std::string& text, const std::string& where, std::string& name,
                std::vector<double>& args) {
  std::string t = trim(text);
  std::size_t open = t.find('(');
  if (open == std::string::npos) {
    name = t;
    args.clear();
    return;
  }
  if (t.back() != ')') throw std::runtime_error(where + ": missing ')' in '" + t + "'");
  name = trim(t.substr(0, open));
  args = split_numbers(t.substr(open + 1, t.size() - open - 2), where);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') cfg.fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) cfg.fail(lineno, "invalid section name '" + section + "'");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) cfg.fail(lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) cfg.fail(lineno, "invalid key '" + key + "'");
    if (section.empty()) cfg.fail(lineno, "key '" + key + "' appears before any [section]");
    auto& sec = cfg.data_[section];
    if (sec.count(key)) cfg.fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
    sec[key] = Entry{value, lineno};
  }
  return cfg;
}

void Config::fail(int line, const std::string& message) const {
  std::ostringstream os;
  os << name_ << ":" << line << ": " << message;
  throw std::runtime_error(os.str());
}

const Config::Entry& Config::find(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end())
    throw std::runtime_error(name_ + ": missing section [" + section + "]");
  auto k = s->second.find(key);
  if (k == s->second.end())
    throw std::runtime_error(name_ + ": missing key '" + key + "' in [" + section + "]");
  return k->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return find(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& dflt) const {
  return has(section, key) ? find(section, key).value : dflt;
}

double Config::get_number(const std::string& section, const std::string& key) const {
  const Entry& e = find(section, key);
  std::ostringstream os;
  os << name_ << ":" << e.line;
  return parse_double(e.value, os.str());
}

double Config::get_number(const std::string& section, const std::string& key, double dflt) const {
  return has(section, key) ? get_number(section, key) : dflt;
}

long Config::get_int(const std::string& section, const std::string& key) const {
  double v = get_number(section, key);
  long r = static_cast<long>(v);
  if (static_cast<double>(r) != v) {
    const Entry& e = find(section, key);
    std::ostringstream os;
    os << name_ << ":" << e.line << ": expected an integer, got '" << e.value << "'";
    throw std::runtime_error(os.str());
  }
  return r;
}

long Config::get_int(const std::string& section, const std::string& key, long dflt) const {
  return has(section, key) ? get_int(section, key) : dflt;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool dflt) const {
  if (!has(section, key)) return dflt;
  const Entry& e = find(section, key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  std::ostringstream os;
  os << name_ << ":" << e.line << ": expected a boolean, got '" << e.value << "'";
  throw std::runtime_error(os.str());
}

std::vector<double> Config::get_numbers(const std::string& section, const std::string& key) const {
  const Entry& e = find(section, key);
  std::ostringstream os;
  os << name_ << ":" << e.line;
  std::vector<double> v = split_numbers(e.value, os.str());
  if (v.empty()) throw std::runtime_error(os.str() + ": expected at least one number");
  return v;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& s : data_) out.push_back(s.first);
  return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = data_.find(section);
  if (s == data_.end()) return out;
  for (const auto& k : s->second) out.push_back(k.first);
  return out;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& sec : data_)  // std::map iterates sorted
    for (const auto& kv : sec.second) {
      mix(sec.first);
      mix(kv.first);
      mix(kv.second.value);
    }
  return h;
}

DomainBox parse_domain(const Config& cfg) {
  int dim = static_cast<int>(cfg.get_int("domain", "dim", 1));
  if (dim != 1 && dim != 2)
    throw std::runtime_error(cfg.name() + ": [domain] dim must be 1 or 2");
  std::vector<double> lo = cfg.get_numbers("domain", "lo");
  std::vector<double> hi = cfg.get_numbers("domain", "hi");
  std::vector<double> res = cfg.get_numbers("domain", "resolution");
  auto pick = [dim, &cfg](std::vector<double>& v, const char* key) {
    if (v.size() == 1 && dim == 2) v.push_back(v[0]);
    if (static_cast<int>(v.size()) != dim)
      throw std::runtime_error(cfg.name() + std::string(": [domain] ") + key +
                               " needs one value per axis");
  };
  pick(lo, "lo");
  pick(hi, "hi");
  pick(res, "resolution");
  Vec l(lo[0], dim == 2 ? lo[1] : 0.0);
  Vec h(hi[0], dim == 2 ? hi[1] : 0.0);
  std::array<long, 2> r{static_cast<long>(res[0]),
                        dim == 2 ? static_cast<long>(res[1]) : 1};
  return DomainBox(dim, l, h, r);
}

ExponentField parse_exponent(const Config& cfg, const std::string& section,
                             const DomainBox& box) {
  std::string kind = cfg.get_string(section, "kind");
  if (kind == "constant") return constant_exponent(cfg.get_number(section, "value"));
  if (kind == "radial")
    return radial_exponent(cfg.get_number(section, "a"), cfg.get_number(section, "b"), box);
  if (kind == "piecewise")
    return piecewise_exponent(cfg.get_numbers(section, "breaks"),
                              cfg.get_numbers(section, "values"));
  if (kind == "pwlinear")
    return pwlinear_exponent(cfg.get_numbers(section, "nodes"),
                             cfg.get_numbers(section, "values"));
  if (kind == "table") return table_exponent(read_csv(cfg.get_string(section, "file")));
  throw std::runtime_error(cfg.name() + ": [" + section + "] unknown exponent kind '" + kind +
                           "' (constant|radial|piecewise|pwlinear|table)");
}

Matrix parse_matrix(const std::string& text, int dim) {
  std::string name;
  std::vector<double> args;
  split_call(text, "matrix descriptor", name, args);
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::runtime_error("matrix descriptor '" + name + "' expects " + std::to_string(k) +
                               " arguments");
  };
  if (name == "identity") {
    want(0);
    return Matrix::identity(dim);
  }
  if (name == "scalar") {
    want(1);
    return dim == 1 ? Matrix::scalar1d(args[0]) : Matrix::diagonal(args[0], args[0]);
  }
  if (dim == 1) {
    if (name == "matrix") {
      want(1);
      return Matrix::scalar1d(args[0]);
    }
    throw std::runtime_error("matrix descriptor '" + name + "' is not valid in 1d");
  }
  if (name == "rotation") {
    want(1);
    return Matrix::rotation(args[0]);
  }
  if (name == "diag") {
    want(2);
    return Matrix::diagonal(args[0], args[1]);
  }
  if (name == "matrix") {
    want(4);
    return Matrix::general(args[0], args[1], args[2], args[3]);
  }
  throw std::runtime_error("unknown matrix descriptor '" + name +
                           "' (identity|scalar|rotation|diag|matrix)");
}

std::vector<Matrix> parse_matrix_list(const std::string& text, int dim) {
  // split on commas at depth zero so rotation(...) arguments stay intact
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  std::vector<Matrix> out;
  for (const std::string& p : parts) {
    std::string t = p;
    if (!trim(t).empty()) out.push_back(parse_matrix(trim(t), dim));
  }
  if (out.empty()) throw std::runtime_error("empty matrix list");
  return out;
}

GridFunction parse_function(const std::string& text, const DomainBox& box) {
  std::string name;
  std::vector<double> args;
  split_call(text, "function descriptor", name, args);
  int dim = box.dim;
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::runtime_error("function descriptor '" + name + "' expects " +
                               std::to_string(k) + " arguments in " + std::to_string(dim) + "d");
  };
  if (name == "constant") {
    want(1);
    return make_grid(box, args[0]);
  }
  if (name == "indicator_ball") {
    want(static_cast<std::size_t>(dim) + 1);
    Vec c(args[0], dim == 2 ? args[1] : 0.0);
    return indicator(box, Ball{c, args[static_cast<std::size_t>(dim)]});
  }
  if (name == "indicator_box") {
    want(2 * static_cast<std::size_t>(dim));
    Vec lo(args[0], dim == 2 ? args[1] : 0.0);
    Vec hi(args[static_cast<std::size_t>(dim)], dim == 2 ? args[3] : 0.0);
    return indicator(box, BoxRegion{lo, hi});
  }
  if (name == "spike") {
    want(static_cast<std::size_t>(dim) + 2);
    Vec c(args[0], dim == 2 ? args[1] : 0.0);
    double beta = args[static_cast<std::size_t>(dim)];
    double r = args[static_cast<std::size_t>(dim) + 1];
    double clip = std::pow(0.1 * box.maxWidth(), -std::abs(beta));
    return sample(box, [=](const Vec& y) {
      double d = dist(y, c, dim);
      if (d > r) return 0.0;
      return std::min(clip, std::pow(std::max(d, 1e-300), -beta));
    });
  }
  if (name == "bump") {
    want(static_cast<std::size_t>(dim) + 2);
    Vec c(args[0], dim == 2 ? args[1] : 0.0);
    double r = args[static_cast<std::size_t>(dim)];
    double amp = args[static_cast<std::size_t>(dim) + 1];
    return sample(box, [=](const Vec& y) {
      double d = dist(y, c, dim);
      if (d >= r) return 0.0;
      double cs = std::cos(M_PI * d / (2.0 * r));
      return amp * cs * cs;
    });
  }
  if (name == "radial") {
    // a + b/(1+|y|): strictly positive for a > 0, b >= 0, so it works as a weight
    want(2);
    double a = args[0], b = args[1];
    return sample(box, [=](const Vec& y) { return a + b / (1.0 + norm(y, dim)); });
  }
  throw std::runtime_error("unknown function descriptor '" + name +
                           "' (constant|indicator_ball|indicator_box|spike|bump|radial)");
}

}  // namespace varlex
