#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/matrix.hpp"

namespace varlex {

// INI-style experiment configuration: [section] headers, key = value lines,
// # or ; comments. Errors carry "<file>:<line>:" anchors.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& name = "<config>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& dflt) const;
  double get_number(const std::string& section, const std::string& key) const;
  double get_number(const std::string& section, const std::string& key, double dflt) const;
  long get_int(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key, long dflt) const;
  bool get_bool(const std::string& section, const std::string& key, bool dflt) const;
  // whitespace- or comma-separated numbers
  std::vector<double> get_numbers(const std::string& section, const std::string& key) const;

  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;
  const std::string& name() const { return name_; }

  // FNV-1a over the sorted section/key/value triples; comments, ordering and
  // spacing do not affect it
  std::uint64_t hash() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> data_;
  std::string name_ = "<config>";

  const Entry& find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(int line, const std::string& message) const;
};

// [domain]: dim, lo, hi, resolution
DomainBox parse_domain(const Config& cfg);

// [<section>]: kind = constant|radial|piecewise|pwlinear|table plus its
// parameters; bounds are derived on `box`
ExponentField parse_exponent(const Config& cfg, const std::string& section, const DomainBox& box);

// identity | scalar(c) | rotation(theta) | diag(a,b) | matrix(a00,a01,a10,a11)
Matrix parse_matrix(const std::string& text, int dim);
// comma-separated matrix descriptors
std::vector<Matrix> parse_matrix_list(const std::string& text, int dim);

// constant(c) | indicator_ball(center..., r) | indicator_box(lo..., hi...) |
// spike(center..., beta, r) | bump(center..., r, amp)
GridFunction parse_function(const std::string& text, const DomainBox& box);

}  // namespace varlex
