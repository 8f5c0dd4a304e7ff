#include "fsll/core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fsll/errors.hpp"

namespace fsll {

namespace {
// Keeps every table allocation addressable as a std::vector<double>.
constexpr std::size_t kMaxTableSize = std::numeric_limits<std::ptrdiff_t>::max() / sizeof(double);
constexpr const char* kCardsHeader = "# cards:";
}  // namespace

VariableSpec::VariableSpec(std::vector<int> cards) : cards_(std::move(cards)) {
  if (cards_.empty()) throw DomainError("variable spec must have at least one variable");
  strides_.resize(cards_.size());
  std::size_t size = 1;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (cards_[i] < 2) {
      throw DomainError("cardinality of variable " + std::to_string(i) + " must be >= 2, got " +
                        std::to_string(cards_[i]));
    }
    strides_[i] = size;
    const auto c = static_cast<std::size_t>(cards_[i]);
    if (size > kMaxTableSize / c) throw CapacityError("joint space size overflows addressable range");
    size *= c;
  }
  size_ = size;
}

VariableSpec VariableSpec::binary(int n) {
  if (n < 1) throw DomainError("variable spec must have at least one variable");
  return VariableSpec(std::vector<int>(static_cast<std::size_t>(n), 2));
}

bool VariableSpec::all_binary() const {
  for (int c : cards_)
    if (c != 2) return false;
  return true;
}

std::size_t VariableSpec::pack(std::span<const int> digits) const {
  if (digits.size() != cards_.size()) {
    throw IndexError("index has " + std::to_string(digits.size()) + " components, expected " +
                     std::to_string(cards_.size()));
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= cards_[i]) {
      throw IndexError("component " + std::to_string(i) + " = " + std::to_string(digits[i]) +
                       " outside [0," + std::to_string(cards_[i]) + ")");
    }
    flat += static_cast<std::size_t>(digits[i]) * strides_[i];
  }
  return flat;
}

std::vector<int> VariableSpec::unpack(std::size_t flat) const {
  if (flat >= size_) {
    throw IndexError("flat index " + std::to_string(flat) + " outside [0," + std::to_string(size_) + ")");
  }
  std::vector<int> digits(cards_.size());
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    const auto c = static_cast<std::size_t>(cards_[i]);
    digits[i] = static_cast<int>(flat % c);
    flat /= c;
  }
  return digits;
}

std::string VariableSpec::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(cards_[i]);
  }
  return s;
}

DenseTable::DenseTable(VariableSpec s, TableKind k)
    : spec(std::move(s)), values(spec.size(), 0.0), kind(k) {}

DenseTable::DenseTable(VariableSpec s, std::vector<double> v, TableKind k)
    : spec(std::move(s)), values(std::move(v)), kind(k) {
  if (values.size() != spec.size()) {
    throw DomainError("table has " + std::to_string(values.size()) + " entries, spec needs " +
                      std::to_string(spec.size()));
  }
}

DenseTable DenseTable::uniform(const VariableSpec& spec) {
  return DenseTable(spec, std::vector<double>(spec.size(), 1.0 / static_cast<double>(spec.size())),
                    TableKind::distribution);
}

bool is_distribution(std::span<const double> values, double tol) {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

Dataset::Dataset(VariableSpec spec, std::vector<std::size_t> flat_rows)
    : spec_(std::move(spec)), flat_(std::move(flat_rows)) {
  if (flat_.empty()) throw DomainError("dataset must contain at least one row");
  for (std::size_t f : flat_) {
    if (f >= spec_.size()) throw IndexError("dataset row index outside joint space");
  }
}

Dataset Dataset::from_rows(VariableSpec spec, const std::vector<std::vector<int>>& rows) {
  std::vector<std::size_t> flat;
  flat.reserve(rows.size());
  for (const auto& r : rows) flat.push_back(spec.pack(r));
  return Dataset(std::move(spec), std::move(flat));
}

DenseTable empirical_distribution(const Dataset& data) {
  std::vector<std::uint64_t> counts(data.spec().size(), 0);
  for (std::size_t f : data.flat_rows()) ++counts[f];
  DenseTable t(data.spec(), TableKind::distribution);
  const auto n = static_cast<double>(data.rows());
  for (std::size_t i = 0; i < counts.size(); ++i) t.values[i] = static_cast<double>(counts[i]) / n;
  return t;
}

namespace detail {

std::string trim(const std::string& text) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = text.find_last_not_of(" \t\r\n");
  return text.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& tok : split(text, ',')) {
    int v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (tok.empty() || ec != std::errc() || ptr != end) throw IoError("malformed integer '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& text) {
  const std::string tok = trim(text);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end) throw IoError("malformed real '" + tok + "'");
  return v;
}

}  // namespace detail

void write_dataset(std::ostream& out, const Dataset& data) {
  out << kCardsHeader << ' ' << data.spec().to_string() << '\n';
  std::string line;
  const int n = data.spec().n();
  for (std::size_t r = 0; r < data.rows(); ++r) {
    line.clear();
    std::size_t f = data.flat(r);
    for (int i = 0; i < n; ++i) {
      if (i) line += ',';
      const auto c = static_cast<std::size_t>(data.spec().card(i));
      line += std::to_string(f % c);
      f /= c;
    }
    line += '\n';
    out << line;
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCardsHeader, 0) != 0) {
    throw IoError("dataset must start with '# cards: ...' header");
  }
  VariableSpec spec(detail::parse_int_list(line.substr(std::char_traits<char>::length(kCardsHeader))));
  std::vector<std::size_t> flat;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::vector<int> digits;
    try {
      digits = detail::parse_int_list(line);
      flat.push_back(spec.pack(digits));
    } catch (const std::exception& e) {
      throw IoError("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return Dataset(std::move(spec), std::move(flat));
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_dataset(out, data);
  if (!out) throw IoError("write to '" + path + "' failed");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_dataset(in);
}

}  // namespace fsll
