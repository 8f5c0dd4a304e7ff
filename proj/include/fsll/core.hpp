#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fsll {

/// Ordered cardinalities of the variables X_0..X_{n-1}; defines the mixed-radix
/// index space of size |X| = prod(cards). x_0 is the fastest-varying digit.
class VariableSpec {
 public:
  VariableSpec() = default;
  /// Throws DomainError for n = 0 or any card < 2, CapacityError when |X| overflows.
  explicit VariableSpec(std::vector<int> cards);

  /// n binary variables.
  static VariableSpec binary(int n);

  int n() const { return static_cast<int>(cards_.size()); }
  std::size_t size() const { return size_; }
  int card(int i) const { return cards_[static_cast<std::size_t>(i)]; }
  std::size_t stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& cards() const { return cards_; }
  bool all_binary() const;

  std::size_t pack(std::span<const int> digits) const;
  std::vector<int> unpack(std::size_t flat) const;
  /// Digit i of a flat index without unpacking the rest.
  int digit(std::size_t flat, int i) const {
    return static_cast<int>((flat / strides_[static_cast<std::size_t>(i)]) %
                            static_cast<std::size_t>(cards_[static_cast<std::size_t>(i)]));
  }

  std::string to_string() const;  // "2,3,2"

  friend bool operator==(const VariableSpec& a, const VariableSpec& b) { return a.cards_ == b.cards_; }

 private:
  std::vector<int> cards_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

enum class TableKind { distribution, coefficients };

/// Flat array of |X| reals indexed mixed-radix. Instances hold p_theta, p_d,
/// the dual tables and the regularizer.
struct DenseTable {
  VariableSpec spec;
  std::vector<double> values;
  TableKind kind = TableKind::coefficients;

  DenseTable() = default;
  DenseTable(VariableSpec s, TableKind k);
  DenseTable(VariableSpec s, std::vector<double> v, TableKind k);

  static DenseTable uniform(const VariableSpec& spec);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::span<const double> view() const { return values; }
};

/// True when every entry is >= 0 and the entries sum to 1 within tol.
bool is_distribution(std::span<const double> values, double tol = 1e-12);

/// i.i.d. samples stored as packed flat indices.
class Dataset {
 public:
  Dataset() = default;
  Dataset(VariableSpec spec, std::vector<std::size_t> flat_rows);
  static Dataset from_rows(VariableSpec spec, const std::vector<std::vector<int>>& rows);

  const VariableSpec& spec() const { return spec_; }
  std::size_t rows() const { return flat_.size(); }
  std::size_t flat(std::size_t r) const { return flat_[r]; }
  std::vector<int> row(std::size_t r) const { return spec_.unpack(flat_[r]); }
  const std::vector<std::size_t>& flat_rows() const { return flat_; }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.spec_ == b.spec_ && a.flat_ == b.flat_;
  }

 private:
  VariableSpec spec_;
  std::vector<std::size_t> flat_;
};

/// count(x)/N at pack(x); counts are accumulated as integers and divided once.
DenseTable empirical_distribution(const Dataset& data);

// Dataset file: "# cards: c0,c1,..." then one comma-separated row per line.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

namespace detail {
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);
/// Shortest-round-trip-safe decimal form (17 significant digits).
std::string format_real(double v);
double parse_real(const std::string& text);
}  // namespace detail

}  // namespace fsll
