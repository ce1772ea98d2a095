#pragma once

// Free homotopy classes of loops in a target with finite fundamental group,
// their length spectrum, and singular p-energies computed from minimal
// topological resolutions.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hplateau {

// Conjugation-invariant subset of a group, stored as a bitmask over class ids.
using ClassSet = std::uint64_t;

inline constexpr int kMaxClasses = 64;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class FiniteGroup {
 public:
  // Validates the table (element 0 must be the identity) and computes the
  // inverse table and conjugacy classes. Class 0 is always the identity class;
  // the remaining classes are ordered by their smallest element id.
  static FiniteGroup from_table(std::vector<std::vector<int>> table);

  static FiniteGroup cyclic(int n);
  static FiniteGroup symmetric3();
  static FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);

  int order() const { return static_cast<int>(mul_.size()); }
  int mul(int a, int b) const { return mul_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  int class_of(int element) const { return class_of_[element]; }
  int class_count() const { return static_cast<int>(classes_.size()); }
  const std::vector<int>& class_members(int c) const { return classes_[c]; }
  const std::vector<std::vector<int>>& classes() const { return classes_; }
  const std::vector<std::vector<int>>& table() const { return mul_; }
  int inverse_class(int c) const { return inverse_class_[c]; }
  bool is_abelian() const { return abelian_; }

  // Union of classes met by products a*b with a in class ca, b in class cb.
  ClassSet class_product(int ca, int cb) const { return class_product_[ca][cb]; }
  // Product set of two conjugation-invariant sets. Order does not matter.
  ClassSet product(ClassSet a, ClassSet b) const;

 private:
  FiniteGroup() = default;

  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_;
  std::vector<int> class_of_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> inverse_class_;
  std::vector<std::vector<ClassSet>> class_product_;
  bool abelian_ = true;
};

// Geodesic length of the minimal representative of each free homotopy class.
class LengthSpectrum {
 public:
  // Requires lambda(0) == 0, lambda(c) > 0 otherwise, and equal lengths for
  // mutually inverse classes.
  static LengthSpectrum create(const FiniteGroup& group, std::vector<double> lambda);

  double operator[](int c) const { return lambda_[c]; }
  int size() const { return static_cast<int>(lambda_.size()); }
  const std::vector<double>& values() const { return lambda_; }

 private:
  explicit LengthSpectrum(std::vector<double> lambda) : lambda_(std::move(lambda)) {}
  std::vector<double> lambda_;
};

// Energy of a single charge of length lambda: lambda^p / ((2 pi)^(p-1) p).
double charge_cost(double lambda, double p);

struct Resolution {
  std::vector<int> classes;  // sorted, nontrivial class ids
  double total_energy = 0.0;
};

// Optional restriction on the classes a resolution may use. Empty optional
// means every nontrivial class is allowed.
using ChargePalette = std::optional<std::vector<int>>;

double singular_energy(const FiniteGroup& group, const LengthSpectrum& lengths, int cls, double p,
                       const ChargePalette& palette = std::nullopt);

// Minimizer of the resolution energy. Among co-optimal multisets (relative
// tolerance 1e-12) the lexicographically smallest sorted one is returned.
Resolution minimal_resolution(const FiniteGroup& group, const LengthSpectrum& lengths, int cls,
                              double p, const ChargePalette& palette = std::nullopt);

// Shortest nontrivial length; +infinity when every class is trivial.
double systole(const LengthSpectrum& lengths);

struct EnergyTable {
  double p = 2.0;
  std::vector<double> energies;     // +infinity for classes a palette cannot reach
  std::vector<Resolution> witness;

  double operator[](int c) const { return energies.at(c); }
  int size() const { return static_cast<int>(energies.size()); }
};

EnergyTable class_energy_table(const FiniteGroup& group, const LengthSpectrum& lengths, double p,
                               const ChargePalette& palette = std::nullopt);

// Closed-form mode for pi_1 = Z (circle target): lambda(d) = 2 pi |d|, and a
// resolution of degree d is any multiset of nonzero integers summing to d.
namespace integer_charges {

struct IntegerResolution {
  std::vector<long> charges;  // sorted ascending
  double total_energy = 0.0;
};

double lambda(long degree);

// Brute force over partitions with parts bounded by |part| <= cap.
IntegerResolution minimal_resolution(long degree, double p, long cap = 8);
double singular_energy(long degree, double p, long cap = 8);

}  // namespace integer_charges

// Plain-text formats: a table file is `n` followed by n rows of n integers;
// a spectrum file has one `class_id lambda` pair per line. '#' starts a comment.
FiniteGroup read_group_table(std::istream& in);
FiniteGroup read_group_table_file(const std::string& path);
LengthSpectrum read_length_spectrum(std::istream& in, const FiniteGroup& group);
LengthSpectrum read_length_spectrum_file(const std::string& path, const FiniteGroup& group);
void write_group_table(std::ostream& out, const FiniteGroup& group);
void write_length_spectrum(std::ostream& out, const LengthSpectrum& lengths);

// RP^2 embedded as {n (x) n - Id/3}: Z/2Z with the length of its shortest
// closed geodesic, sqrt(2) pi.
FiniteGroup rp2_group();
LengthSpectrum rp2_lengths(const FiniteGroup& group);

}  // namespace hplateau
