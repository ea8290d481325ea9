#pragma once

#include <vector>

namespace fcs {

/// Probabilities p_n of transferring n charges, n = n_min ... n_min + size - 1.
/// Values are kept raw; roundoff may leave entries slightly below zero.
struct ChargeDistribution {
  long n_min = 0;
  std::vector<double> probabilities;
  /// Largest |Im p_n| discarded when the distribution was formed.
  double imaginary_residue = 0.0;

  long n_max() const { return n_min + static_cast<long>(probabilities.size()) - 1; }
  double at(long n) const;
  double total() const;
  double min_probability() const;
  /// Raw values with entries in [-1e-10, 0) set to 0, for reports.
  std::vector<double> clipped() const;
};

/// max_n |a(n) - b(n)| over the union of both supports.
double max_abs_difference(const ChargeDistribution& a, const ChargeDistribution& b);

}  // namespace fcs
