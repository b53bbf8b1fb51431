#include "semx/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace semx {

namespace {

// Tolerance for comparing the two sides of the inequality when the class
// averages are decimal literals such as 8.82.
constexpr double kSlack = 1e-9;

}  // namespace

std::vector<DominanceRow> dominance_table(double avg_subclasses, double avg_superclasses,
                                          int max_exts) {
  if (!(avg_subclasses > 0))
    throw AnalysisError(AnalysisErrorKind::Domain, "average subclass count must be positive");
  if (!(avg_superclasses >= 0))
    throw AnalysisError(AnalysisErrorKind::Domain, "average superclass count must be >= 0");
  if (max_exts < 1)
    throw AnalysisError(AnalysisErrorKind::Domain, "at least one active extension is required");

  // |AOS_hrc| <= |AOS_ext|  <=>  (Nsub + Nsup)(i - 1) <= Nsub (|e| - 1)
  const double lhs_scale = avg_subclasses + avg_superclasses;
  std::vector<DominanceRow> rows;
  for (int n = 1; n <= max_exts; ++n) {
    const double rhs = avg_subclasses * (n - 1);
    const double tol = kSlack * std::max(1.0, rhs);
    int best = 1;
    for (int i = n; i >= 1; --i) {
      if (lhs_scale * (i - 1) <= rhs + tol) {
        best = i;
        break;
      }
    }
    rows.push_back({n, best});
  }
  return rows;
}

Fraction dominance_summary(const std::vector<DominanceRow>& rows) {
  Fraction f{0, 0};
  for (const auto& row : rows) {
    f.numerator += row.max_favorable_i;
    f.denominator += row.ext_count;
  }
  if (f.denominator == 0)
    throw AnalysisError(AnalysisErrorKind::Domain, "dominance summary of an empty table");
  return f;
}

std::vector<SweepCell> dominance_sweep(int sub_lo, int sub_hi, int sup_lo, int sup_hi,
                                       int max_exts) {
  if (sub_lo > sub_hi || sup_lo > sup_hi)
    throw AnalysisError(AnalysisErrorKind::Domain, "empty sweep range");
  std::vector<SweepCell> grid;
  for (int sub = sub_lo; sub <= sub_hi; ++sub)
    for (int sup = sup_lo; sup <= sup_hi; ++sup)
      grid.push_back({sub, sup, dominance_summary(dominance_table(sub, sup, max_exts))});
  return grid;
}

}  // namespace semx
