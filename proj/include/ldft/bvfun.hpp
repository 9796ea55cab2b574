#ifndef LDFT_BVFUN_HPP
#define LDFT_BVFUN_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldft/types.hpp"

namespace ldft {

// Piecewise-constant function of one variable on [a,b], kept in canonical
// form: interior breakpoints strictly increasing, no two adjacent cell
// values equal (componentwise merge tolerance 1e-13).
class PiecewiseConstFn {
public:
  PiecewiseConstFn() = default;
  PiecewiseConstFn(double a, double b, std::vector<double> breaks,
                   std::vector<Vec> values);

  static PiecewiseConstFn constant(double a, double b, const Vec& v);

  double left() const { return a_; }
  double right() const { return b_; }
  int dim() const { return values_.empty() ? 0 : int(values_.front().size()); }
  int cells() const { return int(values_.size()); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<Vec>& values() const { return values_; }

  // Right-continuous evaluation; at x = b returns the last cell value.
  const Vec& eval(double x) const;
  const Vec& first() const { return values_.front(); }  // f(a+)
  const Vec& last() const { return values_.back(); }    // f(b-)

  double tv() const;
  PiecewiseConstFn restrict_to(double c, double d) const;
  PiecewiseConstFn transform(const std::function<Vec(const Vec&)>& fn) const;
  // Mirror the axis: g(x) = f(a + b - x).
  PiecewiseConstFn reversed() const;
  // Translate the axis: g on [a+c, b+c] with g(x) = f(x - c).
  PiecewiseConstFn shifted(double c) const;

  bool operator==(const PiecewiseConstFn& o) const = default;

private:
  double a_ = 0, b_ = 1;
  std::vector<double> breaks_;
  std::vector<Vec> values_;
};

double l1_dist(const PiecewiseConstFn& f, const PiecewiseConstFn& g);

// Cell-midpoint sampling of an arbitrary function onto a uniform mesh of
// width ~h (the span is divided into round(span/h) equal cells).
PiecewiseConstFn sample_bv(const std::function<Vec(double)>& f, double a,
                           double b, double h);

PiecewiseConstFn concat(const PiecewiseConstFn& f, const PiecewiseConstFn& g);

struct SmallnessBudget {
  double tv_data = 0;  // TV(ubar) + |ubar(0+)|
  double tv_bc = 0;    // TV(g1) + TV(g2)
  double compat = 0;   // corner compatibility mismatches
  double total = 0;
};

SmallnessBudget budget(const PiecewiseConstFn& ubar, const PiecewiseConstFn& g1,
                       const PiecewiseConstFn& g2,
                       const std::function<Vec(const Vec&)>& b1,
                       const std::function<Vec(const Vec&)>& b2);

// CSV round-trip. Header "# domain a b"; one row per cell, first column the
// cell's left edge. Floats printed in shortest round-trip decimal form.
void write_csv(std::ostream& os, const PiecewiseConstFn& f);
PiecewiseConstFn read_csv(std::istream& is);
std::string to_csv(const PiecewiseConstFn& f);
PiecewiseConstFn from_csv(const std::string& text);

}  // namespace ldft

#endif
