#include "ldft/bvfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace ldft {

namespace {
constexpr double kMergeTol = 1e-13;

bool values_equal(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) return false;
  for (int i = 0; i < u.size(); ++i)
    if (std::abs(u[i] - v[i]) > kMergeTol) return false;
  return true;
}

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("bad float '" + s + "' in csv");
  return x;
}
}  // namespace

PiecewiseConstFn::PiecewiseConstFn(double a, double b,
                                   std::vector<double> breaks,
                                   std::vector<Vec> values)
    : a_(a), b_(b) {
  if (!(a < b)) throw EmptyDomain("domain [" + std::to_string(a) + "," +
                                  std::to_string(b) + "]");
  if (values.empty()) throw EmptyDomain("no cell values");
  if (breaks.size() + 1 != values.size())
    throw DomainMismatch("breaks/values size mismatch");
  const int n = int(values.front().size());
  for (const auto& v : values)
    if (int(v.size()) != n) throw DomainMismatch("inconsistent state dims");
  for (size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i] < breaks[i + 1]))
      throw DomainMismatch("breaks not strictly increasing");
  if (!breaks.empty() && (breaks.front() <= a || breaks.back() >= b))
    throw DomainMismatch("break outside open domain");

  // Canonicalize: merge adjacent equal values.
  values_.push_back(values[0]);
  for (size_t i = 0; i < breaks.size(); ++i) {
    if (values_equal(values_.back(), values[i + 1])) continue;
    breaks_.push_back(breaks[i]);
    values_.push_back(values[i + 1]);
  }
}

PiecewiseConstFn PiecewiseConstFn::constant(double a, double b, const Vec& v) {
  return PiecewiseConstFn(a, b, {}, {v});
}

const Vec& PiecewiseConstFn::eval(double x) const {
  // first cell with right edge > x
  size_t idx = std::upper_bound(breaks_.begin(), breaks_.end(), x) -
               breaks_.begin();
  return values_[idx];
}

double PiecewiseConstFn::tv() const {
  double s = 0;
  for (size_t i = 0; i + 1 < values_.size(); ++i)
    s += (values_[i + 1] - values_[i]).norm();
  return s;
}

PiecewiseConstFn PiecewiseConstFn::restrict_to(double c, double d) const {
  if (c < a_ - 1e-12 || d > b_ + 1e-12 || !(c < d))
    throw DomainMismatch("restriction outside domain");
  c = std::max(c, a_);
  d = std::min(d, b_);
  std::vector<double> nb;
  std::vector<Vec> nv;
  nv.push_back(eval(c));
  for (size_t i = 0; i < breaks_.size(); ++i) {
    if (breaks_[i] > c && breaks_[i] < d) {
      nb.push_back(breaks_[i]);
      nv.push_back(values_[i + 1]);
    }
  }
  return PiecewiseConstFn(c, d, std::move(nb), std::move(nv));
}

PiecewiseConstFn PiecewiseConstFn::transform(
    const std::function<Vec(const Vec&)>& fn) const {
  std::vector<Vec> nv;
  nv.reserve(values_.size());
  for (const auto& v : values_) nv.push_back(fn(v));
  return PiecewiseConstFn(a_, b_, breaks_, std::move(nv));
}

PiecewiseConstFn PiecewiseConstFn::reversed() const {
  std::vector<double> nb;
  std::vector<Vec> nv(values_.rbegin(), values_.rend());
  for (auto it = breaks_.rbegin(); it != breaks_.rend(); ++it)
    nb.push_back(a_ + b_ - *it);
  return PiecewiseConstFn(a_, b_, std::move(nb), std::move(nv));
}

PiecewiseConstFn PiecewiseConstFn::shifted(double c) const {
  std::vector<double> nb = breaks_;
  for (double& x : nb) x += c;
  return PiecewiseConstFn(a_ + c, b_ + c, std::move(nb), values_);
}

double l1_dist(const PiecewiseConstFn& f, const PiecewiseConstFn& g) {
  if (std::abs(f.left() - g.left()) > 1e-12 ||
      std::abs(f.right() - g.right()) > 1e-12)
    throw DomainMismatch("l1_dist domains differ");
  if (f.dim() != g.dim()) throw DomainMismatch("l1_dist dims differ");
  // Sweep the merged breakpoint set.
  const auto& bf = f.breaks();
  const auto& bg = g.breaks();
  std::vector<double> edges;
  edges.reserve(bf.size() + bg.size() + 2);
  edges.push_back(f.left());
  std::merge(bf.begin(), bf.end(), bg.begin(), bg.end(),
             std::back_inserter(edges));
  edges.push_back(f.right());
  double s = 0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const double w = edges[i + 1] - edges[i];
    if (w <= 0) continue;
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    s += w * (f.eval(mid) - g.eval(mid)).norm();
  }
  return s;
}

PiecewiseConstFn sample_bv(const std::function<Vec(double)>& f, double a,
                           double b, double h) {
  if (!(b > a)) throw EmptyDomain("sample_bv domain");
  if (!(h > 0)) throw EmptyDomain("sample_bv mesh");
  const int ncells = std::max(1, int(std::lround((b - a) / h)));
  const double w = (b - a) / ncells;
  std::vector<double> breaks;
  std::vector<Vec> values;
  for (int i = 0; i < ncells; ++i) {
    if (i > 0) breaks.push_back(a + i * w);
    values.push_back(f(a + (i + 0.5) * w));
  }
  return PiecewiseConstFn(a, b, std::move(breaks), std::move(values));
}

PiecewiseConstFn concat(const PiecewiseConstFn& f, const PiecewiseConstFn& g) {
  if (std::abs(f.right() - g.left()) > 1e-12)
    throw DomainMismatch("concat: interfaces differ");
  std::vector<double> nb = f.breaks();
  std::vector<Vec> nv = f.values();
  nb.push_back(f.right());
  nb.insert(nb.end(), g.breaks().begin(), g.breaks().end());
  nv.insert(nv.end(), g.values().begin(), g.values().end());
  return PiecewiseConstFn(f.left(), g.right(), std::move(nb), std::move(nv));
}

SmallnessBudget budget(const PiecewiseConstFn& ubar, const PiecewiseConstFn& g1,
                       const PiecewiseConstFn& g2,
                       const std::function<Vec(const Vec&)>& b1,
                       const std::function<Vec(const Vec&)>& b2) {
  SmallnessBudget out;
  out.tv_data = ubar.tv() + ubar.first().norm();
  out.tv_bc = g1.tv() + g2.tv();
  out.compat = (b1(ubar.first()) - g1.first()).norm() +
               (b2(ubar.last()) - g2.first()).norm();
  out.total = out.tv_data + out.tv_bc + out.compat;
  return out;
}

void write_csv(std::ostream& os, const PiecewiseConstFn& f) {
  os << "# domain " << fmt_double(f.left()) << " " << fmt_double(f.right())
     << "\n";
  for (int i = 0; i < f.cells(); ++i) {
    const double edge = i == 0 ? f.left() : f.breaks()[i - 1];
    os << fmt_double(edge);
    const Vec& v = f.values()[i];
    for (int j = 0; j < v.size(); ++j) os << "," << fmt_double(v[j]);
    os << "\n";
  }
}

PiecewiseConstFn read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv: empty input");
  double a = 0, b = 0;
  {
    std::istringstream hs(line);
    std::string hash, kw;
    hs >> hash >> kw >> a >> b;
    if (hash != "#" || kw != "domain")
      throw ConfigError("csv: bad header '" + line + "'");
  }
  std::vector<double> breaks;
  std::vector<Vec> values;
  bool first_row = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string col;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    if (cols.size() < 2) throw ConfigError("csv: short row '" + line + "'");
    const double edge = parse_double(cols[0]);
    Vec v(int(cols.size()) - 1);
    for (size_t j = 1; j < cols.size(); ++j) v[int(j) - 1] = parse_double(cols[j]);
    if (!first_row) breaks.push_back(edge);
    first_row = false;
    values.push_back(v);
  }
  return PiecewiseConstFn(a, b, std::move(breaks), std::move(values));
}

std::string to_csv(const PiecewiseConstFn& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

PiecewiseConstFn from_csv(const std::string& text) {
  std::istringstream is(text);
  return read_csv(is);
}

}  // namespace ldft
