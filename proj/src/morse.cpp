#include "fgo/morse.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "morse_internal.hpp"
#include "parallel.hpp"

namespace fgo {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double phase(const FourierTerm& t, const Vec& x) {
  double s = 0;
  for (std::size_t i = 0; i < t.k.size(); ++i) s += t.k[i] * x[i];
  return kTwoPi * s;
}

Vec kvec(const FourierTerm& t) {
  Vec k(t.k.size());
  for (std::size_t i = 0; i < t.k.size(); ++i) k[i] = t.k[i];
  return k;
}

}  // namespace

double MorseFunction::value(const Vec& x) const {
  double v = 0;
  for (auto& t : terms) {
    double th = phase(t, x);
    v += t.a * std::cos(th) + t.b * std::sin(th);
  }
  return v;
}

Vec MorseFunction::gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim);
  for (auto& t : terms) {
    double th = phase(t, x);
    g += kTwoPi * (-t.a * std::sin(th) + t.b * std::cos(th)) * kvec(t);
  }
  return g;
}

Mat MorseFunction::hessian(const Vec& x) const {
  Mat h = Mat::Zero(dim, dim);
  for (auto& t : terms) {
    double th = phase(t, x);
    Vec k = kvec(t);
    h += kTwoPi * kTwoPi * (-t.a * std::cos(th) - t.b * std::sin(th)) * (k * k.transpose());
  }
  return h;
}

MorseFunction MorseFunction::parse(const std::string& text) {
  MorseFunction f;
  f.dim = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "dim") {
      if (!(ls >> f.dim) || f.dim < 1 || f.dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
      continue;
    }
    if (f.dim == 0) throw std::invalid_argument("function record before 'dim'");
    FourierTerm t;
    std::istringstream all(line);
    for (int i = 0; i < f.dim; ++i) {
      int k;
      if (!(all >> k)) throw std::invalid_argument("bad frequency in: " + line);
      t.k.push_back(k);
    }
    if (!(all >> t.a >> t.b)) throw std::invalid_argument("bad coefficients in: " + line);
    f.terms.push_back(t);
  }
  if (f.dim == 0) throw std::invalid_argument("missing 'dim'");
  return f;
}

namespace {

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> p = {
      {"t1-cos", "dim 1\n1 1 0\n"},
      // cos(2 pi (x - 0.13))
      {"t1-cos-shift", "dim 1\n1 0.6845471059286887 0.7289686274214116\n"},
      {"t1-double", "dim 1\n1 1 0\n2 0.5 0\n"},
      {"t2-coscos", "dim 2\n1 0 1 0\n0 1 1 0\n"},
      {"t2-split", "dim 2\n1 0 1 0\n2 0 0.5 0\n0 1 1 0\n"},
      {"t2-tilt", "dim 2\n1 0 1 0\n0 1 0.8 0\n1 1 0 0.15\n1 -2 0.1 0\n"},
      {"t2-shift", "dim 2\n1 0 0.6845471059286887 0.7289686274214116\n0 1 1 0\n"},
      {"t3-cos", "dim 3\n1 0 0 1 0\n0 1 0 1 0\n0 0 1 1 0\n"},
  };
  return p;
}

}  // namespace

MorseFunction MorseFunction::named(const std::string& name) {
  auto& p = presets();
  if (auto it = p.find(name); it != p.end()) return parse(it->second);
  std::ifstream in(name);
  if (!in) throw std::invalid_argument("unknown function '" + name + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> MorseFunction::names() {
  std::vector<std::string> n;
  for (auto& [k, v] : presets()) n.push_back(k);
  return n;
}

std::string MorseFunction::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "dim " << dim << '\n';
  for (auto& t : terms) {
    for (int k : t.k) os << k << ' ';
    os << t.a << ' ' << t.b << '\n';
  }
  return os.str();
}

Vec torus_reduce(const Vec& x) {
  Vec r(x.size());
  for (int i = 0; i < x.size(); ++i) {
    r[i] = x[i] - std::floor(x[i]);
    if (r[i] > 1 - 1e-12) r[i] = 0;
  }
  return r;
}

Vec torus_delta(const Vec& a, const Vec& b) {
  Vec d = a - b;
  for (int i = 0; i < d.size(); ++i) d[i] -= std::round(d[i]);
  return d;
}

namespace {

void sign_normalize(Vec& v) {
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
}

Mat axis_frame(const Mat& basis) {
  int d = static_cast<int>(basis.rows()), r = static_cast<int>(basis.cols());
  Mat proj = basis * basis.transpose();
  Mat out(d, r);
  int got = 0;
  for (int i = 0; i < d && got < r; ++i) {
    Vec v = proj.col(i);
    for (int j = 0; j < got; ++j) v -= out.col(j).dot(v) * out.col(j);
    if (v.norm() < 1e-8) continue;
    v.normalize();
    sign_normalize(v);
    out.col(got++) = v;
  }
  return out;
}

}  // namespace

std::vector<CriticalPoint> critical_points(const MorseFunction& f, const CriticalOptions& opt) {
  int d = f.dim;
  double scale = 0;
  for (auto& t : f.terms) {
    double k2 = 0;
    for (int k : t.k) k2 += k * k;
    scale += kTwoPi * kTwoPi * k2 * (std::abs(t.a) + std::abs(t.b));
  }
  int grid = opt.grid > 0 ? opt.grid : (d <= 2 ? 24 : 12);
  for (int round = 0; round <= opt.refinements; ++round, grid *= 2) {
    std::vector<Vec> found;
    long total = 1;
    for (int i = 0; i < d; ++i) total *= grid;
    for (long idx = 0; idx < total; ++idx) {
      Vec x(d);
      long r = idx;
      for (int i = 0; i < d; ++i) {
        x[i] = (r % grid + 0.5) / grid;
        r /= grid;
      }
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        Vec g = f.gradient(x);
        if (g.norm() <= opt.newton_tol * std::max(1.0, scale)) {
          ok = true;
          break;
        }
        Vec step = f.hessian(x).completeOrthogonalDecomposition().solve(g);
        if (!step.allFinite()) break;
        double n = step.norm();
        if (n > 0.1) step *= 0.1 / n;
        x -= step;
      }
      if (!ok) continue;
      x = torus_reduce(x);
      bool dup = false;
      for (auto& y : found)
        if (torus_delta(x, y).norm() < opt.dedup) dup = true;
      if (!dup) found.push_back(x);
    }
    std::vector<CriticalPoint> cps;
    int euler = 0;
    for (auto& x : found) {
      CriticalPoint c;
      c.position = x;
      c.value = f.value(x);
      Eigen::SelfAdjointEigenSolver<Mat> es(f.hessian(x));
      c.eigenvalues = es.eigenvalues();
      c.lambda_min = c.eigenvalues.cwiseAbs().minCoeff();
      if (c.lambda_min < opt.degenerate * std::max(1.0, scale))
        throw MorseError(MorseError::Kind::NonMorse, "degenerate critical point found; the function is not Morse");
      c.index = static_cast<int>((c.eigenvalues.array() < 0).count());
      c.unstable = axis_frame(es.eigenvectors().leftCols(c.index));
      c.stable = axis_frame(es.eigenvectors().rightCols(d - c.index));
      Mat both(d, d);
      both << c.unstable, c.stable;
      if (both.determinant() < 0) {
        if (c.stable.cols() > 0) c.stable.col(c.stable.cols() - 1) *= -1;
        else c.unstable.col(c.unstable.cols() - 1) *= -1;
      }
      euler += c.index % 2 ? -1 : 1;
      cps.push_back(std::move(c));
    }
    if (cps.empty() || euler != 0) continue;
    std::sort(cps.begin(), cps.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
      if (a.index != b.index) return a.index < b.index;
      return std::lexicographical_compare(a.position.data(), a.position.data() + a.position.size(),
                                          b.position.data(), b.position.data() + b.position.size());
    });
    return cps;
  }
  throw MorseError(MorseError::Kind::MissedRoots, "critical point search did not reach Euler characteristic 0");
}

VectorField gradient_field(const MorseFunction& f, double scale) {
  return [f, scale](double, const Vec& x, Vec& v, Mat* jac) {
    v = scale * f.gradient(x);
    if (jac) *jac = scale * f.hessian(x);
  };
}

namespace {

namespace ode = boost::numeric::odeint;
using State = std::vector<double>;

// Augmented system x' = s F(t0 + s tau, x), J' = s DF J in the forward variable tau.
struct Augmented {
  const VectorField* field;
  int d;
  double t0;
  double s;
  void operator()(const State& y, State& dy, double tau) const {
    Eigen::Map<const Vec> x(y.data(), d);
    Eigen::Map<const Mat> j(y.data() + d, d, d);
    Vec v;
    Mat a;
    (*field)(t0 + s * tau, x, v, &a);
    Eigen::Map<Vec>(dy.data(), d) = s * v;
    Eigen::Map<Mat>(dy.data() + d, d, d) = s * a * j;
  }
};

State pack(const Vec& x) {
  int d = static_cast<int>(x.size());
  State y(d + d * d, 0.0);
  for (int i = 0; i < d; ++i) {
    y[i] = x[i];
    y[d + i * d + i] = 1.0;
  }
  return y;
}

void unpack(const State& y, int d, FlowResult& r) {
  r.x = Eigen::Map<const Vec>(y.data(), d);
  r.jacobian = Eigen::Map<const Mat>(y.data() + d, d, d);
}

template <class Stop>
FlowResult integrate(const Vec& x0, const VectorField& field, double t0, double t1, const FlowOptions& opt,
                     bool record, Stop stop, bool* stopped = nullptr) {
  int d = static_cast<int>(x0.size());
  double s = t1 >= t0 ? 1.0 : -1.0;
  double T = std::abs(t1 - t0);
  Augmented sys{&field, d, t0, s};
  FlowResult r;
  State y = pack(x0);
  if (stopped) *stopped = false;
  if (T == 0) {
    unpack(y, d, r);
    r.t = t0;
    return r;
  }
  auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(y, 0.0, std::min(1e-3, T));
  if (record) r.samples.push_back({t0, x0});
  long steps = 0;
  while (stepper.current_time() < T) {
    auto [ta, tb] = stepper.do_step(std::ref(sys));
    if (++steps > opt.max_steps) throw MorseError(MorseError::Kind::Integration, "step limit exceeded in flow");
    if (tb - ta < 1e-14 * std::max(1.0, T))
      throw MorseError(MorseError::Kind::Integration, "step size underflow in flow");
    double te = std::min(tb, T);
    if (auto hit = stop(stepper, ta, te)) {
      State ys(y.size());
      stepper.calc_state(*hit, ys);
      unpack(ys, d, r);
      r.t = t0 + s * *hit;
      if (record) r.samples.push_back({r.t, r.x});
      if (stopped) *stopped = true;
      return r;
    }
    if (record) {
      State ys(y.size());
      stepper.calc_state(te, ys);
      r.samples.push_back({t0 + s * te, Eigen::Map<const Vec>(ys.data(), d)});
    }
  }
  State ys(y.size());
  stepper.calc_state(T, ys);
  unpack(ys, d, r);
  r.t = t1;
  return r;
}

}  // namespace

FlowResult flow(const Vec& x0, const VectorField& field, double t0, double t1, const FlowOptions& opt, bool record) {
  return integrate(x0, field, t0, t1, opt, record, [](auto&, double, double) { return std::optional<double>{}; });
}

std::optional<FlowResult> flow_to_level(const Vec& x0, const MorseFunction& f, double c, int direction, double tmax,
                                        const FlowOptions& opt) {
  double dir = direction > 0 ? 1.0 : -1.0;
  if (dir * (f.value(x0) - c) >= 0) return std::nullopt;
  int d = f.dim;
  auto field = gradient_field(f);
  auto stop = [&](auto& stepper, double ta, double tb) -> std::optional<double> {
    State y(d + d * d);
    stepper.calc_state(tb, y);
    if (dir * (f.value(Eigen::Map<const Vec>(y.data(), d)) - c) < 0) return std::nullopt;
    double lo = ta, hi = tb;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      stepper.calc_state(mid, y);
      if (dir * (f.value(Eigen::Map<const Vec>(y.data(), d)) - c) < 0) lo = mid;
      else hi = mid;
    }
    return hi;
  };
  bool hit = false;
  auto r = integrate(x0, field, 0.0, dir * tmax, opt, false, stop, &hit);
  if (!hit) return std::nullopt;
  return r;
}

bool converges_to(const MorseFunction& f, const Vec& x, const CriticalPoint& p, int direction, double tmax,
                  const FlowOptions& opt) {
  auto field = gradient_field(f);
  auto r = flow(x, field, 0.0, direction > 0 ? tmax : -tmax, opt);
  return torus_delta(r.x, p.position).norm() < 1e-3;
}

namespace {

std::vector<Vec> sphere_samples(int m, int n) {
  std::vector<Vec> out;
  if (m == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
  } else if (m == 2) {
    for (int i = 0; i < n; ++i) {
      double a = kTwoPi * (i + 0.37) / n;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      out.push_back(u);
    }
  } else if (m == 3) {
    int total = n * n / 8 + 8;
    double golden = std::numbers::pi * (3 - std::sqrt(5.0));
    for (int i = 0; i < total; ++i) {
      double z = 1 - 2 * (i + 0.5) / total;
      double r = std::sqrt(1 - z * z);
      Vec u(3);
      u << r * std::cos(golden * i), r * std::sin(golden * i), z;
      out.push_back(u);
    }
  }
  return out;
}

// Orthonormal basis B of u^perp with det[u, B] = +1.
Mat tangent_basis(const Vec& u) {
  int m = static_cast<int>(u.size());
  if (m <= 1) return Mat(m, 0);
  Eigen::HouseholderQR<Mat> qr(u);
  Mat q = qr.householderQ();
  Mat b = q.rightCols(m - 1);
  Mat full(m, m);
  full << u, b;
  if (full.determinant() < 0) b.col(m - 2) *= -1;
  return b;
}

// Orientation of the boundary sphere at u (first coordinate outward).
int sphere_sign(const Vec& u) { return u.size() == 1 ? (u[0] > 0 ? 1 : -1) : 1; }

struct LevelHit {
  Vec y;
  Mat dy;  // pushforward of tangent_basis(u)
};

std::optional<LevelHit> shoot(const MorseFunction& f, const CriticalPoint& cp, const Mat& frame, const Vec& u,
                              double r0, double c, int dir, double tmax, const FlowOptions& fo) {
  Vec start = cp.position + r0 * frame * u;
  auto r = flow_to_level(start, f, c, dir, tmax, fo);
  if (!r) return std::nullopt;
  Vec g = f.gradient(r->x);
  Mat proj = Mat::Identity(f.dim, f.dim) - g * g.transpose() / g.squaredNorm();
  return LevelHit{r->x, proj * r->jacobian * (r0 * frame * tangent_basis(u))};
}

Mat level_tangent(const Vec& g) {
  int d = static_cast<int>(g.size());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  return q.rightCols(d - 1);
}

}  // namespace

namespace detail {

double hessian_bound(const MorseFunction& f) {
  double b = 0;
  for (auto& t : f.terms) {
    double k2 = 0;
    for (int k : t.k) k2 += k * k;
    b += kTwoPi * kTwoPi * k2 * (std::abs(t.a) + std::abs(t.b));
  }
  return std::max(b, 1e-12);
}

double horizon(const std::vector<CriticalPoint>& crit) {
  double lm = 1e300;
  for (auto& c : crit) lm = std::min(lm, c.lambda_min);
  return 25.0 / lm;
}

int det_sign(const Mat& m) {
  if (m.cols() == 0) return 1;
  double d = m.determinant();
  return d > 0 ? 1 : -1;
}

double condition(const Mat& m) {
  if (m.cols() == 0) return 1;
  Eigen::JacobiSVD<Mat> svd(m);
  auto s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

}  // namespace detail

using namespace detail;

int count_trajectories(const MorseFunction& f, const std::vector<CriticalPoint>& crit, int p, int q,
                       const CountOptions& opt, std::vector<Trajectory>* found) {
  const auto& cp = crit.at(p);
  const auto& cq = crit.at(q);
  if (cq.index != cp.index + 1)
    throw MorseError(MorseError::Kind::Precondition, "trajectory counts need index(q) = index(p) + 1");
  int d = f.dim;
  int m = d - cp.index, k = cq.index;
  double c = 0.5 * (cp.value + cq.value);
  if (cq.value <= cp.value) return 0;
  double tmax = horizon(crit);

  std::vector<std::pair<Vec, Vec>> side_p, side_q;  // (sphere point, level point)
  for (auto& u : sphere_samples(m, opt.sphere_samples))
    if (auto h = shoot(f, cp, cp.stable, u, opt.r0, c, +1, tmax, opt.flow)) side_p.push_back({u, h->y});
  for (auto& w : sphere_samples(k, opt.sphere_samples))
    if (auto h = shoot(f, cq, cq.unstable, w, opt.r0, c, -1, tmax, opt.flow)) side_q.push_back({w, h->y});
  if (side_p.empty() || side_q.empty()) return 0;

  std::vector<std::pair<int, int>> seeds;
  for (int i = 0; i < static_cast<int>(side_p.size()); ++i) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(side_q.size()); ++j)
      if (torus_delta(side_p[i].second, side_q[j].second).norm() <
          torus_delta(side_p[i].second, side_q[best].second).norm())
        best = j;
    seeds.push_back({i, best});
  }
  for (int j = 0; j < static_cast<int>(side_q.size()); ++j) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(side_p.size()); ++i)
      if (torus_delta(side_p[i].second, side_q[j].second).norm() <
          torus_delta(side_p[best].second, side_q[j].second).norm())
        best = i;
    seeds.push_back({best, j});
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  // mutual nearest pairs first; distant pairs are hopeless Newton starts
  auto gap = [&](std::pair<int, int> s) { return torus_delta(side_p[s.first].second, side_q[s.second].second).norm(); };
  std::stable_sort(seeds.begin(), seeds.end(), [&](auto x, auto y) { return gap(x) < gap(y); });
  double spacing = 0;
  for (auto* side : {&side_p, &side_q})
    for (std::size_t i = 0; i + 1 < side->size(); ++i)
      spacing = std::max(spacing, torus_delta((*side)[i].second, (*side)[i + 1].second).norm());
  double reach = std::max(4 * spacing, 0.05);
  while (!seeds.empty() && gap(seeds.back()) > reach && seeds.size() > 2) seeds.pop_back();
  if (seeds.size() > 48) seeds.resize(48);

  std::vector<std::optional<Trajectory>> results(seeds.size());
  detail::parallel_for(static_cast<int>(seeds.size()), opt.jobs, [&](int s) {
    Vec u = side_p[seeds[s].first].first, w = side_q[seeds[s].second].first;
    for (int it = 0; it < 40; ++it) {
      auto hp = shoot(f, cp, cp.stable, u, opt.r0, c, +1, tmax, opt.flow);
      auto hq = shoot(f, cq, cq.unstable, w, opt.r0, c, -1, tmax, opt.flow);
      if (!hp || !hq) return;
      Vec r = torus_delta(hp->y, hq->y);
      Vec g = f.gradient(hp->y);
      Mat jac(d, d - 1);
      jac << hp->dy, -hq->dy;
      if (r.norm() < opt.residual_tol) {
        Mat oriented(d, d);
        oriented << g, hq->dy, hp->dy;
        double cond = condition(level_tangent(g).transpose() * jac);
        if (cond > opt.max_condition)
          throw MorseError(MorseError::Kind::NonTransverse,
                           "ill-conditioned trajectory; perturb the function (condition " + std::to_string(cond) + ")");
        int sign = -sphere_sign(u) * sphere_sign(w) * det_sign(oriented);
        results[s] = Trajectory{p, q, sign, torus_reduce(hp->y), r.norm(), cond};
        return;
      }
      if (d == 1 || (it >= 10 && r.norm() > 1e-5)) return;
      Mat t = level_tangent(g);
      Vec step = (t.transpose() * jac).colPivHouseholderQr().solve(-(t.transpose() * r));
      if (!step.allFinite()) return;
      if (step.norm() > 0.5) step *= 0.5 / step.norm();
      if (m > 1) u = (u + tangent_basis(u) * step.head(m - 1)).normalized();
      if (k > 1) w = (w + tangent_basis(w) * step.tail(k - 1)).normalized();
    }
  });

  std::vector<Trajectory> distinct;
  for (auto& r : results) {
    if (!r) continue;
    bool dup = false;
    for (auto& t : distinct)
      if (torus_delta(t.level_point, r->level_point).norm() < opt.separation) {
        if (t.sign != r->sign)
          throw MorseError(MorseError::Kind::NonTransverse, "unresolved trajectory cluster with conflicting signs");
        dup = true;
      }
    if (!dup) distinct.push_back(*r);
  }
  int total = 0;
  for (auto& t : distinct) total += t.sign;
  if (found) found->insert(found->end(), distinct.begin(), distinct.end());
  return total;
}

IntMatrix zeros(std::size_t rows, std::size_t cols) { return IntMatrix(rows, std::vector<long long>(cols, 0)); }

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  std::size_t n = a.size(), inner = b.size(), m = b.empty() ? 0 : b[0].size();
  IntMatrix c = zeros(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < inner; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

int rational_rank(const IntMatrix& in) {
  using Q = boost::rational<long long>;
  std::vector<std::vector<Q>> m;
  for (auto& row : in) m.emplace_back(row.begin(), row.end());
  int rows = static_cast<int>(m.size()), cols = rows ? static_cast<int>(m[0].size()) : 0;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c].numerator() != 0) piv = r;
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][c].numerator() == 0) continue;
      Q factor = m[r][c] / m[rank][c];
      for (int j = c; j < cols; ++j) m[r][j] -= factor * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

std::vector<int> cohomology_ranks(const std::vector<int>& degrees, const IntMatrix& d) {
  if (degrees.empty()) return {};
  int lo = *std::min_element(degrees.begin(), degrees.end());
  int hi = *std::max_element(degrees.begin(), degrees.end());
  auto block_rank = [&](int k) {
    IntMatrix b;
    for (std::size_t r = 0; r < degrees.size(); ++r) {
      if (degrees[r] != k + 1) continue;
      std::vector<long long> row;
      for (std::size_t c = 0; c < degrees.size(); ++c)
        if (degrees[c] == k) row.push_back(d[r][c]);
      b.push_back(row);
    }
    return b.empty() ? 0 : rational_rank(b);
  };
  std::vector<int> ranks;
  for (int k = lo; k <= hi; ++k) {
    int dim = static_cast<int>(std::count(degrees.begin(), degrees.end(), k));
    ranks.push_back(dim - block_rank(k) - block_rank(k - 1));
  }
  return ranks;
}

std::vector<int> MorseComplex::degrees() const {
  std::vector<int> deg;
  for (auto& g : generators) deg.push_back(g.index);
  return deg;
}

std::vector<int> MorseComplex::homology_ranks() const {
  auto r = cohomology_ranks(degrees(), codifferential);
  // pad so that entry k is H^k
  int lo = generators.empty() ? 0 : generators.front().index;
  r.insert(r.begin(), lo, 0);
  r.resize(f.dim + 1, 0);
  return r;
}

bool MorseComplex::squares_to_zero() const {
  auto sq = multiply(codifferential, codifferential);
  for (auto& row : sq)
    for (auto x : row)
      if (x) return false;
  return true;
}

MorseComplex morse_complex(const MorseFunction& f, const CountOptions& opt, const CriticalOptions& copt) {
  MorseComplex mc;
  mc.f = f;
  mc.generators = critical_points(f, copt);
  int n = static_cast<int>(mc.generators.size());
  mc.codifferential = zeros(n, n);
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (mc.generators[q].index == mc.generators[p].index + 1) pairs.push_back({p, q});
  std::vector<std::vector<Trajectory>> found(pairs.size());
  CountOptions inner = opt;
  inner.jobs = 1;
  detail::parallel_for(static_cast<int>(pairs.size()), opt.jobs, [&](int i) {
    auto [p, q] = pairs[i];
    mc.codifferential[q][p] = count_trajectories(f, mc.generators, p, q, inner, &found[i]);
  });
  for (auto& v : found) mc.trajectories.insert(mc.trajectories.end(), v.begin(), v.end());
  return mc;
}

double schedule(double s) {
  auto bump = [](double u) { return u <= 0 ? 0.0 : std::exp(-1.0 / u); };
  double u = (s + 1) / 2;
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  return bump(u) / (bump(u) + bump(1 - u));
}

namespace detail {

ManifoldChart make_chart(const MorseFunction& f, const CriticalPoint& cp, int dir, double r0) {
  ManifoldChart ch;
  ch.f = &f;
  ch.base = cp.position;
  ch.dir = dir;
  ch.frame = dir > 0 ? cp.stable : cp.unstable;
  int d = f.dim;
  if (ch.frame.cols() == 0) {
    ch.point = true;
    return ch;
  }
  if (ch.frame.cols() == d) {
    ch.free = true;
    return ch;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(f.hessian(cp.position));
  double lam = 1e300;
  Mat lin = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double l = es.eigenvalues()[i];
    if (dir * l <= 0) continue;
    lam = std::min(lam, std::abs(l));
  }
  ch.tc = std::log(1.0 / r0) / lam;
  for (int i = 0; i < d; ++i) {
    double l = es.eigenvalues()[i];
    if (dir * l <= 0) continue;
    Vec v = es.eigenvectors().col(i);
    lin += std::exp(-std::abs(l) * ch.tc) * v * v.transpose();
  }
  ch.shrink = lin * ch.frame;
  return ch;
}

std::vector<Vec> chart_samples(const ManifoldChart& ch, double radius, int n) {
  std::vector<Vec> out;
  int m = ch.dim();
  if (ch.point) return {Vec(0)};
  if (ch.free) {
    int g = m == 1 ? n : (m == 2 ? 16 : 8);
    long total = 1;
    for (int i = 0; i < m; ++i) total *= g;
    for (long idx = 0; idx < total; ++idx) {
      Vec x(m);
      long r = idx;
      for (int i = 0; i < m; ++i) {
        x[i] = (r % g + 0.5) / g;
        r /= g;
      }
      out.push_back(ch.frame.transpose() * torus_delta(x, ch.base));
    }
    return out;
  }
  int g = m == 1 ? n : 24;
  long total = 1;
  for (int i = 0; i < m; ++i) total *= g;
  for (long idx = 0; idx < total; ++idx) {
    Vec a(m);
    long r = idx;
    for (int i = 0; i < m; ++i) {
      a[i] = -radius + 2 * radius * (r % g + 0.5) / g;
      r /= g;
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace detail

IntMatrix continuation_map(const MorseComplex& A, const MorseComplex& B, const ContinuationOptions& opt) {
  const auto& f = A.f;
  const auto& g = B.f;
  if (f.dim != g.dim) throw MorseError(MorseError::Kind::Precondition, "continuation between different tori");
  int d = f.dim;
  const FlowOptions& fo = opt.count.flow;
  // Gradient for the flat metric scaled so the window [-1, 1] expands by at most e.
  double eps = 0.5 / std::max(hessian_bound(f), hessian_bound(g));
  VectorField homotopy = [&](double s, const Vec& x, Vec& v, Mat* jac) {
    double b = schedule(s);
    v = eps * ((1 - b) * f.gradient(x) + b * g.gradient(x));
    if (jac) *jac = eps * ((1 - b) * f.hessian(x) + b * g.hessian(x));
  };
  double tmax = std::max(horizon(A.generators), horizon(B.generators));
  int na = static_cast<int>(A.generators.size()), nb = static_cast<int>(B.generators.size());
  IntMatrix psi = zeros(nb, na);
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < na; ++p)
    for (int q = 0; q < nb; ++q)
      if (A.generators[p].index == B.generators[q].index) pairs.push_back({p, q});

  detail::parallel_for(static_cast<int>(pairs.size()), opt.count.jobs, [&](int pi) {
    auto [p, q] = pairs[pi];
    const auto& cp = A.generators[p];
    const auto& cq = B.generators[q];
    auto za = make_chart(f, cp, +1, opt.r0);
    auto wb = make_chart(g, cq, -1, opt.r0);
    int m = za.dim(), k = wb.dim();
    auto image = [&](const Vec& a) {
      auto [z, dz] = za.eval(a, fo);
      auto r = flow(z, homotopy, -1.0, 1.0, fo);
      return std::make_pair(r.x, Mat(r.jacobian * dz));
    };
    std::vector<std::pair<Vec, Vec>> ca, cb;
    for (auto& a : chart_samples(za, opt.radius, opt.samples)) ca.push_back({a, image(a).first});
    for (auto& b : chart_samples(wb, opt.radius, opt.samples)) cb.push_back({b, wb.eval(b, fo).first});
    std::vector<std::pair<int, int>> seeds;
    auto dist = [&](int i, int j) { return torus_delta(ca[i].second, cb[j].second).norm(); };
    for (int i = 0; i < static_cast<int>(ca.size()); ++i) {
      int best = 0;
      for (int j = 1; j < static_cast<int>(cb.size()); ++j)
        if (dist(i, j) < dist(i, best)) best = j;
      seeds.push_back({i, best});
    }
    for (int j = 0; j < static_cast<int>(cb.size()); ++j) {
      int best = 0;
      for (int i = 1; i < static_cast<int>(ca.size()); ++i)
        if (dist(i, j) < dist(best, j)) best = i;
      seeds.push_back({best, j});
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    // keep the closest seeds only: far pairs rarely converge and cost a Newton run each
    std::sort(seeds.begin(), seeds.end(),
              [&](auto x, auto y) { return dist(x.first, x.second) < dist(y.first, y.second); });
    if (seeds.size() > 64) seeds.resize(64);

    std::vector<std::pair<Vec, int>> sols;
    for (auto [i, j] : seeds) {
      Vec a = ca[i].first, b = cb[j].first;
      for (int it = 0; it < 40; ++it) {
        auto [x, dx] = image(a);
        auto [w, dw] = wb.eval(b, fo);
        Vec r = torus_delta(x, w);
        Mat jac(d, d);
        jac << dx, -dw;
        if (r.norm() < opt.count.residual_tol) {
          if ((m < d && m > 0 && a.norm() > 3 * opt.radius) || (k < d && k > 0 && b.norm() > 3 * opt.radius)) break;
          if (za.free && !converges_to(f, za.eval(a, fo).first, cp, -1, tmax, fo)) break;
          if (wb.free && !converges_to(g, w, cq, +1, tmax, fo)) break;
          double cond = condition(jac);
          if (cond > opt.count.max_condition)
            throw MorseError(MorseError::Kind::NonTransverse, "ill-conditioned continuation trajectory");
          int sign = ((k * (m + 1)) % 2 ? -1 : 1) * det_sign(jac);
          Vec z = torus_reduce(za.eval(a, fo).first);
          bool dup = false;
          for (auto& s : sols)
            if (torus_delta(s.first, z).norm() < opt.count.separation) dup = true;
          if (!dup) sols.push_back({z, sign});
          break;
        }
        if (d == 0) break;
        Vec step = jac.colPivHouseholderQr().solve(-r);
        if (!step.allFinite()) break;
        if (step.norm() > 0.5) step *= 0.5 / step.norm();
        a += step.head(m);
        b += step.tail(k);
      }
    }
    long long total = 0;
    for (auto& s : sols) total += s.second;
    psi[q][p] = total;
  });
  return psi;
}

bool is_chain_map(const MorseComplex& a, const MorseComplex& b, const IntMatrix& psi) {
  return multiply(psi, a.codifferential) == multiply(b.codifferential, psi);
}

bool is_quasi_isomorphism(const MorseComplex& a, const MorseComplex& b, const IntMatrix& psi) {
  if (!is_chain_map(a, b, psi)) return false;
  std::size_t na = a.generators.size(), nb = b.generators.size();
  std::vector<int> deg;
  for (auto& g : a.generators) deg.push_back(g.index - 1);
  for (auto& g : b.generators) deg.push_back(g.index);
  IntMatrix cone = zeros(na + nb, na + nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) cone[i][j] = -a.codifferential[i][j];
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < na; ++j) cone[na + i][j] = psi[i][j];
    for (std::size_t j = 0; j < nb; ++j) cone[na + i][na + j] = b.codifferential[i][j];
  }
  for (int r : cohomology_ranks(deg, cone))
    if (r != 0) return false;
  return true;
}

}  // namespace fgo
