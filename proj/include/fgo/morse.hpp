#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class MorseError : public std::runtime_error {
 public:
  enum class Kind { NonMorse, MissedRoots, NonTransverse, Cluster, Precondition, Integration };
  MorseError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

struct FourierTerm {
  std::vector<int> k;
  double a = 0;  // cos coefficient
  double b = 0;  // sin coefficient
};

// f(x) = sum a cos(2 pi k.x) + b sin(2 pi k.x) on R^d / Z^d.
struct MorseFunction {
  int dim = 1;
  std::vector<FourierTerm> terms;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  // "dim d" followed by lines "k_1 .. k_d a b"; '#' starts a comment.
  static MorseFunction parse(const std::string& text);
  // Named functions (t1-cos, t2-coscos, ...) or a path to a record file.
  static MorseFunction named(const std::string& name);
  static std::vector<std::string> names();
  std::string to_text() const;
};

struct CriticalPoint {
  Vec position;  // in [0,1)^d
  int index = 0;
  double value = 0;
  Vec eigenvalues;  // ascending
  Mat unstable;     // N: d x index, spans the negative eigenspace
  Mat stable;       // P: d x (d - index), spans the positive eigenspace
  double lambda_min = 0;  // smallest |eigenvalue|
};

struct CriticalOptions {
  int grid = 0;  // per axis; 0 picks 24 (d <= 2) or 12
  int refinements = 3;
  double newton_tol = 1e-13;
  double dedup = 1e-4;
  double degenerate = 1e-6;
};

// Frames: orthonormal bases of the eigenspaces obtained by projecting the
// coordinate axes in order; each vector has first nonzero coordinate > 0,
// except that the last vector of P (of N if P is empty) is flipped when
// det[N, P] < 0.
std::vector<CriticalPoint> critical_points(const MorseFunction& f, const CriticalOptions& opt = {});

Vec torus_reduce(const Vec& x);
// Representative of a - b closest to 0.
Vec torus_delta(const Vec& a, const Vec& b);

// v = F(t, x); jac (if non-null) receives dF/dx.
using VectorField = std::function<void(double t, const Vec& x, Vec& v, Mat* jac)>;

VectorField gradient_field(const MorseFunction& f, double scale = 1.0);

struct FlowOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  long max_steps = 200000;
};

struct FlowResult {
  Vec x;
  Mat jacobian;  // dx(t1)/dx(t0)
  double t = 0;  // final time
  std::vector<std::pair<double, Vec>> samples;
};

// Adaptive Dormand-Prince with dense output; t1 < t0 integrates backward.
FlowResult flow(const Vec& x0, const VectorField& field, double t0, double t1, const FlowOptions& opt = {},
                bool record = false);

// Flows (forward if direction > 0) until f reaches level c, at most tmax.
std::optional<FlowResult> flow_to_level(const Vec& x0, const MorseFunction& f, double c, int direction, double tmax,
                                        const FlowOptions& opt = {});

// Does the autonomous f-flow (direction +1 up, -1 down) from x converge to p?
bool converges_to(const MorseFunction& f, const Vec& x, const CriticalPoint& p, int direction, double tmax,
                  const FlowOptions& opt = {});

struct Trajectory {
  int from;
  int to;
  int sign;
  Vec level_point;
  double residual;
  double condition;
};

struct CountOptions {
  double r0 = 1e-3;
  int sphere_samples = 96;
  double residual_tol = 1e-10;
  double separation = 1e-4;
  double max_condition = 1e8;
  int jobs = 0;  // 0: hardware concurrency
  FlowOptions flow;
};

// Signed count of upward gradient trajectories from crit[p] to crit[q];
// requires index(q) = index(p) + 1.
int count_trajectories(const MorseFunction& f, const std::vector<CriticalPoint>& crit, int p, int q,
                       const CountOptions& opt = {}, std::vector<Trajectory>* found = nullptr);

using IntMatrix = std::vector<std::vector<long long>>;

struct MorseComplex {
  MorseFunction f;
  std::vector<CriticalPoint> generators;  // sorted by (index, position)
  IntMatrix codifferential;               // [q][p] = count from p to q
  std::vector<Trajectory> trajectories;

  std::vector<int> degrees() const;
  std::vector<int> homology_ranks() const;
  bool squares_to_zero() const;
};

MorseComplex morse_complex(const MorseFunction& f, const CountOptions& opt = {}, const CriticalOptions& copt = {});

// Rank over Q.
int rational_rank(const IntMatrix& m);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
IntMatrix zeros(std::size_t rows, std::size_t cols);

// Betti numbers of a cochain complex given by generator degrees and a matrix [target][source].
std::vector<int> cohomology_ranks(const std::vector<int>& degrees, const IntMatrix& d);

// Smooth step: 0 for s <= -1, 1 for s >= 1.
double schedule(double s);

struct ContinuationOptions {
  double r0 = 1e-3;
  double radius = 4.0;  // chart parameter range
  int samples = 200;
  CountOptions count;
};

// Psi[p'][p]: signed count of trajectories of the gradient of (1 - beta(s)) f + beta(s) f'
// from p in crit(f) to p' in crit(f') with equal index.
IntMatrix continuation_map(const MorseComplex& a, const MorseComplex& b, const ContinuationOptions& opt = {});

bool is_chain_map(const MorseComplex& a, const MorseComplex& b, const IntMatrix& psi);
// Mapping cone acyclic over Q.
bool is_quasi_isomorphism(const MorseComplex& a, const MorseComplex& b, const IntMatrix& psi);

}  // namespace fgo
