#include "taskspace/spectral.hpp"

#include "taskspace/error.hpp"
#include "taskspace/linalg.hpp"
#include "taskspace/pgf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace taskspace {

namespace {

constexpr std::size_t kMaxPowerIterations = 2000000;

// Components of the support graph of m, via transitive closure (matrices
// here are |types| x |types|, so O(n^3) is the cost of one LU anyway).
std::vector<std::vector<Eigen::Index>> strong_components(const TypedMatrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) reach[i][j] = (i == j) || m(i, j) > 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (reach[i][k])
        for (Eigen::Index j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;

  std::vector<char> assigned(n, 0);
  std::vector<std::vector<Eigen::Index>> comps;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (assigned[i]) continue;
    std::vector<Eigen::Index> comp;
    for (Eigen::Index j = i; j < n; ++j)
      if (reach[i][j] && reach[j][i]) {
        comp.push_back(j);
        assigned[j] = 1;
      }
    comps.push_back(std::move(comp));
  }
  return comps;
}

double irreducible_radius(const TypedMatrix& block, double tol) {
  const Eigen::Index n = block.rows();
  if (n == 1) return block(0, 0);
  const double scale = block.rowwise().sum().maxCoeff();
  if (scale <= 0.0) return 0.0;
  // rho(A/s + I) = rho(A)/s + 1, and A/s + I is primitive.
  const TypedMatrix a = block / scale + TypedMatrix::Identity(n, n);
  TypedVector x = TypedVector::Ones(n);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t it = 0; it < kMaxPowerIterations; ++it) {
    const TypedVector y = a * x;
    const TypedVector ratio = y.cwiseQuotient(x);
    lo = ratio.minCoeff();
    hi = ratio.maxCoeff();
    if ((hi - lo) * scale <= tol) break;
    x = y / y.maxCoeff();
  }
  return std::max(0.0, 0.5 * (lo + hi) - 1.0) * scale;
}

}  // namespace

double spectral_radius(const TypedMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix is not square");
  if (m.size() == 0) return 0.0;
  if ((m.array() < 0.0).any()) throw std::invalid_argument("spectral_radius: matrix has negative entries");

  double rho = 0.0;
  for (const auto& comp : strong_components(m)) {
    const auto k = static_cast<Eigen::Index>(comp.size());
    TypedMatrix block(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) block(i, j) = m(comp[i], comp[j]);
    rho = std::max(rho, irreducible_radius(block, tol));
  }
  return rho;
}

std::string_view to_string(Criticality c) { return c == Criticality::Critical ? "Critical" : "Subcritical"; }

namespace {

// Linear-system indicator: a finite solution u >= 1 of (I - f'(1)) u = 1
// exists iff the series sum_i f'(1)^i 1 converges.
std::optional<TypedVector> solve_expected_times(const TypedMatrix& jac1, double max_norm) {
  const auto n = jac1.rows();
  const TypedMatrix a = TypedMatrix::Identity(n, n) - jac1;
  const TypedVector rhs = TypedVector::Ones(n);
  auto u = solve(a, rhs);
  if (!u) return std::nullopt;
  if (u->minCoeff() < 1.0 - 1e-9) return std::nullopt;
  if (inf_norm(*u) > max_norm) return std::nullopt;
  if (inf_norm(TypedVector(a * *u - rhs)) > 1e-6 * std::max(1.0, inf_norm(*u))) return std::nullopt;
  return u;
}

}  // namespace

Classification classify(const TaskSystem& ts, double tol) {
  const TypedMatrix jac1 = jacobian(ts, ones(ts));
  Classification c;
  c.spectral_radius_estimate = spectral_radius(jac1, std::min(1e-12, tol * 1e-3));
  const bool by_radius = c.spectral_radius_estimate < 1.0 - tol;
  auto u = solve_expected_times(jac1, 1.0 / tol);
  const bool by_solve = u.has_value();
  if (by_radius != by_solve) {
    std::ostringstream os;
    os.precision(17);
    os << "inconsistent criticality indicators: spectral radius " << c.spectral_radius_estimate << " says "
       << (by_radius ? "subcritical" : "critical") << ", linear solve for expected completion times says "
       << (by_solve ? "subcritical" : "critical");
    throw Error(ErrorKind::InconsistentCriticality, os.str());
  }
  if (by_radius) {
    c.kind = Criticality::Subcritical;
    c.expected_times = std::move(u);
  }
  return c;
}

TypedVector expected_completion_times(const TaskSystem& ts) {
  auto u = solve_expected_times(jacobian(ts, ones(ts)), std::numeric_limits<double>::infinity());
  if (!u) throw Error(ErrorKind::Critical, "expected completion time is infinite (system is critical)");
  return *u;
}

}  // namespace taskspace
