#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "metrogap/chain.hpp"
#include "metrogap/grid.hpp"

namespace metrogap {

/// pi(x) proportional to (1+|x|)^{a_minus} for x <= 0 and (1+|x|)^{a_plus} for
/// x > 0 on {-N..N}.
struct OneDAsym1 {
  double a_minus = 0.0;
  double a_plus = 0.0;
  int N = 1;
};

/// Same profile on the asymmetric interval {-N_minus..N_plus}; exponents unordered.
struct OneDAsym2 {
  double a_minus = 0.0;
  double a_plus = 0.0;
  int N_minus = 1;
  int N_plus = 1;
};

/// f(u,v) = exp(a u + b v) on [0,1]^2, discretised on {1..N}^2.
struct ExpLinear {
  double a = 1.0;
  double b = 1.0;
  int N = 1;
};

enum class FalloffShape { Cone, Ramp };

/// f = exp(-g) on [0,1]^2 with exponential fall-off away from z0.
///   Cone: g(z) = a |z - z0|.
///   Ramp: g(z) = A min{u'+v', 1} with (u',v') measured from corner `corner`
///         (0: (0,0), 1: (1,0), 2: (0,1), 3: (1,1)); z0 is that corner.
struct ExpFalloff {
  FalloffShape shape = FalloffShape::Cone;
  double a = 1.0;
  double A = 1.0;
  double C = 1.0;
  int N = 1;
  double eps = 0.5;
  std::array<double, 2> z0{0.5, 0.5};
  int corner = 0;
};

enum class FlatShape { PowerRamp, InversePoly };

/// Members of the flat class on [0,1]^n.
///   PowerRamp:   f(x) = (1 + A sum_i x_i)^theta, any n.
///   InversePoly: f(x,y) = (1 + (A x)^2 + (A y)^4)^(-theta), n = 2.
/// eps and eta are the claimed segment and mass constants; the class checker
/// verifies them.
struct FlatClass {
  FlatShape shape = FlatShape::PowerRamp;
  double A = 1.0;
  double theta = 1.0;
  int n = 2;
  int N = 1;
  double eps = 1.0;
  double eta = 0.01;
};

enum class ValleyForm { Diagonal, Distance };

/// Valley target on {-N+1..N}^2 with cell centres u = (x - 1/2)/N in [-1,1]^2.
///   Diagonal: F = ((A/N)|x1 + x2 - 1| + 1)^alpha.
///   Distance: F = (1 + A d(u, L))^alpha, L = {aL u + bL v = 0}.
struct Valley {
  double alpha = 1.0;
  double A = 1.0;
  double aL = 0.7071067811865476;
  double bL = 0.7071067811865476;
  int N = 1;
  double eps = 0.5;
  ValleyForm form = ValleyForm::Distance;
};

using DensityFamily = std::variant<OneDAsym1, OneDAsym2, ExpLinear, ExpFalloff, FlatClass, Valley>;

struct Discretization {
  Grid grid;
  std::vector<double> log_f;
};

/// Tag name of the family ("OneDAsym1", ...).
std::string family_tag(const DensityFamily& family);

/// Ordered (key, value) description of all parameters, values as text.
std::vector<std::pair<std::string, std::string>> family_params(const DensityFamily& family);

/// Builds a family from its tag and textual key=value parameters. Unknown keys
/// are rejected; omitted keys take the struct defaults.
DensityFamily make_family(std::string_view tag, const std::vector<std::pair<std::string, std::string>>& params);

/// Throws InvalidArgument naming the first violated invariant.
void validate(const DensityFamily& family);

/// Lattice discretisation: grid and log F evaluated at cell centres.
Discretization discretize(const DensityFamily& family);

/// Metropolis chain for the discretised family.
GridChain build_chain(const DensityFamily& family);

/// max_k |F(k) - mean of f over the cell of k| / F(k), with cell means by
/// tensor Gauss-Legendre quadrature of the given order per axis (>= 2).
double discretization_error(const DensityFamily& family, int quadrature_points_per_cell);

/// Signed level of a valley state: sign gives the side of L and |level| the
/// distance to L in the family's own units (lattice diagonal steps for the
/// diagonal form, continuum distance otherwise).
double valley_level(const Valley& family, const Point& p);

/// The state the to-point bounds route to: the maximal corner for ExpLinear,
/// the cell nearest z0 for ExpFalloff.
std::size_t peak_state(const DensityFamily& family, const Grid& grid);

struct TestFunction {
  std::string label;
  StateFunction f;
  /// Balancing constants solved while building f (name, value).
  std::vector<std::pair<std::string, double>> constants;
};

/// Labels applicable to the family in its current parameter regime.
std::vector<std::string> test_function_labels(const DensityFamily& family);

/// Builds the named test function, centred so that pi(f) = 0.
TestFunction test_function(const DensityFamily& family, std::string_view label);
TestFunction test_function(const DensityFamily& family, std::string_view label, const TargetMeasure& target);

}  // namespace metrogap
