#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "exitwalk/lattice.hpp"
#include "exitwalk/rational.hpp"

namespace exitwalk {

/// Law of the lazy walk at one time step, killed at exit; masses are
/// exact rationals indexed parallel to the carrier set's points.
struct ProbVector {
    std::shared_ptr<const PointSet> domain;
    int step_index = 0;
    std::vector<Rat> mass;

    Rat total() const;
};

ProbVector delta_mass(std::shared_ptr<const PointSet> domain, const Point& z);

/// One uniform-kernel step (each coordinate moves by -1/0/+1 with
/// probability 1/3), then restriction to kill_domain.
ProbVector step(const ProbVector& pv, std::shared_ptr<const PointSet> kill_domain);

struct SurvivalCurve {
    std::vector<Rat> values;  // s_0 .. s_M
};

/// s_m = P^z(walk stays in domain through step m), exact.
SurvivalCurve survival(const Point& z, const PointSet& domain, int M);

/// P^z(tau_inner > m, tau_outer > n) for inner ⊆ outer.
Rat joint_survival(const Point& z, const PointSet& inner, const PointSet& outer, int m, int n);

/// P^z(tau_inner > m | tau_outer > n), exact.
Rat conditional_exit_prob(const Point& z, const PointSet& inner, const PointSet& outer, int m,
                          int n);

/// Expected exit times E(v) for every v in the domain, via the exact
/// linear system E = 1 + 3^-k * sum of neighbor values (0 outside).
/// Fraction-free elimination over integers; result exact.
std::vector<Rat> expected_exit_all(const PointSet& domain);
Rat expected_exit_time(const Point& z, const PointSet& domain);

struct RatInterval {
    Rat lo, hi;
    Rat width() const { return hi - lo; }
};

/// Rigorous enclosure of E^z(tau_inner | tau_outer > n) =
/// sum_m P^z(tau_inner > m | tau_outer > n).  The tail past the last
/// computed step is bounded by block-geometric decay: from any point the
/// walk exits within L steps (L = max king-distance to the exterior)
/// with probability >= 3^(-k L).
RatInterval conditional_expected_exit(const Point& z, const PointSet& inner,
                                      const PointSet& outer, int n, const Rat& tolerance,
                                      int step_cap = 20000);

/// Path-enumeration oracle for joint_survival; counts surviving paths of
/// length max(m,n), each of weight 3^(-k*max(m,n)).  Independent of the
/// DP above.  Throws CapExceeded when 3^(k*max(m,n)) > path_cap.
Rat brute_force_joint(const Point& z, const PointSet& inner, const PointSet& outer, int m, int n,
                      std::uint64_t path_cap = 20'000'000);

/// Double-precision twins for instances past the exact-size comfort zone
/// (used by the scaling checks; accumulated rounding is ~1e-15 per step).
std::vector<double> survival_f(const Point& z, const PointSet& domain, int M);
double joint_survival_f(const Point& z, const PointSet& inner, const PointSet& outer, int m,
                        int n);
double conditional_exit_prob_f(const Point& z, const PointSet& inner, const PointSet& outer,
                               int m, int n);

/// JSON record for one exact result: instance hash, z, m, n, exact
/// numerator/denominator as decimal strings, float approximation.
std::string exact_result_json(const std::string& instance, const Point& z, int m, int n,
                              const Rat& value);

}  // namespace exitwalk
