#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "exitwalk/lattice.hpp"
#include "exitwalk/rng.hpp"

namespace exitwalk {

/// Symmetric-in-x profile domain {(x,y): |x| < w(y), y_lo < y < y_hi};
/// w is piecewise linear between breakpoints and positive.
struct RowProfile {
    std::vector<std::pair<double, double>> breakpoints;  // (y, w), ascending y

    double y_lo() const { return breakpoints.front().first; }
    double y_hi() const { return breakpoints.back().first; }
    double width_at(double y) const;
    bool inside(double x, double y) const;
    double max_width() const;

    static RowProfile load(std::istream& in, const std::string& name = "<profile>");
    static RowProfile load_file(const std::string& path);
    void save(std::ostream& out) const;
};

struct Rect2 {
    double half_width = 1.0;
    double y_lo = -1.0, y_hi = 1.0;
    bool inside(double x, double y) const {
        return x > -half_width && x < half_width && y > y_lo && y < y_hi;
    }
};

/// U, R and the slit-square counterexample geometry.
class ContinuousDomain {
public:
    enum class Kind { Profile, Rectangle, Slit };

    static ContinuousDomain make_profile(RowProfile p);
    static ContinuousDomain make_rectangle(Rect2 r);
    /// (-1,1)^2 minus {(0,y): |y| >= d/2}; requires 0 < d < 1/2.
    static ContinuousDomain make_slit(double d);

    Kind kind() const { return kind_; }
    double slit_gap() const { return slit_d_; }
    const RowProfile& profile() const { return profile_; }
    const Rect2& rect() const { return rect_; }

    /// Pointwise membership; the slit line itself has measure zero and is
    /// handled by the crossing rule during simulation.
    bool contains(double x, double y) const;

private:
    Kind kind_ = Kind::Rectangle;
    RowProfile profile_;
    Rect2 rect_;
    double slit_d_ = 0.0;
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_value = 0.0;
    std::uint64_t count = 0;  // conditioned sample count for ratio estimates
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string algorithm = kRngAlgorithm;
};

/// Whether one sampled path stays inside through horizon s (exit checked
/// at sample points; slit sign-crossings use linear interpolation).
/// bridge enables the Brownian-bridge crossing test between samples for
/// rectangle domains, removing the leading discrete-monitoring bias.
bool simulate_exit_survives(double zx, double zy, const ContinuousDomain& domain, double s,
                            double dt, CounterRng rng, bool bridge = false);

struct ConditionalMc {
    McEstimate left;   // P(tau_{U+} > s | tau_{R+} > t)
    McEstimate right;  // P(tau_U > s | tau_R > t)
    std::uint64_t paths = 0;
    std::uint64_t denom_hits_half = 0;  // tau_{R+} > t hits
    std::uint64_t denom_hits_full = 0;  // tau_R > t hits
    double denom_rate_full = 0.0;       // P(tau_R > t) estimate
    double denom_rate_full_se = 0.0;
};

/// Shared-path ratio estimators for both conditionals; standard errors by
/// the delta method.  Deterministic for fixed (seed, dt, count, bridge)
/// and any thread count.
ConditionalMc conditional_estimate(double zx, double zy, const ContinuousDomain& U,
                                   const ContinuousDomain& R, double s, double t, double dt,
                                   std::uint64_t count, std::uint64_t seed, int threads = 1,
                                   bool bridge = false);

struct CounterexampleRow {
    double d;
    McEstimate right;           // P^z(tau_U > 1 | tau_R > 1), z = (d, 1/2)
    double left = 1.0;          // identity R+ = U+; no simulation
    std::uint64_t denom_hits;   // conditioned paths
    double denom_rate;          // P^z(tau_R > 1)
    double denom_rate_se;
};

/// Slit-square curve over the listed gaps, sorted ascending by d.
std::vector<CounterexampleRow> counterexample_curve(std::vector<double> d_values, double dt,
                                                    std::uint64_t count, std::uint64_t seed,
                                                    int threads = 1);

struct ScalingRow {
    double delta;
    int steps_m, steps_n;
    std::size_t lattice_points;
    double discrete_left, discrete_right;
    double mc_left, mc_right;
    double mc_left_se, mc_right_se;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;  // one per scale, refinement order
    McEstimate mc_left, mc_right;  // shared continuum reference
};

/// Lattice discretization of (U, R) at each spatial scale delta; step
/// counts matched by variance (2/3 per coordinate per step), conditionals
/// by float DP, compared against one shared MC estimate.
ScalingResult scaling_limit_check(const RowProfile& U, const Rect2& R, double zx, double zy,
                                  double s, double t, const std::vector<double>& scales,
                                  double dt, std::uint64_t count, std::uint64_t seed,
                                  int threads = 1);

/// Discretization used by the scaling check, exposed for tests and the
/// CLI: points (i,j) with (i*delta, j*delta) inside.
LatticeDomain discretize_profile(const RowProfile& U, double delta);
LatticeRect discretize_rect(const Rect2& R, double delta);

}  // namespace exitwalk
