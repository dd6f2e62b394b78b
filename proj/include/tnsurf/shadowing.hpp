#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tnsurf/rational.hpp"

namespace tnsurf {

// ---------------------------------------------------------------------------
// Linear hyperbolic torus models and the three pseudo-metrics.
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const;
};

struct Mat2i {
    long long a = 1, b = 0, c = 0, d = 1;   // row-major [[a,b],[c,d]]
    long long det() const { return a * d - b * c; }
    long long trace() const { return a + d; }
    Mat2i operator*(const Mat2i& o) const;
    Mat2i inverse_unimodular() const;       // requires det == 1
    Mat2i pow(int n) const;                 // n >= 0
    Vec2 apply(const Vec2& v) const;
};

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;
    Mat2 operator*(const Mat2& o) const;
    Vec2 apply(const Vec2& v) const;
    double det() const { return a * d - b * c; }
    Mat2 inverse() const;
};

struct LinearModel {
    Mat2i matrix;
    double lambda = 0.0;          // |leading eigenvalue| > 1
    double lambda_signed = 0.0;   // the leading eigenvalue itself
    Vec2 unstable_covector;       // unit left eigenvectors
    Vec2 stable_covector;

    // Requires det = 1 and |trace| > 2; throws std::domain_error otherwise.
    static LinearModel from_matrix(long long a, long long b, long long c, long long d);
};

struct DComponents {
    double du = 0.0, ds = 0.0, dphi = 0.0;
};

// d_u = |<x-y, w_u>|, d_s likewise, d_phi = d_u + d_s. Equivariant under
// common translations of both points.
DComponents d_components(const Vec2& x, const Vec2& y, const LinearModel& model);

// ---------------------------------------------------------------------------
// Expansion property and the shadowing constant
// ---------------------------------------------------------------------------

struct ExpansionReport {
    bool ok = true;
    int samples = 0;
    double worst_unstable = 0.0;   // worst relative defect of d_u(Ax,Ay)/d_u = lambda
    double worst_stable = 0.0;
    Vec2 worst_pair_x, worst_pair_y;
};

ExpansionReport verify_expansion(const LinearModel& model, int n_pairs,
                                 std::uint64_t seed, double rel_tol = 1e-12);

// C = 2(R+1)/(lambda*-1); throws std::domain_error when lambda* <= 1 or R < 0.
double shadowing_constant(double R, double lambda_star);

// ---------------------------------------------------------------------------
// Exact periodic points of the linear model
// ---------------------------------------------------------------------------

struct RationalPoint {
    Rational x, y;
    Vec2 approx() const { return {x.value(), y.value()}; }
    bool operator<(const RationalPoint& o) const;
    bool operator==(const RationalPoint&) const = default;
};

// All solutions of (A^n - I) x in Z^2 on [0,1)^2, exactly; the count equals
// |det(A^n - I)|.
std::vector<RationalPoint> linear_periodic_points(const LinearModel& model, int n);

// Those of least period exactly n.
std::vector<RationalPoint> linear_periodic_points_least(const LinearModel& model, int n);

long long linear_periodic_count(const LinearModel& model, int n);       // |det(A^n - I)|
long long periodic_count_trace_recursion(const LinearModel& model, int n); // lambda^n + lambda^-n - 2

// ---------------------------------------------------------------------------
// Perturbed maps
// ---------------------------------------------------------------------------

// f(z) = A z + eps P(z) with P a truncated trigonometric displacement field,
// doubly periodic, sup |P| <= 1. The straight-line isotopy to the linear
// lift is equivariant, so lifts correspond canonically.
struct PerturbedMap {
    LinearModel base;
    double eps = 0.0;
    struct Mode {
        int kx = 0, ky = 0;
        double phase = 0.0;
        Vec2 dir;       // displacement direction, |dir| <= 1
        double amp = 0.0;
    };
    std::vector<Mode> modes;

    static PerturbedMap sinusoidal(const LinearModel& model, double eps,
                                   std::uint64_t seed, int n_modes = 3);

    Vec2 displacement(const Vec2& z) const;    // P(z)
    Mat2 displacement_jacobian(const Vec2& z) const;
    Vec2 apply(const Vec2& z) const;           // lift of f
    Vec2 apply_inverse(const Vec2& z) const;   // Newton
    Mat2 jacobian(const Vec2& z) const;
};

struct ShadowingParams {
    double lambda_star = 0.0;
    double R = 0.0;   // measured sup displacement, safety-inflated
    double C = 0.0;   // 2(R+1)/(lambda*-1)
};

// R is measured as a sup over a dense grid of d_phi(A z, f z) and
// d_phi(A^-1 z, f^-1 z), inflated by a Lipschitz safety factor.
ShadowingParams measure_params(const LinearModel& model, const PerturbedMap& f,
                               int grid = 400, double safety = 1.1);

// ---------------------------------------------------------------------------
// Matching periodic points across the isotopy
// ---------------------------------------------------------------------------

struct MatchedPair {
    int period = 1;
    bool matched = false;
    RationalPoint linear_point;
    Vec2 linear_lift;      // = linear_point in the fundamental domain
    Vec2 perturbed_lift;   // Newton solution of the lifted return equation
    double du = 0.0, ds = 0.0, dphi = 0.0;
    double residual = 0.0;
};

struct MatchReport {
    ShadowingParams params;
    std::vector<MatchedPair> pairs;
    int unmatched = 0;
    double max_dphi = 0.0;
    bool all_within_C = true;
};

// Newton-continues every linear point of least period n (seeded at the
// exact rational point, same deck translation) to a periodic point of f.
// Divergence marks the pair unmatched instead of failing.
MatchReport match_periodic_points(const LinearModel& model, const PerturbedMap& f,
                                  int n, double tol);

// All least periods 1..max_n merged, with the params measured once.
MatchReport match_periodic_points_up_to(const LinearModel& model, const PerturbedMap& f,
                                        int max_n, double tol);

// ---------------------------------------------------------------------------
// Two-sided bound and the semiconjugacy on the matched set
// ---------------------------------------------------------------------------

struct TwoSidedReport {
    double bound = 0.0;      // 2C
    double worst = 0.0;      // max |d_phi(Phi^m.,Phi^m.) - d_phi(f^m.,f^m.)|
    long long comparisons = 0;
    bool ok = true;
};

TwoSidedReport two_sided_bound_check(const LinearModel& model, const PerturbedMap& f,
                                     const std::vector<MatchedPair>& pairs,
                                     int m_range, double C);

struct SemiconjugacyReport {
    double defect = 0.0;             // max dist(alpha(f(y)), Phi(alpha(y)))
    double max_lift_distance = 0.0;  // max d_phi(x, y) over the matched set
    bool orbits_closed = true;
    bool lift_within_C = true;
};

// alpha maps each matched perturbed point back to its linear partner; the
// matched set must be closed under the torus action on orbits.
SemiconjugacyReport semiconjugacy_check(const LinearModel& model, const PerturbedMap& f,
                                        const std::vector<MatchedPair>& pairs, double C);

// ---------------------------------------------------------------------------
// Flip annulus experiments
// ---------------------------------------------------------------------------

// Monotone degree-one circle lift x + c + sum a_k/(2 pi k) sin(2 pi k x + phase).
struct CircleLift {
    double c = 0.0;
    struct Harmonic { double amp = 0.0; double phase = 0.0; };
    std::vector<Harmonic> harmonics;

    double operator()(double x) const;
    double wiggle_sup() const;   // sup |lift(x) - x - c|
    static CircleLift random(std::uint64_t seed, double max_total_amp = 0.25);
    static CircleLift rigid(double c);
};

struct FlipExperimentConfig {
    long long iterations = 100000;
    double tol = 1e-9;
    int grid = 220;              // fixed point search grid per dimension
    double newton_tol = 1e-12;
    double winding_radius = 0.02;
    int winding_samples = 1024;
};

struct FlipFixedPoint {
    Vec2 p;
    int index = 0;
};

struct FlipReport {
    double rho_top = 0.0;        // rotation numbers of the squared return
    double rho_bottom = 0.0;
    double negation_defect = 0.0;  // |rho_bottom + rho_top|
    std::vector<FlipFixedPoint> interior_fixed_points;
    int index_sum = 0;
    bool conclusive = true;
    std::string hint;
};

// Builds the boundary-interchanging annulus map from the two boundary lifts,
// measures the squared-return rotation numbers (negation law), then builds
// the normalized interior map (involution composed with a gradient-like
// flow) and certifies its two interior fixed points and their indices.
FlipReport flip_annulus_experiment(const CircleLift& top, const CircleLift& bottom,
                                   const FlipExperimentConfig& cfg = {});

// Winding number of z -> map(z) - z around the circle of given radius.
// Throws std::runtime_error if the displacement vanishes on the circle.
int winding_index(const std::function<Vec2(const Vec2&)>& map, const Vec2& point,
                  double radius, int samples);

} // namespace tnsurf
