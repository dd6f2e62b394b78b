#pragma once

#include <functional>
#include <optional>

#include "tnsurf/component_graph.hpp"

namespace tnsurf {

// ---------------------------------------------------------------------------
// Twist / flip classification of reducing annuli.
//
// Lift pairing convention: the two side rotation numbers of one annulus are
// compared for lifts chosen equivariantly isotopic to a common lift of the
// return map. For flipped annuli the stored rotations refer to the squared
// return restricted to each side, and the pair is forced to be (rho, -rho).
// ---------------------------------------------------------------------------

enum class Twist { Untwisted, Twisted, Indeterminate };

struct TwistClass {
    bool flipped = false;
    Twist twist = Twist::Indeterminate;

    bool untwisted() const { return twist == Twist::Untwisted; }
    bool twisted() const { return twist == Twist::Twisted; }
    bool indeterminate() const { return twist == Twist::Indeterminate; }
};

// Unflipped: untwisted iff the two side rotations agree.
// Flipped: untwisted iff both squared-return rotations vanish (equivalently,
// the squared return has fixed points on both boundaries).
// Missing rotation data yields Indeterminate, which rewrite passes refuse.
TwistClass classify_annulus(const AnnulusRecord& a);

// Rotation number of one side of the squared return of a boundary-
// interchanging annulus map, given the other side: rho(b_-1) = -rho(b_1).
Rational flip_square_rotation(const Rational& rho1);

// ---------------------------------------------------------------------------
// Boundary periodic structure of a boundary-adjusted pA circle.
// ---------------------------------------------------------------------------

enum class CollapseChoice { Left, Right };

struct BoundaryOrbit {
    int period = 1;               // q: orbit period on the circle under the return
    int collapsed_group_size = 0; // 2m/q - 1 degenerate leaves per collapsed group
    bool has_collapse_choice = false;  // q == 1: two non-conjugate collapses exist
};

struct IncompatibleRotation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// For a circle blowing up an m-pronged singularity with return rotation
// number p/q (lowest terms), collapsing adjacent groups of 2m/q - 1
// degenerate leaves leaves a single period-q orbit. Requires q | 2m.
BoundaryOrbit boundary_orbit_structure(int prongs, const Rational& rotation);

// ---------------------------------------------------------------------------
// Numerical rotation numbers (used by the experiments; the combinatorial
// layer never compares rotations through floats).
// ---------------------------------------------------------------------------

struct InvalidLift : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RotationEstimate {
    double value = 0.0;
    double error = 0.0;   // <= max(1/N, tol)
};

// Birkhoff average (F^N(x0) - x0)/N of a monotone degree-one circle lift.
// Monotonicity and degree are probed on a sample grid; failures raise
// InvalidLift.
RotationEstimate rotation_number_numeric(const std::function<double(double)>& lift,
                                         long long iterations, double tol,
                                         double x0 = 0.0);

} // namespace tnsurf
