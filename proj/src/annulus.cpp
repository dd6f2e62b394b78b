#include "tnsurf/annulus.hpp"

#include <cmath>
#include <numeric>

namespace tnsurf {

TwistClass classify_annulus(const AnnulusRecord& a) {
    TwistClass tc;
    tc.flipped = a.flipped;
    if (!a.side_rotations[0] || !a.side_rotations[1]) {
        tc.twist = Twist::Indeterminate;
        return tc;
    }
    const Rational& r0 = *a.side_rotations[0];
    const Rational& r1 = *a.side_rotations[1];
    if (a.flipped) {
        // fixed points of the squared return on both boundaries
        tc.twist = (r0.is_zero() && r1.is_zero()) ? Twist::Untwisted : Twist::Twisted;
    } else {
        tc.twist = (r0 == r1) ? Twist::Untwisted : Twist::Twisted;
    }
    return tc;
}

Rational flip_square_rotation(const Rational& rho1) {
    return -rho1;
}

BoundaryOrbit boundary_orbit_structure(int prongs, const Rational& rotation) {
    if (prongs < 1)
        throw IncompatibleRotation("prong count must be positive");
    Rational rho = rotation.mod1();
    long long q = rho.den;
    long long leaves = 2LL * prongs;
    if (leaves % q != 0)
        throw IncompatibleRotation("rotation denominator " + std::to_string(q) +
                                   " does not divide " + std::to_string(leaves) +
                                   " (twice the prong count)");
    BoundaryOrbit out;
    out.period = static_cast<int>(q);
    out.collapsed_group_size = static_cast<int>(leaves / q - 1);
    out.has_collapse_choice = (q == 1);
    return out;
}

RotationEstimate rotation_number_numeric(const std::function<double(double)>& lift,
                                         long long iterations, double tol, double x0) {
    if (iterations < 1)
        throw std::invalid_argument("iterations must be positive");

    // probe monotonicity and degree one on a grid
    constexpr int kProbe = 257;
    double prev = lift(0.0);
    for (int i = 1; i <= kProbe; ++i) {
        double x = double(i) / kProbe;
        double fx = lift(x);
        if (fx < prev - 1e-12)
            throw InvalidLift("lift is not monotone near x=" + std::to_string(x));
        prev = fx;
    }
    for (int i = 0; i < 5; ++i) {
        double x = double(i) / 5.0;
        if (std::fabs(lift(x + 1.0) - lift(x) - 1.0) > 1e-9)
            throw InvalidLift("lift does not commute with unit translation");
    }

    double x = x0;
    for (long long i = 0; i < iterations; ++i) x = lift(x);

    RotationEstimate est;
    est.value = (x - x0) / double(iterations);
    est.error = std::max(1.0 / double(iterations), tol);
    return est;
}

} // namespace tnsurf
