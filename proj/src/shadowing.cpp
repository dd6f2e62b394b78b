#include "tnsurf/shadowing.hpp"

#include "tnsurf/annulus.hpp"
#include "tnsurf/component_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tnsurf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Deterministic uniform stream; distributions hand-rolled so outputs are
// byte-identical across standard libraries.
struct RandomStream {
    std::mt19937_64 rng;
    explicit RandomStream(std::uint64_t seed) : rng(seed) {}
    double unit() { return double(rng() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    long long integer(long long lo, long long hi) {   // inclusive
        return lo + static_cast<long long>(unit() * double(hi - lo + 1));
    }
};
} // namespace

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

Mat2i Mat2i::operator*(const Mat2i& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mat2i Mat2i::inverse_unimodular() const {
    if (det() != 1) throw std::domain_error("inverse_unimodular needs det = 1");
    return {d, -b, -c, a};
}

Mat2i Mat2i::pow(int n) const {
    if (n < 0) throw std::domain_error("Mat2i::pow: negative exponent");
    Mat2i result;   // identity
    Mat2i base = *this;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

Vec2 Mat2i::apply(const Vec2& v) const {
    return {double(a) * v.x + double(b) * v.y, double(c) * v.x + double(d) * v.y};
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Vec2 Mat2::apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

Mat2 Mat2::inverse() const {
    double dd = det();
    if (std::fabs(dd) < 1e-300) throw std::domain_error("Mat2::inverse: singular");
    return {d / dd, -b / dd, -c / dd, a / dd};
}

// ---------------------------------------------------------------------------
// LinearModel
// ---------------------------------------------------------------------------

LinearModel LinearModel::from_matrix(long long a, long long b, long long c, long long d) {
    Mat2i m{a, b, c, d};
    if (m.det() != 1)
        throw std::domain_error("matrix must have determinant 1");
    long long tr = m.trace();
    if (tr * tr <= 4)
        throw std::domain_error("matrix must be hyperbolic (|trace| > 2)");

    LinearModel model;
    model.matrix = m;
    double trd = double(tr);
    double disc = std::sqrt(trd * trd - 4.0);
    double lead = tr > 0 ? (trd + disc) / 2.0 : (trd - disc) / 2.0;
    model.lambda_signed = lead;
    model.lambda = std::fabs(lead);

    // left eigenvectors: w A = mu w  =>  w is in the kernel of (A^T - mu I)
    auto left_eigen = [&](double mu) {
        Vec2 w1{double(c), mu - double(a)};
        Vec2 w2{mu - double(d), double(b)};
        Vec2 w = w1.norm() >= w2.norm() ? w1 : w2;
        double n = w.norm();
        return Vec2{w.x / n, w.y / n};
    };
    double other = tr > 0 ? (trd - disc) / 2.0 : (trd + disc) / 2.0;
    model.unstable_covector = left_eigen(lead);
    model.stable_covector = left_eigen(other);
    return model;
}

DComponents d_components(const Vec2& x, const Vec2& y, const LinearModel& model) {
    Vec2 diff = x - y;
    DComponents d;
    d.du = std::fabs(diff.dot(model.unstable_covector));
    d.ds = std::fabs(diff.dot(model.stable_covector));
    d.dphi = d.du + d.ds;
    return d;
}

// ---------------------------------------------------------------------------
// Expansion and the constant
// ---------------------------------------------------------------------------

ExpansionReport verify_expansion(const LinearModel& model, int n_pairs,
                                 std::uint64_t seed, double rel_tol) {
    RandomStream rand(seed);
    Mat2i inv = model.matrix.inverse_unimodular();
    ExpansionReport report;
    report.samples = n_pairs;
    for (int i = 0; i < n_pairs; ++i) {
        Vec2 x{rand.range(-5, 5), rand.range(-5, 5)};
        Vec2 y{rand.range(-5, 5), rand.range(-5, 5)};
        DComponents base = d_components(x, y, model);
        if (base.du < 1e-12 || base.ds < 1e-12) { --i; continue; }
        DComponents fwd = d_components(model.matrix.apply(x), model.matrix.apply(y), model);
        DComponents bwd = d_components(inv.apply(x), inv.apply(y), model);
        double defect_u = std::fabs(fwd.du / base.du - model.lambda) / model.lambda;
        double defect_s = std::fabs(bwd.ds / base.ds - model.lambda) / model.lambda;
        if (defect_u > report.worst_unstable || defect_s > report.worst_stable) {
            report.worst_pair_x = x;
            report.worst_pair_y = y;
        }
        report.worst_unstable = std::max(report.worst_unstable, defect_u);
        report.worst_stable = std::max(report.worst_stable, defect_s);
    }
    report.ok = report.worst_unstable <= rel_tol && report.worst_stable <= rel_tol;
    return report;
}

double shadowing_constant(double R, double lambda_star) {
    if (!(lambda_star > 1.0))
        throw std::domain_error("shadowing constant needs lambda* > 1");
    if (R < 0.0)
        throw std::domain_error("displacement bound must be nonnegative");
    return 2.0 * (R + 1.0) / (lambda_star - 1.0);
}

// ---------------------------------------------------------------------------
// Exact periodic points
// ---------------------------------------------------------------------------

bool RationalPoint::operator<(const RationalPoint& o) const {
    if (!(x == o.x)) return x < o.x;
    return y < o.y;
}

long long linear_periodic_count(const LinearModel& model, int n) {
    Mat2i An = model.matrix.pow(n);
    Mat2i M{An.a - 1, An.b, An.c, An.d - 1};
    long long det = M.det();
    if (det == 0) throw std::domain_error("A^n - I is singular");
    return det < 0 ? -det : det;
}

long long periodic_count_trace_recursion(const LinearModel& model, int n) {
    // t_k = trace(A^k): t_0 = 2, t_1 = tr, t_{k+1} = tr t_k - t_{k-1};
    // |det(A^n - I)| = |2 - t_n| = lambda^n + lambda^-n - 2 for trace > 2
    long long tr = model.matrix.trace();
    long long t_prev = 2, t_cur = tr;
    if (n == 0) return 0;
    for (int k = 1; k < n; ++k) {
        long long t_next = tr * t_cur - t_prev;
        t_prev = t_cur;
        t_cur = t_next;
    }
    long long d = 2 - t_cur;
    return d < 0 ? -d : d;
}

std::vector<RationalPoint> linear_periodic_points(const LinearModel& model, int n) {
    Mat2i An = model.matrix.pow(n);
    Mat2i M{An.a - 1, An.b, An.c, An.d - 1};
    long long det = M.det();
    if (det == 0) throw std::domain_error("A^n - I is singular");

    // x = M^{-1} k = adj(M) k / det, k integral; x in [0,1)^2 means k ranges
    // over the lattice points of M [0,1)^2
    long long c0 = 0, c1 = M.a, c2 = M.b, c3 = M.a + M.b;
    long long k1_lo = std::min({c0, c1, c2, c3}), k1_hi = std::max({c0, c1, c2, c3});
    long long r1 = M.c, r2 = M.d, r3 = M.c + M.d;
    long long k2_lo = std::min({c0, r1, r2, r3}), k2_hi = std::max({c0, r1, r2, r3});

    std::vector<RationalPoint> out;
    Rational zero(0), one(1);
    for (long long k1 = k1_lo; k1 <= k1_hi; ++k1) {
        for (long long k2 = k2_lo; k2 <= k2_hi; ++k2) {
            // adj(M) = [[d, -b], [-c, a]]
            Rational x(M.d * k1 - M.b * k2, det);
            Rational y(-M.c * k1 + M.a * k2, det);
            if (!(x < zero) && x < one && !(y < zero) && y < one)
                out.push_back({x, y});
        }
    }
    std::sort(out.begin(), out.end());
    if (static_cast<long long>(out.size()) != (det < 0 ? -det : det))
        throw std::runtime_error("periodic point enumeration disagrees with |det(A^n - I)|");
    return out;
}

namespace {

bool fixed_by_power(const LinearModel& model, const RationalPoint& p, int d) {
    Mat2i Ad = model.matrix.pow(d);
    // (A^d - I) p integral?
    Rational x = Rational(Ad.a - 1) * p.x + Rational(Ad.b) * p.y;
    Rational y = Rational(Ad.c) * p.x + Rational(Ad.d - 1) * p.y;
    return x.den == 1 && y.den == 1;
}

} // namespace

std::vector<RationalPoint> linear_periodic_points_least(const LinearModel& model, int n) {
    std::vector<RationalPoint> all = linear_periodic_points(model, n);
    std::vector<RationalPoint> out;
    for (const auto& p : all) {
        bool lower = false;
        for (int d = 1; d < n && !lower; ++d)
            if (n % d == 0 && fixed_by_power(model, p, d)) lower = true;
        if (!lower) out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Perturbed maps
// ---------------------------------------------------------------------------

PerturbedMap PerturbedMap::sinusoidal(const LinearModel& model, double eps,
                                      std::uint64_t seed, int n_modes) {
    PerturbedMap f;
    f.base = model;
    f.eps = eps;
    RandomStream rand(seed);
    double total = 0.0;
    for (int i = 0; i < n_modes; ++i) {
        Mode m;
        do {
            m.kx = static_cast<int>(rand.integer(-2, 2));
            m.ky = static_cast<int>(rand.integer(-2, 2));
        } while (m.kx == 0 && m.ky == 0);
        m.phase = rand.range(0, kTwoPi);
        double theta = rand.range(0, kTwoPi);
        m.dir = {std::cos(theta), std::sin(theta)};
        m.amp = rand.range(0.2, 1.0);
        total += m.amp;
        f.modes.push_back(m);
    }
    for (auto& m : f.modes) m.amp /= total;   // sup |P| <= 1
    return f;
}

Vec2 PerturbedMap::displacement(const Vec2& z) const {
    Vec2 p{0, 0};
    for (const auto& m : modes) {
        double arg = kTwoPi * (m.kx * z.x + m.ky * z.y) + m.phase;
        double c = m.amp * std::cos(arg);
        p.x += c * m.dir.x;
        p.y += c * m.dir.y;
    }
    return p;
}

Mat2 PerturbedMap::displacement_jacobian(const Vec2& z) const {
    Mat2 j{0, 0, 0, 0};
    for (const auto& m : modes) {
        double arg = kTwoPi * (m.kx * z.x + m.ky * z.y) + m.phase;
        double s = -m.amp * std::sin(arg) * kTwoPi;
        j.a += s * m.kx * m.dir.x;
        j.b += s * m.ky * m.dir.x;
        j.c += s * m.kx * m.dir.y;
        j.d += s * m.ky * m.dir.y;
    }
    return j;
}

Vec2 PerturbedMap::apply(const Vec2& z) const {
    Vec2 lin = base.matrix.apply(z);
    Vec2 p = displacement(z);
    return {lin.x + eps * p.x, lin.y + eps * p.y};
}

Mat2 PerturbedMap::jacobian(const Vec2& z) const {
    Mat2 dp = displacement_jacobian(z);
    return {double(base.matrix.a) + eps * dp.a, double(base.matrix.b) + eps * dp.b,
            double(base.matrix.c) + eps * dp.c, double(base.matrix.d) + eps * dp.d};
}

Vec2 PerturbedMap::apply_inverse(const Vec2& z) const {
    Mat2i inv = base.matrix.inverse_unimodular();
    Vec2 w = inv.apply(z);
    for (int it = 0; it < 100; ++it) {
        Vec2 fz = apply(w);
        Vec2 err{fz.x - z.x, fz.y - z.y};
        if (std::fabs(err.x) < 1e-13 && std::fabs(err.y) < 1e-13) break;
        Mat2 ji = jacobian(w).inverse();
        Vec2 step = ji.apply(err);
        w = {w.x - step.x, w.y - step.y};
    }
    return w;
}

// ---------------------------------------------------------------------------
// Parameter measurement
// ---------------------------------------------------------------------------

ShadowingParams measure_params(const LinearModel& model, const PerturbedMap& f,
                               int grid, double safety) {
    ShadowingParams params;
    params.lambda_star = model.lambda;
    Mat2i inv = model.matrix.inverse_unimodular();
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vec2 z{double(i) / grid, double(j) / grid};
            Vec2 fz = f.apply(z);
            // forward displacement at z, backward displacement at f(z)
            double fwd = d_components(model.matrix.apply(z), fz, model).dphi;
            double bwd = d_components(inv.apply(fz), z, model).dphi;
            worst = std::max(worst, std::max(fwd, bwd));
        }
    }
    params.R = worst * safety;
    params.C = shadowing_constant(params.R, params.lambda_star);
    return params;
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

namespace {

// Dense LU solve with partial pivoting; the multiple-shooting systems are
// small (2n x 2n with n <= the max period).
bool lu_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
        if (std::fabs(a[pivot * n + col]) < 1e-14) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            double factor = a[r * n + col] / a[col * n + col];
            if (factor == 0.0) continue;
            for (int c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * b[c];
        b[r] = acc / a[r * n + r];
    }
    return true;
}

// Newton continuation of one linear periodic point, multiple shooting over
// the whole lifted orbit so the conditioning stays at one-step size instead
// of lambda^n. Seeded at the exact linear orbit with the same deck
// translation closing it up.
MatchedPair match_one(const LinearModel& model, const PerturbedMap& f,
                      const RationalPoint& pt, int n, double tol) {
    MatchedPair pair;
    pair.period = n;
    pair.linear_point = pt;
    pair.linear_lift = pt.approx();

    // deck translation of the linear orbit: v = (A^n - I) x, integral
    Mat2i An = model.matrix.pow(n);
    Rational vx = Rational(An.a - 1) * pt.x + Rational(An.b) * pt.y;
    Rational vy = Rational(An.c) * pt.x + Rational(An.d - 1) * pt.y;
    if (vx.den != 1 || vy.den != 1)
        throw std::runtime_error("linear point is not periodic of period " + std::to_string(n));
    Vec2 v{double(vx.num), double(vy.num)};

    // exact lifted linear orbit as the seed
    std::vector<Vec2> ys(n);
    Rational cx = pt.x, cy = pt.y;
    for (int i = 0; i < n; ++i) {
        ys[i] = {cx.value(), cy.value()};
        Rational nx = Rational(model.matrix.a) * cx + Rational(model.matrix.b) * cy;
        Rational ny = Rational(model.matrix.c) * cx + Rational(model.matrix.d) * cy;
        cx = nx;
        cy = ny;
    }

    // residuals F_i = f(y_i) - y_{i+1}, the last one closed by the deck
    // translation: F_{n-1} = f(y_{n-1}) - y_0 - v
    const int dim = 2 * n;
    std::vector<double> jac(size_t(dim) * dim);
    std::vector<double> rhs(dim);
    bool converged = false;
    for (int it = 0; it < 60 && !converged; ++it) {
        std::fill(jac.begin(), jac.end(), 0.0);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            int next = (i + 1) % n;
            Vec2 fi = f.apply(ys[i]);
            Vec2 res{fi.x - ys[next].x, fi.y - ys[next].y};
            if (next == 0) {
                res.x -= v.x;
                res.y -= v.y;
            }
            worst = std::max(worst, std::max(std::fabs(res.x), std::fabs(res.y)));
            rhs[2 * i] = -res.x;
            rhs[2 * i + 1] = -res.y;
            Mat2 ji = f.jacobian(ys[i]);
            jac[size_t(2 * i) * dim + 2 * i] = ji.a;
            jac[size_t(2 * i) * dim + 2 * i + 1] = ji.b;
            jac[size_t(2 * i + 1) * dim + 2 * i] = ji.c;
            jac[size_t(2 * i + 1) * dim + 2 * i + 1] = ji.d;
            jac[size_t(2 * i) * dim + 2 * next] -= 1.0;
            jac[size_t(2 * i + 1) * dim + 2 * next + 1] -= 1.0;
        }
        pair.residual = worst;
        if (worst < tol) {
            converged = true;
            break;
        }
        if (!lu_solve(jac, rhs, dim)) break;
        bool finite = true;
        for (int i = 0; i < n; ++i) {
            ys[i].x += rhs[2 * i];
            ys[i].y += rhs[2 * i + 1];
            finite = finite && std::isfinite(ys[i].x) && std::isfinite(ys[i].y);
        }
        if (!finite) break;
    }
    pair.matched = converged;
    pair.perturbed_lift = ys[0];
    if (converged) {
        DComponents d = d_components(pair.linear_lift, ys[0], model);
        pair.du = d.du;
        pair.ds = d.ds;
        pair.dphi = d.dphi;
    }
    return pair;
}

void finish_report(MatchReport& report) {
    report.unmatched = 0;
    report.max_dphi = 0.0;
    for (const auto& p : report.pairs) {
        if (!p.matched) { ++report.unmatched; continue; }
        report.max_dphi = std::max(report.max_dphi, p.dphi);
    }
    report.all_within_C = report.unmatched == 0 && report.max_dphi < report.params.C;
}

} // namespace

MatchReport match_periodic_points(const LinearModel& model, const PerturbedMap& f,
                                  int n, double tol) {
    MatchReport report;
    report.params = measure_params(model, f);
    for (const auto& pt : linear_periodic_points_least(model, n))
        report.pairs.push_back(match_one(model, f, pt, n, tol));
    finish_report(report);
    return report;
}

MatchReport match_periodic_points_up_to(const LinearModel& model, const PerturbedMap& f,
                                        int max_n, double tol) {
    MatchReport report;
    report.params = measure_params(model, f);
    for (int n = 1; n <= max_n; ++n)
        for (const auto& pt : linear_periodic_points_least(model, n))
            report.pairs.push_back(match_one(model, f, pt, n, tol));
    finish_report(report);
    return report;
}

// ---------------------------------------------------------------------------
// Two-sided bound
// ---------------------------------------------------------------------------

TwoSidedReport two_sided_bound_check(const LinearModel& model, const PerturbedMap& f,
                                     const std::vector<MatchedPair>& pairs,
                                     int m_range, double C) {
    TwoSidedReport report;
    report.bound = 2.0 * C;

    std::vector<const MatchedPair*> matched;
    for (const auto& p : pairs)
        if (p.matched) matched.push_back(&p);
    size_t P = matched.size();
    int M = m_range;
    int W = 2 * M + 1;

    // eigencoordinates of both trajectories for every m in [-M, M]
    std::vector<double> cu_lin(P * W), cs_lin(P * W), cu_per(P * W), cs_per(P * W);
    Mat2i inv = model.matrix.inverse_unimodular();
    for (size_t i = 0; i < P; ++i) {
        Vec2 x = matched[i]->linear_lift;
        Vec2 y = matched[i]->perturbed_lift;
        Vec2 xf = x, yf = y, xb = x, yb = y;
        auto put = [&](int m, const Vec2& lx, const Vec2& ly) {
            size_t at = i * W + size_t(m + M);
            cu_lin[at] = lx.dot(model.unstable_covector);
            cs_lin[at] = lx.dot(model.stable_covector);
            cu_per[at] = ly.dot(model.unstable_covector);
            cs_per[at] = ly.dot(model.stable_covector);
        };
        put(0, x, y);
        for (int m = 1; m <= M; ++m) {
            xf = model.matrix.apply(xf);
            yf = f.apply(yf);
            put(m, xf, yf);
            xb = inv.apply(xb);
            yb = f.apply_inverse(yb);
            put(-m, xb, yb);
        }
    }

    for (size_t i = 0; i < P; ++i) {
        for (size_t j = i; j < P; ++j) {
            for (int w = 0; w < W; ++w) {
                size_t ai = i * W + w, aj = j * W + w;
                double lin = std::fabs(cu_lin[ai] - cu_lin[aj]) +
                             std::fabs(cs_lin[ai] - cs_lin[aj]);
                double per = std::fabs(cu_per[ai] - cu_per[aj]) +
                             std::fabs(cs_per[ai] - cs_per[aj]);
                double diff = std::fabs(lin - per);
                if (diff > report.worst) report.worst = diff;
                ++report.comparisons;
            }
        }
    }
    report.ok = report.worst <= report.bound;
    return report;
}

// ---------------------------------------------------------------------------
// Semiconjugacy
// ---------------------------------------------------------------------------

SemiconjugacyReport semiconjugacy_check(const LinearModel& model, const PerturbedMap& f,
                                        const std::vector<MatchedPair>& pairs, double C) {
    SemiconjugacyReport report;

    std::map<RationalPoint, const MatchedPair*> by_point;
    for (const auto& p : pairs)
        if (p.matched) by_point[p.linear_point] = &p;

    auto mod1 = [](const Rational& r) { return r.mod1(); };
    for (const auto& [pt, pair] : by_point) {
        // the linear image of pt, exactly, back in the fundamental domain
        Rational ix = mod1(Rational(model.matrix.a) * pt.x + Rational(model.matrix.b) * pt.y);
        Rational iy = mod1(Rational(model.matrix.c) * pt.x + Rational(model.matrix.d) * pt.y);
        auto it = by_point.find({ix, iy});
        if (it == by_point.end())
            throw StructuralError("matched set is not closed under the action: image of (" +
                                  pt.x.str() + "," + pt.y.str() + ") is unmatched");
        // alpha(f(y)) vs Phi(alpha(y)): on the torus, f(y) should land on the
        // partner of the image point
        Vec2 fy = f.apply(pair->perturbed_lift);
        Vec2 target = it->second->perturbed_lift;
        double dx = fy.x - target.x, dy = fy.y - target.y;
        dx -= std::round(dx);
        dy -= std::round(dy);
        report.defect = std::max(report.defect, std::sqrt(dx * dx + dy * dy));
        report.max_lift_distance = std::max(report.max_lift_distance, pair->dphi);
    }
    report.orbits_closed = true;
    report.lift_within_C = report.max_lift_distance < C;
    return report;
}

// ---------------------------------------------------------------------------
// Circle lifts and the flip experiments
// ---------------------------------------------------------------------------

double CircleLift::operator()(double x) const {
    double v = x + c;
    for (size_t k = 0; k < harmonics.size(); ++k) {
        double kk = double(k + 1);
        v += harmonics[k].amp / (kTwoPi * kk) * std::sin(kTwoPi * kk * x + harmonics[k].phase);
    }
    return v;
}

double CircleLift::wiggle_sup() const {
    double s = 0.0;
    for (size_t k = 0; k < harmonics.size(); ++k)
        s += std::fabs(harmonics[k].amp) / (kTwoPi * double(k + 1));
    return s;
}

CircleLift CircleLift::random(std::uint64_t seed, double max_total_amp) {
    RandomStream rand(seed);
    CircleLift lift;
    lift.c = rand.range(0.0, 1.0);
    double budget = max_total_amp;
    for (int k = 0; k < 3; ++k) {
        Harmonic h;
        h.amp = rand.range(0.1, 1.0);
        h.phase = rand.range(0.0, kTwoPi);
        lift.harmonics.push_back(h);
    }
    double total = 0.0;
    for (const auto& h : lift.harmonics) total += h.amp;
    for (auto& h : lift.harmonics) h.amp *= budget / total;   // sum |a_k| = budget < 1
    return lift;
}

CircleLift CircleLift::rigid(double c) {
    CircleLift lift;
    lift.c = c;
    return lift;
}

int winding_index(const std::function<Vec2(const Vec2&)>& map, const Vec2& point,
                  double radius, int samples) {
    for (int attempt = 0; attempt < 5; ++attempt) {
        int n = samples << attempt;
        double total = 0.0;
        double prev_angle = 0.0;
        bool ok = true;
        for (int i = 0; i <= n; ++i) {
            double theta = kTwoPi * double(i % n) / double(n);
            Vec2 z{point.x + radius * std::cos(theta), point.y + radius * std::sin(theta)};
            Vec2 v = map(z);
            double mag = v.norm();
            if (mag < 1e-14)
                throw std::runtime_error("displacement vanishes on the winding circle; "
                                         "retry with a smaller radius");
            double angle = std::atan2(v.y, v.x);
            if (i > 0) {
                double da = angle - prev_angle;
                while (da > std::numbers::pi) da -= kTwoPi;
                while (da < -std::numbers::pi) da += kTwoPi;
                if (std::fabs(da) > std::numbers::pi / 2) { ok = false; break; }
                total += da;
            }
            prev_angle = angle;
        }
        if (ok) return static_cast<int>(std::lround(total / kTwoPi));
    }
    throw std::runtime_error("winding number did not stabilize; displacement varies too fast");
}

namespace {

// Gradient-like field on the annulus commuting with the involution
// S(x,y) = (-x,-y): equilibria at (0,0) and (1/2,0) only, no closed orbits,
// identity on the boundary. The strength keeps the time-one multipliers
// moderate so the winding circle stays inside one fundamental domain.
struct AnnulusFlow {
    double sa = 0.3;
    double mu = 1.0;

    Vec2 field(const Vec2& p) const {
        double bump = (1.0 - p.y * p.y);
        return {-sa * std::sin(kTwoPi * p.x) * bump * bump, -mu * p.y * (1.0 - p.y * p.y)};
    }

    Vec2 time_one(Vec2 p) const {
        constexpr int steps = 48;
        const double h = 1.0 / steps;
        for (int i = 0; i < steps; ++i) {
            Vec2 k1 = field(p);
            Vec2 k2 = field({p.x + 0.5 * h * k1.x, p.y + 0.5 * h * k1.y});
            Vec2 k3 = field({p.x + 0.5 * h * k2.x, p.y + 0.5 * h * k2.y});
            Vec2 k4 = field({p.x + h * k3.x, p.y + h * k3.y});
            p.x += h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
            p.y += h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
        }
        return p;
    }
};

double wrap01(double x) {
    double w = x - std::floor(x);
    return w >= 1.0 ? w - 1.0 : w;
}

double wrap_half(double dx) { return dx - std::round(dx); }

// g = S . psi_1 . alpha with alpha the fiberwise interpolation: identity on
// |y| <= 1/4, the boundary lift's displacement faded in above.
struct NormalizedFlipMap {
    AnnulusFlow flow;
    const CircleLift& top;
    const CircleLift& bottom;

    double blend(double y) const {
        double s = (std::fabs(y) - 0.25) / 0.75;
        if (s <= 0) return 0.0;
        if (s >= 1) return 1.0;
        return s * s * (3.0 - 2.0 * s);
    }

    Vec2 alpha(const Vec2& p) const {
        double w = blend(p.y);
        if (w == 0.0) return p;
        const CircleLift& lift = p.y > 0 ? top : bottom;
        double disp = lift(p.x) - p.x;
        return {p.x + w * disp, p.y};
    }

    Vec2 apply(const Vec2& p) const {
        Vec2 q = flow.time_one(alpha(p));
        return {wrap01(-q.x), -q.y};
    }

    Vec2 displacement(const Vec2& p) const {
        Vec2 q = apply(p);
        return {wrap_half(q.x - p.x), q.y - p.y};
    }
};

} // namespace

FlipReport flip_annulus_experiment(const CircleLift& top, const CircleLift& bottom,
                                   const FlipExperimentConfig& cfg) {
    FlipReport report;

    // squared return on the two boundaries: b_1 = T h_-1 T h_1, b_-1 = T h_1 T h_-1
    auto b_top = [&](double x) { return -bottom(-top(x)); };
    auto b_bottom = [&](double x) { return -top(-bottom(x)); };
    report.rho_top = rotation_number_numeric(b_top, cfg.iterations, 0.0, 0.0).value;
    // start the bottom orbit at the conjugate point sigma(x0) = -h_1(x0), so
    // the two Birkhoff sums telescope against each other
    report.rho_bottom =
        rotation_number_numeric(b_bottom, cfg.iterations, 0.0, -top(0.0)).value;
    report.negation_defect = std::fabs(report.rho_top + report.rho_bottom);

    // interior model: locate fixed points of g on a grid, refine by Newton
    NormalizedFlipMap g{AnnulusFlow{}, top, bottom};
    std::vector<Vec2> roots;
    int grid = cfg.grid;
    for (int iy = 1; iy < grid; ++iy) {
        double y = -0.96 + 1.92 * double(iy) / grid;
        for (int ix = 0; ix < grid; ++ix) {
            double x = double(ix) / grid;
            Vec2 d = g.displacement({x, y});
            if (std::fabs(d.x) > 0.05 || std::fabs(d.y) > 0.05) continue;
            // Newton with finite-difference Jacobian
            Vec2 p{x, y};
            bool converged = false;
            for (int it = 0; it < 60; ++it) {
                Vec2 F = g.displacement(p);
                double r = std::max(std::fabs(F.x), std::fabs(F.y));
                if (r < cfg.newton_tol) { converged = true; break; }
                const double h = 1e-7;
                Vec2 Fx = g.displacement({p.x + h, p.y});
                Vec2 Fy = g.displacement({p.x, p.y + h});
                Mat2 J{(Fx.x - F.x) / h, (Fy.x - F.x) / h, (Fx.y - F.y) / h, (Fy.y - F.y) / h};
                Vec2 step = J.inverse().apply(F);
                p = {wrap01(p.x - step.x), p.y - step.y};
                if (std::fabs(p.y) > 0.999) break;
            }
            if (!converged) continue;
            bool fresh = true;
            for (const auto& r : roots)
                if (std::fabs(wrap_half(r.x - p.x)) < 1e-5 && std::fabs(r.y - p.y) < 1e-5)
                    fresh = false;
            if (fresh) roots.push_back(p);
        }
    }

    if (roots.empty()) {
        report.conclusive = false;
        report.hint = "no interior fixed point located; refine the search grid";
        return report;
    }

    std::sort(roots.begin(), roots.end(),
              [](const Vec2& a, const Vec2& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    auto disp = [&](const Vec2& z) { return g.displacement(z); };
    for (const auto& r : roots) {
        FlipFixedPoint fp;
        fp.p = r;
        fp.index = winding_index(disp, r, cfg.winding_radius, cfg.winding_samples);
        report.index_sum += fp.index;
        report.interior_fixed_points.push_back(fp);
    }
    return report;
}

} // namespace tnsurf
