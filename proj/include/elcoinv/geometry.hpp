#pragma once

#include "elcoinv/types.hpp"

#include <functional>
#include <vector>

namespace elcoinv {

/// One boundary point with its outward unit normal and parameterization speed.
/// For starlike curves z(theta) = r(theta) (cos theta, sin theta) the tangent is
/// z' = r' xhat + r xhat_perp and the outward normal is z' rotated by -pi/2,
/// normalized; speed = |z'| = sqrt(r'^2 + r^2).
struct CurveSample {
    double theta = 0.0;
    Vec2 point = Vec2::Zero();
    Vec2 normal = Vec2::Zero();
    double speed = 0.0;
};

/// Starlike closed curve with trigonometric radial parameterization
///   r(theta) = a0 + sum_{j=1..N} (a_j cos(j theta) + b_j sin(j theta)),
/// coefficients stored as (a0, a1..aN, b1..bN).
class FourierCurve {
  public:
    FourierCurve(RVec coeffs, int degree);

    /// Circle of the given radius, encoded at the given degree (higher terms zero).
    static FourierCurve circle(double radius, int degree);

    int degree() const { return degree_; }
    const RVec& coeffs() const { return coeffs_; }

    double radius(double theta) const;
    double radius_deriv(double theta) const;
    double radius_deriv2(double theta) const;

    /// z(theta); throws GeometryError when r(theta) <= 0.
    Vec2 point(double theta) const;
    /// Point + outward unit normal + speed; throws GeometryError when degenerate.
    CurveSample sample(double theta) const;
    /// d(normal)/d(theta), for the optional moving-normal kernel mode.
    Vec2 normal_deriv(double theta) const;

    /// Trigonometric basis row (1, cos th, .., cos N th, sin th, .., sin N th).
    static RVec basis_row(double theta, int degree);
    /// Elementwise theta-derivative of basis_row.
    static RVec basis_deriv_row(double theta, int degree);

  private:
    RVec coeffs_;
    int degree_;
};

/// Closed-form truth curves used by the shipped experiments. Kept analytic
/// (not projected onto a truncated trigonometric basis) so reconstruction
/// errors are measured against the exact shape.
class AnalyticCurve {
  public:
    enum class Kind { Circle, Bean, Peanut, Starfish };

    explicit AnalyticCurve(Kind kind, double circle_radius = 1.0);

    Kind kind() const { return kind_; }
    double radius(double theta) const;
    double radius_deriv(double theta) const;
    Vec2 point(double theta) const;
    CurveSample sample(double theta) const;

  private:
    Kind kind_;
    double circle_radius_;
};

/// count equispaced nodes on the half-open interval [start, end):
/// theta_j = start + j (end - start) / count. Throws on count < 1 or end <= start.
std::vector<double> collocation_grid(int count, double start, double end);

/// Samples of a curve at the given parameter values.
template <class Curve>
std::vector<CurveSample> sample_grid(const Curve& curve, const std::vector<double>& thetas) {
    std::vector<CurveSample> out;
    out.reserve(thetas.size());
    for (double th : thetas) out.push_back(curve.sample(th));
    return out;
}

/// Arc-length trapezoid weights h * speed_j for equispaced half-open grids
/// (spectrally accurate on the full period).
RVec arc_weights(const std::vector<CurveSample>& samples, double interval_length);

/// Least-squares fit of radius samples by a degree-N trigonometric polynomial;
/// requires at least 2N+1 nodes. Returns coefficients in FourierCurve layout.
RVec fit_fourier(const std::vector<double>& thetas, const RVec& values, int degree);

} // namespace elcoinv
