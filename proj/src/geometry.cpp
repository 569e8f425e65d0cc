#include "elcoinv/geometry.hpp"

#include "elcoinv/errors.hpp"

#include <cmath>

namespace elcoinv {

namespace {

Vec2 xhat(double theta) { return {std::cos(theta), std::sin(theta)}; }
Vec2 xhat_perp(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Shared sample construction from (r, r') at theta.
CurveSample make_sample(double theta, double r, double dr) {
    if (!(r > 0.0)) throw GeometryError("curve radius must be positive");
    CurveSample s;
    s.theta = theta;
    const Vec2 e = xhat(theta), ep = xhat_perp(theta);
    s.point = r * e;
    const Vec2 tangent = dr * e + r * ep;
    s.speed = tangent.norm();
    if (!(s.speed > 1e-14)) throw GeometryError("curve tangent degenerates");
    s.normal = Vec2(tangent.y(), -tangent.x()) / s.speed;
    return s;
}

} // namespace

FourierCurve::FourierCurve(RVec coeffs, int degree) : coeffs_(std::move(coeffs)), degree_(degree) {
    if (degree_ < 0) throw GeometryError("FourierCurve: degree must be nonnegative");
    if (coeffs_.size() != 2 * degree_ + 1)
        throw GeometryError("FourierCurve: coefficient vector must have length 2N+1");
}

FourierCurve FourierCurve::circle(double radius, int degree) {
    RVec c = RVec::Zero(2 * degree + 1);
    c[0] = radius;
    return FourierCurve(std::move(c), degree);
}

double FourierCurve::radius(double theta) const {
    double r = coeffs_[0];
    for (int j = 1; j <= degree_; ++j)
        r += coeffs_[j] * std::cos(j * theta) + coeffs_[degree_ + j] * std::sin(j * theta);
    return r;
}

double FourierCurve::radius_deriv(double theta) const {
    double dr = 0.0;
    for (int j = 1; j <= degree_; ++j)
        dr += j * (-coeffs_[j] * std::sin(j * theta) + coeffs_[degree_ + j] * std::cos(j * theta));
    return dr;
}

double FourierCurve::radius_deriv2(double theta) const {
    double ddr = 0.0;
    for (int j = 1; j <= degree_; ++j)
        ddr -= j * j * (coeffs_[j] * std::cos(j * theta) + coeffs_[degree_ + j] * std::sin(j * theta));
    return ddr;
}

Vec2 FourierCurve::point(double theta) const {
    const double r = radius(theta);
    if (!(r > 0.0)) throw GeometryError("FourierCurve: nonpositive radius");
    return r * xhat(theta);
}

CurveSample FourierCurve::sample(double theta) const {
    return make_sample(theta, radius(theta), radius_deriv(theta));
}

Vec2 FourierCurve::normal_deriv(double theta) const {
    const double r = radius(theta), dr = radius_deriv(theta), ddr = radius_deriv2(theta);
    const Vec2 e = xhat(theta), ep = xhat_perp(theta);
    const Vec2 zp = dr * e + r * ep;
    const Vec2 zpp = (ddr - r) * e + 2.0 * dr * ep;
    const double speed = zp.norm();
    if (!(speed > 1e-14)) throw GeometryError("FourierCurve: tangent degenerates");
    const Vec2 rot_zp(zp.y(), -zp.x());
    const Vec2 rot_zpp(zpp.y(), -zpp.x());
    const double dspeed = zp.dot(zpp) / speed;
    return rot_zpp / speed - rot_zp * (dspeed / (speed * speed));
}

RVec FourierCurve::basis_row(double theta, int degree) {
    RVec row(2 * degree + 1);
    row[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        row[j] = std::cos(j * theta);
        row[degree + j] = std::sin(j * theta);
    }
    return row;
}

RVec FourierCurve::basis_deriv_row(double theta, int degree) {
    RVec row(2 * degree + 1);
    row[0] = 0.0;
    for (int j = 1; j <= degree; ++j) {
        row[j] = -j * std::sin(j * theta);
        row[degree + j] = j * std::cos(j * theta);
    }
    return row;
}

AnalyticCurve::AnalyticCurve(Kind kind, double circle_radius)
    : kind_(kind), circle_radius_(circle_radius) {
    if (kind_ == Kind::Circle && !(circle_radius_ > 0.0))
        throw GeometryError("AnalyticCurve: circle radius must be positive");
}

double AnalyticCurve::radius(double theta) const {
    switch (kind_) {
        case Kind::Circle: return circle_radius_;
        case Kind::Bean: {
            const double num = 1.0 + 0.8 * std::cos(theta) + 0.2 * std::sin(2.0 * theta);
            const double den = 1.0 + 0.7 * std::cos(theta);
            return num / den;
        }
        case Kind::Peanut: return 0.5 * std::sqrt(1.0 + 3.0 * std::cos(theta) * std::cos(theta));
        case Kind::Starfish: return 1.0 + 0.2 * std::cos(5.0 * theta);
    }
    throw GeometryError("AnalyticCurve: unknown kind");
}

double AnalyticCurve::radius_deriv(double theta) const {
    switch (kind_) {
        case Kind::Circle: return 0.0;
        case Kind::Bean: {
            const double num = 1.0 + 0.8 * std::cos(theta) + 0.2 * std::sin(2.0 * theta);
            const double dnum = -0.8 * std::sin(theta) + 0.4 * std::cos(2.0 * theta);
            const double den = 1.0 + 0.7 * std::cos(theta);
            const double dden = -0.7 * std::sin(theta);
            return (dnum * den - num * dden) / (den * den);
        }
        case Kind::Peanut: {
            const double q = 1.0 + 3.0 * std::cos(theta) * std::cos(theta);
            return -0.75 * std::sin(2.0 * theta) / std::sqrt(q);
        }
        case Kind::Starfish: return -std::sin(5.0 * theta);
    }
    throw GeometryError("AnalyticCurve: unknown kind");
}

Vec2 AnalyticCurve::point(double theta) const {
    const double r = radius(theta);
    if (!(r > 0.0)) throw GeometryError("AnalyticCurve: nonpositive radius");
    return r * xhat(theta);
}

CurveSample AnalyticCurve::sample(double theta) const {
    return make_sample(theta, radius(theta), radius_deriv(theta));
}

std::vector<double> collocation_grid(int count, double start, double end) {
    if (count < 1) throw GeometryError("collocation_grid: need at least one node");
    if (!(end > start)) throw GeometryError("collocation_grid: empty parameter interval");
    std::vector<double> thetas(count);
    const double h = (end - start) / count;
    for (int j = 0; j < count; ++j) thetas[j] = start + j * h;
    return thetas;
}

RVec arc_weights(const std::vector<CurveSample>& samples, double interval_length) {
    const double h = interval_length / double(samples.size());
    RVec w(samples.size());
    for (size_t j = 0; j < samples.size(); ++j) w[j] = h * samples[j].speed;
    return w;
}

RVec fit_fourier(const std::vector<double>& thetas, const RVec& values, int degree) {
    const int m = int(thetas.size());
    if (values.size() != m) throw GeometryError("fit_fourier: size mismatch");
    if (m < 2 * degree + 1) throw GeometryError("fit_fourier: underdetermined fit");
    RMat B(m, 2 * degree + 1);
    for (int i = 0; i < m; ++i) B.row(i) = FourierCurve::basis_row(thetas[i], degree).transpose();
    return B.colPivHouseholderQr().solve(values);
}

} // namespace elcoinv
