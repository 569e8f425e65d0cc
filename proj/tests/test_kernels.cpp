#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "elcoinv/errors.hpp"
#include "elcoinv/kernels.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace elcoinv;
using testutil::rel_err;

namespace {

double mat_rel(const CMat2& got, const CMat2& want) {
    return (got - want).norm() / std::max(want.norm(), 1e-300);
}

// Central difference of a matrix-valued function of x.
template <class F>
CMat2 mat_fd(const F& f, const Vec2& x, int dir, double h) {
    Vec2 e = Vec2::Zero();
    e[dir] = h;
    return (f(x + e) - f(x - e)) / (2.0 * h);
}

const MaterialParams ex1_material(1.0, 1.0, 1.0, 3.0);

} // namespace

TEST_CASE("material wavenumbers and validation") {
    CHECK(rel_err(ex1_material.kp(), std::sqrt(3.0)) <= 1e-15);
    CHECK(rel_err(ex1_material.ks(), 3.0) <= 1e-15);
    CHECK(ex1_material.kp() < ex1_material.ks());
    CHECK_THROWS_AS(MaterialParams(1.0, 0.0, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(MaterialParams(-2.0, 1.0, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(MaterialParams(1.0, 1.0, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(MaterialParams(1.0, 1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("fundamental matrix matches a direct chain-rule composition") {
    // Independent reassembly from hankel1: d_i Phi(k) = -(i k/4) H1(k r) d_i / r.
    const Vec2 x(2.0, 0.0), y(0.0, 0.0);
    const auto grad_phi = [&](double k) {
        const Vec2 d = x - y;
        const double r = d.norm();
        const Complex factor = -(iu * 0.25) * k * hankel1(1, k * r) / r;
        return CVec2(factor * d.x(), factor * d.y());
    };
    const CVec2 gp = grad_phi(ex1_material.kp());
    const CVec2 gs = grad_phi(ex1_material.ks());
    const CMat2 e = kernel_E(ex1_material, x, y);
    CHECK(rel_err(e(0, 0), gp(0)) <= 1e-12);
    CHECK(rel_err(e(1, 0), gp(1)) <= 1e-12);
    CHECK(rel_err(e(0, 1), gs(1)) <= 1e-12);
    CHECK(rel_err(e(1, 1), -gs(0)) <= 1e-12);
}

TEST_CASE("fundamental matrix is translation invariant") {
    const Vec2 x(1.1, -0.7), y(-0.4, 0.9), c(0.3, -1.1);
    CHECK(mat_rel(kernel_E(ex1_material, x + c, y + c), kernel_E(ex1_material, x, y)) <= 1e-13);
    const Vec2 n = Vec2(0.6, 0.8);
    CHECK(mat_rel(kernel_dT(ex1_material, x + c, n, y + c, 0),
                  kernel_dT(ex1_material, x, n, y, 0)) <= 1e-13);
}

TEST_CASE("first column is curl-free, second column divergence-free") {
    const Vec2 x(1.7, 0.9), y(-0.3, -0.2);
    const CMat2 d1 = kernel_dE(ex1_material, x, y, 0);
    const CMat2 d2 = kernel_dE(ex1_material, x, y, 1);
    const double scale = kernel_E(ex1_material, x, y).norm();
    const Complex curl_col0 = d1(1, 0) - d2(0, 0);
    const Complex div_col1 = d1(0, 1) + d2(1, 1);
    CHECK(std::abs(curl_col0) <= 1e-9 * scale);
    CHECK(std::abs(div_col1) <= 1e-9 * scale);
}

TEST_CASE("traction three-term form equals sigma(u) n") {
    // Independent composition through the stress tensor.
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        CMat2 g;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                g(r, c) = Complex(testutil::random_in(rng, -1, 1), testutil::random_in(rng, -1, 1));
        const double a = testutil::random_in(rng, 0, 2 * pi);
        const Vec2 n(std::cos(a), std::sin(a));
        const MaterialParams p(1.3, 0.8, 1.1, 2.0);
        const Complex div = g(0, 0) + g(1, 1);
        CMat2 sigma = p.lambda * div * CMat2::Identity();
        sigma += p.mu * (g + g.transpose());
        const CVec2 want = sigma * n.cast<Complex>();
        CHECK((traction(g, n, p) - want).norm() <= 1e-14 * want.norm());
    }
}

TEST_CASE("traction kernel equals Eq-(4) traction of a point-density layer field") {
    const Vec2 x(2.2, -0.8), y(-0.5, 0.4), n = Vec2(1.0, 2.0).normalized();
    const CVec2 phi(Complex(0.7, -0.2), Complex(-0.3, 0.5));
    // path (a): analytic gradient of u(x) = E(x, y) phi, then Eq (4)
    CMat2 grad_u;
    for (int dir = 0; dir < 2; ++dir)
        grad_u.col(dir) = kernel_dE(ex1_material, x, y, dir) * phi;
    const CVec2 ta = traction(grad_u, n, ex1_material);
    // path (b): traction-kernel action
    const CVec2 tb = kernel_T(ex1_material, x, n, y) * phi;
    CHECK((ta - tb).norm() <= 1e-10 * tb.norm());
}

TEST_CASE("traction kernel is linear in the normal direction") {
    const Vec2 x(1.5, 1.0), y(0.0, -0.4);
    CMat2 grad_u;
    const CVec2 phi(Complex(1.0, 0.0), Complex(0.0, 1.0));
    for (int dir = 0; dir < 2; ++dir)
        grad_u.col(dir) = kernel_dE(ex1_material, x, y, dir) * phi;
    const Vec2 n1(1.0, 0.0), n2(0.0, 1.0);
    const CVec2 lhs = traction(grad_u, 0.3 * n1 + 0.7 * n2, ex1_material);
    const CVec2 rhs = 0.3 * traction(grad_u, n1, ex1_material) + 0.7 * traction(grad_u, n2, ex1_material);
    CHECK((lhs - rhs).norm() <= 1e-14 * rhs.norm());
}

TEST_CASE("derivative ladder: dE and frozen-normal dT match central differences") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 y = testutil::random_in(rng, 0.0, 1.0) * testutil::random_direction(rng);
        const Vec2 x = y + testutil::random_in(rng, 1.0, 6.0) * testutil::random_direction(rng);
        const Vec2 n = testutil::random_direction(rng);
        const double h = 1e-5 * (x - y).norm();
        for (int dir = 0; dir < 2; ++dir) {
            const CMat2 fd_e = mat_fd(
                [&](const Vec2& q) { return kernel_E(ex1_material, q, y); }, x, dir, h);
            CHECK(mat_rel(kernel_dE(ex1_material, x, y, dir), fd_e) <= 1e-6);
            const CMat2 fd_t = mat_fd(
                [&](const Vec2& q) { return kernel_T(ex1_material, q, n, y); }, x, dir, h);
            CHECK(mat_rel(kernel_dT(ex1_material, x, n, y, dir), fd_t) <= 1e-6);
        }
    }
}

TEST_CASE("traction kernel matches finite differences of E columns at |x-y| = 3") {
    const Vec2 y(0.2, -0.1);
    const Vec2 x = y + 3.0 * Vec2(std::cos(0.8), std::sin(0.8));
    const Vec2 n = Vec2(-0.3, 1.1).normalized();
    const double h = 1e-5 * 3.0;
    CMat2 t_fd;
    for (int ell = 0; ell < 2; ++ell) {
        CMat2 g;
        for (int dir = 0; dir < 2; ++dir) {
            Vec2 e = Vec2::Zero();
            e[dir] = h;
            const CMat2 ep = kernel_E(ex1_material, x + e, y);
            const CMat2 em = kernel_E(ex1_material, x - e, y);
            g(0, dir) = (ep(0, ell) - em(0, ell)) / (2.0 * h);
            g(1, dir) = (ep(1, ell) - em(1, ell)) / (2.0 * h);
        }
        t_fd.col(ell) = traction(g, n, ex1_material);
    }
    CHECK(mat_rel(kernel_T(ex1_material, x, n, y), t_fd) <= 1e-6);
}

TEST_CASE("moving-normal dT adds the chain-rule normal term") {
    const Vec2 x(1.9, 0.3), y(-0.2, -0.6), n = Vec2(0.8, -0.6).normalized();
    const Vec2 dn(0.15, 0.2);  // prescribed normal variation along x1
    const CMat2 frozen = kernel_dT(ex1_material, x, n, y, 0);
    const CMat2 moving = kernel_dT(ex1_material, x, n, y, 0, dn);
    // the difference must equal the traction of the E-columns on dn
    const CVec2 phi(Complex(0.4, 0.1), Complex(-0.9, 0.3));
    CMat2 grad_u;
    for (int dir = 0; dir < 2; ++dir)
        grad_u.col(dir) = kernel_dE(ex1_material, x, y, dir) * phi;
    const CVec2 want = traction(grad_u, dn, ex1_material);
    const CVec2 got = (moving - frozen) * phi;
    CHECK((got - want).norm() <= 1e-12 * (want.norm() + 1e-300));
}

TEST_CASE("point source satisfies the Navier equation away from the source") {
    const MaterialParams p(1.0, 1.0, 1.0, 5.0);
    const Vec2 y0(4.0, -9.0);
    const auto f = [&](const Vec2& q) { return point_source_field(p, y0, Complex(0.0, 0.25), q); };
    CHECK(testutil::navier_residual_rel(f, p, Vec2(0.5, 0.2)) <= 1e-6);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 10; ++i) {
        const Vec2 q = testutil::random_in(rng, 0.0, 1.5) * testutil::random_direction(rng);
        CHECK(testutil::navier_residual_rel(f, p, q) <= 1e-6);
    }
}

TEST_CASE("point source is linear in the scale factor") {
    const MaterialParams p(1.0, 1.0, 1.0, 3.0);
    const Vec2 y0(1.0, 0.0), x(0.2, 0.4);
    const ElasticField a = point_source_field(p, y0, Complex(1.0, 0.0), x);
    const ElasticField b = point_source_field(p, y0, Complex(0.0, 2.0), x);
    CHECK((b.u - Complex(0.0, 2.0) * a.u).norm() <= 1e-14 * b.u.norm());
    CHECK((b.grad - Complex(0.0, 2.0) * a.grad).norm() <= 1e-14 * b.grad.norm());
}

TEST_CASE("single-layer field solves Navier and is linear in the density") {
    const MaterialParams p(1.0, 1.0, 1.0, 3.0);
    const FourierCurve vb = FourierCurve::circle(4.0, 1);
    const auto thetas = collocation_grid(128, 0.0, 2.0 * pi);
    const auto nodes = sample_grid(vb, thetas);
    const RVec w = arc_weights(nodes, 2.0 * pi);
    CVec phi(2 * 128);
    for (int j = 0; j < 128; ++j) {
        phi[2 * j] = Complex(std::cos(thetas[j]) + 0.3, 0.2 * std::sin(2.0 * thetas[j]));
        phi[2 * j + 1] = Complex(std::sin(thetas[j]), -0.1 + 0.3 * std::cos(thetas[j]));
    }
    const SingleLayerField layer(p, nodes, w, phi);

    std::mt19937_64 rng(41);
    for (int i = 0; i < 10; ++i) {
        const Vec2 q = testutil::random_in(rng, 0.0, 2.0) * testutil::random_direction(rng);
        CHECK(testutil::navier_residual_rel(
                  [&](const Vec2& z) { return layer.field(z); }, p, q) <= 1e-6);
    }

    const SingleLayerField scaled(p, nodes, w, (2.5 * phi).eval());
    const Vec2 q(0.7, -0.4);
    CHECK((scaled.field(q).u - 2.5 * layer.field(q).u).norm() <= 1e-13 * scaled.field(q).u.norm());

    CHECK_THROWS_AS(SingleLayerField(p, nodes, w, CVec::Zero(5)), ConfigError);
}

TEST_CASE("single-layer gradients match finite differences") {
    const MaterialParams p(1.0, 1.0, 1.0, 2.0);
    const FourierCurve vb = FourierCurve::circle(7.0, 1);
    const auto nodes = sample_grid(vb, collocation_grid(64, 0.0, 2.0 * pi));
    const RVec w = arc_weights(nodes, 2.0 * pi);
    CVec phi = CVec::Zero(128);
    for (int j = 0; j < 64; ++j) {
        phi[2 * j] = Complex(1.0, 0.5) * std::cos(nodes[j].theta);
        phi[2 * j + 1] = Complex(0.2, -1.0) * std::sin(3.0 * nodes[j].theta);
    }
    const SingleLayerField layer(p, nodes, w, phi);
    const Vec2 x(1.1, 0.4), n = Vec2(0.5, 0.9).normalized();
    const double h = 1e-5;
    for (int dir = 0; dir < 2; ++dir) {
        Vec2 e = Vec2::Zero();
        e[dir] = h;
        const CVec2 fd_u = (layer.field(x + e).u - layer.field(x - e).u) / (2.0 * h);
        CHECK((layer.field(x).grad.col(dir) - fd_u).norm() <= 1e-6 * fd_u.norm());
        const CVec2 fd_t = (layer.traction_at(x + e, n) - layer.traction_at(x - e, n)) / (2.0 * h);
        CHECK((layer.traction_grad(x, n).col(dir) - fd_t).norm() <= 1e-6 * fd_t.norm());
    }
}

TEST_CASE("one-pass sample equals the separate evaluations") {
    const MaterialParams p(1.0, 1.0, 1.0, 3.0);
    const FourierCurve vb = FourierCurve::circle(4.0, 1);
    const auto nodes = sample_grid(vb, collocation_grid(48, 0.0, 2.0 * pi));
    const RVec w = arc_weights(nodes, 2.0 * pi);
    CVec phi(96);
    for (int j = 0; j < 48; ++j) {
        phi[2 * j] = Complex(std::cos(nodes[j].theta), 0.4);
        phi[2 * j + 1] = Complex(-0.2, std::sin(2.0 * nodes[j].theta));
    }
    const SingleLayerField layer(p, nodes, w, phi);
    const Vec2 x(0.9, -0.5), n = Vec2(0.3, -1.2).normalized();
    const FieldSample s = layer.sample(x, n);
    const ElasticField f = layer.field(x);
    CHECK((s.u - f.u).norm() <= 1e-14 * f.u.norm());
    CHECK((s.grad - f.grad).norm() <= 1e-14 * f.grad.norm());
    CHECK((s.t - layer.traction_at(x, n)).norm() <= 1e-14 * s.t.norm());
    CHECK((s.t_grad - layer.traction_grad(x, n)).norm() <= 1e-14 * s.t_grad.norm());
}

TEST_CASE("scalar single-layer normal derivative jumps by the density") {
    // Interior minus exterior normal derivative of the scalar single layer
    // tends to the density value; Richardson extrapolation over h = 1e-2, 1e-3.
    const double k = 2.0, R = 2.0;
    const int m = 80000;
    const double h_node = 2.0 * pi / m;
    const double theta0 = 0.7;
    const Vec2 x0(R * std::cos(theta0), R * std::sin(theta0));
    const Vec2 nu(std::cos(theta0), std::sin(theta0));
    const auto psi = [](double th) { return 1.5 + std::cos(th); };

    const auto dS = [&](const Vec2& q) {
        Complex acc(0.0, 0.0);
        for (int j = 0; j < m; ++j) {
            const double th = j * h_node;
            const Vec2 y(R * std::cos(th), R * std::sin(th));
            const Vec2 d = q - y;
            const double r = d.norm();
            const Complex dphi = -(iu * 0.25) * k * hankel1(1, k * r) / r;
            acc += (R * h_node) * psi(th) * dphi * (d.x() * nu.x() + d.y() * nu.y());
        }
        return acc;
    };

    const auto jump = [&](double h) { return dS(x0 - h * nu) - dS(x0 + h * nu); };
    const Complex j1 = jump(1e-2), j2 = jump(1e-3);
    const Complex richardson = (10.0 * j2 - j1) / 9.0;
    CHECK(std::abs(richardson - psi(theta0)) <= 0.05 * std::abs(psi(theta0)));
    // and the trend is toward the density value
    CHECK(std::abs(j2 - psi(theta0)) < std::abs(j1 - psi(theta0)));
}

TEST_CASE("Example-1 kernels stay regular on the bean boundary") {
    const AnalyticCurve bean(AnalyticCurve::Kind::Bean);
    const FourierCurve vb = FourierCurve::circle(4.0, 1);
    const auto xg = sample_grid(bean, collocation_grid(32, 0.0, 2.0 * pi));
    const auto yg = sample_grid(vb, collocation_grid(32, 0.0, 2.0 * pi));
    for (const auto& sx : xg)
        for (const auto& sy : yg) {
            const CMat2 e = kernel_E(ex1_material, sx.point, sy.point);
            const CMat2 t = kernel_T(ex1_material, sx.point, sx.normal, sy.point);
            CHECK(e.allFinite());
            CHECK(t.allFinite());
        }
}

TEST_CASE("kernel argument validation") {
    const Vec2 x(1.0, 0.0), y(0.0, 0.0);
    CHECK_THROWS_AS(kernel_T(ex1_material, x, Vec2(2.0, 0.0), y), GeometryError);
    CHECK_THROWS_AS(kernel_E(ex1_material, x, x), GeometryError);
    CHECK_THROWS_AS(kernel_dE(ex1_material, x, y, 2), std::domain_error);
    CHECK_THROWS_AS(kernel_dT(ex1_material, x, Vec2(1.0, 0.0), y, 3), std::domain_error);
}
