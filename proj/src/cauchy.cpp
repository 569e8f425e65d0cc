#include "elcoinv/cauchy.hpp"

#include "elcoinv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace elcoinv {

CVec CauchyData::stacked() const {
    const Eigen::Index m = count();
    if (u.size() != 2 * m || t.size() != 2 * m || weights.size() != m)
        throw ConfigError("CauchyData: inconsistent node/weight/data sizes");
    CVec h(4 * m);
    h.head(2 * m) = u;
    h.tail(2 * m) = t;
    return h;
}

double CauchyData::stacked_norm(const CVec& h) const {
    const Eigen::Index m = count();
    if (h.size() != 4 * m) throw ConfigError("CauchyData: stacked vector has wrong length");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index c = 0; c < 2; ++c)
            acc += weights[j] *
                   (std::norm(h[2 * j + c]) + std::norm(h[2 * m + 2 * j + c]));
    return std::sqrt(acc);
}

DiscreteOperator::DiscreteOperator(const MaterialParams& p,
                                   const std::vector<CurveSample>& colloc,
                                   const RVec& colloc_weights,
                                   const std::vector<CurveSample>& source,
                                   const RVec& source_weights)
    : params_(p), source_nodes_(source), source_weights_(source_weights) {
    const auto mc = static_cast<Eigen::Index>(colloc.size());
    const auto mb = static_cast<Eigen::Index>(source.size());
    if (mc < 1 || mb < 1) throw ConfigError("DiscreteOperator: empty node set");
    if (colloc_weights.size() != mc || source_weights.size() != mb)
        throw ConfigError("DiscreteOperator: weight/node size mismatch");

    double min_sep = std::numeric_limits<double>::infinity();
    for (const auto& sx : colloc)
        for (const auto& sy : source)
            min_sep = std::min(min_sep, (sx.point - sy.point).norm());
    if (!(min_sep >= 1e-6))
        throw GeometryError("DiscreteOperator: collocation and source curves are not separated");

    matrix_.resize(4 * mc, 2 * mb);
    for (Eigen::Index i = 0; i < mc; ++i)
        for (Eigen::Index j = 0; j < mb; ++j) {
            const Vec2& x = colloc[i].point;
            const Vec2& y = source[j].point;
            matrix_.block<2, 2>(2 * i, 2 * j) = source_weights[j] * kernel_E(p, x, y);
            matrix_.block<2, 2>(2 * mc + 2 * i, 2 * j) =
                source_weights[j] * kernel_T(p, x, colloc[i].normal, y);
        }

    row_weights_.resize(4 * mc);
    for (Eigen::Index i = 0; i < mc; ++i) {
        const double w = colloc_weights[i];
        if (!(w > 0.0)) throw ConfigError("DiscreteOperator: nonpositive collocation weight");
        row_weights_[2 * i] = row_weights_[2 * i + 1] = w;
        row_weights_[2 * mc + 2 * i] = row_weights_[2 * mc + 2 * i + 1] = w;
    }
    col_weights_.resize(2 * mb);
    for (Eigen::Index j = 0; j < mb; ++j) {
        const double w = source_weights[j];
        if (!(w > 0.0)) throw ConfigError("DiscreteOperator: nonpositive source weight");
        col_weights_[2 * j] = col_weights_[2 * j + 1] = w;
    }
}

CauchySolver::CauchySolver(const DiscreteOperator& op) {
    sqrt_row_ = op.row_weights().cwiseSqrt();
    sqrt_col_ = op.col_weights().cwiseSqrt();
    const CMat a = sqrt_row_.asDiagonal() * op.matrix() *
                   sqrt_col_.cwiseInverse().asDiagonal();
    const Eigen::BDCSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    sv_ = svd.singularValues();
}

double CauchySolver::data_norm(const CVec& h) const {
    if (h.size() != sqrt_row_.size()) throw ConfigError("CauchySolver: data vector has wrong length");
    return (sqrt_row_.asDiagonal() * h).norm();
}

CVec CauchySolver::solve(const CVec& h, double alpha) const {
    if (!(alpha > 0.0)) throw ConfigError("CauchySolver: alpha must be positive");
    if (h.size() != sqrt_row_.size()) throw ConfigError("CauchySolver: data vector has wrong length");
    const CVec beta = u_.adjoint() * (sqrt_row_.asDiagonal() * h);
    CVec filtered(sv_.size());
    for (Eigen::Index i = 0; i < sv_.size(); ++i)
        filtered[i] = sv_[i] / (sv_[i] * sv_[i] + alpha) * beta[i];
    return sqrt_col_.cwiseInverse().asDiagonal() * (v_ * filtered);
}

double CauchySolver::discrepancy(const CVec& h, double alpha) const {
    if (!(alpha > 0.0)) throw ConfigError("CauchySolver: alpha must be positive");
    const CVec b = sqrt_row_.asDiagonal() * h;
    const CVec beta = u_.adjoint() * b;
    double acc = std::max(0.0, b.squaredNorm() - beta.squaredNorm());
    for (Eigen::Index i = 0; i < sv_.size(); ++i) {
        const double damp = alpha / (sv_[i] * sv_[i] + alpha);
        acc += damp * damp * std::norm(beta[i]);
    }
    return std::sqrt(acc);
}

CauchySolver::Result CauchySolver::morozov(const CVec& h, double eps) const {
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw ConfigError("CauchySolver: eps must be finite and nonnegative");
    const double hn = data_norm(h);
    if (eps >= hn)
        throw MorozovError("discrepancy radius is not smaller than the data norm; "
                           "the zero density already satisfies it");

    Result res;
    res.discrepancy = discrepancy(h, alpha_floor);
    res.evaluations = 1;
    if (res.discrepancy >= eps) {
        res.alpha = alpha_floor;
        res.density = solve(h, alpha_floor);
        res.at_floor = true;
        return res;
    }

    double lo = alpha_floor;
    double hi = std::max(sv_.size() > 0 ? sv_[0] * sv_[0] : 1.0, 1.0);
    double d_hi = discrepancy(h, hi);
    ++res.evaluations;
    while (d_hi < eps) {
        hi *= 100.0;
        d_hi = discrepancy(h, hi);
        if (++res.evaluations > 60)
            throw MorozovError("failed to bracket the discrepancy radius from above");
    }

    const double tol = 0.005 * eps;
    double alpha = hi, d = d_hi;
    for (int k = 0; k < 400; ++k) {
        alpha = std::sqrt(lo * hi);
        d = discrepancy(h, alpha);
        ++res.evaluations;
        if (std::abs(d - eps) <= tol) break;
        (d > eps ? hi : lo) = alpha;
    }
    if (std::abs(d - eps) > 2.0 * tol)
        throw MorozovError("discrepancy bisection failed to meet its tolerance");

    res.alpha = alpha;
    res.density = solve(h, alpha);
    res.discrepancy = d;
    return res;
}

FieldSample FieldEvaluator::sample(const Vec2& x, const Vec2& n) const {
    FieldSample s;
    const ElasticField f = field(x);
    s.u = f.u;
    s.grad = f.grad;
    s.t = traction_at(x, n);
    s.t_grad = traction_grad(x, n);
    return s;
}

CompletedField::CompletedField(MaterialParams p, std::vector<CurveSample> source_nodes,
                               RVec source_weights, CVec density, double clearance)
    : layer_(p, std::move(source_nodes), std::move(source_weights), std::move(density)),
      clearance_(clearance) {}

void CompletedField::check_clearance(const Vec2& x) const {
    // Radial clearance relative to the nearest source node; for the circular
    // auxiliary boundary this equals the exact distance to the curve.
    const auto& nodes = layer_.nodes();
    double best = std::numeric_limits<double>::infinity();
    size_t best_j = 0;
    for (size_t j = 0; j < nodes.size(); ++j) {
        const double d = (x - nodes[j].point).norm();
        if (d < best) {
            best = d;
            best_j = j;
        }
    }
    const double gap = nodes[best_j].point.norm() - x.norm();
    if (!(gap > clearance_))
        throw GeometryError("CompletedField: evaluation point is not strictly inside the "
                            "auxiliary boundary");
}

ElasticField CompletedField::field(const Vec2& x) const {
    check_clearance(x);
    return layer_.field(x);
}

CVec2 CompletedField::traction_at(const Vec2& x, const Vec2& n) const {
    check_clearance(x);
    return layer_.traction_at(x, n);
}

CMat2 CompletedField::traction_grad(const Vec2& x, const Vec2& n) const {
    check_clearance(x);
    return layer_.traction_grad(x, n);
}

FieldSample CompletedField::sample(const Vec2& x, const Vec2& n) const {
    check_clearance(x);
    return layer_.sample(x, n);
}

CompletionResult complete_cauchy(const CauchyData& data, const MaterialParams& p,
                                 const std::vector<CurveSample>& source_nodes,
                                 const RVec& source_weights) {
    const DiscreteOperator op(p, data.nodes, data.weights, source_nodes, source_weights);
    const CauchySolver solver(op);
    CauchySolver::Result reg = solver.morozov(data.stacked(), data.eps);
    CVec density = reg.density;
    return CompletionResult{std::move(reg),
                            CompletedField(p, source_nodes, source_weights, std::move(density))};
}

} // namespace elcoinv
