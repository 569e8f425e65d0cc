#pragma once

#include "elcoinv/cauchy.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace elcoinv {

/// Exact outgoing field u = grad u_p + (d2, -d1) u_s of a two-potential point
/// source; closed-form data generator for the bean/peanut/starfish runs.
class PointSourceField final : public FieldEvaluator {
  public:
    PointSourceField(MaterialParams p, Vec2 y0, Complex scale);

    const MaterialParams& params() const override { return params_; }
    ElasticField field(const Vec2& x) const override;
    CVec2 traction_at(const Vec2& x, const Vec2& n) const override;
    CMat2 traction_grad(const Vec2& x, const Vec2& n) const override;

    const Vec2& source() const { return y0_; }

  private:
    MaterialParams params_;
    Vec2 y0_;
    Complex scale_;
};

/// Named impedance profiles usable in configs:
/// "sin4plus1", "sin4", "sin2", "one", "zero", "const:<value>".
ScalarFn make_impedance(const std::string& name);

/// Named explicit boundary targets: "sin2" (both components sin^2), "zero".
/// The name "manufactured" is reserved for point-source data and rejected here.
TargetFn make_target(const std::string& name);

/// Complete description of one experiment; the unit a config file encodes.
struct ExperimentSpec {
    std::string name = "ex3_circle";

    AnalyticCurve::Kind geometry = AnalyticCurve::Kind::Circle;
    double circle_radius = 1.2;

    MaterialParams material{1.0, 1.0, 1.0, 2.0};

    Vec2 source{0.0, 0.0};                 ///< point-source location (manufactured g)
    Complex source_scale{0.0, 0.25};       ///< potential scale (1 or i/4 in the examples)

    std::string chi_name = "sin2";         ///< true impedance profile
    std::string g_name = "sin2";           ///< explicit target name or "manufactured"

    double boundary_radius = 7.0;          ///< auxiliary circle radius
    double init_radius = 0.6;              ///< initial boundary guess (circle)
    double chi0 = 0.5;                     ///< initial impedance guess (constant)

    double delta = 0.0;                    ///< relative noise level
    std::uint64_t seed = 1;

    int cauchy_nodes = 64;                 ///< collocation nodes on the accessible arc
    int source_count = 128;                ///< quadrature nodes on the auxiliary circle

    bool manufactured_g() const { return g_name == "manufactured"; }
    void validate() const;
};

/// Names accepted by example_spec, in listing order.
const std::vector<std::string>& example_names();
/// Built-in experiment presets; see example_names() for the accepted names.
ExperimentSpec example_spec(const std::string& name);

/// Everything the error reports need about the unknowns being reconstructed.
struct GroundTruth {
    AnalyticCurve curve;
    ScalarFn chi;                                 ///< on [0, 2pi)
    TargetFn g;                                   ///< on [0, 2pi)
    std::shared_ptr<const FieldEvaluator> field;  ///< exact displacement field
    bool source_inside = false;  ///< point source lies inside the body (bean case)
};

struct SynthesizedData {
    CauchyData data;  ///< noise-free Cauchy pair on the accessible arc
    GroundTruth truth;
};

/// Samples the exact field of the experiment on the accessible arc of the true
/// boundary. For explicit targets the field is manufactured as a single-layer
/// potential on a circle strictly outside the auxiliary boundary, fitted to
/// the impedance condition on the whole true boundary.
SynthesizedData make_data(const ExperimentSpec& spec);

/// Adds a seeded Gaussian perturbation rescaled so that the weighted norm of
/// (h^delta - h) is exactly delta * ||h||; records delta and eps in the result.
CauchyData add_noise(const CauchyData& clean, double delta, std::uint64_t seed);

} // namespace elcoinv
