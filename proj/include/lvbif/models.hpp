#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lvbif/types.hpp"

namespace lvbif {

enum class ModelId { Mlv, St1Min, St2Min, CuspUnf, DbtTrunc };

std::string_view to_string(ModelId id);
ModelId model_from_string(std::string_view name);
int dimension(ModelId id);

// Lotka-Volterra with constant prey immigration/harvesting e:
//   x1' = x1 (b1 + a11 x1 + a12 x2) + e
//   x2' = x2 (b2 + a21 x1 + a22 x2)
struct MlvParams {
    double b1 = 0, b2 = 0, a11 = 0, a12 = 0, a21 = 0, a22 = 0, e = 0;
};

// x' = a x + b x^2 + eps x^3
struct St1Params {
    double a = 0, b = 0, eps = 1;
};

// x' = y
// y' = a x + k1 b y + b x^2 + k2 x y + x^2 y + eps x^3 + k3 x^4  [+ k4 b^2 x^2 + k5 b x^3]
struct St2Params {
    double a = 0, b = 0, k1 = 0, k2 = 0, k3 = 0, eps = 1;
    bool extension = false;  // include the k4, k5 terms
    double k4 = 0, k5 = 0;
};

// z' = mu + nu z + z^3
struct CuspParams {
    double mu = 0, nu = 0;
};

// z1' = z2
// z2' = mu1 + mu2 z1 + nu z2 + k2 z1 z2 + z1^2 z2 + eps z1^3
struct DbtParams {
    double mu1 = 0, mu2 = 0, nu = 0, k2 = 0, eps = 1;
};

using ParameterSet = std::variant<MlvParams, St1Params, St2Params, CuspParams, DbtParams>;

ModelId model_of(const ParameterSet& p);
inline int dimension(const ParameterSet& p) { return dimension(model_of(p)); }

// Names accepted by get_param/set_param, in declaration order. "eps" is discrete.
std::vector<std::string> parameter_names(ModelId id);
bool is_discrete_param(std::string_view name);
double get_param(const ParameterSet& p, std::string_view name);
void set_param(ParameterSet& p, std::string_view name, double value);
ParameterSet with_param(ParameterSet p, std::string_view name, double value);
ParameterSet default_params(ModelId id);
double param_scale(const ParameterSet& p);  // max(1, |params|_inf)

// Checks eps in {+1,-1} and the ST2_MIN coefficient guards; throws DegenerateModelError.
void validate(const ParameterSet& p);

StateVector eval_field(const ParameterSet& p, const StateVector& s);
Matrix2 eval_jacobian(const ParameterSet& p, const StateVector& s);
StateVector eval_param_derivative(const ParameterSet& p, const StateVector& s, std::string_view name);
SecondDerivs eval_second_derivs(const ParameterSet& p, const StateVector& s);
ThirdDerivs eval_third_derivs(const ParameterSet& p, const StateVector& s);

struct ScalingDescriptor {
    double x1_factor = 1;    // x1 -> lambda x1
    double x2_factor = 1;    // x2 -> mu x2
    double time_factor = 1;  // t -> t / kappa
};

struct ScaledMlv {
    MlvParams params;
    ScalingDescriptor scaling;
};

ScaledMlv apply_symmetry_scaling(const MlvParams& p, double lambda, double mu, double kappa);

struct ReflectedSt2 {
    StateVector state;
    St2Params params;
};

// (x, y, a, b, k1, k2, k3) -> (-x, -y, a, -b, -k1, -k2, -k3); k4, k5 also change sign.
ReflectedSt2 reflect_st2(const StateVector& s, const ParameterSet& p);

}  // namespace lvbif
