#include "lvbif/models.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace lvbif {

namespace {

template <class P>
struct Field {
    std::string_view name;
    double P::*member;
};

constexpr std::array<Field<MlvParams>, 7> kMlvFields{{{"b1", &MlvParams::b1},
                                                      {"b2", &MlvParams::b2},
                                                      {"a11", &MlvParams::a11},
                                                      {"a12", &MlvParams::a12},
                                                      {"a21", &MlvParams::a21},
                                                      {"a22", &MlvParams::a22},
                                                      {"e", &MlvParams::e}}};
constexpr std::array<Field<St1Params>, 3> kSt1Fields{
    {{"a", &St1Params::a}, {"b", &St1Params::b}, {"eps", &St1Params::eps}}};
constexpr std::array<Field<St2Params>, 8> kSt2Fields{{{"a", &St2Params::a},
                                                      {"b", &St2Params::b},
                                                      {"k1", &St2Params::k1},
                                                      {"k2", &St2Params::k2},
                                                      {"k3", &St2Params::k3},
                                                      {"eps", &St2Params::eps},
                                                      {"k4", &St2Params::k4},
                                                      {"k5", &St2Params::k5}}};
constexpr std::array<Field<CuspParams>, 2> kCuspFields{{{"mu", &CuspParams::mu}, {"nu", &CuspParams::nu}}};
constexpr std::array<Field<DbtParams>, 5> kDbtFields{{{"mu1", &DbtParams::mu1},
                                                      {"mu2", &DbtParams::mu2},
                                                      {"nu", &DbtParams::nu},
                                                      {"k2", &DbtParams::k2},
                                                      {"eps", &DbtParams::eps}}};

constexpr const auto& fields_of(const MlvParams*) { return kMlvFields; }
constexpr const auto& fields_of(const St1Params*) { return kSt1Fields; }
constexpr const auto& fields_of(const St2Params*) { return kSt2Fields; }
constexpr const auto& fields_of(const CuspParams*) { return kCuspFields; }
constexpr const auto& fields_of(const DbtParams*) { return kDbtFields; }

template <class P>
double P::*lookup(std::string_view name) {
    for (const auto& f : fields_of(static_cast<const P*>(nullptr)))
        if (f.name == name) return f.member;
    return nullptr;
}

[[noreturn]] void unknown_param(const ParameterSet& p, std::string_view name) {
    throw UsageError("unknown parameter '" + std::string(name) + "' for model " +
                     std::string(to_string(model_of(p))));
}

void check_dim(const ParameterSet& p, const StateVector& s) {
    if (s.size() != dimension(p))
        throw UsageError("state dimension " + std::to_string(s.size()) + " does not match model " +
                         std::string(to_string(model_of(p))));
}

// Extra terms of the extended ST2 model, as functions of x only (y enters nowhere).
struct St2Ext {
    double f = 0, fx = 0, fxx = 0, fxxx = 0;
};

St2Ext st2_extension(const St2Params& q, double x) {
    if (!q.extension) return {};
    const double c2 = q.k4 * q.b * q.b, c3 = q.k5 * q.b;
    return {c2 * x * x + c3 * x * x * x, 2 * c2 * x + 3 * c3 * x * x, 2 * c2 + 6 * c3 * x, 6 * c3};
}

}  // namespace

std::string_view to_string(ModelId id) {
    switch (id) {
        case ModelId::Mlv: return "MLV";
        case ModelId::St1Min: return "ST1_MIN";
        case ModelId::St2Min: return "ST2_MIN";
        case ModelId::CuspUnf: return "CUSP_UNF";
        case ModelId::DbtTrunc: return "DBT_TRUNC";
    }
    return "?";
}

ModelId model_from_string(std::string_view name) {
    for (auto id : {ModelId::Mlv, ModelId::St1Min, ModelId::St2Min, ModelId::CuspUnf, ModelId::DbtTrunc})
        if (to_string(id) == name) return id;
    throw UsageError("unknown model '" + std::string(name) + "'");
}

int dimension(ModelId id) { return (id == ModelId::St1Min || id == ModelId::CuspUnf) ? 1 : 2; }

ModelId model_of(const ParameterSet& p) { return static_cast<ModelId>(p.index()); }

std::vector<std::string> parameter_names(ModelId id) {
    std::vector<std::string> out;
    std::visit(
        [&](const auto& q) {
            for (const auto& f : fields_of(&q)) out.emplace_back(f.name);
        },
        default_params(id));
    return out;
}

bool is_discrete_param(std::string_view name) { return name == "eps"; }

double get_param(const ParameterSet& p, std::string_view name) {
    return std::visit(
        [&](const auto& q) {
            using P = std::decay_t<decltype(q)>;
            auto m = lookup<P>(name);
            if (!m) unknown_param(p, name);
            return q.*m;
        },
        p);
}

void set_param(ParameterSet& p, std::string_view name, double value) {
    std::visit(
        [&](auto& q) {
            using P = std::decay_t<decltype(q)>;
            auto m = lookup<P>(name);
            if (!m) unknown_param(p, name);
            if (is_discrete_param(name) && value != 1.0 && value != -1.0)
                throw UsageError("eps must be +1 or -1");
            q.*m = value;
            if constexpr (std::is_same_v<P, St2Params>) {
                if (name == "k4" || name == "k5") q.extension = true;
            }
        },
        p);
}

ParameterSet with_param(ParameterSet p, std::string_view name, double value) {
    set_param(p, name, value);
    return p;
}

ParameterSet default_params(ModelId id) {
    switch (id) {
        case ModelId::Mlv: return MlvParams{};
        case ModelId::St1Min: return St1Params{};
        case ModelId::St2Min: return St2Params{};
        case ModelId::CuspUnf: return CuspParams{};
        case ModelId::DbtTrunc: return DbtParams{};
    }
    throw UsageError("bad model id");
}

double param_scale(const ParameterSet& p) {
    double s = 1.0;
    std::visit(
        [&](const auto& q) {
            for (const auto& f : fields_of(&q)) s = std::max(s, std::abs(q.*(f.member)));
        },
        p);
    return s;
}

void validate(const ParameterSet& p) {
    std::visit(
        [](const auto& q) {
            using P = std::decay_t<decltype(q)>;
            if constexpr (requires { q.eps; }) {
                if (q.eps != 1.0 && q.eps != -1.0) throw DegenerateModelError("eps", "eps must be +1 or -1");
            }
            if constexpr (std::is_same_v<P, St2Params>) {
                if (q.k1 == 0) throw DegenerateModelError("k1", "ST2_MIN requires k1 != 0");
                if (q.k2 == 0) throw DegenerateModelError("k2", "ST2_MIN requires k2 != 0");
                if (q.k3 == 0) throw DegenerateModelError("k3", "ST2_MIN requires k3 != 0");
                if (std::abs(q.k2 * q.k2 - 8.0) <= 1e-12 * 8.0) throw DegenerateModelError("k2", "ST2_MIN requires k2^2 != 8");
            }
        },
        p);
}

StateVector eval_field(const ParameterSet& p, const StateVector& s) {
    check_dim(p, s);
    return std::visit(
        [&](const auto& q) -> StateVector {
            using P = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<P, MlvParams>) {
                const double x1 = s[0], x2 = s[1];
                return {x1 * (q.b1 + q.a11 * x1 + q.a12 * x2) + q.e, x2 * (q.b2 + q.a21 * x1 + q.a22 * x2)};
            } else if constexpr (std::is_same_v<P, St1Params>) {
                const double x = s[0];
                return StateVector(x * (q.a + x * (q.b + q.eps * x)));
            } else if constexpr (std::is_same_v<P, St2Params>) {
                const double x = s[0], y = s[1];
                const double f2 = q.a * x + q.k1 * q.b * y + q.b * x * x + q.k2 * x * y + x * x * y +
                                  q.eps * x * x * x + q.k3 * x * x * x * x;
                return {y, f2 + st2_extension(q, x).f};
            } else if constexpr (std::is_same_v<P, CuspParams>) {
                const double z = s[0];
                return StateVector(q.mu + q.nu * z + z * z * z);
            } else {
                const double z1 = s[0], z2 = s[1];
                return {z2, q.mu1 + q.mu2 * z1 + q.nu * z2 + q.k2 * z1 * z2 + z1 * z1 * z2 + q.eps * z1 * z1 * z1};
            }
        },
        p);
}

Matrix2 eval_jacobian(const ParameterSet& p, const StateVector& s) {
    check_dim(p, s);
    return std::visit(
        [&](const auto& q) -> Matrix2 {
            using P = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<P, MlvParams>) {
                const double x1 = s[0], x2 = s[1];
                return {q.b1 + 2 * q.a11 * x1 + q.a12 * x2, q.a12 * x1, q.a21 * x2,
                        q.b2 + q.a21 * x1 + 2 * q.a22 * x2};
            } else if constexpr (std::is_same_v<P, St1Params>) {
                const double x = s[0];
                return {q.a + 2 * q.b * x + 3 * q.eps * x * x, 0, 0, 0};
            } else if constexpr (std::is_same_v<P, St2Params>) {
                const double x = s[0], y = s[1];
                const double fx = q.a + 2 * q.b * x + q.k2 * y + 2 * x * y + 3 * q.eps * x * x +
                                  4 * q.k3 * x * x * x + st2_extension(q, x).fx;
                return {0, 1, fx, q.k1 * q.b + q.k2 * x + x * x};
            } else if constexpr (std::is_same_v<P, CuspParams>) {
                return {q.nu + 3 * s[0] * s[0], 0, 0, 0};
            } else {
                const double z1 = s[0], z2 = s[1];
                return {0, 1, q.mu2 + q.k2 * z2 + 2 * z1 * z2 + 3 * q.eps * z1 * z1, q.nu + q.k2 * z1 + z1 * z1};
            }
        },
        p);
}

StateVector eval_param_derivative(const ParameterSet& p, const StateVector& s, std::string_view name) {
    check_dim(p, s);
    return std::visit(
        [&](const auto& q) -> StateVector {
            using P = std::decay_t<decltype(q)>;
            if (!lookup<P>(name)) unknown_param(p, name);
            if constexpr (std::is_same_v<P, MlvParams>) {
                const double x1 = s[0], x2 = s[1];
                if (name == "b1") return {x1, 0};
                if (name == "b2") return {0, x2};
                if (name == "a11") return {x1 * x1, 0};
                if (name == "a12") return {x1 * x2, 0};
                if (name == "a21") return {0, x1 * x2};
                if (name == "a22") return {0, x2 * x2};
                return {1, 0};  // e
            } else if constexpr (std::is_same_v<P, St1Params>) {
                const double x = s[0];
                if (name == "a") return StateVector(x);
                if (name == "b") return StateVector(x * x);
                return StateVector(x * x * x);  // eps
            } else if constexpr (std::is_same_v<P, St2Params>) {
                const double x = s[0], y = s[1];
                const double ext = q.extension;
                if (name == "a") return {0, x};
                if (name == "b")
                    return {0, q.k1 * y + x * x + ext * (2 * q.k4 * q.b * x * x + q.k5 * x * x * x)};
                if (name == "k1") return {0, q.b * y};
                if (name == "k2") return {0, x * y};
                if (name == "k3") return {0, x * x * x * x};
                if (name == "eps") return {0, x * x * x};
                if (name == "k4") return {0, ext * q.b * q.b * x * x};
                return {0, ext * q.b * x * x * x};  // k5
            } else if constexpr (std::is_same_v<P, CuspParams>) {
                return StateVector(name == "mu" ? 1.0 : s[0]);
            } else {
                const double z1 = s[0], z2 = s[1];
                if (name == "mu1") return {0, 1};
                if (name == "mu2") return {0, z1};
                if (name == "nu") return {0, z2};
                if (name == "k2") return {0, z1 * z2};
                return {0, z1 * z1 * z1};  // eps
            }
        },
        p);
}

SecondDerivs eval_second_derivs(const ParameterSet& p, const StateVector& s) {
    check_dim(p, s);
    SecondDerivs h;
    std::visit(
        [&](const auto& q) {
            using P = std::decay_t<decltype(q)>;
            auto& d = h.d;
            if constexpr (std::is_same_v<P, MlvParams>) {
                d[0][0][0] = 2 * q.a11;
                d[0][0][1] = d[0][1][0] = q.a12;
                d[1][0][1] = d[1][1][0] = q.a21;
                d[1][1][1] = 2 * q.a22;
            } else if constexpr (std::is_same_v<P, St1Params>) {
                d[0][0][0] = 2 * q.b + 6 * q.eps * s[0];
            } else if constexpr (std::is_same_v<P, St2Params>) {
                const double x = s[0], y = s[1];
                d[1][0][0] = 2 * q.b + 2 * y + 6 * q.eps * x + 12 * q.k3 * x * x + st2_extension(q, x).fxx;
                d[1][0][1] = d[1][1][0] = q.k2 + 2 * x;
            } else if constexpr (std::is_same_v<P, CuspParams>) {
                d[0][0][0] = 6 * s[0];
            } else {
                const double z1 = s[0], z2 = s[1];
                d[1][0][0] = 2 * z2 + 6 * q.eps * z1;
                d[1][0][1] = d[1][1][0] = q.k2 + 2 * z1;
            }
        },
        p);
    return h;
}

ThirdDerivs eval_third_derivs(const ParameterSet& p, const StateVector& s) {
    check_dim(p, s);
    ThirdDerivs t;
    std::visit(
        [&](const auto& q) {
            using P = std::decay_t<decltype(q)>;
            auto& d = t.d;
            if constexpr (std::is_same_v<P, St1Params>) {
                d[0][0][0][0] = 6 * q.eps;
            } else if constexpr (std::is_same_v<P, St2Params>) {
                d[1][0][0][0] = 6 * q.eps + 24 * q.k3 * s[0] + st2_extension(q, s[0]).fxxx;
                d[1][0][0][1] = d[1][0][1][0] = d[1][1][0][0] = 2;
            } else if constexpr (std::is_same_v<P, CuspParams>) {
                d[0][0][0][0] = 6;
            } else if constexpr (std::is_same_v<P, DbtParams>) {
                d[1][0][0][0] = 6 * q.eps;
                d[1][0][0][1] = d[1][0][1][0] = d[1][1][0][0] = 2;
            }
        },
        p);
    return t;
}

ScaledMlv apply_symmetry_scaling(const MlvParams& p, double lambda, double mu, double kappa) {
    if (lambda == 0 || mu == 0 || kappa == 0) throw UsageError("scale factors must be nonzero");
    MlvParams q;
    q.b1 = kappa * p.b1;
    q.b2 = kappa * p.b2;
    q.a11 = kappa * p.a11 / lambda;
    q.a21 = kappa * p.a21 / lambda;
    q.a12 = kappa * p.a12 / mu;
    q.a22 = kappa * p.a22 / mu;
    q.e = kappa * lambda * p.e;
    return {q, {lambda, mu, 1.0 / kappa}};
}

ReflectedSt2 reflect_st2(const StateVector& s, const ParameterSet& p) {
    const auto* q = std::get_if<St2Params>(&p);
    if (!q) throw UsageError("reflect_st2 requires an ST2_MIN parameter set");
    check_dim(p, s);
    St2Params r = *q;
    r.b = -q->b;
    r.k1 = -q->k1;
    r.k2 = -q->k2;
    r.k3 = -q->k3;
    r.k4 = -q->k4;
    r.k5 = -q->k5;
    return {-s, r};
}

}  // namespace lvbif
