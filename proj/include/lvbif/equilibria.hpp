#pragma once

#include <string_view>
#include <vector>

#include "lvbif/algebra.hpp"
#include "lvbif/models.hpp"
#include "lvbif/tolerances.hpp"

namespace lvbif {

enum class EqClass { Sink, Source, Saddle, FoldType, HopfType, DoubleZero, Degenerate };

std::string_view to_string(EqClass c);

struct Equilibrium {
    StateVector state;
    EigenData eigen;
    EqClass classification = EqClass::Degenerate;
    double residual = 0;
    double spectral_scale = 1;
    int multiplicity = 1;
    bool on_axis = false;                 // MLV: x2 == 0 exactly
    bool outside_first_quadrant = false;  // MLV: some coordinate negative
};

// max |J_ij|, the reference magnitude for eigenvalue tolerances.
double spectral_scale(const Matrix2& jac, int dim);

EqClass classify(const EigenData& eig, double tol_eig);
inline EqClass classify(const Equilibrium& eq, double tol_eig) { return classify(eq.eigen, tol_eig); }

// Eigen data, residual and classification of a given state.
Equilibrium make_equilibrium(const ParameterSet& p, const StateVector& s, int multiplicity = 1);

std::vector<Equilibrium> find_equilibria_mlv(const MlvParams& p, double cluster_tol = tol::kRootCluster);
std::vector<Equilibrium> find_equilibria_min(const ParameterSet& p, double cluster_tol = tol::kRootCluster);
// Dispatches on the model.
std::vector<Equilibrium> find_equilibria(const ParameterSet& p, double cluster_tol = tol::kRootCluster);

// Plain Newton on F(x) = 0 at fixed parameters; keeps the best iterate.
StateVector newton_equilibrium(const ParameterSet& p, StateVector s, int max_iter = 8);

}  // namespace lvbif
