// diffeo.hpp — families of circle diffeomorphisms x -> x + tau beta(phi,x),
// their inverses, characteristic curves, and the transport flow operator.

#pragma once

#include <map>
#include <memory>

#include "qpkam/qp_operator.hpp"

namespace qpkam {

struct DiffeoOptions {
    double tol = 1e-13;
    int max_iter = 60;
    int oversample = 2;
    int breve_table = 128;  // tau-resolution of the cached inverse table
};

struct NonInvertibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// beta real with sup|beta_x| < 1; breve(tau) solves y = x + tau beta for x,
// x = y + breve(tau, phi, y). The inverse is tabulated in tau and interpolated,
// so characteristics are available without re-running Newton.
class DiffeoFamily {
public:
    DiffeoFamily() = default;
    DiffeoFamily(const TruncatedField& beta, const DiffeoOptions& opt = DiffeoOptions());

    const TruncatedField& beta() const { return beta_; }
    const TruncatedField& breve() const { return breve1_; }  // tau = 1
    double sup_beta_x() const { return sup_bx_; }
    bool phi_independent() const { return phi_indep_; }

    TruncatedField breve_at(double tau) const;  // 6-point interpolation in tau
    // x-mode slices of breve(tau) and of its y-derivative, per phi grid point
    CMat breve_slices(double tau) const;
    CMat breve_dy_slices(double tau) const;

    // b(tau,phi,x) = beta / (1 + tau beta_x) as grid values / field
    CVec b_values(double tau) const;
    TruncatedField b_field(double tau) const;

    // gamma^{a,b}(phi,x) = x + a beta + breve(b, phi, x + a beta) and d/dx of it,
    // on all grid points (layout of CollocGrid::values)
    void characteristic_values(double a, double b, CVec& gamma, CVec& dgamma) const;

    // scalar version for oracles
    double characteristic(double tau0, double tau, const std::vector<double>& phi,
                          double x) const;
    double eval_beta(const std::vector<double>& phi, double x) const;
    double eval_breve(double tau, const std::vector<double>& phi, double x) const;

    const CollocGrid& grid() const { return grid_; }

private:
    TruncatedField newton_inverse(double tau) const;
    const TruncatedField& table_entry(int k) const;

    TruncatedField beta_;
    TruncatedField breve1_;
    CollocGrid grid_;
    CMat beta_slices_;
    CVec beta_vals_, betax_vals_;
    double sup_bx_ = 0.0;
    bool phi_indep_ = false;
    DiffeoOptions opt_;
    mutable std::vector<std::unique_ptr<TruncatedField>> breve_table_;
};

struct FlowOptions {
    int tau_steps = 256;  // substeps for the projector-correction factor
    double growth_bound = 1e6;
};

// Matrix of the flow Phi(tau0,tau,phi) of d_tau Phi = Pi_perp d_x (b Phi) on the
// box. Factorized as (exact transport flow) x (finite-rank correction), so the
// accuracy is uniform in the space mode.
QPOperator transport_flow_op(const DiffeoFamily& d, double tau0, double tau, const Box& box,
                             const FlowOptions& opt = FlowOptions());

}  // namespace qpkam
