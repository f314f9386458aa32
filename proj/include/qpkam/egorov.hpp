// egorov.hpp — homogeneous expansions of operators conjugated by transport
// flows: Phi (a dx^m) Phi^{-1}, Phi (w.d_phi Phi^{-1}), and Fourier multipliers.

#pragma once

#include "qpkam/diffeo.hpp"
#include "qpkam/oper_algebra.hpp"

namespace qpkam {

struct EgorovOptions {
    int tau_steps = 64;        // marching steps for the coefficient hierarchy
    FlowOptions flow;          // flow operator integration
    double beta_gate = 0.75;   // warn threshold on sup|beta_x|
};

struct EgorovExpansion {
    int order = 0;                  // m
    std::vector<TruncatedField> p;  // p[i] = p_{m-i}
    QPOperator remainder;           // conjugation minus quantized expansion, exact
    bool gate_ok = true;

    Symbol expansion_symbol() const;
};

// expansion of Phi (a dx^m) Phi^{-1} to depth N; remainder measured on `box`
EgorovExpansion egorov_expand(const TruncatedField& a, int m, const DiffeoFamily& d, int N,
                              const Box& box, const EgorovOptions& opt = EgorovOptions());

// same, reusing a precomputed flow matrix and its inverse
EgorovExpansion egorov_expand_with_flow(const TruncatedField& a, int m, const DiffeoFamily& d,
                                        int N, const Box& box, const QPOperator& Phi,
                                        const QPOperator& Phinv,
                                        const EgorovOptions& opt = EgorovOptions());

// principal symbol by the characteristics formula (exact up to grid resolution)
TruncatedField egorov_principal(const TruncatedField& a, int m, const DiffeoFamily& d);

// expansion of Phi o (w.d_phi Phi^{-1}) = sum p_{1-i} dx^{1-i} + R_N
EgorovExpansion conjugate_omega_dphi(const DiffeoFamily& d, const Vec& omega, int N,
                                     const Box& box, const EgorovOptions& opt = EgorovOptions());

struct MultiplierConjugation {
    int order = 0;                      // m of the multiplier expansion
    std::vector<TruncatedField> alpha;  // alpha_{m-n}, the phi-x dependent parts
    QPOperator remainder;
};

// Phi Q Phi^{-1} = Q + Q_Phi + R_N for Q = sum_n c_{m-n} dx^{m-n} + Q_tail
MultiplierConjugation conjugate_multiplier(const std::vector<double>& c, int m,
                                           const QPOperator& Q_tail, const DiffeoFamily& d,
                                           int N, const Box& box,
                                           const EgorovOptions& opt = EgorovOptions());

}  // namespace qpkam
