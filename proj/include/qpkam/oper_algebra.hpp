// oper_algebra.hpp — quantization and the symbol calculus: composition and
// commutator expansions with exact matrix remainders, exponential map, weighted
// psi-do norms, and empirical tame constants.

#pragma once

#include "qpkam/param.hpp"
#include "qpkam/qp_operator.hpp"
#include "qpkam/symbol.hpp"

namespace qpkam {

struct QuantizeReport {
    double dropped_mass = 0.0;  // Frobenius mass of entries outside the box
};

// (Op(a)u)(phi,x) = sum_j a(phi,x,j) u_j(phi) e^{i 2 pi j x} on the box
QPOperator quantize(const Symbol& a, const Box& box, QuantizeReport* report = nullptr);

struct SymbolExpansion {
    Symbol symbol;
    QPOperator remainder;  // quantize(a) o quantize(b) - quantize(symbol), exact
};

// asymptotic composition sigma_AB = sum_{beta<=N} (1/beta!) d_xi^beta a D_x^beta b
// with D_x = (i 2 pi)^{-1} d_x, matching the e^{i 2 pi j x} quantization
Symbol compose_symbol(const Symbol& a, const Symbol& b, int N);
SymbolExpansion compose(const Symbol& a, const Symbol& b, int N, const Box& box);

// expansion of [A,B]; for homogeneous a dx^m, b dx^{m'} this reduces to
// sum_{n>=1} (K_{n,m} a d_x^n b - K_{n,m'} (d_x^n a) b) dx^{m+m'-n}
Symbol commutator_symbol(const Symbol& a, const Symbol& b, int N);
SymbolExpansion commutator_expand(const Symbol& a, const Symbol& b, int N, const Box& box);

struct ExpReport {
    double generator_norm = 0.0;  // |A|_{0,s0,0} used in the gate
    double tail_bound = 0.0;      // |A|^{N+1}/(N+1)! e^{|A|}
};

// partial series sum_{k<=N} sigma_{A^k}/k! for an order-0 symbol; components
// below exponent -drop_cap are discarded
Symbol exp_op(const Symbol& a, int N, int drop_cap, double s0, ExpReport* report = nullptr,
              double norm_gate = 2.0);

// max_{beta<=alpha} sup_{|xi|<=xi_max integer} |d_xi^beta a(.,.,xi)|_s <xi>^{-m+beta}
double psido_norm(const Symbol& a, int m, double s, int alpha, int xi_max);
double psido_norm_lipg(const ParamFamily<Symbol>& a, int m, double s, int alpha, int xi_max);

struct TameReport {
    std::vector<double> s_grid;
    std::vector<double> constants;  // M_A(s), nondecreasing on the grid
    double sigma = 0.0;
};

// least single-constant fit |A u|_s <= M(s) |u|_{s+sigma} over single-mode probes
TameReport tame_probe(const QPOperator& A, const std::vector<double>& s_grid, double sigma);

// Fit coefficient fields c_q(phi,x) so that the columns of A over probe modes
// jmin <= |j'| <= jmax match sum_q c_q (i 2 pi j')^q in least squares. Fields
// are returned on field_box (one per requested order, same ordering).
std::vector<TruncatedField> extract_symbol_coefficients(const QPOperator& A,
                                                        const std::vector<int>& orders,
                                                        int jmin, int jmax,
                                                        const Box& field_box);

}  // namespace qpkam
