#include "qpkam/oper_algebra.hpp"

#include <cmath>

namespace qpkam {

QPOperator quantize(const Symbol& a, const Box& box, QuantizeReport* report) {
    QPOperator out(box);
    double dropped = 0.0;
    const Box& fbox = a.field_box();
    int ncols = box.size();
    for (int c = 0; c < ncols; ++c) {
        auto [lc, jc] = box.mode(c);
        for (int k = 0; k < a.n_components(); ++k) {
            Complex w = a.xi_weight(k, jc);
            if (w == Complex(0.0)) continue;
            const auto& coef = a.coeff(k);
            for (int i = 0; i < coef.coeffs().size(); ++i) {
                Complex cv = coef.coeffs()[i];
                if (cv == Complex(0.0)) continue;
                auto [ld, jd] = fbox.mode(i);
                MultiIndex lr(ld.size());
                for (size_t d = 0; d < ld.size(); ++d) lr[d] = lc[d] + ld[d];
                int jr = jc + jd;
                if (box.contains(lr, jr))
                    out.matrix()(box.index(lr, jr), c) += cv * w;
                else
                    dropped += std::norm(cv * w);
            }
        }
    }
    if (report) report->dropped_mass = std::sqrt(dropped);
    return out;
}

namespace {
double falling(int q, int beta) {
    double p = 1.0;
    for (int i = 0; i < beta; ++i) p *= (double)(q - i);
    return p;
}
double factorial(int n) {
    double p = 1.0;
    for (int i = 2; i <= n; ++i) p *= i;
    return p;
}
}  // namespace

Symbol compose_symbol(const Symbol& a, const Symbol& b, int N) {
    if (N < 0) throw std::invalid_argument("compose_symbol: N >= 0");
    Symbol out(a.order() + b.order(), a.field_box());
    for (int beta = 0; beta <= N; ++beta) {
        for (int k = 0; k < a.n_components(); ++k) {
            double f = falling(a.order() - k, beta);
            if (f == 0.0) continue;
            const auto& ak = a.coeff(k);
            if (ak.coeffs().cwiseAbs().maxCoeff() == 0.0) continue;
            for (int kp = 0; kp < b.n_components(); ++kp) {
                const auto& bk = b.coeff(kp);
                if (bk.coeffs().cwiseAbs().maxCoeff() == 0.0) continue;
                // the (i 2 pi)^beta from d_xi^beta cancels against the inverse
                // power in the quantization, leaving the plain x-derivative
                TruncatedField db = (beta > 0) ? bk.dx(beta) : bk;
                TruncatedField term = ak.multiply(db);
                term *= f / factorial(beta);
                int expo = a.order() + b.order() - k - kp - beta;
                // the multiplication convention survives only when both factors
                // are cutoff-free; negative exponents always carry the cutoff
                bool cut = (expo < 0) || a.cutoff_flag(k) || b.cutoff_flag(kp);
                out.add_term(term, expo, cut);
            }
        }
    }
    return out;
}

SymbolExpansion compose(const Symbol& a, const Symbol& b, int N, const Box& box) {
    SymbolExpansion r;
    r.symbol = compose_symbol(a, b, N);
    QPOperator A = quantize(a, box), B = quantize(b, box), S = quantize(r.symbol, box);
    r.remainder = A * B - S;
    return r;
}

Symbol commutator_symbol(const Symbol& a, const Symbol& b, int N) {
    if (N < 1) throw std::invalid_argument("commutator_symbol: N >= 1");
    Symbol ab = compose_symbol(a, b, N);
    Symbol ba = compose_symbol(b, a, N);
    return ab + (-ba);
}

SymbolExpansion commutator_expand(const Symbol& a, const Symbol& b, int N, const Box& box) {
    SymbolExpansion r;
    r.symbol = commutator_symbol(a, b, N);
    QPOperator A = quantize(a, box), B = quantize(b, box), S = quantize(r.symbol, box);
    r.remainder = A * B - B * A - S;
    return r;
}

Symbol exp_op(const Symbol& a, int N, int drop_cap, double s0, ExpReport* report,
              double norm_gate) {
    if (a.order() > 0) throw std::invalid_argument("exp_op: order-0 symbol required");
    int xi_max = std::max(4, a.field_box().J());
    double na = psido_norm(a, 0, s0, 0, xi_max);
    if (na > norm_gate)
        throw std::runtime_error("exp_op: |A|_0 = " + std::to_string(na) +
                                 " exceeds the series gate");
    Symbol result = Symbol::multiplication(constant_field(a.field_box(), 1.0));
    Symbol power = result;
    double fact = 1.0;
    for (int k = 1; k <= N; ++k) {
        power = compose_symbol(power, a, drop_cap);
        power.drop_below(-drop_cap);
        fact *= k;
        result += (1.0 / fact) * power;
    }
    if (report) {
        report->generator_norm = na;
        report->tail_bound = std::pow(na, N + 1) / factorial(N + 1) * std::exp(na);
    }
    return result;
}

double psido_norm(const Symbol& a, int m, double s, int alpha, int xi_max) {
    double best = 0.0;
    Symbol cur = a;
    for (int beta = 0; beta <= alpha; ++beta) {
        if (beta > 0) cur = cur.xi_derivative(1);
        for (int xi = -xi_max; xi <= xi_max; ++xi) {
            double w = std::pow(std::max(1.0, std::abs((double)xi)), (double)(-m + beta));
            double nrm = cur.field_at_xi(xi).sobolev_norm(s, true);
            best = std::max(best, nrm * w);
        }
    }
    return best;
}

double psido_norm_lipg(const ParamFamily<Symbol>& a, int m, double s, int alpha, int xi_max) {
    if (a.size() < 1) throw std::invalid_argument("psido_norm_lipg: empty family");
    double sup = 0.0;
    for (int i = 0; i < a.size(); ++i)
        sup = std::max(sup, psido_norm(a.value(i), m, s, alpha, xi_max));
    if (a.size() == 1) return sup;
    double lip = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int k = i + 1; k < a.size(); ++k) {
            double dw = (a.omega(i) - a.omega(k)).norm();
            if (dw == 0.0) continue;
            Symbol diff = a.value(i) + (-a.value(k));
            lip = std::max(lip, psido_norm(diff, m, s, alpha, xi_max) / dw);
        }
    return sup + a.gamma() * lip;
}

TameReport tame_probe(const QPOperator& A, const std::vector<double>& s_grid, double sigma) {
    TameReport rep;
    rep.s_grid = s_grid;
    rep.sigma = sigma;
    const Box& box = A.box();
    rep.constants.assign(s_grid.size(), 0.0);
    for (int c = 0; c < box.size(); ++c) {
        TruncatedField e(box);
        e.coeffs()[c] = 1.0;
        TruncatedField Ae = A.apply(e);
        double wc = box.weight(c);
        for (size_t si = 0; si < s_grid.size(); ++si) {
            double denom = std::pow(wc, s_grid[si] + sigma);
            rep.constants[si] = std::max(rep.constants[si],
                                         Ae.sobolev_norm(s_grid[si], true) / denom);
        }
    }
    for (size_t si = 1; si < rep.constants.size(); ++si)
        rep.constants[si] = std::max(rep.constants[si], rep.constants[si - 1]);
    return rep;
}

std::vector<TruncatedField> extract_symbol_coefficients(const QPOperator& A,
                                                        const std::vector<int>& orders,
                                                        int jmin, int jmax,
                                                        const Box& field_box) {
    const Box& box = A.box();
    // probe columns (l'=0, j') with jmin <= |j'| <= jmax
    std::vector<int> probes;
    for (int j : box.space_modes())
        if (std::abs(j) >= jmin && std::abs(j) <= jmax) probes.push_back(j);
    if ((int)probes.size() < (int)orders.size())
        throw std::invalid_argument("extract_symbol_coefficients: not enough probe modes");
    MultiIndex lz(box.dim(), 0);

    int nq = (int)orders.size();
    CMat V((int)probes.size(), nq);
    for (int p = 0; p < (int)probes.size(); ++p)
        for (int q = 0; q < nq; ++q)
            V(p, q) = std::pow(Complex(0.0, TWO_PI * probes[p]), orders[q]);
    Eigen::CompleteOrthogonalDecomposition<CMat> lsq(V);

    std::vector<TruncatedField> out(nq, TruncatedField(field_box));
    for (int i = 0; i < field_box.size(); ++i) {
        auto [ld, jd] = field_box.mode(i);
        CVec rhs((int)probes.size());
        bool usable = true;
        for (int p = 0; p < (int)probes.size(); ++p) {
            int jr = probes[p] + jd;
            if (!box.contains(ld, jr)) {
                usable = false;
                break;
            }
            rhs[p] = A.entry(ld, jr, lz, probes[p]);
        }
        if (!usable) continue;
        CVec c = lsq.solve(rhs);
        for (int q = 0; q < nq; ++q) out[q].coeffs()[i] = c[q];
    }
    return out;
}

}  // namespace qpkam
