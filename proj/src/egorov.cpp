#include "qpkam/egorov.hpp"

#include <cmath>

namespace qpkam {

namespace {

double binom(int q, int n) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= (double)(q - i) / (double)(i + 1);
    return p;
}

// Coupled transport hierarchy on grid values:
//   d_tau p_{m-i} = b (p_{m-i})_x - (m-i) b_x p_{m-i} + g~_i + f_i(tau)
// with g~_i = sum_{j=1..i} g_j(b, p_{m-i+j}), g_j(b, p_q) = -C(q+1,j+1) p d_x^{j+1} b.
// f_i is an optional extra forcing (used for the w.d_phi conjugation).
struct Hierarchy {
    const DiffeoFamily& d;
    const CollocGrid& grid;
    int m, N;
    std::vector<CVec> p;  // grid values per level

    // forcing hook: level i, time tau -> grid values (or empty)
    std::function<CVec(int, double)> forcing;

    Hierarchy(const DiffeoFamily& dd, int mm, int NN)
        : d(dd), grid(dd.grid()), m(mm), N(NN), p(NN + 1) {
        for (auto& v : p) v = CVec::Zero(grid.size());
    }

    std::vector<CVec> rhs(const std::vector<CVec>& state, double tau) const {
        const Box& fbox = d.beta().box();
        CVec bv = d.b_values(tau);
        // x-derivatives of b up to order N+1
        TruncatedField bf = grid.field(bv, fbox);
        std::vector<CVec> dbv(N + 2);
        dbv[0] = bv;
        for (int k = 1; k <= N + 1; ++k) dbv[k] = grid.values(bf.dx(k));
        std::vector<CVec> out(N + 1);
        for (int i = 0; i <= N; ++i) {
            int q = m - i;
            TruncatedField pi = grid.field(state[i], fbox);
            CVec pix = grid.values(pi.dx(1));
            CVec acc(grid.size());
            for (int g = 0; g < grid.size(); ++g)
                acc[g] = bv[g] * pix[g] - (double)q * dbv[1][g] * state[i][g];
            for (int j = 1; j <= i; ++j) {
                int qq = m - i + j;
                double c = -binom(qq + 1, j + 1);
                if (c == 0.0) continue;
                for (int g = 0; g < grid.size(); ++g)
                    acc[g] += c * state[i - j][g] * dbv[j + 1][g];
            }
            if (forcing) {
                CVec f = forcing(i, tau);
                if (f.size() == acc.size()) acc += f;
            }
            out[i] = acc;
        }
        return out;
    }

    void march(int steps) {
        double h = 1.0 / steps;
        double t = 0.0;
        auto axpy = [&](const std::vector<CVec>& base, double c, const std::vector<CVec>& k) {
            std::vector<CVec> r(base.size());
            for (size_t i = 0; i < base.size(); ++i) r[i] = base[i] + c * k[i];
            return r;
        };
        for (int s = 0; s < steps; ++s) {
            auto k1 = rhs(p, t);
            auto k2 = rhs(axpy(p, h / 2, k1), t + h / 2);
            auto k3 = rhs(axpy(p, h / 2, k2), t + h / 2);
            auto k4 = rhs(axpy(p, h, k3), t + h);
            for (size_t i = 0; i < p.size(); ++i)
                p[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            t += h;
        }
    }
};

}  // namespace

Symbol EgorovExpansion::expansion_symbol() const {
    if (p.empty()) return Symbol();
    Symbol s(order, p[0].box());
    for (int i = 0; i < (int)p.size(); ++i) s.add_term(p[i], order - i, true);
    return s;
}

TruncatedField egorov_principal(const TruncatedField& a, int m, const DiffeoFamily& d) {
    const CollocGrid& grid = d.grid();
    CMat aslices = grid.phi_slices(a);
    CMat bslices = grid.phi_slices(d.beta());
    CMat brslices = grid.phi_slices(d.breve().dx(1));
    int np = grid.n_phi_total(), nx = grid.n_x();
    CVec vals(np * nx);
    for (int p = 0; p < np; ++p) {
        for (int g = 0; g < nx; ++g) {
            double x = grid.x_point(g);
            double y = x + std::real(grid.eval_slice(bslices, p, x));
            double breve_y = std::real(grid.eval_slice(brslices, p, y));
            double av = std::real(grid.eval_slice(aslices, p, y));
            vals[p + (Eigen::Index)g * np] = std::pow(1.0 + breve_y, m) * av;
        }
    }
    return grid.field(vals, a.box(), true);
}

EgorovExpansion egorov_expand_with_flow(const TruncatedField& a, int m, const DiffeoFamily& d,
                                        int N, const Box& box, const QPOperator& Phi,
                                        const QPOperator& Phinv, const EgorovOptions& opt) {
    EgorovExpansion out;
    out.order = m;
    out.gate_ok = d.sup_beta_x() < opt.beta_gate;

    Hierarchy h(d, m, N);
    h.p[0] = d.grid().values(a);
    h.march(opt.tau_steps);

    out.p.resize(N + 1, TruncatedField(a.box()));
    out.p[0] = egorov_principal(a, m, d);
    for (int i = 1; i <= N; ++i) out.p[i] = d.grid().field(h.p[i], a.box(), true);

    QPOperator P0 = quantize(Symbol::homogeneous(a, m), box);
    QPOperator conj(box, Phi.matrix() * P0.matrix() * Phinv.matrix());
    out.remainder = conj - quantize(out.expansion_symbol(), box);
    return out;
}

EgorovExpansion egorov_expand(const TruncatedField& a, int m, const DiffeoFamily& d, int N,
                              const Box& box, const EgorovOptions& opt) {
    QPOperator Phi = transport_flow_op(d, 0.0, 1.0, box, opt.flow);
    return egorov_expand_with_flow(a, m, d, N, box, Phi, Phi.inverse(), opt);
}

EgorovExpansion conjugate_omega_dphi(const DiffeoFamily& d, const Vec& omega, int N,
                                     const Box& box, const EgorovOptions& opt) {
    EgorovExpansion out;
    out.order = 1;
    out.gate_ok = d.sup_beta_x() < opt.beta_gate;
    const Box& fbox = d.beta().box();
    const CollocGrid& grid = d.grid();

    Hierarchy h(d, 1, N);
    // forcing -w.d_phi B1 = -(w.d_phi b) dx - (w.d_phi b_x): levels 0 and 1
    h.forcing = [&](int level, double tau) -> CVec {
        if (level > 1) return CVec();
        CVec bv = d.b_values(tau);
        TruncatedField bf = grid.field(bv, fbox);
        if (level == 0) return -1.0 * grid.values(bf.omega_dphi(omega));
        return -1.0 * grid.values(bf.dx(1).omega_dphi(omega));
    };
    h.march(opt.tau_steps);

    out.p.resize(N + 1, TruncatedField(fbox));
    for (int i = 0; i <= N; ++i) out.p[i] = grid.field(h.p[i], fbox, true);

    QPOperator Phi = transport_flow_op(d, 0.0, 1.0, box, opt.flow);
    QPOperator Phinv = Phi.inverse();
    QPOperator Dw = omega_dphi_op(box, omega);
    // Phi (w.d_phi Phi^{-1}) = Phi [D_w, Phi^{-1}] as box matrices
    QPOperator conj(box, Phi.matrix() * (Dw.matrix() * Phinv.matrix() -
                                         Phinv.matrix() * Dw.matrix()));
    out.remainder = conj - quantize(out.expansion_symbol(), box);
    return out;
}

MultiplierConjugation conjugate_multiplier(const std::vector<double>& c, int m,
                                           const QPOperator& Q_tail, const DiffeoFamily& d,
                                           int N, const Box& box, const EgorovOptions& opt) {
    MultiplierConjugation out;
    out.order = m;
    const Box& fbox = d.beta().box();
    out.alpha.assign(N + 1, TruncatedField(fbox));

    QPOperator Phi = transport_flow_op(d, 0.0, 1.0, box, opt.flow);
    QPOperator Phinv = Phi.inverse();

    Symbol qsym(m, fbox);
    for (int n = 0; n < (int)c.size(); ++n)
        qsym.add_term(constant_field(fbox, c[n]), m - n, true);

    for (int n = 0; n < (int)c.size() && n <= N; ++n) {
        if (c[n] == 0.0) continue;
        auto exp_n = egorov_expand_with_flow(constant_field(fbox, c[n]), m - n, d, N - n, box,
                                             Phi, Phinv, opt);
        for (int i = 0; i + n <= N && i < (int)exp_n.p.size(); ++i) {
            TruncatedField contrib = exp_n.p[i];
            if (i == 0) contrib -= constant_field(fbox, c[n]);  // split off Q itself
            out.alpha[n + i] += contrib;
        }
    }

    Symbol alpha_sym(m, fbox);
    for (int r = 0; r <= N; ++r) alpha_sym.add_term(out.alpha[r], m - r, true);

    QPOperator Q = quantize(qsym, box) + Q_tail;
    QPOperator conj(box, Phi.matrix() * Q.matrix() * Phinv.matrix());
    out.remainder = conj - Q - quantize(alpha_sym, box);
    return out;
}

}  // namespace qpkam
