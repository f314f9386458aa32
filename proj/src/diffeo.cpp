#include "qpkam/diffeo.hpp"

#include <cmath>

namespace qpkam {

DiffeoFamily::DiffeoFamily(const TruncatedField& beta, const DiffeoOptions& opt)
    : beta_(beta), grid_(beta.box(), opt.oversample), opt_(opt) {
    beta_vals_ = grid_.values(beta_);
    betax_vals_ = grid_.values(beta_.dx(1));
    sup_bx_ = betax_vals_.cwiseAbs().maxCoeff();
    if (sup_bx_ >= 1.0)
        throw NonInvertibleError("DiffeoFamily: sup|beta_x| = " + std::to_string(sup_bx_));
    beta_slices_ = grid_.phi_slices(beta_);
    phi_indep_ = true;
    for (int i = 0; i < beta_.coeffs().size() && phi_indep_; ++i) {
        auto [l, j] = beta_.box().mode(i);
        if (linf(l) > 0 && std::abs(beta_.coeffs()[i]) > 1e-15) phi_indep_ = false;
    }
    breve_table_.resize(opt.breve_table + 1);
    breve1_ = table_entry(opt.breve_table);
}

TruncatedField DiffeoFamily::newton_inverse(double tau) const {
    int np = grid_.n_phi_total(), nx = grid_.n_x();
    const auto& jm = beta_.box().space_modes();
    int ns = (int)jm.size();
    CVec vals(np * nx);
    int np_eff = phi_indep_ ? 1 : np;
    for (int p = 0; p < np_eff; ++p) {
        for (int g = 0; g < nx; ++g) {
            double y = grid_.x_point(g);
            double x = y;
            bool done = false;
            for (int it = 0; it < opt_.max_iter; ++it) {
                Complex bv(0.0), bxv(0.0);
                for (int m = 0; m < ns; ++m) {
                    Complex ph = std::polar(1.0, TWO_PI * jm[m] * x);
                    bv += beta_slices_(p, m) * ph;
                    bxv += beta_slices_(p, m) * Complex(0.0, TWO_PI * jm[m]) * ph;
                }
                double res = x + tau * std::real(bv) - y;
                if (std::abs(res) < opt_.tol) {
                    done = true;
                    break;
                }
                x -= res / (1.0 + tau * std::real(bxv));
            }
            if (!done)
                throw NonInvertibleError("DiffeoFamily: Newton stalled at tau = " +
                                         std::to_string(tau));
            vals[p + (Eigen::Index)g * np] = x - y;
        }
        if (phi_indep_)
            for (int q = 1; q < np; ++q)
                for (int g = 0; g < nx; ++g)
                    vals[q + (Eigen::Index)g * np] = vals[0 + (Eigen::Index)g * np];
    }
    return grid_.field(vals, beta_.box(), true);
}

const TruncatedField& DiffeoFamily::table_entry(int k) const {
    if (!breve_table_[k]) {
        double tau = (double)k / opt_.breve_table;
        breve_table_[k] = std::make_unique<TruncatedField>(newton_inverse(tau));
    }
    return *breve_table_[k];
}

TruncatedField DiffeoFamily::breve_at(double tau) const {
    if (tau <= 0.0) return TruncatedField(beta_.box(), true);
    int nt = opt_.breve_table;
    double s = tau * nt;
    int k = (int)std::floor(s + 0.5);
    if (k >= 0 && k <= nt && std::abs(s - k) < 1e-12) return table_entry(k);
    // 6-point Lagrange interpolation in tau
    int k0 = std::clamp((int)std::floor(s) - 2, 0, nt - 5);
    TruncatedField out(beta_.box(), true);
    for (int a = 0; a < 6; ++a) {
        double w = 1.0;
        for (int b = 0; b < 6; ++b)
            if (b != a) w *= (s - (k0 + b)) / (double)(a - b);
        out += Complex(w) * table_entry(k0 + a);
    }
    return out;
}

CMat DiffeoFamily::breve_slices(double tau) const { return grid_.phi_slices(breve_at(tau)); }
CMat DiffeoFamily::breve_dy_slices(double tau) const {
    return grid_.phi_slices(breve_at(tau).dx(1));
}

CVec DiffeoFamily::b_values(double tau) const {
    CVec out(beta_vals_.size());
    for (int i = 0; i < beta_vals_.size(); ++i)
        out[i] = beta_vals_[i] / (1.0 + tau * betax_vals_[i]);
    return out;
}

TruncatedField DiffeoFamily::b_field(double tau) const {
    return grid_.field(b_values(tau), beta_.box(), true);
}

void DiffeoFamily::characteristic_values(double a, double b, CVec& gamma, CVec& dgamma) const {
    int np = grid_.n_phi_total(), nx = grid_.n_x();
    CMat brs = breve_slices(b);
    CMat brds = breve_dy_slices(b);
    const auto& jm = beta_.box().space_modes();
    int ns = (int)jm.size();
    gamma.resize(np * nx);
    dgamma.resize(np * nx);
    for (int p = 0; p < np; ++p) {
        for (int g = 0; g < nx; ++g) {
            Eigen::Index idx = p + (Eigen::Index)g * np;
            double x = grid_.x_point(g);
            double shift = x + a * std::real(beta_vals_[idx]);
            Complex br(0.0), brd(0.0);
            for (int m = 0; m < ns; ++m) {
                Complex ph = std::polar(1.0, TWO_PI * jm[m] * shift);
                br += brs(p, m) * ph;
                brd += brds(p, m) * ph;
            }
            gamma[idx] = shift + std::real(br);
            dgamma[idx] = (1.0 + a * std::real(betax_vals_[idx])) * (1.0 + std::real(brd));
        }
    }
}

double DiffeoFamily::eval_beta(const std::vector<double>& phi, double x) const {
    Complex acc(0.0);
    const Box& box = beta_.box();
    for (int i = 0; i < beta_.coeffs().size(); ++i) {
        Complex c = beta_.coeffs()[i];
        if (c == Complex(0.0)) continue;
        auto [l, j] = box.mode(i);
        double ang = TWO_PI * j * x;
        for (int d = 0; d < box.dim(); ++d) ang += l[d] * phi[d];
        acc += c * std::polar(1.0, ang);
    }
    return std::real(acc);
}

double DiffeoFamily::eval_breve(double tau, const std::vector<double>& phi, double x) const {
    TruncatedField br = breve_at(tau);
    Complex acc(0.0);
    const Box& box = br.box();
    for (int i = 0; i < br.coeffs().size(); ++i) {
        Complex c = br.coeffs()[i];
        if (c == Complex(0.0)) continue;
        auto [l, j] = box.mode(i);
        double ang = TWO_PI * j * x;
        for (int d = 0; d < box.dim(); ++d) ang += l[d] * phi[d];
        acc += c * std::polar(1.0, ang);
    }
    return std::real(acc);
}

double DiffeoFamily::characteristic(double tau0, double tau, const std::vector<double>& phi,
                                    double x) const {
    double shift = x + tau0 * eval_beta(phi, x);
    return shift + eval_breve(tau, phi, shift);
}

