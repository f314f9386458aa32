#include "qpkam/symbol.hpp"

#include <cmath>

namespace qpkam {

double chi0(double t) {
    double a = std::abs(t);
    if (a <= 0.5) return 0.0;
    if (a >= 2.0 / 3.0) return 1.0;
    double s = (a - 0.5) * 6.0;  // band width 1/6
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

Symbol Symbol::multiplication(const TruncatedField& a) {
    Symbol s(0, a.box());
    s.comps_.push_back({a, false});
    return s;
}

Symbol Symbol::dx_power(const Box& field_box, int m) {
    Symbol s(m, field_box);
    s.comps_.push_back({constant_field(field_box, 1.0), true});
    return s;
}

Symbol Symbol::homogeneous(const TruncatedField& a, int m) {
    Symbol s(m, a.box());
    s.comps_.push_back({a, true});
    return s;
}

SymbolComponent& Symbol::component(int k) {
    while ((int)comps_.size() <= k)
        comps_.push_back({TruncatedField(box_), order_ - (int)comps_.size() < 0});
    return comps_[k];
}

void Symbol::add_term(const TruncatedField& c, int exponent, bool cutoff_flag) {
    if (exponent > order_) {
        int shift = exponent - order_;
        std::vector<SymbolComponent> fresh;
        for (int k = 0; k < shift; ++k) fresh.push_back({TruncatedField(box_), true});
        for (auto& cc : comps_) fresh.push_back(std::move(cc));
        comps_ = std::move(fresh);
        order_ = exponent;
    }
    int k = order_ - exponent;
    auto& comp = component(k);
    comp.coeff += c;
    comp.cutoff = comp.cutoff || cutoff_flag;
}

void Symbol::drop_below(int min_exponent) {
    int keep = order_ - min_exponent + 1;
    if (keep < 0) keep = 0;
    if ((int)comps_.size() > keep) comps_.resize(keep);
}

bool Symbol::is_zero(double tol) const {
    for (const auto& c : comps_)
        if (c.coeff.coeffs().size() > 0 && c.coeff.coeffs().cwiseAbs().maxCoeff() > tol)
            return false;
    return true;
}

Complex Symbol::xi_weight(int k, int xi) const {
    int q = order_ - k;
    double cut = comps_[k].cutoff ? chi0((double)xi) : 1.0;
    if (xi == 0) return (q == 0) ? Complex(cut) : Complex(0.0);
    return cut * std::pow(Complex(0.0, TWO_PI * xi), q);
}

TruncatedField Symbol::field_at_xi(int xi) const {
    TruncatedField out(box_);
    for (int k = 0; k < (int)comps_.size(); ++k) {
        Complex w = xi_weight(k, xi);
        if (w != Complex(0.0)) out += w * comps_[k].coeff;
    }
    return out;
}

namespace {
double falling(int q, int beta) {
    double p = 1.0;
    for (int i = 0; i < beta; ++i) p *= (double)(q - i);
    return p;
}
}  // namespace

Symbol Symbol::xi_derivative(int beta) const {
    Symbol out(order_ - beta, box_);
    for (int k = 0; k < (int)comps_.size(); ++k) {
        double f = falling(order_ - k, beta);
        if (f == 0.0) continue;
        out.add_term(f * std::pow(Complex(0.0, TWO_PI), beta) * comps_[k].coeff,
                     order_ - k - beta, comps_[k].cutoff);
    }
    return out;
}

Symbol Symbol::x_derivative(int beta) const {
    Symbol out(order_, box_);
    for (int k = 0; k < (int)comps_.size(); ++k)
        out.add_term(comps_[k].coeff.dx(beta), order_ - k, comps_[k].cutoff);
    return out;
}

Symbol& Symbol::operator+=(const Symbol& o) {
    if (box_.size() == 0) {
        *this = o;
        return *this;
    }
    for (int k = 0; k < (int)o.comps_.size(); ++k)
        add_term(o.comps_[k].coeff, o.order_ - k, o.comps_[k].cutoff);
    return *this;
}

Symbol& Symbol::operator*=(Complex c) {
    for (auto& comp : comps_) comp.coeff *= c;
    return *this;
}

Symbol Symbol::operator-() const {
    Symbol out = *this;
    out *= Complex(-1.0);
    return out;
}

double Symbol::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : comps_)
        if (c.coeff.coeffs().size() > 0)
            m = std::max(m, c.coeff.coeffs().cwiseAbs().maxCoeff());
    return m;
}

}  // namespace qpkam
