// symbol.hpp — pseudo-differential symbols with homogeneous expansions
// a(phi,x,xi) = sum_k a_{m-k}(phi,x) (i 2 pi xi)^{m-k} [chi0(xi)].

#pragma once

#include <vector>

#include "qpkam/field.hpp"

namespace qpkam {

// Fixed even C^2 cutoff: 0 on |t|<=1/2, 1 on |t|>=2/3, monotone in between.
// Only integer arguments matter for quantization: chi0(0)=0, chi0(j)=1 for |j|>=1.
double chi0(double t);

struct SymbolComponent {
    TruncatedField coeff;
    bool cutoff = true;  // multiply by chi0(xi); mandatory for negative exponents
};

class Symbol {
public:
    Symbol() = default;
    Symbol(int order, const Box& field_box) : order_(order), box_(field_box) {}

    // multiplication operator by a(phi,x): order 0, no cutoff
    static Symbol multiplication(const TruncatedField& a);
    // chi0(xi) (i 2 pi xi)^m, the d_x^m convention (d_x^m[1] = 0)
    static Symbol dx_power(const Box& field_box, int m);
    // a(phi,x) d_x^m; carries the cutoff so that the j=0 column vanishes
    static Symbol homogeneous(const TruncatedField& a, int m);

    int order() const { return order_; }
    const Box& field_box() const { return box_; }
    int n_components() const { return (int)comps_.size(); }
    // component at exponent order-k; extends with zero fields on demand
    SymbolComponent& component(int k);
    const TruncatedField& coeff(int k) const { return comps_[k].coeff; }
    bool cutoff_flag(int k) const { return comps_[k].cutoff; }
    bool has_component(int k) const { return k >= 0 && k < (int)comps_.size(); }

    void add_term(const TruncatedField& c, int exponent, bool cutoff_flag);
    void drop_below(int min_exponent);  // discard components of lower order

    bool is_zero(double tol = 0.0) const;

    // scalar weight of component k at integer xi (chi0 and power factor)
    Complex xi_weight(int k, int xi) const;
    // the field a(.,.,xi) at frozen integer xi
    TruncatedField field_at_xi(int xi) const;
    // exact per-component xi-derivative (valid at |xi|>=1); order drops by beta
    Symbol xi_derivative(int beta) const;
    Symbol x_derivative(int beta) const;

    Symbol& operator+=(const Symbol& o);
    Symbol& operator*=(Complex c);
    friend Symbol operator+(Symbol a, const Symbol& b) { return a += b; }
    friend Symbol operator*(Complex c, Symbol a) { return a *= c; }
    Symbol operator-() const;

    // largest |coefficient| over all components (diagnostic)
    double max_abs_coeff() const;

private:
    int order_ = 0;
    Box box_;
    std::vector<SymbolComponent> comps_;
};

}  // namespace qpkam
