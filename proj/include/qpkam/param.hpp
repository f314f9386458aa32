// param.hpp — families of quantities over a finite frequency grid, Lip(gamma)
// norms, and diophantine frequency checks.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qpkam/field.hpp"

namespace qpkam {

struct DiophantineParams {
    double gamma = 0.01;   // in (0,1)
    double tau = 4.0;      // > |S+| + 2
    int Lmax = 20;         // exhaustive scan cutoff

    void validate(int dim) const {
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("DiophantineParams: gamma in (0,1)");
        if (!(tau > dim + 2)) throw std::invalid_argument("DiophantineParams: tau must exceed |S+|+2");
        if (Lmax < 1) throw std::invalid_argument("DiophantineParams: Lmax >= 1");
    }
};

// scan all 0 < |l|_inf <= Lmax for |w.l| >= gamma / |l|^tau
bool is_diophantine(const Vec& omega, const DiophantineParams& dc);

// least |w.l| * |l|^tau over the scan window (the largest admissible gamma)
double diophantine_margin(const Vec& omega, double tau, int Lmax);

// quantity sampled over a finite grid of frequency vectors
template <class T>
class ParamFamily {
public:
    ParamFamily() = default;
    explicit ParamFamily(double gamma) : gamma_(gamma) {}

    void add(const Vec& omega, T value) {
        grid_.push_back(omega);
        values_.push_back(std::move(value));
    }
    int size() const { return (int)grid_.size(); }
    const Vec& omega(int i) const { return grid_[i]; }
    const T& value(int i) const { return values_[i]; }
    T& value(int i) { return values_[i]; }
    double gamma() const { return gamma_; }
    void set_gamma(double g) { gamma_ = g; }

    template <class F>
    auto map(F&& f) const {
        using U = decltype(f(values_[0]));
        ParamFamily<U> out(gamma_);
        for (int i = 0; i < size(); ++i) out.add(grid_[i], f(values_[i]));
        return out;
    }

private:
    double gamma_ = 0.0;
    std::vector<Vec> grid_;
    std::vector<T> values_;
};

// sup_w norm(f(w)) + gamma * sup_{w1 != w2} norm(f(w1)-f(w2)) / |w1-w2|.
// All pairs when the grid has <= 32 points, nearest-neighbour pairs otherwise.
double lipg_norm(const ParamFamily<TruncatedField>& f, double s);
double lipg_norm_scalar(const ParamFamily<double>& f);

}  // namespace qpkam
