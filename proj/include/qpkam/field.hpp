// field.hpp — truncated Fourier representation of functions on T^{S+} x T_1,
// Sobolev norms, smoothing projectors, and the diophantine inverse of w.d_phi.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpkam/box.hpp"

namespace qpkam {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double TWO_PI = 6.283185307179586476925286766559;

struct SmallDivisorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolvabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvertOptions {
    double gamma = 1.0;
    double divisor_floor_factor = 1e-13;  // floor = factor * gamma
    double zero_average_tol = 1e-12;      // relative to |u|
};

// u(phi,x) = sum_{(l,j) in box} u_{l,j} e^{i(l.phi + 2 pi j x)}
class TruncatedField {
public:
    TruncatedField() = default;
    explicit TruncatedField(const Box& box, bool real = false)
        : box_(box), coeffs_(CVec::Zero(box.size())), real_(real) {}
    TruncatedField(const Box& box, CVec coeffs, bool real = false)
        : box_(box), coeffs_(std::move(coeffs)), real_(real) {
        if (coeffs_.size() != box_.size()) throw std::invalid_argument("TruncatedField: size mismatch");
        if (real_) enforce_reality();
    }

    const Box& box() const { return box_; }
    const CVec& coeffs() const { return coeffs_; }
    CVec& coeffs() { return coeffs_; }
    bool is_real_flagged() const { return real_; }

    Complex coeff(const MultiIndex& ell, int j) const {
        return box_.contains(ell, j) ? coeffs_[box_.index(ell, j)] : Complex(0.0);
    }
    void set_coeff(const MultiIndex& ell, int j, Complex v) {
        coeffs_[box_.index(ell, j)] = v;
        if (real_) {
            MultiIndex mell(ell.size());
            for (size_t d = 0; d < ell.size(); ++d) mell[d] = -ell[d];
            if (box_.contains(mell, -j)) coeffs_[box_.index(mell, -j)] = std::conj(v);
        }
    }

    // conj(u_{l,j}) = u_{-l,-j}; symmetrize and report the defect
    double enforce_reality();
    double reality_defect() const;

    bool finite() const { return coeffs_.allFinite(); }

    TruncatedField& operator+=(const TruncatedField& o);
    TruncatedField& operator-=(const TruncatedField& o);
    TruncatedField& operator*=(Complex c);
    friend TruncatedField operator+(TruncatedField a, const TruncatedField& b) { return a += b; }
    friend TruncatedField operator-(TruncatedField a, const TruncatedField& b) { return a -= b; }
    friend TruncatedField operator*(Complex c, TruncatedField a) { return a *= c; }

    // ( sum |u_{l,j}|^2 <l,j>^{2s} )^{1/2}; s<0 requires allow_dual
    double sobolev_norm(double s, bool allow_dual = false) const;

    // ball projector Pi_N: keep modes with <l,j> <= N
    TruncatedField project(int N) const;
    TruncatedField project_complement(int N) const;

    // v with v_{l,j} = u_{l,j} / (i w.l) on l != 0; errors on nonzero l=0 modes
    TruncatedField invert_omega_dphi(const Vec& omega,
                                     const InvertOptions& opt = InvertOptions()) const;

    TruncatedField omega_dphi(const Vec& omega) const;  // w.d_phi u
    TruncatedField dx(int order = 1) const;             // multiply by (i 2 pi j)^order, j=0 -> 0
    TruncatedField dx_inv(int order = 1) const { return dx(-order); }
    TruncatedField dphi(int m) const;                   // multiply by i l_m

    Complex average() const;       // (0,0) coefficient
    TruncatedField x_average() const;  // keep only j=0 content as a phi-only field
    TruncatedField conjugate_field() const;
    TruncatedField majorant() const;  // |u_{l,j}|

    // pointwise product, result truncated back to the box
    TruncatedField multiply(const TruncatedField& other) const;

    // embed/restrict between boxes with the same dim (copies overlapping modes)
    TruncatedField to_box(const Box& target) const;

private:
    Box box_;
    CVec coeffs_;
    bool real_ = false;
};

TruncatedField constant_field(const Box& box, Complex value);
TruncatedField single_mode(const Box& box, const MultiIndex& ell, int j, Complex value);

// --------------------------- collocation grid -------------------------------

// Equispaced grid phi_g = 2 pi g / n_phi (per dim), x_g = g / n_x. Defaults are
// 2x oversampled so products of two box fields transform back exactly.
class CollocGrid {
public:
    CollocGrid() = default;
    CollocGrid(const Box& box, int oversample = 2);

    const Box& box() const { return box_; }
    int n_phi_per_dim() const { return nphi_; }
    int n_phi_total() const { return nphi_total_; }
    int n_x() const { return nx_; }
    int size() const { return nphi_total_ * nx_; }

    std::vector<double> phi_point(int phi_rank) const;  // length dim
    double x_point(int xg) const { return (double)xg / nx_; }

    CVec values(const TruncatedField& u) const;          // coeffs -> grid values
    TruncatedField field(const CVec& vals, const Box& target, bool real = false) const;

    // per phi-slice x-mode coefficients: (nphi_total x n_space_modes(full j))
    CMat phi_slices(const TruncatedField& u) const;

    // evaluate a phi-slice (row of phi_slices) at arbitrary x
    Complex eval_slice(const CMat& slices, int phi_rank, double x) const;

    // pointwise map on grid values
    TruncatedField map_pointwise(const TruncatedField& u,
                                 const std::function<Complex(Complex)>& f,
                                 bool real = false) const;

private:
    Box box_;
    int nphi_ = 1, nphi_total_ = 1, nx_ = 1;
    CMat dft_phi_;      // (nphi x (2L+1)) forward factors per dim (shared)
    CMat dft_x_;        // (nx x n_space)
    CMat idft_phi_;     // ((2L+1) x nphi) inverse
    CMat idft_x_;       // (n_space x nx)
    std::vector<int> xmodes_;
};

}  // namespace qpkam
