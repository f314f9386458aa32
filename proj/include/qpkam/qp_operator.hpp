// qp_operator.hpp — dense matrices over a truncation box, identified with the
// phi-Toeplitz block representation A_j^{j'}(l - l') where applicable.

#pragma once

#include <functional>
#include <string>

#include "qpkam/field.hpp"

namespace qpkam {

struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StructureReport {
    bool real = false;
    bool self_adjoint = false;
    bool hamiltonian_kernel = false;
    double real_defect = 0.0;
    double self_adjoint_defect = 0.0;
    double hamiltonian_defect = 0.0;
};

class QPOperator {
public:
    QPOperator() = default;
    explicit QPOperator(const Box& box) : box_(box), M_(CMat::Zero(box.size(), box.size())) {}
    QPOperator(const Box& box, CMat m) : box_(box), M_(std::move(m)) {
        if (M_.rows() != box_.size() || M_.cols() != box_.size())
            throw std::invalid_argument("QPOperator: matrix/box size mismatch");
    }

    const Box& box() const { return box_; }
    const CMat& matrix() const { return M_; }
    CMat& matrix() { return M_; }
    int size() const { return (int)M_.rows(); }

    Complex entry(const MultiIndex& lrow, int jrow, const MultiIndex& lcol, int jcol) const {
        return M_(box_.index(lrow, jrow), box_.index(lcol, jcol));
    }

    // Toeplitz coefficient A_j^{j'}(ld): average over admissible column phi-modes
    Complex toeplitz_entry(int jrow, int jcol, const MultiIndex& ld) const;

    TruncatedField apply(const TruncatedField& u) const;

    QPOperator& operator+=(const QPOperator& o);
    QPOperator& operator-=(const QPOperator& o);
    QPOperator& operator*=(Complex c);
    friend QPOperator operator+(QPOperator a, const QPOperator& b) { return a += b; }
    friend QPOperator operator-(QPOperator a, const QPOperator& b) { return a -= b; }
    friend QPOperator operator*(Complex c, QPOperator a) { return a *= c; }
    QPOperator operator*(const QPOperator& o) const;

    QPOperator inverse(double cond_bound = 1e8) const;
    QPOperator adjoint() const { return QPOperator(box_, M_.adjoint()); }

    // def:maj transforms
    QPOperator majorant() const;
    QPOperator smooth(int N) const;            // zero entries with <l-l'> > N
    QPOperator smooth_complement(int N) const;
    QPOperator phi_weight(double b) const;     // entries *= <l-l'>^b
    QPOperator dphi(int m) const;              // entries *= i (l-l')_m

    StructureReport structure_check(double tol = 1e-10) const;

    double frobenius() const { return M_.norm(); }
    double max_abs() const { return M_.size() ? M_.cwiseAbs().maxCoeff() : 0.0; }
    // power-iteration estimate of the operator norm H^s -> H^s
    double op_norm(double s = 0.0, int iters = 30) const;

private:
    Box box_;
    CMat M_;
};

QPOperator identity_op(const Box& box);
// diag over modes: f(ell, j)
QPOperator diagonal_op(const Box& box, const std::function<Complex(const MultiIndex&, int)>& f);
// diag(i w.l), the matrix of w.d_phi on the box
QPOperator omega_dphi_op(const Box& box, const Vec& omega);
// Fourier multiplier diag(g(j))
QPOperator multiplier_op(const Box& box, const std::function<Complex(int)>& g);
// projector onto modes with j not in {0} U S U -S (identity on perp boxes)
QPOperator perp_projector(const Box& box);

// U A U^{-1}; throws IllConditionedError when rcond(U) < 1/cond_bound
QPOperator conjugate(const QPOperator& A, const QPOperator& U, double cond_bound = 1e8);

// matrix exponential (scaling-and-squaring Pade)
QPOperator exp_op_matrix(const QPOperator& A);

// W(u,v) = integral (dx^{-1}u) v dx on zero-average functions
Complex symplectic_pairing(const TruncatedField& u, const TruncatedField& v);

}  // namespace qpkam
