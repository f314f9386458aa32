#include "qpkam/qp_operator.hpp"

#include <Eigen/LU>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace qpkam {

namespace {
MultiIndex negate(const MultiIndex& l) {
    MultiIndex m(l.size());
    for (size_t d = 0; d < l.size(); ++d) m[d] = -l[d];
    return m;
}
}  // namespace

Complex QPOperator::toeplitz_entry(int jrow, int jcol, const MultiIndex& ld) const {
    Complex acc(0.0);
    int count = 0;
    int np = box_.n_phi_modes();
    for (int pc = 0; pc < np; ++pc) {
        MultiIndex lc = box_.phi_mode(pc);
        MultiIndex lr(lc.size());
        for (size_t d = 0; d < lc.size(); ++d) lr[d] = lc[d] + ld[d];
        if (linf(lr) > box_.L()) continue;
        acc += M_(box_.index(lr, jrow), box_.index(lc, jcol));
        ++count;
    }
    return count ? acc / (double)count : Complex(0.0);
}

TruncatedField QPOperator::apply(const TruncatedField& u) const {
    if (!box_.same_shape(u.box())) throw std::invalid_argument("QPOperator::apply: box mismatch");
    return TruncatedField(box_, M_ * u.coeffs());
}

QPOperator& QPOperator::operator+=(const QPOperator& o) {
    if (!box_.same_shape(o.box_)) throw std::invalid_argument("QPOperator +=: box mismatch");
    M_ += o.M_;
    return *this;
}
QPOperator& QPOperator::operator-=(const QPOperator& o) {
    if (!box_.same_shape(o.box_)) throw std::invalid_argument("QPOperator -=: box mismatch");
    M_ -= o.M_;
    return *this;
}
QPOperator& QPOperator::operator*=(Complex c) {
    M_ *= c;
    return *this;
}
QPOperator QPOperator::operator*(const QPOperator& o) const {
    if (!box_.same_shape(o.box_)) throw std::invalid_argument("QPOperator *: box mismatch");
    return QPOperator(box_, M_ * o.M_);
}

QPOperator QPOperator::inverse(double cond_bound) const {
    Eigen::PartialPivLU<CMat> lu(M_);
    double rc = lu.rcond();
    if (!(rc > 1.0 / cond_bound))
        throw IllConditionedError("QPOperator::inverse: rcond = " + std::to_string(rc));
    return QPOperator(box_, lu.inverse());
}

QPOperator QPOperator::majorant() const {
    return QPOperator(box_, M_.cwiseAbs().cast<Complex>());
}

QPOperator QPOperator::smooth(int N) const {
    QPOperator out(box_, M_);
    int n = size();
    for (int r = 0; r < n; ++r) {
        auto [lr, jr] = box_.mode(r);
        for (int c = 0; c < n; ++c) {
            auto [lc, jc] = box_.mode(c);
            int w = 1;
            for (int d = 0; d < box_.dim(); ++d) w = std::max(w, std::abs(lr[d] - lc[d]));
            if (w > N) out.M_(r, c) = 0.0;
        }
    }
    return out;
}

QPOperator QPOperator::smooth_complement(int N) const {
    QPOperator s = smooth(N);
    return QPOperator(box_, M_ - s.M_);
}

QPOperator QPOperator::phi_weight(double b) const {
    QPOperator out(box_, M_);
    int n = size();
    for (int r = 0; r < n; ++r) {
        auto [lr, jr] = box_.mode(r);
        for (int c = 0; c < n; ++c) {
            auto [lc, jc] = box_.mode(c);
            int w = 1;
            for (int d = 0; d < box_.dim(); ++d) w = std::max(w, std::abs(lr[d] - lc[d]));
            out.M_(r, c) *= std::pow((double)w, b);
        }
    }
    return out;
}

QPOperator QPOperator::dphi(int m) const {
    if (m < 0 || m >= box_.dim()) throw std::invalid_argument("dphi: bad direction");
    QPOperator out(box_, M_);
    int n = size();
    for (int r = 0; r < n; ++r) {
        auto [lr, jr] = box_.mode(r);
        for (int c = 0; c < n; ++c) {
            auto [lc, jc] = box_.mode(c);
            out.M_(r, c) *= Complex(0.0, (double)(lr[m] - lc[m]));
        }
    }
    return out;
}

StructureReport QPOperator::structure_check(double tol) const {
    StructureReport rep;
    int n = size();
    double scale = std::max(1.0, max_abs());
    double dre = 0.0, dsa = 0.0;
    for (int r = 0; r < n; ++r) {
        auto [lr, jr] = box_.mode(r);
        int rneg = box_.index(negate(lr), -jr);
        for (int c = 0; c < n; ++c) {
            auto [lc, jc] = box_.mode(c);
            int cneg = box_.index(negate(lc), -jc);
            dre = std::max(dre, std::abs(std::conj(M_(r, c)) - M_(rneg, cneg)));
            dsa = std::max(dsa, std::abs(std::conj(M_(r, c)) - M_(c, r)));
        }
    }
    rep.real_defect = dre / scale;
    rep.self_adjoint_defect = dsa / scale;
    rep.real = rep.real_defect <= tol;
    rep.self_adjoint = rep.self_adjoint_defect <= tol;

    // X = d_x G with G real and self-adjoint; rows at j=0 must vanish
    double dham = 0.0;
    bool form_ok = true;
    CMat G = CMat::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        auto [lr, jr] = box_.mode(r);
        if (jr == 0) {
            double rowmax = M_.row(r).cwiseAbs().maxCoeff();
            if (rowmax > tol * scale) form_ok = false;
            continue;
        }
        G.row(r) = M_.row(r) / Complex(0.0, TWO_PI * jr);
    }
    if (form_ok) {
        for (int r = 0; r < n; ++r) {
            auto [lr, jr] = box_.mode(r);
            if (jr == 0) continue;
            int rneg = box_.index(negate(lr), -jr);
            for (int c = 0; c < n; ++c) {
                auto [lc, jc] = box_.mode(c);
                if (jc == 0) continue;
                int cneg = box_.index(negate(lc), -jc);
                dham = std::max(dham, std::abs(std::conj(G(r, c)) - G(c, r)));
                dham = std::max(dham, std::abs(std::conj(G(r, c)) - G(rneg, cneg)));
            }
        }
        rep.hamiltonian_defect = dham / scale;
        rep.hamiltonian_kernel = rep.hamiltonian_defect <= tol;
    } else {
        rep.hamiltonian_defect = 1.0;
        rep.hamiltonian_kernel = false;
    }
    return rep;
}

double QPOperator::op_norm(double s, int iters) const {
    int n = size();
    if (n == 0) return 0.0;
    CMat B = M_;
    if (s != 0.0) {
        for (int r = 0; r < n; ++r) {
            double wr = std::pow((double)box_.weight(r), s);
            for (int c = 0; c < n; ++c)
                B(r, c) *= wr / std::pow((double)box_.weight(c), s);
        }
    }
    CVec v = CVec::Ones(n) / std::sqrt((double)n);
    for (int it = 0; it < iters; ++it) {
        CVec z = B.adjoint() * (B * v);
        double zn = z.norm();
        if (zn == 0.0) return 0.0;
        v = z / zn;
    }
    return (B * v).norm();
}

QPOperator identity_op(const Box& box) {
    return QPOperator(box, CMat::Identity(box.size(), box.size()));
}

QPOperator diagonal_op(const Box& box, const std::function<Complex(const MultiIndex&, int)>& f) {
    QPOperator out(box);
    for (int i = 0; i < box.size(); ++i) {
        auto [l, j] = box.mode(i);
        out.matrix()(i, i) = f(l, j);
    }
    return out;
}

QPOperator omega_dphi_op(const Box& box, const Vec& omega) {
    return diagonal_op(box, [&](const MultiIndex& l, int) {
        double wl = 0.0;
        for (int d = 0; d < box.dim(); ++d) wl += omega[d] * l[d];
        return Complex(0.0, wl);
    });
}

QPOperator multiplier_op(const Box& box, const std::function<Complex(int)>& g) {
    return diagonal_op(box, [&](const MultiIndex&, int j) { return g(j); });
}

QPOperator perp_projector(const Box& box) {
    return diagonal_op(box, [&](const MultiIndex&, int j) {
        if (j == 0) return Complex(0.0);
        for (int s : box.tangential_sites())
            if (std::abs(j) == s) return Complex(0.0);
        return Complex(1.0);
    });
}

QPOperator conjugate(const QPOperator& A, const QPOperator& U, double cond_bound) {
    QPOperator Uinv = U.inverse(cond_bound);
    return QPOperator(A.box(), U.matrix() * A.matrix() * Uinv.matrix());
}

QPOperator exp_op_matrix(const QPOperator& A) {
    return QPOperator(A.box(), A.matrix().exp());
}

Complex symplectic_pairing(const TruncatedField& u, const TruncatedField& v) {
    const Box& box = u.box();
    Complex acc(0.0);
    for (int i = 0; i < u.coeffs().size(); ++i) {
        auto [l, j] = box.mode(i);
        if (j == 0) continue;
        MultiIndex ml(l.size());
        for (size_t d = 0; d < l.size(); ++d) ml[d] = -l[d];
        if (!box.contains(ml, -j)) continue;
        acc += u.coeffs()[i] / Complex(0.0, TWO_PI * j) * v.coeffs()[box.index(ml, -j)];
    }
    return acc;
}

}  // namespace qpkam
