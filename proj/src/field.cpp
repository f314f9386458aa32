#include "qpkam/field.hpp"
#include "qpkam/param.hpp"

#include <cmath>
#include <limits>

namespace qpkam {

double TruncatedField::enforce_reality() {
    double defect = reality_defect();
    CVec sym(coeffs_.size());
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        MultiIndex mell(ell.size());
        for (size_t d = 0; d < ell.size(); ++d) mell[d] = -ell[d];
        Complex mirror = box_.contains(mell, -j) ? coeffs_[box_.index(mell, -j)] : Complex(0.0);
        sym[i] = 0.5 * (coeffs_[i] + std::conj(mirror));
    }
    coeffs_ = sym;
    real_ = true;
    return defect;
}

double TruncatedField::reality_defect() const {
    double d = 0.0;
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        MultiIndex mell(ell.size());
        for (size_t dd = 0; dd < ell.size(); ++dd) mell[dd] = -ell[dd];
        Complex mirror = box_.contains(mell, -j) ? coeffs_[box_.index(mell, -j)] : Complex(0.0);
        d = std::max(d, std::abs(coeffs_[i] - std::conj(mirror)));
    }
    return d;
}

TruncatedField& TruncatedField::operator+=(const TruncatedField& o) {
    if (!box_.same_shape(o.box_)) throw std::invalid_argument("field +=: box mismatch");
    coeffs_ += o.coeffs_;
    real_ = real_ && o.real_;
    return *this;
}
TruncatedField& TruncatedField::operator-=(const TruncatedField& o) {
    if (!box_.same_shape(o.box_)) throw std::invalid_argument("field -=: box mismatch");
    coeffs_ -= o.coeffs_;
    real_ = real_ && o.real_;
    return *this;
}
TruncatedField& TruncatedField::operator*=(Complex c) {
    coeffs_ *= c;
    real_ = real_ && (c.imag() == 0.0);
    return *this;
}

double TruncatedField::sobolev_norm(double s, bool allow_dual) const {
    if (s < 0 && !allow_dual) throw std::invalid_argument("sobolev_norm: negative s requires dual flag");
    if (!finite()) throw std::invalid_argument("sobolev_norm: non-finite coefficient");
    double acc = 0.0;
    for (int i = 0; i < coeffs_.size(); ++i) {
        double w = box_.weight(i);
        acc += std::norm(coeffs_[i]) * std::pow(w, 2.0 * s);
    }
    return std::sqrt(acc);
}

TruncatedField TruncatedField::project(int N) const {
    if (N < 1) throw std::invalid_argument("project: N >= 1 required");
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i)
        if (box_.weight(i) <= N) out.coeffs_[i] = coeffs_[i];
    return out;
}

TruncatedField TruncatedField::project_complement(int N) const {
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i)
        if (box_.weight(i) > N) out.coeffs_[i] = coeffs_[i];
    return out;
}

TruncatedField TruncatedField::invert_omega_dphi(const Vec& omega, const InvertOptions& opt) const {
    if (omega.size() != box_.dim()) throw std::invalid_argument("invert_omega_dphi: omega dim mismatch");
    double floor = opt.divisor_floor_factor * opt.gamma;
    double scale = coeffs_.cwiseAbs().maxCoeff();
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        double wl = 0.0;
        bool zero_ell = true;
        for (int d = 0; d < box_.dim(); ++d) {
            wl += omega[d] * ell[d];
            zero_ell = zero_ell && (ell[d] == 0);
        }
        if (zero_ell) {
            if (std::abs(coeffs_[i]) > opt.zero_average_tol * std::max(1.0, scale))
                throw SolvabilityError("invert_omega_dphi: nonzero phi-average at j=" + std::to_string(j));
            continue;
        }
        if (std::abs(wl) < floor) {
            std::string s = "invert_omega_dphi: small divisor at l=(";
            for (int d = 0; d < box_.dim(); ++d) s += std::to_string(ell[d]) + (d + 1 < box_.dim() ? "," : ")");
            throw SmallDivisorError(s);
        }
        out.coeffs_[i] = coeffs_[i] / Complex(0.0, wl);
    }
    return out;
}

TruncatedField TruncatedField::omega_dphi(const Vec& omega) const {
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        double wl = 0.0;
        for (int d = 0; d < box_.dim(); ++d) wl += omega[d] * ell[d];
        out.coeffs_[i] = coeffs_[i] * Complex(0.0, wl);
    }
    return out;
}

TruncatedField TruncatedField::dx(int order) const {
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        if (j == 0) continue;  // d_x^m[1] = 0 for every m (cutoff convention)
        out.coeffs_[i] = coeffs_[i] * std::pow(Complex(0.0, TWO_PI * j), order);
    }
    return out;
}

TruncatedField TruncatedField::dphi(int m) const {
    if (m < 0 || m >= box_.dim()) throw std::invalid_argument("dphi: bad direction");
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        out.coeffs_[i] = coeffs_[i] * Complex(0.0, (double)ell[m]);
    }
    return out;
}

Complex TruncatedField::average() const {
    MultiIndex zero(box_.dim(), 0);
    return box_.contains(zero, 0) ? coeffs_[box_.index(zero, 0)] : Complex(0.0);
}

TruncatedField TruncatedField::x_average() const {
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        if (j == 0) out.coeffs_[i] = coeffs_[i];
    }
    return out;
}

TruncatedField TruncatedField::conjugate_field() const {
    TruncatedField out(box_, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        MultiIndex mell(ell.size());
        for (size_t d = 0; d < ell.size(); ++d) mell[d] = -ell[d];
        if (box_.contains(mell, -j)) out.coeffs_[box_.index(mell, -j)] = std::conj(coeffs_[i]);
    }
    return out;
}

TruncatedField TruncatedField::majorant() const {
    TruncatedField out(box_, false);
    for (int i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = std::abs(coeffs_[i]);
    return out;
}

TruncatedField TruncatedField::multiply(const TruncatedField& other) const {
    if (box_.dim() != other.box_.dim()) throw std::invalid_argument("multiply: dim mismatch");
    TruncatedField out(box_, real_ && other.real_);
    const double tiny = 0.0;
    for (int i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == Complex(0.0)) continue;
        auto [la, ja] = box_.mode(i);
        for (int k = 0; k < other.coeffs_.size(); ++k) {
            if (other.coeffs_[k] == Complex(tiny)) continue;
            auto [lb, jb] = other.box_.mode(k);
            MultiIndex l(la.size());
            for (size_t d = 0; d < la.size(); ++d) l[d] = la[d] + lb[d];
            int j = ja + jb;
            if (box_.contains(l, j))
                out.coeffs_[box_.index(l, j)] += coeffs_[i] * other.coeffs_[k];
        }
    }
    return out;
}

TruncatedField TruncatedField::to_box(const Box& target) const {
    if (target.dim() != box_.dim()) throw std::invalid_argument("to_box: dim mismatch");
    TruncatedField out(target, real_);
    for (int i = 0; i < coeffs_.size(); ++i) {
        auto [ell, j] = box_.mode(i);
        if (target.contains(ell, j)) out.coeffs()[target.index(ell, j)] = coeffs_[i];
    }
    return out;
}

TruncatedField constant_field(const Box& box, Complex value) {
    TruncatedField u(box, value.imag() == 0.0);
    MultiIndex zero(box.dim(), 0);
    if (box.contains(zero, 0)) u.coeffs()[box.index(zero, 0)] = value;
    return u;
}

TruncatedField single_mode(const Box& box, const MultiIndex& ell, int j, Complex value) {
    TruncatedField u(box);
    u.coeffs()[box.index(ell, j)] = value;
    return u;
}

// --------------------------- collocation grid -------------------------------

CollocGrid::CollocGrid(const Box& box, int oversample) : box_(box) {
    if (oversample < 1) throw std::invalid_argument("CollocGrid: oversample >= 1");
    nphi_ = oversample * (2 * box.L() + 1);
    nx_ = oversample * (2 * box.J() + 1);
    nphi_total_ = 1;
    for (int d = 0; d < box.dim(); ++d) nphi_total_ *= nphi_;
    xmodes_ = box.space_modes();

    int nl = 2 * box.L() + 1;
    dft_phi_.resize(nphi_, nl);
    idft_phi_.resize(nl, nphi_);
    for (int g = 0; g < nphi_; ++g)
        for (int m = 0; m < nl; ++m) {
            double ang = TWO_PI * (double)g / nphi_ * (m - box.L());
            dft_phi_(g, m) = std::polar(1.0, ang);
            idft_phi_(m, g) = std::polar(1.0 / nphi_, -ang);
        }
    int ns = (int)xmodes_.size();
    dft_x_.resize(nx_, ns);
    idft_x_.resize(ns, nx_);
    for (int g = 0; g < nx_; ++g)
        for (int m = 0; m < ns; ++m) {
            double ang = TWO_PI * (double)g / nx_ * xmodes_[m];
            dft_x_(g, m) = std::polar(1.0, ang);
            idft_x_(m, g) = std::polar(1.0 / nx_, -ang);
        }
}

std::vector<double> CollocGrid::phi_point(int phi_rank) const {
    std::vector<double> p(box_.dim());
    for (int d = box_.dim() - 1; d >= 0; --d) {
        p[d] = TWO_PI * (phi_rank % nphi_) / nphi_;
        phi_rank /= nphi_;
    }
    return p;
}

// Each pass transforms the minor axis and moves the result to the major
// position, so after dim passes the grid ranks are lexicographic again.
CMat CollocGrid::phi_slices(const TruncatedField& u) const {
    int ns = (int)xmodes_.size();
    // coefficients as (phi_modes x space_modes)
    CMat cur = Eigen::Map<const CMat>(u.coeffs().data(), ns, box_.n_phi_modes()).transpose();
    int nl = 2 * box_.L() + 1;
    for (int d = 0; d < box_.dim(); ++d) {
        int nb = (int)cur.rows() / nl;
        CMat out(nphi_ * nb, cur.cols());
        for (int b = 0; b < nb; ++b) {
            CMat t = dft_phi_ * cur.middleRows(b * nl, nl);
            for (int g = 0; g < nphi_; ++g) out.row(g * nb + b) = t.row(g);
        }
        cur = out;
    }
    return cur;  // (nphi_total x n_space_modes)
}

CVec CollocGrid::values(const TruncatedField& u) const {
    CMat slices = phi_slices(u);           // (nphi_total x ns)
    CMat vals = slices * dft_x_.transpose();  // (nphi_total x nx)
    return Eigen::Map<CVec>(vals.data(), vals.size());  // column-major: x-major? fix below
}

TruncatedField CollocGrid::field(const CVec& vals, const Box& target, bool real) const {
    if ((int)vals.size() != size()) throw std::invalid_argument("CollocGrid::field: size mismatch");
    // vals laid out column-major of (nphi_total x nx): entry (p, g) at p + g*nphi_total
    CMat V = Eigen::Map<const CMat>(vals.data(), nphi_total_, nx_);
    CMat slices = V * idft_x_.transpose();  // (nphi_total x ns)
    // inverse phi transforms, minor axis first as in phi_slices
    int nl = 2 * box_.L() + 1;
    CMat cur = slices;
    for (int d = 0; d < box_.dim(); ++d) {
        int nb = (int)cur.rows() / nphi_;
        CMat out(nl * nb, cur.cols());
        for (int b = 0; b < nb; ++b) {
            CMat t = idft_phi_ * cur.middleRows(b * nphi_, nphi_);
            for (int m = 0; m < nl; ++m) out.row(m * nb + b) = t.row(m);
        }
        cur = out;
    }
    // cur: (phi_modes x ns) for the grid box; restrict to target
    TruncatedField tmp(box_);
    CMat Ct = cur.transpose();  // (ns x phi_modes)
    tmp.coeffs() = Eigen::Map<CVec>(Ct.data(), Ct.size());
    TruncatedField out = tmp.to_box(target);
    if (real) out.enforce_reality();
    return out;
}

Complex CollocGrid::eval_slice(const CMat& slices, int phi_rank, double x) const {
    Complex acc(0.0);
    for (int m = 0; m < (int)xmodes_.size(); ++m)
        acc += slices(phi_rank, m) * std::polar(1.0, TWO_PI * xmodes_[m] * x);
    return acc;
}

TruncatedField CollocGrid::map_pointwise(const TruncatedField& u,
                                         const std::function<Complex(Complex)>& f,
                                         bool real) const {
    CVec v = values(u);
    for (int i = 0; i < v.size(); ++i) v[i] = f(v[i]);
    return field(v, u.box(), real);
}

// ------------------------- diophantine scan ---------------------------------

namespace {
template <class F>
void for_each_ell(int dim, int Lmax, F&& f) {
    std::vector<int> ell(dim, -Lmax);
    while (true) {
        f(ell);
        int d = dim - 1;
        while (d >= 0 && ++ell[d] > Lmax) ell[d--] = -Lmax;
        if (d < 0) break;
    }
}
}  // namespace

double diophantine_margin(const Vec& omega, double tau, int Lmax) {
    double margin = std::numeric_limits<double>::infinity();
    for_each_ell((int)omega.size(), Lmax, [&](const std::vector<int>& ell) {
        int l = linf(ell);
        if (l == 0) return;
        double wl = 0.0;
        for (int d = 0; d < omega.size(); ++d) wl += omega[d] * ell[d];
        margin = std::min(margin, std::abs(wl) * std::pow((double)l, tau));
    });
    return margin;
}

bool is_diophantine(const Vec& omega, const DiophantineParams& dc) {
    dc.validate((int)omega.size());
    return diophantine_margin(omega, dc.tau, dc.Lmax) >= dc.gamma;
}

// ------------------------------ Lip(gamma) ----------------------------------

double lipg_norm(const ParamFamily<TruncatedField>& f, double s) {
    if (f.size() < 1) throw std::invalid_argument("lipg_norm: empty grid");
    double sup = 0.0;
    for (int i = 0; i < f.size(); ++i) sup = std::max(sup, f.value(i).sobolev_norm(s, true));
    if (f.size() == 1) return sup;
    double lip = 0.0;
    if (f.size() <= 32) {
        for (int i = 0; i < f.size(); ++i)
            for (int k = i + 1; k < f.size(); ++k) {
                double dw = (f.omega(i) - f.omega(k)).norm();
                if (dw == 0.0) continue;
                lip = std::max(lip, (f.value(i) - f.value(k)).sobolev_norm(s, true) / dw);
            }
    } else {
        for (int i = 0; i + 1 < f.size(); ++i) {
            double dw = (f.omega(i) - f.omega(i + 1)).norm();
            if (dw == 0.0) continue;
            lip = std::max(lip, (f.value(i) - f.value(i + 1)).sobolev_norm(s, true) / dw);
        }
    }
    return sup + f.gamma() * lip;
}

double lipg_norm_scalar(const ParamFamily<double>& f) {
    if (f.size() < 1) throw std::invalid_argument("lipg_norm_scalar: empty grid");
    double sup = 0.0;
    for (int i = 0; i < f.size(); ++i) sup = std::max(sup, std::abs(f.value(i)));
    if (f.size() == 1) return sup;
    double lip = 0.0;
    if (f.size() <= 32) {
        for (int i = 0; i < f.size(); ++i)
            for (int k = i + 1; k < f.size(); ++k) {
                double dw = (f.omega(i) - f.omega(k)).norm();
                if (dw == 0.0) continue;
                lip = std::max(lip, std::abs(f.value(i) - f.value(k)) / dw);
            }
    } else {
        for (int i = 0; i + 1 < f.size(); ++i) {
            double dw = (f.omega(i) - f.omega(i + 1)).norm();
            if (dw == 0.0) continue;
            lip = std::max(lip, std::abs(f.value(i) - f.value(i + 1)) / dw);
        }
    }
    return sup + f.gamma() * lip;
}

}  // namespace qpkam
