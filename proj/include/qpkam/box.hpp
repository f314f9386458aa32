// box.hpp — truncation box for Fourier modes on T^{S+} x T_1 and mode bookkeeping.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qpkam {

using MultiIndex = std::vector<int>;  // angle mode l, one entry per tangential site

// <l,j> := max{1, |l|_inf, |j|}
inline int mode_weight(const MultiIndex& ell, int j) {
    int w = 1;
    for (int li : ell) w = std::max(w, std::abs(li));
    return std::max(w, std::abs(j));
}

inline int linf(const MultiIndex& ell) {
    int w = 0;
    for (int li : ell) w = std::max(w, std::abs(li));
    return w;
}

// Rectangular truncation |l|_inf <= L, |j| <= J. When `perp` is set, the space
// modes j in {0} U S U (-S) are excluded (the operator acts on L^2_perp).
class Box {
public:
    Box() = default;
    Box(int dim, int L, int J, std::vector<int> tangential_sites = {}, bool perp = false)
        : dim_(dim), L_(L), J_(J), sites_(std::move(tangential_sites)), perp_(perp) {
        if (dim < 1 || L < 0 || J < 0) throw std::invalid_argument("Box: bad dimensions");
        for (int s : sites_)
            if (s <= 0) throw std::invalid_argument("Box: tangential sites must be positive");
        n_phi_ = 1;
        for (int d = 0; d < dim_; ++d) n_phi_ *= (2 * L_ + 1);
        for (int j = -J_; j <= J_; ++j)
            if (!excluded(j)) space_modes_.push_back(j);
        space_rank_.assign(2 * J_ + 1, -1);
        for (int r = 0; r < (int)space_modes_.size(); ++r)
            space_rank_[space_modes_[r] + J_] = r;
    }

    int dim() const { return dim_; }
    int L() const { return L_; }
    int J() const { return J_; }
    bool perp() const { return perp_; }
    const std::vector<int>& tangential_sites() const { return sites_; }
    const std::vector<int>& space_modes() const { return space_modes_; }

    int n_phi_modes() const { return n_phi_; }
    int n_space_modes() const { return (int)space_modes_.size(); }
    int size() const { return n_phi_ * n_space_modes(); }

    bool excluded(int j) const {
        if (!perp_) return false;
        if (j == 0) return true;
        return std::find(sites_.begin(), sites_.end(), std::abs(j)) != sites_.end();
    }

    bool contains(const MultiIndex& ell, int j) const {
        if ((int)ell.size() != dim_ || std::abs(j) > J_) return false;
        if (linf(ell) > L_) return false;
        return !excluded(j);
    }

    int phi_rank(const MultiIndex& ell) const {
        int r = 0;
        for (int d = 0; d < dim_; ++d) {
            if (std::abs(ell[d]) > L_) throw std::out_of_range("Box: phi mode outside box");
            r = r * (2 * L_ + 1) + (ell[d] + L_);
        }
        return r;
    }

    MultiIndex phi_mode(int rank) const {
        MultiIndex ell(dim_);
        for (int d = dim_ - 1; d >= 0; --d) {
            ell[d] = rank % (2 * L_ + 1) - L_;
            rank /= (2 * L_ + 1);
        }
        return ell;
    }

    int space_rank(int j) const {
        int r = (std::abs(j) <= J_) ? space_rank_[j + J_] : -1;
        if (r < 0) throw std::out_of_range("Box: space mode outside box");
        return r;
    }
    bool has_space_mode(int j) const { return std::abs(j) <= J_ && space_rank_[j + J_] >= 0; }

    int index(const MultiIndex& ell, int j) const {
        return phi_rank(ell) * n_space_modes() + space_rank(j);
    }
    // inverse of index()
    std::pair<MultiIndex, int> mode(int idx) const {
        int ns = n_space_modes();
        return {phi_mode(idx / ns), space_modes_[idx % ns]};
    }

    int weight(int idx) const {
        auto [ell, j] = mode(idx);
        return mode_weight(ell, j);
    }

    bool same_shape(const Box& o) const {
        return dim_ == o.dim_ && L_ == o.L_ && J_ == o.J_ && perp_ == o.perp_ &&
               sites_ == o.sites_;
    }

    // box with the perp restriction dropped (full j-range)
    Box full() const { return Box(dim_, L_, J_, sites_, false); }
    Box restricted_perp() const { return Box(dim_, L_, J_, sites_, true); }

private:
    int dim_ = 1, L_ = 0, J_ = 0;
    std::vector<int> sites_;
    bool perp_ = false;
    int n_phi_ = 1;
    std::vector<int> space_modes_;
    std::vector<int> space_rank_;
};

}  // namespace qpkam
