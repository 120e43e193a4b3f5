#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/route.hpp"

namespace csvrptw {

// Service-start variability along one route. earlyP[k] is the early-arrival
// probability at position k; xi[k] the propagated risk. xi vanishes wherever
// earlyP hits 1, since service then starts at the window opening.
struct RiskState {
    std::vector<double> earlyP;
    std::vector<double> xi;
};

// Risk recursion over route positions with v_0 = depot:
//   xi(v_1) = (1 - P(v_1)) * var(0, v_1)
//   xi(v_k) = (1 - P(v_k)) * (xi(v_{k-1}) + var(v_{k-1}, v_k)
//                             + 2 cov((v_{k-2}, v_{k-1}), (v_{k-1}, v_k)))
// The adjacent-arc covariance term starts at k = 2, where v_{k-2} is the
// depot itself.
inline RiskState propagate_risk(const Route& r, const Instance& inst,
                                const Eigen::MatrixXd& sigma,
                                const std::vector<double>& earlyP) {
    if (earlyP.size() != r.seq.size())
        throw ValidationError("propagate_risk: probability count mismatch");
    const ArcIndex ix = inst.arc_index();
    if (sigma.rows() != static_cast<Eigen::Index>(ix.arc_count()) ||
        sigma.cols() != sigma.rows())
        throw ValidationError("propagate_risk: covariance shape mismatch");
    RiskState st;
    st.earlyP = earlyP;
    st.xi.resize(r.seq.size());
    for (std::size_t k = 0; k < r.seq.size(); ++k) {
        const double p = earlyP[k];
        if (p < 0.0 || p > 1.0) throw ValidationError("propagate_risk: probability out of [0,1]");
        const auto vk = static_cast<std::size_t>(r.seq[k]);
        const std::size_t prev = k == 0 ? 0 : static_cast<std::size_t>(r.seq[k - 1]);
        const auto arc_in = static_cast<Eigen::Index>(ix.index(prev, vk));
        if (k == 0) {
            st.xi[k] = (1.0 - p) * sigma(arc_in, arc_in);
        } else {
            const std::size_t prev2 = k == 1 ? 0 : static_cast<std::size_t>(r.seq[k - 2]);
            const auto arc_prev = static_cast<Eigen::Index>(ix.index(prev2, prev));
            st.xi[k] = (1.0 - p) * (st.xi[k - 1] + sigma(arc_in, arc_in) +
                                    2.0 * sigma(arc_prev, arc_in));
        }
        // estimated covariances can drive the recursion negative; a risk
        // measure stays meaningful only at or above zero
        st.xi[k] = std::max(0.0, st.xi[k]);
    }
    return st;
}

}  // namespace csvrptw
