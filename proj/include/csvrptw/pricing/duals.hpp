#pragma once

#include <cstddef>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/instance.hpp"

namespace csvrptw {

// Dual values from the restricted master: gamma[i] for the partitioning row
// of customer i (slot 0 unused), mu for the fleet-size row. Pricing charges
// gamma per visited customer and mu once per route.
struct Duals {
    std::vector<double> gamma;
    double mu = 0.0;

    static Duals zero(const Instance& inst) {
        Duals d;
        d.gamma.assign(static_cast<std::size_t>(inst.n_nodes()), 0.0);
        return d;
    }

    void validate(const Instance& inst) const {
        if (gamma.size() != static_cast<std::size_t>(inst.n_nodes()))
            throw ValidationError("duals: gamma size does not match the instance");
    }
};

// Branching state as pricing sees it: forcing an arc elsewhere reduces to
// forbidding its alternatives, so only a forbidden set crosses the module
// boundary. Default construction forbids nothing.
class ArcRules {
  public:
    ArcRules() = default;
    explicit ArcRules(const Instance& inst)
        : n_(static_cast<std::size_t>(inst.n_nodes())), forbidden_(n_ * n_, 0) {}

    void forbid(std::size_t i, std::size_t j) {
        if (i >= n_ || j >= n_) throw ValidationError("arc rules: node out of range");
        forbidden_[i * n_ + j] = 1;
    }

    bool allowed(std::size_t i, std::size_t j) const {
        return forbidden_.empty() || !forbidden_[i * n_ + j];
    }

    std::size_t count_forbidden() const {
        std::size_t c = 0;
        for (char f : forbidden_) c += static_cast<std::size_t>(f);
        return c;
    }

  private:
    std::size_t n_ = 0;
    std::vector<char> forbidden_;
};

}  // namespace csvrptw
