#pragma once

#include <algorithm>
#include <string>

#include "csvrptw/core/error.hpp"

namespace csvrptw {

// Late-arrival penalty pi(u): nondecreasing, pi(u) = 0 for u <= 0.
// Quadratic is the experimental default; a linear variant exists for
// sensitivity runs. Both are convex, which the completion bounds rely on
// only through monotonicity.
class PenaltyFn {
  public:
    enum class Kind { quadratic, linear };

    PenaltyFn() = default;
    explicit PenaltyFn(Kind k, double slope = 1.0) : kind_(k), slope_(slope) {}

    static PenaltyFn quadratic() { return PenaltyFn(Kind::quadratic); }
    static PenaltyFn linear(double slope) { return PenaltyFn(Kind::linear, slope); }

    double operator()(double u) const {
        if (u <= 0.0) return 0.0;
        return kind_ == Kind::quadratic ? u * u : slope_ * u;
    }

    Kind kind() const { return kind_; }
    double slope() const { return slope_; }

    std::string kind_name() const {
        return kind_ == Kind::quadratic ? "quadratic" : "linear";
    }

    static PenaltyFn from_name(const std::string& name, double slope = 1.0) {
        if (name == "quadratic") return quadratic();
        if (name == "linear") return linear(slope);
        throw ConfigError("unknown penalty kind: " + name);
    }

    bool operator==(const PenaltyFn& o) const {
        return kind_ == o.kind_ && (kind_ == Kind::quadratic || slope_ == o.slope_);
    }

  private:
    Kind kind_ = Kind::quadratic;
    double slope_ = 1.0;
};

}  // namespace csvrptw
