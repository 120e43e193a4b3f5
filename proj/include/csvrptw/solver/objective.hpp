#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "csvrptw/core/route.hpp"
#include "csvrptw/penalty_model/predictor.hpp"
#include "csvrptw/pricing/price.hpp"

namespace csvrptw {

// What the branch-and-price minimizes: first-stage cost plus a per-route
// second-stage term. The term is either a weighted scenario penalty or the
// learned per-customer prediction sum; everything downstream (master
// columns, pricing, incumbent recompute) dispatches through here so a
// solve never mixes the two.
class SolveObjective {
  public:
    static SolveObjective scenario_based(ScenarioSet scen, PenaltyFn pen) {
        SolveObjective o;
        o.scen_ = std::move(scen);
        o.pen_ = pen;
        return o;
    }

    static SolveObjective predictor_based(PenaltyPredictor model, std::vector<Mat> periods) {
        SolveObjective o;
        o.model_ = std::move(model);
        o.periods_ = std::move(periods);
        return o;
    }

    bool uses_predictor() const { return model_.has_value(); }

    const ScenarioSet& scenarios() const {
        if (!scen_) throw ValidationError("objective carries no scenario set");
        return *scen_;
    }
    const PenaltyFn& penalty() const { return pen_; }
    const PenaltyPredictor& model() const {
        if (!model_) throw ValidationError("objective carries no predictor");
        return *model_;
    }
    const std::vector<Mat>& periods() const { return periods_; }

    void validate(const Instance& inst) const {
        if (scen_.has_value() == model_.has_value())
            throw ValidationError("objective must hold exactly one of scenarios/predictor");
        if (scen_) scen_->validate(inst);
    }

    double second_stage(const Instance& inst, const Route& r) const {
        return model_ ? model_->route_sum(inst, r) : expected_route_penalty(inst, r, *scen_, pen_);
    }

    double route_total(const Instance& inst, const Route& r) const {
        return route_cost(inst, r) + second_stage(inst, r);
    }

    double solution_total(const Instance& inst, const Solution& sol) const {
        double v = 0.0;
        for (const Route& r : sol.routes) v += route_total(inst, r);
        return v;
    }

    PricingResult price(const Instance& inst, const Duals& duals, const ArcRules& rules,
                        const PricingOptions& opt) const {
        return model_ ? price_penalty_model(inst, duals, *model_, periods_, rules, opt)
                      : csvrptw::price(inst, duals, *scen_, pen_, rules, opt);
    }

  private:
    SolveObjective() = default;

    std::optional<ScenarioSet> scen_;
    PenaltyFn pen_;
    std::optional<PenaltyPredictor> model_;
    std::vector<Mat> periods_;
};

}  // namespace csvrptw
