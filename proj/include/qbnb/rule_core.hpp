#pragma once

#include "qbnb/geometry.hpp"
#include "qbnb/problem.hpp"

namespace qbnb::detail {

// Allocation-light result shared by the bounding-rule cores. The public
// wrappers in rules.hpp / newton3.hpp convert this into a RuleOutcome; the
// search hot loop consumes it directly against pooled sample storage.
struct CoreOutcome {
    BoundStatus status = BoundStatus::Bounded;
    double qlb = 0.0;
    double f_sample = 0.0;
    bool third_order = false;
    double lambda_bar = 0.0;
};

bool ball2r_inside_raw(const double* center, double r, const Box& domain, int dim);

}  // namespace qbnb::detail
