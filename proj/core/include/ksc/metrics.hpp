#pragma once

#include <vector>

#include "ksc/types.hpp"

namespace ksc {

// fraction of label disagreements minimized over relabelings of pred;
// exhaustive over permutations for R <= 10, assignment solver beyond
double misclassification_rate(const std::vector<int>& pred,
                              const std::vector<int>& truth, int R);

// normalized mutual information I / sqrt(H_pred H_truth) with natural logs.
// Two zero-entropy partitions score 1; exactly one scores 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth, int R);

namespace detail {

// perm maximizing sum_k agreement(k, perm[k])
std::vector<int> best_assignment(const Matrix& agreement);

}  // namespace detail

}  // namespace ksc
