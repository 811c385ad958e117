#ifndef CYTO_SMOOTHING_HPP
#define CYTO_SMOOTHING_HPP

#include <vector>

namespace cyto {

// Probability floor applied inside the log of cross_entropy; makes the loss
// total at p = 0.
inline constexpr double kProbFloor = 1e-12;

struct LabelDistribution {
    std::vector<double> q;
    bool smoothed = false;
    double epsilon = 0;  // 0 for a one-hot target

    static LabelDistribution one_hot(std::size_t k, std::size_t true_class);
};

// Numerically stable softmax (max-shift before exponentiation). Requires
// finite entries.
std::vector<double> softmax(const std::vector<double>& logits);

// -sum_i q_i ln p_i in nats; p entries are floored at kProbFloor before the
// log. Throws ContractError on mismatched lengths.
double cross_entropy(const LabelDistribution& q, const std::vector<double>& p);

// (1-eps) q_i + eps/K. Requires a one-hot q, K >= 2, eps in [0,1).
LabelDistribution smooth_labels(const LabelDistribution& q, double epsilon);

// Analytic gradient of cross_entropy(q, softmax(z)) w.r.t. z: softmax(z) - q.
std::vector<double> cross_entropy_softmax_grad(const LabelDistribution& q,
                                               const std::vector<double>& logits);

}  // namespace cyto

#endif
