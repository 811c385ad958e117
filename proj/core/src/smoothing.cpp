#include "cyto/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "cyto/error.hpp"

namespace cyto {

LabelDistribution LabelDistribution::one_hot(std::size_t k, std::size_t true_class) {
    if (true_class >= k) throw ContractError("one_hot: class index out of range");
    LabelDistribution d;
    d.q.assign(k, 0.0);
    d.q[true_class] = 1.0;
    return d;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) throw ContractError("softmax: empty logit vector");
    for (double z : logits) {
        if (!std::isfinite(z)) throw ContractError("softmax: non-finite logit");
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - zmax);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

double cross_entropy(const LabelDistribution& q, const std::vector<double>& p) {
    if (q.q.size() != p.size()) throw ContractError("cross_entropy: mismatched lengths");
    double loss = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        loss -= q.q[i] * std::log(std::max(p[i], kProbFloor));
    }
    return loss;
}

LabelDistribution smooth_labels(const LabelDistribution& q, double epsilon) {
    if (!(epsilon >= 0 && epsilon < 1)) throw ContractError("smooth_labels: eps outside [0,1)");
    const std::size_t k = q.q.size();
    if (k < 2) throw ContractError("smooth_labels: need K >= 2");
    std::size_t ones = 0;
    for (double v : q.q) {
        if (v == 1.0) ++ones;
        else if (v != 0.0) throw ContractError("smooth_labels: input is not one-hot");
    }
    if (ones != 1) throw ContractError("smooth_labels: input is not one-hot");
    LabelDistribution out;
    out.q.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.q[i] = (1.0 - epsilon) * q.q[i] + epsilon / double(k);
    }
    out.smoothed = epsilon > 0;
    out.epsilon = epsilon;
    return out;
}

std::vector<double> cross_entropy_softmax_grad(const LabelDistribution& q,
                                               const std::vector<double>& logits) {
    if (q.q.size() != logits.size()) {
        throw ContractError("cross_entropy_softmax_grad: mismatched lengths");
    }
    std::vector<double> g = softmax(logits);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= q.q[i];
    return g;
}

}  // namespace cyto
