#include "cyto/evaluator.hpp"

#include <algorithm>
#include <map>

#include "cyto/error.hpp"
#include "cyto/geometry.hpp"
#include "cyto/parallel.hpp"

namespace cyto {

CreditMatrix CreditMatrix::identity() {
    CreditMatrix m;
    for (std::size_t i = 0; i < kNumCategories; ++i) m.c[i][i] = 1.0;
    return m;
}

CreditMatrix CreditMatrix::partial_credit() {
    CreditMatrix m = identity();
    m.c[category_index(CategoryId::ASCH)][category_index(CategoryId::HSIL)] = 0.51;
    m.c[category_index(CategoryId::HSIL)][category_index(CategoryId::ASCH)] = 0.66;
    return m;
}

bool CreditMatrix::is_identity() const {
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        for (std::size_t j = 0; j < kNumCategories; ++j) {
            if (c[i][j] != (i == j ? 1.0 : 0.0)) return false;
        }
    }
    return true;
}

ClassMatch match_class(std::vector<Detection> dets, const std::vector<GroundTruthBox>& gts,
                       CategoryId pred, double iou_thresh, const CreditMatrix& credit) {
    for (const auto& d : dets) {
        if (d.category != pred) throw ContractError("match_class: detection of wrong class");
    }
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return a.final_score > b.final_score;
    });

    // GT indexed per image; a box is consumed at most once within this pass.
    std::map<std::string, std::vector<std::size_t>> gt_by_image;
    for (std::size_t g = 0; g < gts.size(); ++g) {
        gt_by_image[gts[g].image_id].push_back(g);
    }
    std::vector<bool> consumed(gts.size(), false);

    ClassMatch result;
    result.gt_count = std::size_t(
        std::count_if(gts.begin(), gts.end(),
                      [&](const GroundTruthBox& g) { return g.category == pred; }));
    result.recall_denominator = double(result.gt_count);

    for (const auto& d : dets) {
        // Same-class candidates first; a cross-credited match is taken only
        // when no same-class GT clears the IoU threshold.
        auto pick = [&](bool same_class) -> std::size_t {
            std::size_t best = gts.size();
            double best_iou = 0;
            auto it = gt_by_image.find(d.image_id);
            if (it == gt_by_image.end()) return best;
            for (std::size_t g : it->second) {
                if (consumed[g]) continue;
                const bool same = gts[g].category == pred;
                if (same != same_class) continue;
                if (!same && credit.at(pred, gts[g].category) <= 0) continue;
                const double ov = iou(d.bbox, gts[g].bbox);
                if (ov < iou_thresh) continue;
                if (best == gts.size() || ov > best_iou) {
                    best = g;
                    best_iou = ov;
                }
            }
            return best;
        };
        std::size_t g = pick(true);
        if (g == gts.size()) g = pick(false);
        double tp = 0;
        if (g != gts.size()) {
            consumed[g] = true;
            tp = credit.at(pred, gts[g].category);
            if (gts[g].category != pred) result.recall_denominator += tp;
            result.pairs.push_back({d.image_id, pred, gts[g].category, iou(d.bbox, gts[g].bbox),
                                    tp, d.final_score});
        }
        result.tp_weights.push_back(tp);
        result.scores.push_back(d.final_score);
    }
    return result;
}

double ap_11point(const std::vector<double>& tp_weights, double recall_denominator) {
    if (recall_denominator <= 0) return 0.0;
    // One PR point per rank; tp + fp = rank since per-detection weights sum
    // to 1.
    std::vector<double> precision(tp_weights.size()), recall(tp_weights.size());
    double cum_tp = 0;
    for (std::size_t k = 0; k < tp_weights.size(); ++k) {
        cum_tp += tp_weights[k];
        precision[k] = cum_tp / double(k + 1);
        recall[k] = cum_tp / recall_denominator;
    }
    double ap = 0;
    for (int level = 0; level <= 10; ++level) {
        const double r = level / 10.0;
        double best = 0;
        for (std::size_t k = 0; k < tp_weights.size(); ++k) {
            if (recall[k] >= r - 1e-12) best = std::max(best, precision[k]);
        }
        ap += best;
    }
    return ap / 11.0;
}

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                    const EvalConfig& cfg, unsigned threads) {
    const CreditMatrix credit = cfg.matrix();
    EvalReport report;
    report.config = cfg;
    report.per_class.resize(kNumCategories);

    std::array<std::vector<Detection>, kNumCategories> by_class;
    for (const auto& d : dets) by_class[category_index(d.category)].push_back(d);

    std::array<ClassMatch, kNumCategories> matches;
    parallel_for(kNumCategories, threads, [&](std::size_t i) {
        matches[i] = match_class(by_class[i], gts, kAllCategories[i], cfg.iou_threshold, credit);
    });

    double ap_sum = 0;
    std::size_t included = 0;
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        ClassReport& cr = report.per_class[i];
        cr.category = kAllCategories[i];
        cr.gt_count = matches[i].gt_count;
        cr.det_count = by_class[i].size();
        cr.included = cr.gt_count > 0 || cr.det_count > 0;
        cr.ap = ap_11point(matches[i].tp_weights, matches[i].recall_denominator);
        double cum_tp = 0;
        for (std::size_t k = 0; k < matches[i].tp_weights.size(); ++k) {
            cum_tp += matches[i].tp_weights[k];
            const double denom = matches[i].recall_denominator;
            cr.pr_curve.emplace_back(denom > 0 ? cum_tp / denom : 0.0, cum_tp / double(k + 1));
        }
        if (cr.included) {
            ap_sum += cr.ap;
            ++included;
        }
        for (const auto& p : matches[i].pairs) report.matched_pairs.push_back(p);
    }
    report.map = included > 0 ? ap_sum / double(included) : 0.0;
    return report;
}

bool triage_positive(const std::vector<Detection>& slide_dets, double tau) {
    for (const auto& d : slide_dets) {
        if (is_positive(d.category) && d.final_score >= tau) return true;
    }
    return false;
}

TriageMetrics triage_metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                         std::size_t fn) {
    const std::size_t n = tp + fp + tn + fn;
    if (n == 0) throw ContractError("triage_metrics: empty input");
    TriageMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.tn = tn;
    m.fn = fn;
    m.acc = double(tp + tn) / double(n);
    m.sens = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
    m.spec = (tn + fp) > 0 ? double(tn) / double(tn + fp) : 0.0;
    return m;
}

TriageMetrics triage_metrics(const std::vector<bool>& predictions,
                             const std::vector<bool>& labels) {
    if (predictions.size() != labels.size()) {
        throw ContractError("triage_metrics: prediction/label length mismatch");
    }
    if (predictions.empty()) throw ContractError("triage_metrics: empty input");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (labels[i]) {
            (predictions[i] ? tp : fn) += 1;
        } else {
            (predictions[i] ? fp : tn) += 1;
        }
    }
    return triage_metrics_from_counts(tp, fp, tn, fn);
}

}  // namespace cyto
