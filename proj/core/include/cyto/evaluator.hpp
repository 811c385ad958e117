#ifndef CYTO_EVALUATOR_HPP
#define CYTO_EVALUATOR_HPP

#include <array>
#include <string>
#include <vector>

#include "cyto/detection.hpp"

namespace cyto {

// C[pred][truth] in [0,1]: true-positive weight earned when a detection of
// class `pred` matches a ground-truth box of class `truth`. Identity except
// for the ASCH/HSIL cross entries of the partial-credit variant.
struct CreditMatrix {
    std::array<std::array<double, kNumCategories>, kNumCategories> c{};

    static CreditMatrix identity();
    // Identity plus C[ASCH][HSIL] = 0.51 and C[HSIL][ASCH] = 0.66.
    static CreditMatrix partial_credit();

    double at(CategoryId pred, CategoryId truth) const {
        return c[category_index(pred)][category_index(truth)];
    }
    bool is_identity() const;
};

struct EvalConfig {
    double iou_threshold = 0.5;
    bool credit = false;  // partial-credit matrix on/off
    std::string granularity = "slide";

    CreditMatrix matrix() const {
        return credit ? CreditMatrix::partial_credit() : CreditMatrix::identity();
    }
};

struct MatchedPair {
    std::string image_id;
    CategoryId predicted;
    CategoryId truth;
    double iou = 0;
    double tp_weight = 0;
    double score = 0;
};

// Greedy score-order matching for one class: per-detection TP weight plus the
// recall denominator (class GT count plus credit-weighted cross-matched
// foreign GT).
struct ClassMatch {
    std::vector<double> tp_weights;  // one entry per detection, score order
    std::vector<double> scores;      // matching final_score order
    double recall_denominator = 0;
    std::size_t gt_count = 0;
    std::vector<MatchedPair> pairs;
};

// `dets` must all be of class `pred`; they are matched in descending
// final_score order (ties by input index). `gts` may contain all classes;
// cross-class matches are allowed where the credit matrix is positive, with
// same-class candidates always preferred.
ClassMatch match_class(std::vector<Detection> dets, const std::vector<GroundTruthBox>& gts,
                       CategoryId pred, double iou_thresh, const CreditMatrix& credit);

// 11-point interpolated AP over recall levels {0, 0.1, ..., 1.0}.
// Zero denominator yields 0.
double ap_11point(const std::vector<double>& tp_weights, double recall_denominator);

struct ClassReport {
    CategoryId category = CategoryId::NORMAL;
    double ap = 0;
    bool included = true;  // false when the class has neither GT nor detections
    std::size_t gt_count = 0;
    std::size_t det_count = 0;
    // PR staircase, one point per detection rank.
    std::vector<std::pair<double, double>> pr_curve;  // (recall, precision)
};

struct EvalReport {
    std::vector<ClassReport> per_class;  // fixed category order, all 10
    double map = 0;                      // mean over included classes
    std::vector<MatchedPair> matched_pairs;
    EvalConfig config;
};

// Pools detections and ground truth across images and evaluates every class.
EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
                    const EvalConfig& cfg, unsigned threads = 1);

// Slide is positive iff it holds a detection of a positive category with
// final_score >= tau.
bool triage_positive(const std::vector<Detection>& slide_dets, double tau);

struct TriageMetrics {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double acc = 0, sens = 0, spec = 0;
};

// Confusion counts over paired (prediction, label) booleans; positive =
// true. Throws ContractError on empty or mismatched input.
TriageMetrics triage_metrics(const std::vector<bool>& predictions,
                             const std::vector<bool>& labels);

// Metrics from raw counts (Sens = TP/(TP+FN), Spec = TN/(TN+FP),
// Acc = (TP+TN)/N).
TriageMetrics triage_metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                         std::size_t fn);

}  // namespace cyto

#endif
