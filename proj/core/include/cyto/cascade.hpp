#ifndef CYTO_CASCADE_HPP
#define CYTO_CASCADE_HPP

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "cyto/detection.hpp"
#include "cyto/image.hpp"

namespace cyto {

// Pluggable 4-class classifier over the hard categories, channel order
// (ASCUS, ASCH, LSIL, HSIL). `predicted` is the detector's label for the
// patch; neural implementations may ignore it, mocks rely on it.
class HardClassifier {
public:
    virtual ~HardClassifier() = default;
    // Output must be non-negative and sum to 1 within 1e-9.
    virtual std::array<double, 4> classify(const Image& patch, CategoryId predicted) const = 0;
    virtual int input_edge() const { return 299; }
    virtual bool thread_safe() const { return true; }
};

struct CropConfig {
    double context_pad = 0.1;  // fraction of box size added per side
    int output_edge = 299;

    void validate() const;
};

// Partition by is_hard, both halves in input order.
std::pair<std::vector<Detection>, std::vector<Detection>> select_hard(
    const std::vector<Detection>& dets);

// Crop of the box expanded by context_pad per side, clipped to the image,
// resized to output_edge square. Throws ContractError when the box misses
// the image entirely.
Image extract_crop(const Image& slide, const Detection& det, const CropConfig& cfg);

// Re-labels every hard detection with the classifier's argmax over the four
// hard classes and re-fuses final_score = objectness * classifier
// probability. Non-hard detections pass through untouched. When `slide` is
// null the classifier receives an empty patch (mock classifiers only need
// the predicted label).
std::vector<Detection> refine(const std::vector<Detection>& dets, const Image* slide,
                              const HardClassifier& clf, const CropConfig& cfg,
                              unsigned threads = 1);

// Mock classifiers. A confusion mock applies a 4x4 row-stochastic matrix to
// the incoming predicted class; non-deterministic rows are sampled from a
// stream keyed on (seed, patch content, predicted class) so results do not
// depend on call order.
std::unique_ptr<HardClassifier> make_identity_classifier();
std::unique_ptr<HardClassifier> make_constant_classifier(CategoryId hard_class);
std::unique_ptr<HardClassifier> make_confusion_classifier(
    const std::array<std::array<double, 4>, 4>& matrix, std::uint64_t seed = 0);

// Loads {"type": "identity" | "constant" | "confusion", ...} JSON.
std::unique_ptr<HardClassifier> classifier_from_json(const std::string& json_text);

}  // namespace cyto

#endif
