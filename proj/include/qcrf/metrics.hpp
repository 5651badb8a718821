#ifndef QCRF_METRICS_HPP
#define QCRF_METRICS_HPP

#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"

namespace qcrf {

struct IouResult {
    std::vector<double> per_class;  // 0 for absent classes
    std::vector<char> present;      // class occurs in prediction or ground truth
    double mean = 0.0;              // over present classes only
};

/// Per-class and mean intersection-over-union. Pixels whose ground truth
/// equals ignore_label are excluded from both intersection and union;
/// classes absent from both maps are excluded from the mean.
inline IouResult eval_iou(const Labeling& prediction, const Labeling& ground_truth,
                          int num_labels, int ignore_label = -1) {
    detail::require(prediction.size() == ground_truth.size(),
                    "prediction and ground truth differ in size");
    detail::require(num_labels >= 1, "need at least one class");

    std::vector<std::int64_t> inter(num_labels, 0), in_pred(num_labels, 0),
        in_gt(num_labels, 0);
    std::int64_t evaluated = 0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const int g = ground_truth[i];
        if (ignore_label >= 0 && g == ignore_label) continue;
        const int p = prediction[i];
        detail::require(p >= 0 && p < num_labels && g >= 0 && g < num_labels,
                        "label out of range in eval_iou");
        ++evaluated;
        ++in_pred[p];
        ++in_gt[g];
        if (p == g) ++inter[p];
    }
    detail::require(evaluated > 0, "no evaluable pixels (all ignored)");

    IouResult out;
    out.per_class.assign(num_labels, 0.0);
    out.present.assign(num_labels, 0);
    double sum = 0.0;
    int present_count = 0;
    for (int l = 0; l < num_labels; ++l) {
        const std::int64_t uni = in_pred[l] + in_gt[l] - inter[l];
        if (uni == 0) continue;
        out.present[l] = 1;
        out.per_class[l] = static_cast<double>(inter[l]) / static_cast<double>(uni);
        sum += out.per_class[l];
        ++present_count;
    }
    out.mean = sum / present_count;
    return out;
}

}  // namespace qcrf

#endif
