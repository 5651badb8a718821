#ifndef QCRF_SUPERPIX_HPP
#define QCRF_SUPERPIX_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"

namespace qcrf {

/// Build a partition (with exact sample statistics) from a per-pixel
/// assignment. Indices must be contiguous in [0, m) and every superpixel
/// nonempty.
inline SuperpixelPartition make_partition(const GridImage& image,
                                          const std::vector<int>& assignment) {
    const int n = image.num_pixels();
    detail::require(n > 0, "degenerate image");
    detail::require(static_cast<int>(assignment.size()) == n,
                    "assignment size does not match image");
    int m = 0;
    for (int a : assignment) {
        detail::require(a >= 0, "negative superpixel index");
        m = std::max(m, a + 1);
    }
    SuperpixelPartition part;
    part.width = image.width;
    part.height = image.height;
    part.count = m;
    part.assignment = assignment;
    part.sizes.assign(m, 0);
    part.means.assign(m, 0.0);
    part.variances.assign(m, 0.0);
    part.centroid_x.assign(m, 0.0);
    part.centroid_y.assign(m, 0.0);
    for (int p = 0; p < n; ++p) {
        const int s = assignment[p];
        ++part.sizes[s];
        part.means[s] += image.intensities[p];
        part.centroid_x[s] += static_cast<double>(p % image.width);
        part.centroid_y[s] += static_cast<double>(p / image.width);
    }
    for (int s = 0; s < m; ++s) {
        detail::require(part.sizes[s] > 0, "superpixel index gap: empty superpixel");
        const double inv = 1.0 / static_cast<double>(part.sizes[s]);
        part.means[s] *= inv;
        part.centroid_x[s] *= inv;
        part.centroid_y[s] *= inv;
    }
    for (int p = 0; p < n; ++p) {
        const int s = assignment[p];
        const double d = image.intensities[p] - part.means[s];
        part.variances[s] += d * d;
    }
    for (int s = 0; s < m; ++s)
        part.variances[s] /= static_cast<double>(part.sizes[s]);  // population variance
    return part;
}

/// One superpixel per pixel, indexed in raster order.
inline SuperpixelPartition singleton_partition(const GridImage& image) {
    std::vector<int> assignment(image.num_pixels());
    for (int p = 0; p < image.num_pixels(); ++p) assignment[p] = p;
    return make_partition(image, assignment);
}

namespace detail {

// 4-connected component labeling of an assignment map, raster-order BFS.
struct Components {
    std::vector<int> comp;         // per pixel
    std::vector<std::int64_t> size;
    std::vector<int> cluster;      // owning cluster of each component
};

inline Components label_components(const std::vector<int>& assignment, int width, int height) {
    const int n = width * height;
    Components out;
    out.comp.assign(n, -1);
    std::vector<int> stack;
    for (int p = 0; p < n; ++p) {
        if (out.comp[p] != -1) continue;
        const int id = static_cast<int>(out.size.size());
        out.size.push_back(0);
        out.cluster.push_back(assignment[p]);
        out.comp[p] = id;
        stack.assign(1, p);
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            ++out.size[id];
            const int x = q % width, y = q / width;
            const int neigh[4] = {x > 0 ? q - 1 : -1, x + 1 < width ? q + 1 : -1,
                                  y > 0 ? q - width : -1, y + 1 < height ? q + width : -1};
            for (int r : neigh) {
                if (r >= 0 && out.comp[r] == -1 && assignment[r] == assignment[p]) {
                    out.comp[r] = id;
                    stack.push_back(r);
                }
            }
        }
    }
    return out;
}

}  // namespace detail

/// SLIC-style superpixels: fixed grid seeding, 10 k-means iterations over a
/// joint intensity/position distance, then a connectivity pass that merges
/// every non-largest component of a cluster into the largest adjacent
/// segment (ties to the lowest index). Deterministic for fixed inputs.
inline SuperpixelPartition slic_partition(const GridImage& image, int target_count,
                                          double compactness) {
    const int n = image.num_pixels();
    detail::require(n > 0, "degenerate image");
    detail::require(target_count >= 1 && target_count <= n,
                    "target_count must be in [1, pixel count]");
    detail::require(compactness > 0.0, "compactness must be positive");

    const double step = std::sqrt(static_cast<double>(n) / target_count);
    const int num_x = std::max(1, static_cast<int>(std::lround(image.width / step)));
    const int num_y = std::max(1, static_cast<int>(std::lround(image.height / step)));
    const int m = num_x * num_y;

    std::vector<double> cx(m), cy(m), cmu(m);
    for (int i = 0; i < num_y; ++i)
        for (int j = 0; j < num_x; ++j) {
            const int c = i * num_x + j;
            cx[c] = (j + 0.5) * image.width / num_x - 0.5;
            cy[c] = (i + 0.5) * image.height / num_y - 0.5;
            const int sx = std::clamp(static_cast<int>(std::lround(cx[c])), 0, image.width - 1);
            const int sy = std::clamp(static_cast<int>(std::lround(cy[c])), 0, image.height - 1);
            cmu[c] = image.at(sx, sy);
        }

    // Initial assignment: the seed-grid cell each pixel falls in.
    std::vector<int> assignment(n);
    for (int p = 0; p < n; ++p) {
        const int x = p % image.width, y = p / image.width;
        const int j = std::min(num_x - 1, x * num_x / image.width);
        const int i = std::min(num_y - 1, y * num_y / image.height);
        assignment[p] = i * num_x + j;
    }

    const double spatial_scale = (compactness / step) * (compactness / step);
    std::vector<double> best(n);
    const int radius = static_cast<int>(std::ceil(step));
    for (int iter = 0; iter < 10; ++iter) {
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        for (int c = 0; c < m; ++c) {
            const int x0 = std::max(0, static_cast<int>(std::floor(cx[c])) - radius);
            const int x1 = std::min(image.width - 1, static_cast<int>(std::ceil(cx[c])) + radius);
            const int y0 = std::max(0, static_cast<int>(std::floor(cy[c])) - radius);
            const int y1 = std::min(image.height - 1, static_cast<int>(std::ceil(cy[c])) + radius);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const int p = y * image.width + x;
                    const double di = image.intensities[p] - cmu[c];
                    const double dx = x - cx[c], dy = y - cy[c];
                    const double d2 = di * di + spatial_scale * (dx * dx + dy * dy);
                    if (d2 < best[p]) {
                        best[p] = d2;
                        assignment[p] = c;
                    }
                }
        }
        std::vector<double> sx(m, 0.0), sy(m, 0.0), smu(m, 0.0);
        std::vector<std::int64_t> cnt(m, 0);
        for (int p = 0; p < n; ++p) {
            const int c = assignment[p];
            sx[c] += p % image.width;
            sy[c] += p / image.width;
            smu[c] += image.intensities[p];
            ++cnt[c];
        }
        for (int c = 0; c < m; ++c) {
            if (cnt[c] == 0) continue;  // empty cluster keeps its old center
            const double inv = 1.0 / static_cast<double>(cnt[c]);
            cx[c] = sx[c] * inv;
            cy[c] = sy[c] * inv;
            cmu[c] = smu[c] * inv;
        }
    }

    // Connectivity enforcement: each cluster keeps its largest component.
    const detail::Components comps =
        detail::label_components(assignment, image.width, image.height);
    const int num_comps = static_cast<int>(comps.size.size());
    std::vector<int> keep(m, -1);
    for (int c = 0; c < num_comps; ++c) {
        const int cl = comps.cluster[c];
        if (keep[cl] == -1 || comps.size[c] > comps.size[keep[cl]]) keep[cl] = c;
    }
    std::vector<std::int64_t> cluster_size(m, 0);
    std::vector<char> settled(n, 0);
    for (int p = 0; p < n; ++p)
        if (keep[assignment[p]] == comps.comp[p]) {
            settled[p] = 1;
            ++cluster_size[assignment[p]];
        }
    std::vector<int> orphan_comps;
    for (int c = 0; c < num_comps; ++c)
        if (keep[comps.cluster[c]] != c) orphan_comps.push_back(c);
    std::vector<std::vector<int>> comp_pixels(num_comps);
    for (int p = 0; p < n; ++p) comp_pixels[comps.comp[p]].push_back(p);

    std::vector<char> pending(num_comps, 0);
    for (int c : orphan_comps) pending[c] = 1;
    while (!orphan_comps.empty()) {
        bool progress = false;
        std::vector<int> still_pending;
        for (int c : orphan_comps) {
            // Largest settled segment adjacent to this component.
            int target = -1;
            for (int p : comp_pixels[c]) {
                const int x = p % image.width, y = p / image.width;
                const int neigh[4] = {x > 0 ? p - 1 : -1,
                                      x + 1 < image.width ? p + 1 : -1,
                                      y > 0 ? p - image.width : -1,
                                      y + 1 < image.height ? p + image.width : -1};
                for (int r : neigh) {
                    if (r < 0 || !settled[r]) continue;
                    const int cl = assignment[r];
                    if (target == -1 || cluster_size[cl] > cluster_size[target] ||
                        (cluster_size[cl] == cluster_size[target] && cl < target))
                        target = cl;
                }
            }
            if (target == -1) {
                still_pending.push_back(c);
                continue;
            }
            for (int p : comp_pixels[c]) {
                assignment[p] = target;
                settled[p] = 1;
            }
            cluster_size[target] += comps.size[c];
            pending[c] = 0;
            progress = true;
        }
        detail::check_invariant(progress || still_pending.empty(),
                                "connectivity enforcement made no progress");
        orphan_comps = std::move(still_pending);
    }

    // Compact cluster ids (drop clusters that ended up empty).
    std::vector<int> remap(m, -1);
    int next = 0;
    for (int c = 0; c < m; ++c)
        if (cluster_size[c] > 0) remap[c] = next++;
    for (int p = 0; p < n; ++p) assignment[p] = remap[assignment[p]];
    return make_partition(image, assignment);
}

/// Result of splitting a partition by a labeling. `parent` and `label` map
/// each new superpixel to its originating superpixel and the label its
/// pixels share.
struct SplitResult {
    SuperpixelPartition partition;
    std::vector<int> parent;
    std::vector<int> label;
};

/// Refine a partition so that every superpixel is homogeneous in the current
/// labeling: one child per nonempty (superpixel, label) class, ordered by
/// superpixel then label. Children inherit the parent's mean, variance and
/// centroid so that pixel-pair weights are unchanged; sizes are recomputed.
inline SplitResult split_by_labeling(const SuperpixelPartition& partition,
                                     const Labeling& labeling) {
    detail::check_dims(labeling, partition);
    int num_labels = 0;
    for (int l : labeling) {
        detail::require(l >= 0, "negative label");
        num_labels = std::max(num_labels, l + 1);
    }
    const LabelCountTable counts = count_labels(labeling, partition, num_labels);

    SplitResult out;
    std::vector<int> child_of(static_cast<std::size_t>(partition.count) * num_labels, -1);
    for (int s = 0; s < partition.count; ++s)
        for (int l = 0; l < num_labels; ++l) {
            if (counts.at(s, l) == 0) continue;
            const int child = static_cast<int>(out.parent.size());
            child_of[static_cast<std::size_t>(s) * num_labels + l] = child;
            out.parent.push_back(s);
            out.label.push_back(l);
        }

    const int num_children = static_cast<int>(out.parent.size());
    SuperpixelPartition& child = out.partition;
    child.width = partition.width;
    child.height = partition.height;
    child.count = num_children;
    child.assignment.resize(partition.num_pixels());
    for (int p = 0; p < partition.num_pixels(); ++p)
        child.assignment[p] =
            child_of[static_cast<std::size_t>(partition.assignment[p]) * num_labels +
                     labeling[p]];
    child.sizes.assign(num_children, 0);
    for (int p = 0; p < partition.num_pixels(); ++p) ++child.sizes[child.assignment[p]];
    child.means.resize(num_children);
    child.variances.resize(num_children);
    child.centroid_x.resize(num_children);
    child.centroid_y.resize(num_children);
    for (int c = 0; c < num_children; ++c) {
        const int s = out.parent[c];
        child.means[c] = partition.means[s];
        child.variances[c] = partition.variances[s];
        child.centroid_x[c] = partition.centroid_x[s];
        child.centroid_y[c] = partition.centroid_y[s];
    }
    return out;
}

}  // namespace qcrf

#endif
