#pragma once

#include "jerkplan/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace jerkplan {

/// Squared circular joint-space distance; equal to the squared Euclidean
/// distance whenever the componentwise gap is below pi.
inline double circular_sqdist(const Vec3& a, const Vec3& b) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double d = normalize_angle(b[k] - a[k]);
        s += d * d;
    }
    return s;
}

inline double rbf_kernel(const Vec3& a, const Vec3& b, double gamma) {
    return std::exp(-gamma * circular_sqdist(a, b));
}

/// Trained soft-margin RBF SVM: f(x) = sum_i coeff_i K(center_i, x) + bias,
/// with coeff_i = alpha_i * y_i over the support vectors only.
struct SvmModel {
    std::vector<Vec3> centers;
    std::vector<double> coeffs;
    double bias = 0.0;
    double gamma = 1.0;
    int iterations = 0;

    double decision(const Vec3& x) const {
        double f = bias;
        for (std::size_t i = 0; i < centers.size(); ++i)
            f += coeffs[i] * rbf_kernel(centers[i], x, gamma);
        return f;
    }
};

/// Sequential minimal optimization for the dual soft-margin problem,
/// maximal-violating-pair working-set selection. Labels must be +1/-1 and
/// both classes must be present. Stops when the KKT violation gap drops
/// below `tol`.
inline SvmModel train_rbf_svm(const std::vector<Vec3>& points, const std::vector<int>& labels,
                              double gamma, double C, double tol = 1e-3) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw DegenerateTrainingError("need at least two training samples");
    if (gamma <= 0.0 || C <= 0.0) throw InvalidInputError("gamma and C must be positive");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw InvalidInputError("labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw DegenerateTrainingError("training set contains a single class");

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of the dual objective at alpha = 0
    std::vector<double> kdiag(n);
    for (int i = 0; i < n; ++i) kdiag[i] = rbf_kernel(points[i], points[i], gamma);

    // FIFO cache of kernel rows; the working set revisits the same boundary
    // samples, so most lookups hit.
    const int cache_slots = std::min(n, 512);
    std::vector<std::vector<double>> cache(cache_slots);
    std::vector<int> cache_owner(cache_slots, -1);
    std::vector<int> slot_of(n, -1);
    int next_slot = 0;
    // avoid: slot that must survive this call (the partner row of the pair).
    const auto kernel_row = [&](int i, int avoid) -> const std::vector<double>& {
        if (slot_of[i] >= 0) return cache[slot_of[i]];
        if (next_slot == avoid) next_slot = (next_slot + 1) % cache_slots;
        const int slot = next_slot;
        next_slot = (next_slot + 1) % cache_slots;
        if (cache_owner[slot] >= 0) slot_of[cache_owner[slot]] = -1;
        cache_owner[slot] = i;
        slot_of[i] = slot;
        auto& row = cache[slot];
        row.resize(n);
        for (int t = 0; t < n; ++t) row[t] = rbf_kernel(points[i], points[t], gamma);
        return row;
    };

    const long max_iter = 200000L + 200L * n;
    long it = 0;
    double g_max = 0.0, g_min = 0.0;

    for (; it < max_iter; ++it) {
        // i maximizes -y*grad over the set still allowed to increase,
        // j minimizes it over the set still allowed to decrease.
        int i = -1, j = -1;
        g_max = -std::numeric_limits<double>::infinity();
        g_min = std::numeric_limits<double>::infinity();
        for (int t = 0; t < n; ++t) {
            const bool in_up = (labels[t] == 1) ? (alpha[t] < C) : (alpha[t] > 0.0);
            const bool in_low = (labels[t] == 1) ? (alpha[t] > 0.0) : (alpha[t] < C);
            const double v = -labels[t] * grad[t];
            if (in_up && v > g_max) {
                g_max = v;
                i = t;
            }
            if (in_low && v < g_min) {
                g_min = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || g_max - g_min < tol) break;

        const std::vector<double>& ki = kernel_row(i, -1);
        const std::vector<double>& kj = kernel_row(j, slot_of[i]);

        const double quad = std::max(kdiag[i] + kdiag[j] - 2.0 * ki[j], 1e-12);
        const double step = (g_max - g_min) / quad;

        const double old_ai = alpha[i], old_aj = alpha[j];
        const double sum = labels[i] * old_ai + labels[j] * old_aj;
        alpha[i] += labels[i] * step;
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = labels[j] * (sum - labels[i] * alpha[i]);
        alpha[j] = std::clamp(alpha[j], 0.0, C);
        alpha[i] = labels[i] * (sum - labels[j] * alpha[j]);

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (int t = 0; t < n; ++t)
            grad[t] += labels[t] * (labels[i] * dai * ki[t] + labels[j] * daj * kj[t]);
    }

    // Bias from the KKT interval midpoint; free support vectors pin it
    // exactly (b = -y_t * grad_t for 0 < alpha_t < C).
    double b = (g_max + g_min) / 2.0;
    double free_sum = 0.0;
    int free_count = 0;
    for (int t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < C) {
            free_sum += -labels[t] * grad[t];
            ++free_count;
        }
    }
    if (free_count > 0) b = free_sum / free_count;

    SvmModel model;
    model.gamma = gamma;
    model.bias = b;
    model.iterations = static_cast<int>(it);
    for (int t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.centers.push_back(points[t]);
            model.coeffs.push_back(alpha[t] * labels[t]);
        }
    }
    return model;
}

}  // namespace jerkplan
