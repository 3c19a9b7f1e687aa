#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cadmine/bitvec.hpp"

namespace cadmine {

enum class KernelType { linear, polynomial, rbf, sigmoid };
std::string to_string(KernelType k);
KernelType kernel_from_string(const std::string& s);

struct SvmConfig {
    KernelType kernel = KernelType::rbf;
    double gamma = 0; // 0 = 1 / active feature count
    int degree = 3;
    double coef0 = 0;
    double C = 1.0;
    double tol = 1e-3;
    int max_passes = 200; // cap on outer SMO sweeps

    void validate() const;
};

// Kernel between two 0/1 rows restricted to the masked columns. Dot products
// and squared distances reduce to popcounts.
double kernel_eval(KernelType kernel, double gamma, int degree, double coef0,
                   const BitVector& a, const BitVector& b, const BitVector& mask);

struct SvmModel {
    SvmConfig config;
    double gamma = 0; // resolved value actually used
    std::size_t width = 0;
    BitVector mask;                     // active columns
    std::vector<std::string> active_names; // names of active columns, mask order
    std::vector<BitVector> sv_rows;     // support vectors, full width
    std::vector<double> alpha;          // dual coefficients, all > 0
    std::vector<int8_t> labels;         // +-1 per support vector
    std::vector<uint32_t> sv_indices;   // positions in the training set (not serialized)
    double bias = 0;

    double kernel_value(const BitVector& a, const BitVector& b) const {
        return kernel_eval(config.kernel, gamma, config.degree, config.coef0, a, b, mask);
    }
};

// Sequential minimal optimization on the soft-margin dual. Deterministic for
// a fixed seed (the second-choice heuristic uses a seeded generator).
// Labels are +-1; `names` supplies active_names for serialization and may be
// empty. Throws DataError on single-class or empty input.
SvmModel train_svm(const std::vector<BitVector>& rows, std::span<const int8_t> labels,
                   const SvmConfig& config, const BitVector& mask, uint64_t seed,
                   std::span<const std::string> names = {});

double decision_value(const SvmModel& model, const BitVector& x);
// sign of the decision value; exactly zero counts as positive
bool predict(const SvmModel& model, const BitVector& x);

// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij of the
// trained multipliers (zero alphas drop out, so support vectors suffice).
double dual_objective(const SvmModel& model);

void save_model(const std::string& path, const SvmModel& model);
SvmModel load_model(const std::string& path);

} // namespace cadmine
