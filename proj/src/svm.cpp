#include "cadmine/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "cadmine/error.hpp"

namespace cadmine {

std::string to_string(KernelType k) {
    switch (k) {
        case KernelType::linear: return "linear";
        case KernelType::polynomial: return "polynomial";
        case KernelType::rbf: return "rbf";
        case KernelType::sigmoid: return "sigmoid";
    }
    return "?";
}

KernelType kernel_from_string(const std::string& s) {
    if (s == "linear") return KernelType::linear;
    if (s == "polynomial" || s == "poly") return KernelType::polynomial;
    if (s == "rbf") return KernelType::rbf;
    if (s == "sigmoid") return KernelType::sigmoid;
    throw DataError(cat("unknown kernel '", s, "'"));
}

void SvmConfig::validate() const {
    if (C <= 0) throw DataError("svm: C must be positive");
    if (tol <= 0) throw DataError("svm: tol must be positive");
    if (gamma < 0) throw DataError("svm: gamma must be positive (or 0 for auto)");
    if (degree < 1) throw DataError("svm: degree must be >= 1");
    if (max_passes < 1) throw DataError("svm: max_passes must be >= 1");
}

double kernel_eval(KernelType kernel, double gamma, int degree, double coef0,
                   const BitVector& a, const BitVector& b, const BitVector& mask) {
    switch (kernel) {
        case KernelType::linear:
            return static_cast<double>(BitVector::and_count(a, b, mask));
        case KernelType::polynomial: {
            double dot = static_cast<double>(BitVector::and_count(a, b, mask));
            return std::pow(dot + coef0, degree);
        }
        case KernelType::rbf: {
            // squared euclidean distance of 0/1 rows is the hamming distance
            double d2 = static_cast<double>(BitVector::xor_and_count(a, b, mask));
            return std::exp(-gamma * d2);
        }
        case KernelType::sigmoid: {
            double dot = static_cast<double>(BitVector::and_count(a, b, mask));
            return std::tanh(gamma * dot + coef0);
        }
    }
    throw Error("unreachable kernel type");
}

namespace {

struct Smo {
    const std::vector<BitVector>& rows;
    std::span<const int8_t> y;
    const SvmConfig& cfg;
    double gamma;
    const BitVector& mask;
    std::mt19937_64 rng;

    std::size_t n;
    std::vector<double> alpha;
    double b = 0;
    std::vector<double> gradient; // f_i = sum_j alpha_j y_j K_ij (no bias)
    std::vector<double> gram;     // row-major n x n kernel cache

    static constexpr double kAlphaEps = 1e-12;

    Smo(const std::vector<BitVector>& rows_, std::span<const int8_t> y_, const SvmConfig& cfg_,
        double gamma_, const BitVector& mask_, uint64_t seed)
        : rows(rows_), y(y_), cfg(cfg_), gamma(gamma_), mask(mask_), rng(seed),
          n(rows_.size()), alpha(n, 0.0), gradient(n, 0.0), gram(n * n) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double k = kernel_eval(cfg.kernel, gamma, cfg.degree, cfg.coef0, rows[i], rows[j], mask);
                if (!std::isfinite(k))
                    throw DataError(cat("svm: non-finite kernel value between rows ", i, " and ", j));
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }
    }

    double k(std::size_t i, std::size_t j) const { return gram[i * n + j]; }
    double error(std::size_t i) const { return gradient[i] + b - y[i]; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        double a1 = alpha[i1], a2 = alpha[i2];
        double y1 = y[i1], y2 = y[i2];
        double e1 = error(i1), e2 = error(i2);
        double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(cfg.C, cfg.C + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - cfg.C);
            hi = std::min(cfg.C, a1 + a2);
        }
        if (lo >= hi) return false;

        double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        double eta = k11 + k22 - 2 * k12;
        double a2new;
        if (eta > 0) {
            a2new = a2 + y2 * (e1 - e2) / eta;
            a2new = std::clamp(a2new, lo, hi);
        } else {
            // flat or concave-up along the constraint line (duplicate rows,
            // sigmoid kernel): the maximum sits at a clip end; the objective
            // change for a step t in alpha2 is slope*t - eta*t^2/2
            double slope = y2 * (e1 - e2);
            double t_lo = lo - a2, t_hi = hi - a2;
            double d_lo = slope * t_lo - 0.5 * eta * t_lo * t_lo;
            double d_hi = slope * t_hi - 0.5 * eta * t_hi * t_hi;
            if (d_lo > d_hi + 1e-12)
                a2new = lo;
            else if (d_hi > d_lo + 1e-12)
                a2new = hi;
            else
                return false;
        }
        if (std::abs(a2new - a2) < 1e-8 * (a2new + a2 + 1e-8)) return false;

        double a1new = a1 + s * (a2 - a2new);
        if (a1new < kAlphaEps) a1new = 0;
        if (a1new > cfg.C - kAlphaEps) a1new = cfg.C;
        if (a2new < kAlphaEps) a2new = 0;
        if (a2new > cfg.C - kAlphaEps) a2new = cfg.C;

        // bias per Platt's b1/b2 rule
        double b1 = b - e1 - y1 * (a1new - a1) * k11 - y2 * (a2new - a2) * k12;
        double b2 = b - e2 - y1 * (a1new - a1) * k12 - y2 * (a2new - a2) * k22;
        if (a1new > 0 && a1new < cfg.C)
            b = b1;
        else if (a2new > 0 && a2new < cfg.C)
            b = b2;
        else
            b = (b1 + b2) / 2;

        double d1 = y1 * (a1new - a1), d2 = y2 * (a2new - a2);
        for (std::size_t j = 0; j < n; ++j) gradient[j] += d1 * k(i1, j) + d2 * k(i2, j);
        alpha[i1] = a1new;
        alpha[i2] = a2new;
        return true;
    }

    bool examine(std::size_t i2) {
        double r2 = error(i2) * y[i2];
        bool violates = (r2 < -cfg.tol && alpha[i2] < cfg.C) || (r2 > cfg.tol && alpha[i2] > 0);
        if (!violates) return false;

        // 1) best |E1 - E2| among non-bound points
        double e2 = error(i2);
        std::size_t best = n;
        double best_gap = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] <= 0 || alpha[i] >= cfg.C) continue;
            double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n && take_step(best, i2)) return true;

        // 2) non-bound points from a random start, 3) all points
        std::size_t start = rng() % n;
        for (std::size_t off = 0; off < n; ++off) {
            std::size_t i = (start + off) % n;
            if (alpha[i] > 0 && alpha[i] < cfg.C && take_step(i, i2)) return true;
        }
        start = rng() % n;
        for (std::size_t off = 0; off < n; ++off) {
            std::size_t i = (start + off) % n;
            if (take_step(i, i2)) return true;
        }
        return false;
    }

    void solve() {
        int passes = 0;
        // Each round runs Platt's alternation to a clean full pass, then swaps
        // in the averaged margin-SV bias and re-verifies; at the fixed point
        // the KKT conditions hold at tol under the reported bias.
        for (int round = 0; round < 4 && passes < cfg.max_passes; ++round) {
            bool examine_all = true;
            while (passes < cfg.max_passes) {
                ++passes;
                std::size_t changed = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (examine_all || (alpha[i] > 0 && alpha[i] < cfg.C))
                        if (examine(i)) ++changed;
                }
                if (examine_all) {
                    if (changed == 0) break; // clean full pass: KKT holds at tol
                    examine_all = false;
                } else if (changed == 0) {
                    examine_all = true;
                }
            }
            double averaged = final_bias();
            if (std::abs(averaged - b) < 1e-12) break;
            b = averaged;
        }
    }

    // final bias from margin SVs; fall back to the midpoint of the interval
    // the bound alphas admit
    double final_bias() const {
        double sum = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (alpha[i] > 0 && alpha[i] < cfg.C) {
                sum += y[i] - gradient[i];
                ++cnt;
            }
        if (cnt) return sum / static_cast<double>(cnt);

        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double g = y[i] - gradient[i]; // the bias that would put i on the margin
            bool at_zero = alpha[i] <= 0;
            if ((at_zero && y[i] > 0) || (!at_zero && y[i] < 0))
                lo = std::max(lo, g);
            else
                hi = std::min(hi, g);
        }
        if (!std::isfinite(lo)) return std::isfinite(hi) ? hi : 0;
        if (!std::isfinite(hi)) return lo;
        return (lo + hi) / 2;
    }
};

} // namespace

SvmModel train_svm(const std::vector<BitVector>& rows, std::span<const int8_t> labels,
                   const SvmConfig& config, const BitVector& mask, uint64_t seed,
                   std::span<const std::string> names) {
    config.validate();
    if (rows.empty()) throw DataError("svm: empty training set");
    if (rows.size() != labels.size()) throw DataError("svm: row/label count mismatch");
    std::size_t pos = 0;
    for (int8_t l : labels) {
        if (l != 1 && l != -1) throw DataError("svm: labels must be +-1");
        if (l == 1) ++pos;
    }
    if (pos == 0 || pos == labels.size()) throw DataError("svm: training set has a single class");
    const std::size_t width = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != width) throw DataError("svm: inconsistent row widths");
    if (mask.size() != width) throw DataError("svm: mask width mismatch");
    if (!mask.any()) throw DataError("svm: empty feature mask");

    double gamma = config.gamma > 0 ? config.gamma : 1.0 / static_cast<double>(mask.count());

    Smo smo(rows, labels, config, gamma, mask, seed);
    smo.solve();

    SvmModel model;
    model.config = config;
    model.gamma = gamma;
    model.width = width;
    model.mask = mask;
    model.bias = smo.b; // solve() leaves the verified averaged bias here
    if (!names.empty()) {
        for (std::size_t j = 0; j < width; ++j)
            if (mask.get(j)) model.active_names.push_back(names[j]);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (smo.alpha[i] > 0) {
            model.sv_rows.push_back(rows[i]);
            model.alpha.push_back(smo.alpha[i]);
            model.labels.push_back(labels[i]);
            model.sv_indices.push_back(static_cast<uint32_t>(i));
        }
    }
    return model;
}

double decision_value(const SvmModel& model, const BitVector& x) {
    if (x.size() != model.width)
        throw DataError(cat("svm: query width ", x.size(), " != model width ", model.width));
    double sum = model.bias;
    for (std::size_t i = 0; i < model.sv_rows.size(); ++i)
        sum += model.alpha[i] * model.labels[i] * model.kernel_value(model.sv_rows[i], x);
    return sum;
}

bool predict(const SvmModel& model, const BitVector& x) {
    return decision_value(model, x) >= 0;
}

double dual_objective(const SvmModel& model) {
    double sum = 0, quad = 0;
    for (std::size_t i = 0; i < model.alpha.size(); ++i) {
        sum += model.alpha[i];
        for (std::size_t j = 0; j < model.alpha.size(); ++j)
            quad += model.alpha[i] * model.alpha[j] * model.labels[i] * model.labels[j] *
                    model.kernel_value(model.sv_rows[i], model.sv_rows[j]);
    }
    return sum - 0.5 * quad;
}

void save_model(const std::string& path, const SvmModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(cat("cannot write file: ", path));
    char buf[64];
    out << "cadmine-svm-model v1\n";
    out << "kernel " << to_string(model.config.kernel) << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", model.gamma);
    out << "gamma " << buf << '\n';
    out << "degree " << model.config.degree << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", model.config.coef0);
    out << "coef0 " << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", model.config.C);
    out << "C " << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", model.bias);
    out << "bias " << buf << '\n';

    // active columns by name, one per line (names may contain spaces)
    std::size_t active = model.mask.count();
    out << "active " << active << '\n';
    if (!model.active_names.empty()) {
        for (const auto& name : model.active_names) out << "feature " << name << '\n';
    } else {
        for (std::size_t j = 0; j < model.width; ++j)
            if (model.mask.get(j)) out << "feature col" << j << '\n';
    }

    out << "support_vectors " << model.sv_rows.size() << '\n';
    for (std::size_t i = 0; i < model.sv_rows.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", model.alpha[i]);
        out << "sv " << buf << ' ' << static_cast<int>(model.labels[i]) << ' ';
        // bits over active columns only, mask order
        for (std::size_t j = 0; j < model.width; ++j)
            if (model.mask.get(j)) out << (model.sv_rows[i].get(j) ? '1' : '0');
        out << '\n';
    }
    if (!out) throw DataError(cat("write failed: ", path));
}

SvmModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(cat("cannot open model: ", path));
    std::string line;
    if (!std::getline(in, line) || line != "cadmine-svm-model v1")
        throw DataError(cat(path, ": not a cadmine SVM model file"));

    SvmModel model;
    std::size_t n_active = 0, n_sv = 0;
    auto need = [&](std::istringstream& ss, const char* what) {
        if (ss.fail()) throw DataError(cat(path, ": malformed ", what, " line"));
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "kernel") {
            std::string v;
            ss >> v;
            model.config.kernel = kernel_from_string(v);
        } else if (key == "gamma") {
            ss >> model.gamma;
            need(ss, "gamma");
            model.config.gamma = model.gamma;
        } else if (key == "degree") {
            ss >> model.config.degree;
            need(ss, "degree");
        } else if (key == "coef0") {
            ss >> model.config.coef0;
            need(ss, "coef0");
        } else if (key == "C") {
            ss >> model.config.C;
            need(ss, "C");
        } else if (key == "bias") {
            ss >> model.bias;
            need(ss, "bias");
        } else if (key == "active") {
            ss >> n_active;
            need(ss, "active");
        } else if (key == "feature") {
            std::string rest;
            std::getline(ss, rest);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            model.active_names.push_back(rest);
        } else if (key == "support_vectors") {
            ss >> n_sv;
            need(ss, "support_vectors");
        } else if (key == "sv") {
            double a;
            int y;
            std::string bits;
            ss >> a >> y >> bits;
            need(ss, "sv");
            if (bits.size() != n_active)
                throw DataError(cat(path, ": sv row has ", bits.size(), " bits, expected ", n_active));
            BitVector row(n_active);
            for (std::size_t j = 0; j < bits.size(); ++j)
                if (bits[j] == '1') row.set(j);
            model.sv_rows.push_back(std::move(row));
            model.alpha.push_back(a);
            model.labels.push_back(static_cast<int8_t>(y));
        } else {
            throw DataError(cat(path, ": unknown model line '", key, "'"));
        }
    }
    if (model.active_names.size() != n_active)
        throw DataError(cat(path, ": expected ", n_active, " feature lines, got ",
                            model.active_names.size()));
    if (model.sv_rows.size() != n_sv)
        throw DataError(cat(path, ": expected ", n_sv, " support vectors, got ", model.sv_rows.size()));
    // loaded model is compact: width = active count, all columns active
    model.width = n_active;
    model.mask = BitVector(n_active, true);
    return model;
}

} // namespace cadmine
