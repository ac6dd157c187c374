#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <numeric>
#include <sstream>

#include "geg/problems.hpp"

namespace geg {

namespace {

constexpr double kLeakySlope = 0.01;
constexpr double kProbFloor = 1e-12;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_cell(const std::string& cell, size_t row, const std::string& column) {
    if (cell.empty())
        throw CsvError("empty cell in column '" + column + "', data row " + std::to_string(row));
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || !std::isfinite(v))
        throw CsvError("non-numeric cell '" + cell + "' in column '" + column +
                       "', data row " + std::to_string(row));
    return v;
}

// Forward pass of the 2-layer LeakyReLU network for one sample.
// theta layout: W1 (h x v, row-major), b1 (h), W2 (h), b2 (1).
struct Forward {
    double u;          // pre-sigmoid output
    double yhat;       // clamped probability
    bool clamped;
};

Forward forward_pass(std::span<const double> theta, std::span<const double> x,
                     int v, int h, Vec& hidden, Vec& act) {
    const double* w1 = theta.data();
    const double* b1 = w1 + static_cast<size_t>(h) * v;
    const double* w2 = b1 + h;
    const double b2 = w2[h];
    for (int j = 0; j < h; ++j) {
        const double a = kernels::dot(w1 + static_cast<size_t>(j) * v, x.data(), v) + b1[j];
        act[j] = a;
        hidden[j] = a > 0.0 ? a : kLeakySlope * a;
    }
    const double u = kernels::dot(w2, hidden.data(), h) + b2;
    const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
    Forward f;
    f.u = u;
    f.yhat = std::min(std::max(s, kProbFloor), 1.0 - kProbFloor);
    f.clamped = (s < kProbFloor) || (s > 1.0 - kProbFloor);
    return f;
}

} // namespace

ErmInstance make_erm(std::vector<Vec> features, std::vector<int> labels,
                     int hidden_width, double alpha, uint64_t seed) {
    if (features.size() != labels.size())
        throw std::invalid_argument("make_erm: feature/label count mismatch");
    if (features.size() < 10) throw CsvError("need at least 10 data rows, got " +
                                             std::to_string(features.size()));
    if (hidden_width < 1) throw std::invalid_argument("make_erm: hidden_width must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("make_erm: alpha must be positive");
    const size_t rows = features.size();
    const size_t v = features.front().size();
    if (v == 0) throw CsvError("no feature columns");
    for (const auto& f : features)
        if (f.size() != v) throw std::invalid_argument("make_erm: ragged feature rows");
    for (int l : labels)
        if (l != 0 && l != 1) throw CsvError("labels must be 0 or 1");

    // column-wise standardization over the full dataset
    for (size_t j = 0; j < v; ++j) {
        double mean = 0.0;
        for (const auto& f : features) mean += f[j];
        mean /= static_cast<double>(rows);
        double var = 0.0;
        for (const auto& f : features) var += (f[j] - mean) * (f[j] - mean);
        var /= static_cast<double>(rows);
        const double sd = var > 1e-24 ? std::sqrt(var) : 1.0;
        for (auto& f : features) f[j] = (f[j] - mean) / sd;
    }

    // seeded shuffle, 80/20 split
    Rng rng(seed ^ 0x5f3759df9e3779b9ull);
    std::vector<int> order(rows);
    std::iota(order.begin(), order.end(), 0);
    for (size_t i = rows - 1; i > 0; --i) {
        const size_t j = static_cast<size_t>(rng.uniform() * static_cast<double>(i + 1));
        std::swap(order[i], order[std::min(j, i)]);
    }
    const size_t train = static_cast<size_t>(0.8 * static_cast<double>(rows));

    ErmInstance inst;
    inst.feature_dim = static_cast<int>(v);
    inst.hidden_width = hidden_width;
    inst.alpha = alpha;
    inst.seed = seed;
    for (size_t i = 0; i < rows; ++i) {
        if (i < train) {
            inst.features.push_back(features[order[i]]);
            inst.labels.push_back(labels[order[i]]);
        } else {
            inst.holdout_features.push_back(features[order[i]]);
            inst.holdout_labels.push_back(labels[order[i]]);
        }
    }

    // weights ~ N(0, 1/sqrt(fan_in)), biases zero
    const int h = hidden_width;
    inst.theta0.assign(inst.theta_count(), 0.0);
    Rng wrng(seed);
    const double sd1 = 1.0 / std::sqrt(static_cast<double>(v));
    const double sd2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (int j = 0; j < h * inst.feature_dim; ++j) inst.theta0[j] = sd1 * wrng.normal();
    double* w2 = inst.theta0.data() + static_cast<size_t>(h) * v + h;
    for (int j = 0; j < h; ++j) w2[j] = sd2 * wrng.normal();
    return inst;
}

ErmInstance load_erm(std::istream& csv, const std::string& label_column,
                     int hidden_width, double alpha, uint64_t seed) {
    std::string line;
    if (!std::getline(csv, line)) throw CsvError("empty CSV input");
    const auto header = split_csv_line(line);
    int label_idx = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_idx = static_cast<int>(i);
    if (label_idx < 0)
        throw CsvError("label column '" + label_column + "' not found in CSV header");
    if (header.size() < 2) throw CsvError("no feature columns");

    std::vector<Vec> features;
    std::vector<int> labels;
    size_t row = 0;
    while (std::getline(csv, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw CsvError("row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()));
        Vec f;
        f.reserve(header.size() - 1);
        for (size_t i = 0; i < cells.size(); ++i) {
            const double v = parse_cell(cells[i], row, header[i]);
            if (static_cast<int>(i) == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw CsvError("label value '" + cells[i] + "' in row " +
                                   std::to_string(row) + " is not 0 or 1");
                labels.push_back(static_cast<int>(v));
            } else {
                f.push_back(v);
            }
        }
        features.push_back(std::move(f));
    }
    return make_erm(std::move(features), std::move(labels), hidden_width, alpha, seed);
}

void synthetic_blobs(int rows, int feature_dim, uint64_t seed,
                     std::vector<Vec>& features, std::vector<int>& labels) {
    if (rows < 1 || feature_dim < 1)
        throw std::invalid_argument("synthetic_blobs: rows and feature_dim must be >= 1");
    features.clear();
    labels.clear();
    Rng rng(seed);
    const double sep = 1.5 / std::sqrt(static_cast<double>(feature_dim));
    for (int i = 0; i < rows; ++i) {
        const int label = i % 2;
        Vec f(feature_dim);
        for (int j = 0; j < feature_dim; ++j)
            f[j] = (label == 0 ? -sep : sep) + rng.normal();
        features.push_back(std::move(f));
        labels.push_back(label);
    }
}

MinMaxProblem erm_objective_subset(const ErmInstance& instance, std::vector<int> rows) {
    const int mcount = static_cast<int>(rows.size());
    if (mcount < 1) throw std::invalid_argument("erm_objective: empty row subset");
    for (int r : rows)
        if (r < 0 || r >= instance.train_rows())
            throw std::invalid_argument("erm_objective: row index out of range");

    const int v = instance.feature_dim;
    const int h = instance.hidden_width;
    const int ntheta = instance.theta_count();
    const double alpha = instance.alpha;

    // copy what the closures need; the instance may go away
    auto xs = std::make_shared<std::vector<Vec>>();
    auto ys = std::make_shared<std::vector<int>>();
    for (int r : rows) {
        xs->push_back(instance.features[r]);
        ys->push_back(instance.labels[r]);
    }

    MinMaxProblem p;
    p.n = ntheta;
    p.m = mcount;
    p.name = "robust_erm";

    p.eval = [=](std::span<const double> z) {
        const std::span<const double> theta = z.first(ntheta);
        const double* pw = z.data() + ntheta;
        const double pu = 1.0 / static_cast<double>(mcount);
        Vec hidden(h), act(h);
        double loss = 0.0, reg = 0.0;
        for (int i = 0; i < mcount; ++i) {
            const Forward fw = forward_pass(theta, (*xs)[i], v, h, hidden, act);
            const double yi = (*ys)[i];
            const double ce = yi * std::log(fw.yhat) + (1.0 - yi) * std::log(1.0 - fw.yhat);
            loss += pw[i] * ce;
            reg += (pw[i] - pu) * (pw[i] - pu);
        }
        return -loss - alpha * reg;
    };

    p.grad = [=](std::span<const double> z, std::span<double> g) {
        const std::span<const double> theta = z.first(ntheta);
        const double* pw = z.data() + ntheta;
        const double pu = 1.0 / static_cast<double>(mcount);
        const double* w2 = theta.data() + static_cast<size_t>(h) * v + h;
        std::fill(g.begin(), g.end(), 0.0);
        double* gw1 = g.data();
        double* gb1 = g.data() + static_cast<size_t>(h) * v;
        double* gw2 = gb1 + h;
        double* gb2 = gw2 + h;
        double* gp = g.data() + ntheta;
        Vec hidden(h), act(h);
        for (int i = 0; i < mcount; ++i) {
            const Forward fw = forward_pass(theta, (*xs)[i], v, h, hidden, act);
            const double yi = (*ys)[i];
            const double ce = yi * std::log(fw.yhat) + (1.0 - yi) * std::log(1.0 - fw.yhat);
            gp[i] = -ce - 2.0 * alpha * (pw[i] - pu);
            // d(-p_i * CE_i)/du = p_i * (yhat - y); zero where the
            // probability clamp is active
            const double delta = fw.clamped ? 0.0 : pw[i] * (fw.yhat - yi);
            if (delta == 0.0) continue;
            gb2[0] += delta;
            kernels::axpy(delta, hidden.data(), gw2, h);
            const double* xi = (*xs)[i].data();
            for (int j = 0; j < h; ++j) {
                const double dh = delta * w2[j] * (act[j] > 0.0 ? 1.0 : kLeakySlope);
                gb1[j] += dh;
                kernels::axpy(dh, xi, gw1 + static_cast<size_t>(j) * v, v);
            }
        }
    };
    return p;
}

MinMaxProblem erm_objective(const ErmInstance& instance) {
    std::vector<int> all(instance.train_rows());
    std::iota(all.begin(), all.end(), 0);
    return erm_objective_subset(instance, std::move(all));
}

} // namespace geg
