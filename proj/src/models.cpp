#include "navsim/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "navsim/errors.hpp"
#include "navsim/geometry.hpp"
#include "navsim/kernels.hpp"

namespace navsim {

std::vector<std::pair<int, int>> monomial_exponents(int degree) {
    if (degree < 0) throw DomainError("degree cannot be negative");
    std::vector<std::pair<int, int>> out;
    for (int total = 0; total <= degree; ++total) {
        std::vector<std::pair<int, int>> level;
        for (int i = total; i >= 0; --i) level.emplace_back(i, total - i);
        std::stable_sort(level.begin(), level.end(), [](auto a, auto b) {
            int ma = std::min(a.first, a.second), mb = std::min(b.first, b.second);
            if (ma != mb) return ma > mb;
            return a.first > b.first;
        });
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

std::vector<std::string> monomial_labels(int degree) {
    std::vector<std::string> out;
    for (auto [i, j] : monomial_exponents(degree)) {
        if (i == 0 && j == 0) {
            out.push_back("1");
            continue;
        }
        std::string s;
        if (i == 1) s += "n";
        else if (i > 1) s += "n^" + std::to_string(i);
        if (j > 0) {
            if (!s.empty()) s += "*";
            s += j == 1 ? "od" : "od^" + std::to_string(j);
        }
        out.push_back(s);
    }
    return out;
}

std::vector<double> poly_features(double n, double od, int degree) {
    auto exps = monomial_exponents(degree);
    std::vector<double> out;
    out.reserve(exps.size());
    for (auto [i, j] : exps)
        out.push_back(std::pow(n, i) * std::pow(od, j));
    return out;
}

std::size_t Dataset::total_rows() const {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.size();
    return n;
}

double SafetyModel::predict(double narrowness, double density) const {
    double zn = (narrowness - means[0]) / stds[0];
    double zd = (density - means[1]) / stds[1];
    auto f = poly_features(zn, zd, degree);
    if (f.size() != coefficients.size())
        throw LengthMismatch("coefficient count does not match degree");
    double y = kernels::dot(f.data(), coefficients.data(), f.size());
    return clamp(y, 0.0, 1.0);
}

double r2_score(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw LengthMismatch("score inputs must be equal-sized and non-empty");
    double mean = kernels::sum(y.data(), y.size()) / static_cast<double>(y.size());
    double ss_res = kernels::sse(y.data(), yhat.data(), y.size());
    double ss_tot = 0.0;
    for (double v : y) ss_tot += sq(v - mean);
    if (ss_tot <= 1e-12) return ss_res <= 1e-9 ? 1.0 : 0.0;  // constant target
    return 1.0 - ss_res / ss_tot;
}

double mse_score(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw LengthMismatch("score inputs must be equal-sized and non-empty");
    return kernels::sse(y.data(), yhat.data(), y.size()) / static_cast<double>(y.size());
}

namespace {

// Dense Cholesky solve of (A + lambda I) x = b for symmetric positive
// semi-definite A held row-major.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t m, double lambda) {
    for (std::size_t i = 0; i < m; ++i) a[i * m + i] += lambda;
    // Decompose A = L L^T in place (lower triangle).
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
            if (i == j) {
                if (s <= 0.0) throw SingularSystem("normal equations not positive definite");
                a[i * m + i] = std::sqrt(s);
            } else {
                a[i * m + j] = s / a[j * m + j];
            }
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < m; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * m + k] * b[k];
        b[i] = s / a[i * m + i];
    }
    for (std::size_t ii = m; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < m; ++k) s -= a[k * m + ii] * b[k];
        b[ii] = s / a[ii * m + ii];
    }
    return b;
}

void standardization(const std::vector<DataPoint>& rows, std::array<double, 2>& means,
                     std::array<double, 2>& stds) {
    double mn = 0.0, md = 0.0;
    for (const auto& r : rows) {
        mn += r.narrowness;
        md += r.density;
    }
    const double n = static_cast<double>(rows.size());
    mn /= n;
    md /= n;
    double vn = 0.0, vd = 0.0;
    for (const auto& r : rows) {
        vn += sq(r.narrowness - mn);
        vd += sq(r.density - md);
    }
    means = {mn, md};
    stds = {std::sqrt(vn / n), std::sqrt(vd / n)};
    // Degenerate axes fall back to unit scale.
    if (stds[0] <= 1e-12) stds[0] = 1.0;
    if (stds[1] <= 1e-12) stds[1] = 1.0;
}

std::vector<double> predict_all(const SafetyModel& model, const std::vector<DataPoint>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(model.predict(r.narrowness, r.density));
    return out;
}

std::vector<double> targets(const std::vector<DataPoint>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.safety);
    return out;
}

}  // namespace

SafetyModel fit_polynomial(const std::vector<DataPoint>& train, int degree) {
    const std::size_t m = monomial_exponents(degree).size();
    if (train.size() < m) throw DomainError("not enough rows to fit polynomial");
    SafetyModel model;
    model.degree = degree;
    standardization(train, model.means, model.stds);

    std::vector<double> x;
    x.reserve(train.size() * m);
    std::vector<double> y;
    y.reserve(train.size());
    for (const auto& r : train) {
        double zn = (r.narrowness - model.means[0]) / model.stds[0];
        double zd = (r.density - model.means[1]) / model.stds[1];
        auto f = poly_features(zn, zd, degree);
        x.insert(x.end(), f.begin(), f.end());
        y.push_back(r.safety);
    }
    std::vector<double> xtx(m * m, 0.0), xty(m, 0.0);
    kernels::accumulate_normal(x.data(), y.data(), train.size(), m, xtx.data(), xty.data());
    model.coefficients = cholesky_solve(std::move(xtx), std::move(xty), m, 1e-9);

    auto yhat = predict_all(model, train);
    model.train_r2 = r2_score(y, yhat);
    model.train_mse = mse_score(y, yhat);
    return model;
}

CvResult cross_validate(const Dataset& data, int degree) {
    std::size_t folds = data.runs.size();
    if (folds < 2) throw TooFewRuns("cross-validation needs at least two runs");
    CvResult out;
    double best_r2 = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < folds; ++k) {
        std::vector<DataPoint> train;
        for (std::size_t r = 0; r < folds; ++r)
            if (r != k) train.insert(train.end(), data.runs[r].begin(), data.runs[r].end());
        const auto& test = data.runs[k];
        if (test.empty() || train.empty())
            throw DomainError("cross-validation fold has no rows");
        SafetyModel model = fit_polynomial(train, degree);
        auto y_test = targets(test);
        auto yhat_test = predict_all(model, test);
        model.test_r2 = r2_score(y_test, yhat_test);
        model.test_mse = mse_score(y_test, yhat_test);
        out.folds.push_back({static_cast<int>(k), model.train_r2, model.train_mse,
                             model.test_r2, model.test_mse});
        if (model.test_r2 > best_r2) {
            best_r2 = model.test_r2;
            out.best = model;
            out.best_fold = static_cast<int>(k);
        }
    }
    return out;
}

std::string SafetyModel::serialize() const {
    nlohmann::json j;
    j["format_version"] = format_version;
    j["config_id"] = config_id;
    j["degree"] = degree;
    j["feature_order"] = monomial_labels(degree);
    j["standardization"] = {{"means", means}, {"stds", stds}};
    j["coefficients"] = coefficients;
    j["scores"] = {{"train_r2", train_r2},
                   {"train_mse", train_mse},
                   {"test_r2", test_r2},
                   {"test_mse", test_mse}};
    return j.dump(2) + "\n";
}

SafetyModel SafetyModel::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON malformed: ") + e.what());
    }
    try {
        SafetyModel m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != 1)
            throw VersionMismatch("unsupported model format_version " +
                                  std::to_string(m.format_version));
        m.config_id = j.at("config_id").get<std::string>();
        m.degree = j.at("degree").get<int>();
        auto want = monomial_labels(m.degree);
        auto got = j.at("feature_order").get<std::vector<std::string>>();
        if (got != want) throw ParseError("model feature order is not canonical");
        m.means = j.at("standardization").at("means").get<std::array<double, 2>>();
        m.stds = j.at("standardization").at("stds").get<std::array<double, 2>>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        if (m.coefficients.size() != want.size())
            throw ParseError("model coefficient count does not match degree");
        const auto& s = j.at("scores");
        m.train_r2 = s.at("train_r2").get<double>();
        m.train_mse = s.at("train_mse").get<double>();
        m.test_r2 = s.at("test_r2").get<double>();
        m.test_mse = s.at("test_mse").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON missing fields: ") + e.what());
    }
}

void SafetyModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << serialize();
}

SafetyModel SafetyModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace navsim
