#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace navsim {

// Canonical monomial order in (n, od): total degree ascending; within a
// degree, mixed terms first (min exponent descending), then higher n power
// first. Degree 2 reads [1, n, od, n*od, n^2, od^2].
std::vector<std::pair<int, int>> monomial_exponents(int degree);
std::vector<std::string> monomial_labels(int degree);

// Feature row for already-standardized inputs.
std::vector<double> poly_features(double n, double od, int degree);

struct DataPoint {
    double narrowness = 0.0;
    double density = 0.0;
    double safety = 0.0;
};

// One configuration's collected rows, grouped into runs for leave-one-run-out
// cross-validation.
struct Dataset {
    std::vector<std::vector<DataPoint>> runs;
    std::size_t total_rows() const;
};

// Polynomial safety surface over (narrowness, density). Inputs are
// standardized with the training-fold statistics before expansion;
// predictions clamp to [0, 1].
struct SafetyModel {
    int format_version = 1;
    std::string config_id;
    int degree = 4;
    std::array<double, 2> means{0.0, 0.0};
    std::array<double, 2> stds{1.0, 1.0};
    std::vector<double> coefficients;
    double train_r2 = 0.0, train_mse = 0.0;
    double test_r2 = 0.0, test_mse = 0.0;

    double predict(double narrowness, double density) const;

    std::string serialize() const;
    static SafetyModel parse(const std::string& text);
    void save(const std::string& path) const;
    static SafetyModel load(const std::string& path);
};

double r2_score(const std::vector<double>& y, const std::vector<double>& yhat);
double mse_score(const std::vector<double>& y, const std::vector<double>& yhat);

// Least squares on the polynomial expansion via ridge-stabilized normal
// equations (lambda 1e-9) and a dense Cholesky solve.
SafetyModel fit_polynomial(const std::vector<DataPoint>& train, int degree);

struct FoldScore {
    int fold = 0;
    double train_r2 = 0.0, train_mse = 0.0;
    double test_r2 = 0.0, test_mse = 0.0;
};

struct CvResult {
    SafetyModel best;        // model of the winning fold, scored on held-out data
    int best_fold = 0;
    std::vector<FoldScore> folds;
};

// Leave-one-run-out cross-validation; throws TooFewRuns below two runs.
CvResult cross_validate(const Dataset& data, int degree);

}  // namespace navsim
