#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace csdsvm::cli {

/// Bad input data or flags; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Strict decimal parse (optional sign, fraction and exponent). Throws UsageError.
double parse_double(std::string_view text, std::string_view what);

std::vector<std::string> split_fields(std::string_view line);

/// Training table with header z1,...,zd,c,delta.
struct TrainingTable {
    Eigen::MatrixXd covariates;
    Eigen::VectorXd times;
    Eigen::VectorXi status;
};

TrainingTable read_training_csv(const std::filesystem::path& path);

/// Query table with header z1,...,zd. A header-only file yields zero rows.
Eigen::MatrixXd read_query_csv(const std::filesystem::path& path);

std::string predictions_csv(const Eigen::MatrixXd& query, const Eigen::VectorXd& predictions);

struct ResultRecord {
    std::string setting;
    long n = 0;
    std::string method;
    std::string censoring_case;
    double risk = 0.0;        // NaN when the repetition failed
    double bayes_risk = 0.0;  // NaN if absent
};

/// Reads the simulation results table; only the columns needed for plotting
/// are retained.
std::vector<ResultRecord> read_results_csv(const std::filesystem::path& path);

/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace csdsvm::cli
