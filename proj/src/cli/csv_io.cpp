#include "csdsvm/cli/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace csdsvm::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

bool blank(std::string_view line) { return trim(line).empty(); }

/// Number of leading z1..zd columns; throws unless they are consecutive from z1.
Eigen::Index covariate_columns(const std::vector<std::string>& header) {
    Eigen::Index d = 0;
    while (static_cast<std::size_t>(d) < header.size() &&
           header[static_cast<std::size_t>(d)] == "z" + std::to_string(d + 1)) {
        ++d;
    }
    if (d == 0) throw UsageError("header must start with covariate column z1");
    return d;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
    std::string_view s = trim(text);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        throw UsageError("invalid number '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const auto piece = line.substr(start, comma == std::string_view::npos ? line.npos
                                                                                : comma - start);
        fields.emplace_back(trim(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

TrainingTable read_training_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || blank(lines.front())) throw UsageError("training CSV has no header");
    const auto header = split_fields(lines.front());
    const Eigen::Index d = covariate_columns(header);
    const auto expect = [&](std::size_t idx, const std::string& name) {
        if (header.size() <= idx || header[idx] != name) {
            throw UsageError("training CSV header: missing column \"" + name + "\" at position " +
                             std::to_string(idx + 1));
        }
    };
    expect(static_cast<std::size_t>(d), "c");
    expect(static_cast<std::size_t>(d) + 1, "delta");
    if (header.size() != static_cast<std::size_t>(d) + 2) {
        throw UsageError("training CSV header has unexpected extra columns");
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        rows.push_back(split_fields(lines[i]));
        line_numbers.push_back(i + 1);
    }
    TrainingTable table{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), d),
                        Eigen::VectorXd(static_cast<Eigen::Index>(rows.size())),
                        Eigen::VectorXi(static_cast<Eigen::Index>(rows.size()))};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& f = rows[r];
        const auto ri = static_cast<Eigen::Index>(r);
        if (f.size() != header.size()) {
            throw UsageError(at_line(line_numbers[r]) + "expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(f.size()));
        }
        try {
            for (Eigen::Index j = 0; j < d; ++j) {
                table.covariates(ri, j) = parse_double(f[static_cast<std::size_t>(j)], header[static_cast<std::size_t>(j)]);
            }
            table.times[ri] = parse_double(f[static_cast<std::size_t>(d)], "c");
            const double delta = parse_double(f[static_cast<std::size_t>(d) + 1], "delta");
            if (delta != 0.0 && delta != 1.0) throw UsageError("delta must be 0 or 1");
            table.status[ri] = static_cast<int>(delta);
        } catch (const UsageError& e) {
            throw UsageError(at_line(line_numbers[r]) + e.what());
        }
    }
    return table;
}

Eigen::MatrixXd read_query_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || blank(lines.front())) throw UsageError("query CSV has no header");
    const auto header = split_fields(lines.front());
    const Eigen::Index d = covariate_columns(header);
    if (header.size() != static_cast<std::size_t>(d)) {
        throw UsageError("query CSV header must contain only z1..zd");
    }
    std::vector<double> values;
    Eigen::Index m = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        const auto f = split_fields(lines[i]);
        if (f.size() != header.size()) {
            throw UsageError(at_line(i + 1) + "expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(f.size()));
        }
        try {
            for (std::size_t j = 0; j < f.size(); ++j) values.push_back(parse_double(f[j], header[j]));
        } catch (const UsageError& e) {
            throw UsageError(at_line(i + 1) + e.what());
        }
        ++m;
    }
    Eigen::MatrixXd q(m, d);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index j = 0; j < d; ++j) q(r, j) = values[static_cast<std::size_t>(r * d + j)];
    }
    return q;
}

std::string predictions_csv(const Eigen::MatrixXd& query, const Eigen::VectorXd& predictions) {
    std::ostringstream out;
    for (Eigen::Index j = 0; j < query.cols(); ++j) out << 'z' << j + 1 << ',';
    out << "prediction\n";
    for (Eigen::Index i = 0; i < query.rows(); ++i) {
        for (Eigen::Index j = 0; j < query.cols(); ++j) out << format_double(query(i, j)) << ',';
        out << format_double(predictions[i]) << '\n';
    }
    return out.str();
}

std::vector<ResultRecord> read_results_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || blank(lines.front())) throw UsageError("results CSV is empty");
    const auto header = split_fields(lines.front());
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* name : {"setting", "n", "method", "censoring_case", "risk", "bayes_risk"}) {
        if (!col.count(name)) {
            throw UsageError(std::string("results CSV: missing column \"") + name + "\"");
        }
    }
    const auto number_or_nan = [](const std::string& s, std::string_view what) {
        if (s == "NA" || s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
        return parse_double(s, what);
    };
    std::vector<ResultRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        const auto f = split_fields(lines[i]);
        if (f.size() != header.size()) {
            throw UsageError(at_line(i + 1) + "expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(f.size()));
        }
        try {
            ResultRecord r;
            r.setting = f[col["setting"]];
            r.n = static_cast<long>(parse_double(f[col["n"]], "n"));
            r.method = f[col["method"]];
            r.censoring_case = f[col["censoring_case"]];
            r.risk = number_or_nan(f[col["risk"]], "risk");
            r.bayes_risk = number_or_nan(f[col["bayes_risk"]], "bayes_risk");
            out.push_back(std::move(r));
        } catch (const UsageError& e) {
            throw UsageError(at_line(i + 1) + e.what());
        }
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw UsageError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw UsageError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

}  // namespace csdsvm::cli
