#include "csdsvm/cli/model_io.hpp"

#include "csdsvm/cli/csv_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace csdsvm::cli {

using nlohmann::json;

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

std::string hex64(std::uint64_t x) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << x;
    return s.str();
}

json censoring_to_json(const CensoringModel& cens) {
    if (cens.kind() == CensoringModel::Kind::Known) {
        return {{"kind", "known"},
                {"tag", cens.known_tag()},
                {"params", cens.known_params()},
                {"floor", cens.floor()}};
    }
    return {{"kind", "kde"},
            {"samples", cens.kde_samples()},
            {"bandwidth", cens.bandwidth()},
            {"floor", cens.floor()}};
}

CensoringModel censoring_from_json(const json& doc) {
    const auto kind = doc.at("kind").get<std::string>();
    const double floor = doc.at("floor").get<double>();
    if (kind == "kde") {
        return CensoringModel::kde(doc.at("samples").get<std::vector<double>>(),
                                   doc.at("bandwidth").get<double>(), floor);
    }
    if (kind == "known") {
        const auto tag = doc.at("tag").get<std::string>();
        if (tag == "uniform") {
            return CensoringModel::uniform(doc.at("params").at("tau").get<double>(), floor);
        }
        throw ModelFormatError("model file: unsupported known censoring density '" + tag + "'");
    }
    throw ModelFormatError("model file: unknown censoring kind '" + kind + "'");
}

}  // namespace

std::uint64_t data_digest(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto n = static_cast<std::size_t>(data.size());
    fnv_bytes(h, data.covariates().data(), n * static_cast<std::size_t>(data.dim()) * sizeof(double));
    fnv_bytes(h, data.times().data(), n * sizeof(double));
    fnv_bytes(h, data.status().data(), n * sizeof(int));
    const double tau = data.tau();
    fnv_bytes(h, &tau, sizeof tau);
    return h;
}

json model_to_json(const FittedModel& model, std::uint64_t digest) {
    json support = json::array();
    for (Eigen::Index i = 0; i < model.support.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < model.support.cols(); ++j) row.push_back(model.support(i, j));
        support.push_back(std::move(row));
    }
    json kernel = {{"kind", model.kernel.name()}};
    if (model.kernel.kind() == KernelKind::Rbf) kernel["sigma"] = model.kernel.sigma();

    return {{"format", "csdsvm-model"},
            {"version", kModelFormatVersion},
            {"kernel", kernel},
            {"lambda", model.lambda},
            {"intercept", model.intercept ? json(*model.intercept) : json(nullptr)},
            {"alpha", std::vector<double>(model.alpha.data(), model.alpha.data() + model.alpha.size())},
            {"support", support},
            {"censoring", censoring_to_json(model.censoring)},
            {"training",
             {{"n", model.training_size()},
              {"d", model.dim()},
              {"tau", model.tau},
              {"relative_residual", model.relative_residual},
              {"digest", hex64(digest)}}}};
}

ModelFile model_from_json(const json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "csdsvm-model") {
            throw ModelFormatError("model file: not a csdsvm model");
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw ModelFormatError("model file: unsupported format version " +
                                   std::to_string(version));
        }
        const auto& k = doc.at("kernel");
        const auto kind = k.at("kind").get<std::string>();
        KernelSpec kernel = KernelSpec::linear();
        if (kind == "rbf") {
            kernel = KernelSpec::rbf(k.at("sigma").get<double>());
        } else if (kind != "linear") {
            throw ModelFormatError("model file: unknown kernel '" + kind + "'");
        }

        const auto& training = doc.at("training");
        const auto n = training.at("n").get<Eigen::Index>();
        const auto d = training.at("d").get<Eigen::Index>();
        const auto alpha = doc.at("alpha").get<std::vector<double>>();
        const auto& support = doc.at("support");
        if (n < 1 || d < 1 || static_cast<Eigen::Index>(alpha.size()) != n ||
            static_cast<Eigen::Index>(support.size()) != n) {
            throw ModelFormatError("model file: inconsistent sizes");
        }
        Eigen::MatrixXd z(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = support.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != d) {
                throw ModelFormatError("model file: support row " + std::to_string(i) +
                                       " has the wrong dimension");
            }
            for (Eigen::Index j = 0; j < d; ++j) z(i, j) = row[static_cast<std::size_t>(j)];
        }
        std::optional<double> intercept;
        if (!doc.at("intercept").is_null()) intercept = doc.at("intercept").get<double>();

        const double lambda = doc.at("lambda").get<double>();
        if (!(lambda > 0.0)) throw ModelFormatError("model file: lambda must be positive");

        const std::string digest_hex = training.at("digest").get<std::string>();
        std::uint64_t digest = 0;
        try {
            digest = std::stoull(digest_hex, nullptr, 16);
        } catch (const std::exception&) {
            throw ModelFormatError("model file: bad digest");
        }

        FittedModel model{kernel,
                          std::move(z),
                          Eigen::Map<const Eigen::VectorXd>(alpha.data(), n),
                          intercept,
                          lambda,
                          censoring_from_json(doc.at("censoring")),
                          training.at("tau").get<double>(),
                          training.value("relative_residual", 0.0)};
        return ModelFile{std::move(model), digest};
    } catch (const ModelFormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelFormatError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const FittedModel& model, std::uint64_t digest) {
    write_file_atomic(path, model_to_json(model, digest).dump(1) + "\n");
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelFormatError("cannot open model file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

}  // namespace csdsvm::cli
