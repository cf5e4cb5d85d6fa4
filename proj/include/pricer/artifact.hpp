#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <variant>

#include "pricer/arima.hpp"
#include "pricer/core.hpp"
#include "pricer/elastic_net.hpp"
#include "pricer/gbt.hpp"
#include "pricer/lstm.hpp"
#include "pricer/mlp.hpp"
#include "pricer/random_forest.hpp"

namespace pricer {

enum class ModelKind { linear_elastic_net, random_forest, gbt, mlp, ensemble, lstm, arima };

inline std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::linear_elastic_net: return "linear_elastic_net";
        case ModelKind::random_forest: return "random_forest";
        case ModelKind::gbt: return "gbt";
        case ModelKind::mlp: return "mlp";
        case ModelKind::ensemble: return "ensemble";
        case ModelKind::lstm: return "lstm";
        default: return "arima";
    }
}

inline ModelKind parse_model_kind(std::string_view s) {
    if (s == "linear_elastic_net") return ModelKind::linear_elastic_net;
    if (s == "random_forest") return ModelKind::random_forest;
    if (s == "gbt") return ModelKind::gbt;
    if (s == "mlp") return ModelKind::mlp;
    if (s == "ensemble") return ModelKind::ensemble;
    if (s == "lstm") return ModelKind::lstm;
    if (s == "arima") return ModelKind::arima;
    throw DomainError("bad model kind: " + std::string(s));
}

struct TrainingMeta {
    std::map<std::string, double> hyperparameters;
    std::uint64_t seed = 0;
    Date train_start, train_end;
};

/// Elementwise median of the four regressors' predictions. With four
/// members the median is the mean of the 2nd and 3rd order statistics,
/// which shrugs off one diverging member.
inline Eigen::VectorXd median_of_four(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
    Eigen::VectorXd out(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        std::array<double, 4> v{a(i), b(i), c(i), d(i)};
        std::sort(v.begin(), v.end());
        out(i) = 0.5 * (v[1] + v[2]);
    }
    return out;
}

/// The paper's regressor ensemble: elastic net, forest, boosted trees, MLP.
struct EnsembleModel {
    ElasticNet linear;
    RandomForest forest;
    Gbt boosted;
    Mlp perceptron;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        return median_of_four(linear.predict(X), forest.predict(X), boosted.predict(X),
                              perceptron.predict(X));
    }

    int n_features() const { return static_cast<int>(linear.n_features()); }

    void save(std::ostream& os) const {
        os << "ensemble 1\n";
        linear.save(os);
        forest.save(os);
        boosted.save(os);
        perceptron.save(os);
    }

    static EnsembleModel load(std::istream& is) {
        serialize::expect_tag(is, "ensemble", 1);
        EnsembleModel e;
        e.linear = ElasticNet::load(is);
        e.forest = RandomForest::load(is);
        e.boosted = Gbt::load(is);
        e.perceptron = Mlp::load(is);
        return e;
    }
};

/**
 * A trained model plus its training recipe, serializable to a versioned
 * flat file. Doubles are stored as hexfloat so a load() returns bit-exact
 * parameters.
 */
struct ModelArtifact {
    ModelKind kind = ModelKind::ensemble;
    TrainingMeta meta;
    std::variant<ElasticNet, RandomForest, Gbt, Mlp, EnsembleModel, Lstm, Arima> model;

    /// Row-per-sample prediction; defined for the matrix-input models.
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        return std::visit(
            [&](const auto& m) -> Eigen::VectorXd {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, Lstm> || std::is_same_v<T, Arima>)
                    throw DomainError("artifact: sequence model cannot predict from a feature matrix");
                else
                    return m.predict(X);
            },
            model);
    }

    void save(std::ostream& os) const {
        os << "pricer-model 1\n" << to_string(kind) << '\n';
        os << meta.seed << ' ' << meta.train_start.serial << ' ' << meta.train_end.serial << ' '
           << meta.hyperparameters.size() << '\n';
        for (const auto& [k, v] : meta.hyperparameters) {
            os << k << ' ';
            serialize::write_scalar(os, v);
        }
        std::visit([&](const auto& m) { m.save(os); }, model);
    }

    void save_file(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw IoError("cannot open for write: " + path);
        save(os);
    }

    static ModelArtifact load(std::istream& is) {
        serialize::expect_tag(is, "pricer-model", 1);
        std::string kind_name;
        is >> kind_name;
        ModelArtifact a;
        a.kind = parse_model_kind(kind_name);
        std::size_t n_hp = 0;
        std::int32_t s0 = 0, s1 = 0;
        is >> a.meta.seed >> s0 >> s1 >> n_hp;
        a.meta.train_start = Date::from_serial(s0);
        a.meta.train_end = Date::from_serial(s1);
        for (std::size_t i = 0; i < n_hp; ++i) {
            std::string k;
            is >> k;
            a.meta.hyperparameters[k] = serialize::read_scalar(is);
        }
        switch (a.kind) {
            case ModelKind::linear_elastic_net: a.model = ElasticNet::load(is); break;
            case ModelKind::random_forest: a.model = RandomForest::load(is); break;
            case ModelKind::gbt: a.model = Gbt::load(is); break;
            case ModelKind::mlp: a.model = Mlp::load(is); break;
            case ModelKind::ensemble: a.model = EnsembleModel::load(is); break;
            case ModelKind::lstm: a.model = Lstm::load(is); break;
            case ModelKind::arima: a.model = Arima::load(is); break;
        }
        return a;
    }

    static ModelArtifact load_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw IoError("cannot open " + path);
        return load(is);
    }
};

/// Median-ensemble prediction across the four separately trained regressors.
/// Throws when the artifacts disagree on the feature schema.
inline Eigen::VectorXd ensemble_predict(const ModelArtifact& linear, const ModelArtifact& forest,
                                        const ModelArtifact& boosted, const ModelArtifact& mlp,
                                        const Eigen::MatrixXd& X) {
    auto width = [](const ModelArtifact& a) -> int {
        return std::visit(
            [](const auto& m) -> int {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, Lstm> || std::is_same_v<T, Arima>)
                    throw DomainError("ensemble_predict: sequence model in regressor ensemble");
                else
                    return static_cast<int>(m.n_features());
            },
            a.model);
    };
    int w = width(linear);
    if (width(forest) != w || width(boosted) != w || width(mlp) != w || X.cols() != w)
        throw DomainError("ensemble_predict: member feature schemas do not match");
    return median_of_four(linear.predict(X), forest.predict(X), boosted.predict(X),
                          mlp.predict(X));
}

}  // namespace pricer
