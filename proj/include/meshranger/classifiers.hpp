#pragma once

// Four classifiers over labelled feature matrices: Gaussian naive Bayes,
// linear discriminant analysis, distance-weighted k nearest neighbours and a
// random forest of Gini CART trees. Ties between classes always resolve to
// the lowest class index.
//
// NB and RF see raw features. LDA and KNN z-score every column with the
// training mean and standard deviation (constant columns keep scale 1).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core.hpp"
#include "dataset.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace meshranger {

enum class Algorithm { NaiveBayes, Lda, Knn, RandomForest };

inline std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::NaiveBayes: return "nb";
        case Algorithm::Lda: return "lda";
        case Algorithm::Knn: return "knn";
        case Algorithm::RandomForest: return "rf";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
    if (s == "nb") return Algorithm::NaiveBayes;
    if (s == "lda") return Algorithm::Lda;
    if (s == "knn") return Algorithm::Knn;
    if (s == "rf") return Algorithm::RandomForest;
    return std::nullopt;
}

struct Hyperparams {
    std::size_t knn_k = 5;
    std::size_t rf_trees = 100;
    std::size_t rf_min_leaf = 1;
    std::size_t rf_features = 0;  ///< per-split candidates; 0 = ceil(sqrt(dims))
    std::uint64_t seed = 1;

    bool operator==(const Hyperparams&) const = default;
};

inline constexpr double kNbVarianceFloor = 1e-9;
inline constexpr double kLdaRidge = 1e-6;

/// Index of the largest score; the first (lowest index) wins ties.
template <typename Range>
std::size_t argmax_first(const Range& scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < static_cast<std::size_t>(std::size(scores)); ++c)
        if (scores[c] > scores[best]) best = c;
    return best;
}

/// Majority vote over predicted class indices; lowest index wins ties.
inline std::size_t majority_vote(std::span<const std::size_t> predictions, std::size_t classes) {
    require(!predictions.empty(), "majority_vote: no predictions");
    std::vector<std::size_t> votes(classes, 0);
    for (auto c : predictions) ++votes.at(c);
    return argmax_first(votes);
}

namespace detail {

struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Matrix& x) {
        Standardizer s;
        s.mean = x.colwise().mean();
        s.scale.resize(x.cols());
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            const double var = (x.col(f).array() - s.mean(f)).square().mean();
            s.scale(f) = var > 0.0 ? std::sqrt(var) : 1.0;
        }
        return s;
    }

    Eigen::RowVectorXd apply(const Eigen::RowVectorXd& row) const { return (row - mean).cwiseQuotient(scale); }

    Matrix apply(const Matrix& x) const {
        Matrix out = x;
        for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = apply(Eigen::RowVectorXd(x.row(r)));
        return out;
    }
};

inline std::vector<std::size_t> class_counts(const TrainingSet& set) {
    std::vector<std::size_t> n(set.class_count(), 0);
    for (auto y : set.labels) ++n[y];
    return n;
}

}  // namespace detail

class NaiveBayes {
public:
    static NaiveBayes fit(const TrainingSet& set) {
        NaiveBayes m;
        const auto d = static_cast<Eigen::Index>(set.dims());
        const auto k = static_cast<Eigen::Index>(set.class_count());
        const auto counts = detail::class_counts(set);
        const Eigen::RowVectorXd overall = set.features.colwise().mean();
        Eigen::RowVectorXd floor(d);
        for (Eigen::Index f = 0; f < d; ++f) {
            const double v = (set.features.col(f).array() - overall(f)).square().mean();
            floor(f) = kNbVarianceFloor * (v > 0.0 ? v : 1.0);
        }
        m.mean_ = Matrix::Zero(k, d);
        m.var_ = Matrix::Zero(k, d);
        for (std::size_t r = 0; r < set.size(); ++r) m.mean_.row(set.labels[r]) += set.features.row(r);
        for (Eigen::Index c = 0; c < k; ++c)
            if (counts[c] > 0) m.mean_.row(c) /= static_cast<double>(counts[c]);
        for (std::size_t r = 0; r < set.size(); ++r)
            m.var_.row(set.labels[r]) += (set.features.row(r) - m.mean_.row(set.labels[r])).array().square().matrix();
        m.log_prior_.assign(k, -std::numeric_limits<double>::infinity());
        for (Eigen::Index c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                m.var_.row(c) /= static_cast<double>(counts[c]);
                m.log_prior_[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(set.size()));
            }
            m.var_.row(c) = m.var_.row(c).cwiseMax(floor);
        }
        return m;
    }

    std::vector<double> scores(const Eigen::RowVectorXd& x) const {
        std::vector<double> s(log_prior_);
        for (Eigen::Index c = 0; c < mean_.rows(); ++c) {
            if (!std::isfinite(s[c])) continue;
            for (Eigen::Index f = 0; f < mean_.cols(); ++f) {
                const double v = var_(c, f);
                const double dx = x(f) - mean_(c, f);
                s[c] -= 0.5 * (std::log(2.0 * kPi * v) + dx * dx / v);
            }
        }
        return s;
    }

    std::size_t predict(const Eigen::RowVectorXd& x) const { return argmax_first(scores(x)); }
    const Matrix& means() const { return mean_; }
    const Matrix& variances() const { return var_; }

private:
    Matrix mean_;
    Matrix var_;
    std::vector<double> log_prior_;
};

class Lda {
public:
    static Lda fit(const TrainingSet& set) {
        Lda m;
        m.scaler_ = detail::Standardizer::fit(set.features);
        const Matrix z = m.scaler_.apply(set.features);
        const auto d = z.cols();
        const auto k = static_cast<Eigen::Index>(set.class_count());
        const auto counts = detail::class_counts(set);
        Matrix means = Matrix::Zero(k, d);
        for (std::size_t r = 0; r < set.size(); ++r) means.row(set.labels[r]) += z.row(r);
        for (Eigen::Index c = 0; c < k; ++c)
            if (counts[c] > 0) means.row(c) /= static_cast<double>(counts[c]);

        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t r = 0; r < set.size(); ++r) {
            const Eigen::RowVectorXd dev = z.row(r) - means.row(set.labels[r]);
            cov.noalias() += dev.transpose() * dev;
        }
        std::size_t present = 0;
        for (auto n : counts) present += n > 0;
        const double dof = std::max<double>(1.0, static_cast<double>(set.size()) - static_cast<double>(present));
        cov /= dof;
        const double ridge = kLdaRidge * cov.trace() / static_cast<double>(d);
        cov.diagonal().array() += ridge > 0.0 ? ridge : kLdaRidge;

        const Eigen::LDLT<Eigen::MatrixXd> solver(cov);
        m.weights_ = Matrix(k, d);
        m.bias_.assign(k, -std::numeric_limits<double>::infinity());
        for (Eigen::Index c = 0; c < k; ++c) {
            const Eigen::VectorXd mu = means.row(c).transpose();
            const Eigen::VectorXd w = solver.solve(mu);
            m.weights_.row(c) = w.transpose();
            if (counts[c] > 0)
                m.bias_[c] = -0.5 * mu.dot(w) + std::log(static_cast<double>(counts[c]) / static_cast<double>(set.size()));
        }
        return m;
    }

    std::vector<double> scores(const Eigen::RowVectorXd& x) const {
        const Eigen::RowVectorXd z = scaler_.apply(x);
        std::vector<double> s(bias_);
        for (Eigen::Index c = 0; c < weights_.rows(); ++c)
            if (std::isfinite(s[c])) s[c] += weights_.row(c).dot(z);
        return s;
    }

    std::size_t predict(const Eigen::RowVectorXd& x) const { return argmax_first(scores(x)); }

private:
    detail::Standardizer scaler_;
    Matrix weights_;
    std::vector<double> bias_;
};

class Knn {
public:
    static Knn fit(const TrainingSet& set, std::size_t k) {
        require(k >= 1, "knn: k must be >= 1");
        Knn m;
        m.k_ = k;
        m.scaler_ = detail::Standardizer::fit(set.features);
        m.points_ = m.scaler_.apply(set.features);
        m.labels_ = set.labels;
        m.classes_ = set.class_count();
        return m;
    }

    /// Votes weighted by 1/distance among the k nearest; exact matches, when
    /// present, take the whole vote. Equal distances keep training order.
    std::vector<double> scores(const Eigen::RowVectorXd& x) const {
        const Eigen::RowVectorXd z = scaler_.apply(x);
        std::vector<std::pair<double, std::size_t>> dist(labels_.size());
        for (std::size_t r = 0; r < labels_.size(); ++r)
            dist[r] = {(points_.row(static_cast<Eigen::Index>(r)) - z).squaredNorm(), r};
        const std::size_t k = std::min(k_, dist.size());
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<double> votes(classes_, 0.0);
        if (dist.front().first == 0.0) {
            for (std::size_t n = 0; n < k && dist[n].first == 0.0; ++n) votes[labels_[dist[n].second]] += 1.0;
            return votes;
        }
        for (std::size_t n = 0; n < k; ++n) votes[labels_[dist[n].second]] += 1.0 / std::sqrt(dist[n].first);
        return votes;
    }

    std::size_t predict(const Eigen::RowVectorXd& x) const { return argmax_first(scores(x)); }
    std::size_t k() const { return k_; }

private:
    std::size_t k_ = 5;
    detail::Standardizer scaler_;
    Matrix points_;
    std::vector<std::size_t> labels_;
    std::size_t classes_ = 0;
};

class DecisionTree {
public:
    struct Node {
        int feature = -1;  ///< -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::size_t label = 0;
    };

    /// Grows a Gini CART tree on the rows listed in `sample` (repeats allowed).
    static DecisionTree grow(const TrainingSet& set, std::vector<std::size_t> sample, std::size_t candidates,
                             std::size_t min_leaf, Rng& rng) {
        DecisionTree t;
        Builder b{set, candidates, std::max<std::size_t>(1, min_leaf), rng, t.nodes_, {}, {}};
        b.grow(sample, 0, sample.size());
        return t;
    }

    std::size_t predict(const Eigen::RowVectorXd& x) const {
        int n = 0;
        while (nodes_[n].feature >= 0) n = x(nodes_[n].feature) <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
        return nodes_[n].label;
    }

    const std::vector<Node>& nodes() const { return nodes_; }

private:
    struct Builder {
        const TrainingSet& set;
        std::size_t candidates;
        std::size_t min_leaf;
        Rng& rng;
        std::vector<Node>& nodes;
        std::vector<std::size_t> left_counts;
        std::vector<std::size_t> total_counts;

        double value(std::size_t row, std::size_t f) const {
            return set.features(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(f));
        }

        static double gini_sum(const std::vector<std::size_t>& counts, std::size_t n) {
            // n * (1 - sum p^2) = n - sum c^2 / n
            double sq = 0.0;
            for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
            return static_cast<double>(n) - sq / static_cast<double>(n);
        }

        int grow(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end) {
            const int id = static_cast<int>(nodes.size());
            nodes.emplace_back();
            const std::size_t n = end - begin;
            total_counts.assign(set.class_count(), 0);
            for (std::size_t r = begin; r < end; ++r) ++total_counts[set.labels[rows[r]]];
            nodes[id].label = argmax_first(total_counts);
            const bool pure = total_counts[nodes[id].label] == n;
            if (pure || n < 2 * min_leaf) return id;

            const double parent = gini_sum(total_counts, n);
            const auto parent_counts = total_counts;
            std::vector<std::size_t> order(set.dims());
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t a = order.size(); a > 1; --a) std::swap(order[a - 1], order[rng.below(a)]);

            double best_score = parent;
            int best_feature = -1;
            double best_threshold = 0.0;
            std::size_t evaluated = 0;
            std::vector<std::size_t> sorted(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                            rows.begin() + static_cast<std::ptrdiff_t>(end));
            for (std::size_t f : order) {
                if (evaluated >= candidates) break;
                std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return value(a, f) < value(b, f); });
                if (value(sorted.front(), f) == value(sorted.back(), f)) continue;  // constant here; does not count
                ++evaluated;
                left_counts.assign(set.class_count(), 0);
                auto right_counts = parent_counts;
                double left_sq = 0.0, right_sq = 0.0;
                for (auto c : right_counts) right_sq += static_cast<double>(c) * static_cast<double>(c);
                for (std::size_t m = 0; m + 1 < n; ++m) {
                    const std::size_t y = set.labels[sorted[m]];
                    left_sq += 2.0 * static_cast<double>(left_counts[y]) + 1.0;
                    right_sq -= 2.0 * static_cast<double>(right_counts[y]) - 1.0;
                    ++left_counts[y];
                    --right_counts[y];
                    const std::size_t nl = m + 1, nr = n - nl;
                    if (nl < min_leaf || nr < min_leaf) continue;
                    const double a = value(sorted[m], f), b = value(sorted[m + 1], f);
                    if (!(a < b)) continue;
                    const double score = (static_cast<double>(nl) - left_sq / static_cast<double>(nl)) +
                                         (static_cast<double>(nr) - right_sq / static_cast<double>(nr));
                    if (score < best_score - 1e-12) {
                        best_score = score;
                        best_feature = static_cast<int>(f);
                        best_threshold = a + 0.5 * (b - a);
                        if (!(best_threshold < b)) best_threshold = a;
                    }
                }
            }
            if (best_feature < 0) return id;

            const auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                            rows.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                                return value(r, static_cast<std::size_t>(best_feature)) <= best_threshold;
                                            });
            const auto split = static_cast<std::size_t>(mid - rows.begin());
            nodes[id].feature = best_feature;
            nodes[id].threshold = best_threshold;
            const int l = grow(rows, begin, split);
            nodes[id].left = l;
            const int r = grow(rows, split, end);
            nodes[id].right = r;
            return id;
        }
    };

    std::vector<Node> nodes_;
};

class RandomForest {
public:
    /// Tree t bootstraps and splits from its own stream derive_seed(seed, t),
    /// so the forest does not depend on how trees are scheduled.
    static RandomForest fit(const TrainingSet& set, const Hyperparams& hp) {
        require(hp.rf_trees >= 1, "rf: need at least one tree");
        require(set.size() >= 1, "rf: empty training set");
        RandomForest m;
        m.classes_ = set.class_count();
        const std::size_t candidates =
            hp.rf_features ? hp.rf_features : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(set.dims()))));
        m.trees_.resize(hp.rf_trees);
        parallel_for(hp.rf_trees, [&](std::size_t t) {
            Rng rng(derive_seed(hp.seed, t));
            std::vector<std::size_t> sample(set.size());
            for (auto& s : sample) s = static_cast<std::size_t>(rng.below(set.size()));
            m.trees_[t] = DecisionTree::grow(set, std::move(sample), candidates, hp.rf_min_leaf, rng);
        });
        return m;
    }

    std::vector<double> scores(const Eigen::RowVectorXd& x) const {
        std::vector<double> votes(classes_, 0.0);
        for (const auto& t : trees_) votes[t.predict(x)] += 1.0;
        return votes;
    }

    std::size_t predict(const Eigen::RowVectorXd& x) const { return argmax_first(scores(x)); }
    std::size_t tree_count() const { return trees_.size(); }

private:
    std::vector<DecisionTree> trees_;
    std::size_t classes_ = 0;
};

/// A trained model of any of the four kinds.
class ClassifierModel {
public:
    using Model = std::variant<NaiveBayes, Lda, Knn, RandomForest>;

    ClassifierModel(Algorithm algorithm, Hyperparams hp, Model model, std::size_t dims,
                    std::vector<std::string> class_names)
        : algorithm_(algorithm), hp_(hp), model_(std::move(model)), dims_(dims), class_names_(std::move(class_names)) {}

    Algorithm algorithm() const { return algorithm_; }
    const Hyperparams& hyperparams() const { return hp_; }
    std::size_t dims() const { return dims_; }
    const std::vector<std::string>& class_names() const { return class_names_; }
    const Model& model() const { return model_; }

    std::size_t predict(const Eigen::RowVectorXd& x) const {
        require(static_cast<std::size_t>(x.size()) == dims_,
                "predict: expected " + std::to_string(dims_) + " features, got " + std::to_string(x.size()));
        return std::visit([&](const auto& m) { return m.predict(x); }, model_);
    }

    std::size_t predict(const Features& f) const {
        return predict(Eigen::RowVectorXd(Eigen::Map<const Eigen::RowVectorXd>(f.data(), kFeatureCount)));
    }

    std::vector<std::size_t> predict_rows(const Matrix& eval) const {
        std::vector<std::size_t> out(static_cast<std::size_t>(eval.rows()));
        for (Eigen::Index r = 0; r < eval.rows(); ++r) out[static_cast<std::size_t>(r)] = predict(Eigen::RowVectorXd(eval.row(r)));
        return out;
    }

    /// One class for a whole eval matrix: per-row predictions, majority vote.
    std::size_t predict(const Matrix& eval) const {
        require(eval.rows() >= 1, "predict: eval matrix has no rows");
        const auto rows = predict_rows(eval);
        return majority_vote(rows, class_names_.size());
    }

private:
    Algorithm algorithm_;
    Hyperparams hp_;
    Model model_;
    std::size_t dims_;
    std::vector<std::string> class_names_;
};

inline ClassifierModel train(Algorithm algorithm, const TrainingSet& set, const Hyperparams& hp = {}) {
    validate(set);
    require(set.size() >= 1, "train: empty training set");
    auto make = [&]() -> ClassifierModel::Model {
        switch (algorithm) {
            case Algorithm::NaiveBayes: return NaiveBayes::fit(set);
            case Algorithm::Lda: return Lda::fit(set);
            case Algorithm::Knn: return Knn::fit(set, hp.knn_k);
            case Algorithm::RandomForest: return RandomForest::fit(set, hp);
        }
        throw InvalidArgument("train: unknown algorithm");
    };
    return ClassifierModel(algorithm, hp, make(), set.dims(), set.class_names);
}

/// Fold assignment for stratified k-fold CV: within each class, rows are
/// shuffled and dealt round-robin to folds.
inline std::vector<std::size_t> stratified_folds(const TrainingSet& set, std::size_t folds, std::uint64_t seed) {
    require(folds >= 2, "cross validation needs >= 2 folds");
    std::vector<std::size_t> fold(set.size(), 0);
    for (std::size_t c = 0; c < set.class_count(); ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < set.size(); ++r)
            if (set.labels[r] == c) rows.push_back(r);
        Rng rng(derive_seed(seed, 0x5f0000 + c));
        for (std::size_t a = rows.size(); a > 1; --a) std::swap(rows[a - 1], rows[rng.below(a)]);
        for (std::size_t n = 0; n < rows.size(); ++n) fold[rows[n]] = n % folds;
    }
    return fold;
}

inline TrainingSet subset(const TrainingSet& set, const std::vector<std::size_t>& rows) {
    TrainingSet out;
    out.class_names = set.class_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), set.features.cols());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        out.features.row(static_cast<Eigen::Index>(n)) = set.features.row(static_cast<Eigen::Index>(rows[n]));
        out.labels.push_back(set.labels[rows[n]]);
    }
    return out;
}

/// Mean held-out accuracy over stratified folds.
inline double cross_validate(Algorithm algorithm, const TrainingSet& set, const Hyperparams& hp, std::size_t folds = 5) {
    const auto fold = stratified_folds(set, folds, hp.seed);
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t r = 0; r < set.size(); ++r) (fold[r] == f ? test_rows : train_rows).push_back(r);
        if (test_rows.empty() || train_rows.empty()) continue;
        const auto model = train(algorithm, subset(set, train_rows), hp);
        std::size_t correct = 0;
        for (auto r : test_rows) correct += model.predict(Eigen::RowVectorXd(set.features.row(static_cast<Eigen::Index>(r)))) == set.labels[r];
        total += static_cast<double>(correct) / static_cast<double>(test_rows.size());
    }
    return total / static_cast<double>(folds);
}

/// Candidate hyperparameters searched by auto mode (first entry wins ties).
inline std::vector<Hyperparams> tuning_grid(Algorithm algorithm, const Hyperparams& base) {
    std::vector<Hyperparams> grid;
    if (algorithm == Algorithm::Knn) {
        for (std::size_t k : {1, 3, 5, 9, 15}) {
            auto hp = base;
            hp.knn_k = k;
            grid.push_back(hp);
        }
    } else if (algorithm == Algorithm::RandomForest) {
        for (std::size_t trees : {50, 100, 200})
            for (std::size_t leaf : {1, 3, 5}) {
                auto hp = base;
                hp.rf_trees = trees;
                hp.rf_min_leaf = leaf;
                grid.push_back(hp);
            }
    } else {
        grid.push_back(base);
    }
    return grid;
}

struct TuningResult {
    Hyperparams best;
    double cv_accuracy;
    std::vector<std::pair<Hyperparams, double>> trials;
};

inline TuningResult tune(Algorithm algorithm, const TrainingSet& set, const Hyperparams& base = {}, std::size_t folds = 5) {
    TuningResult result{base, -1.0, {}};
    for (const auto& hp : tuning_grid(algorithm, base)) {
        const double acc = cross_validate(algorithm, set, hp, folds);
        result.trials.emplace_back(hp, acc);
        if (acc > result.cv_accuracy) {
            result.cv_accuracy = acc;
            result.best = hp;
        }
    }
    return result;
}

/// Auto mode: grid search by stratified CV, then a final fit on the full set.
inline ClassifierModel train_auto(Algorithm algorithm, const TrainingSet& set, const Hyperparams& base = {},
                                  std::size_t folds = 5) {
    return train(algorithm, set, tune(algorithm, set, base, folds).best);
}

}  // namespace meshranger
