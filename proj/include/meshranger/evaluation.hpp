#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "classifiers.hpp"
#include "dataset.hpp"

namespace meshranger {

/// K x K counts; row = true class, column = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> class_names)
        : names_(std::move(class_names)), counts_(names_.size() * names_.size(), 0) {}

    std::size_t classes() const { return names_.size(); }
    const std::vector<std::string>& class_names() const { return names_; }

    void add(std::size_t truth, std::size_t predicted) {
        require(truth < classes() && predicted < classes(), "confusion matrix: class out of range");
        ++counts_[truth * classes() + predicted];
    }

    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * classes() + predicted); }

    std::size_t row_total(std::size_t truth) const {
        std::size_t n = 0;
        for (std::size_t p = 0; p < classes(); ++p) n += at(truth, p);
        return n;
    }

    std::size_t total() const {
        std::size_t n = 0;
        for (auto c : counts_) n += c;
        return n;
    }

    std::size_t correct() const {
        std::size_t n = 0;
        for (std::size_t c = 0; c < classes(); ++c) n += at(c, c);
        return n;
    }

    std::size_t errors() const { return total() - correct(); }

    double accuracy() const { return total() ? static_cast<double>(correct()) / static_cast<double>(total()) : 0.0; }

    double recall(std::size_t c) const {
        const auto n = row_total(c);
        return n ? static_cast<double>(at(c, c)) / static_cast<double>(n) : 0.0;
    }

    /// Most frequent wrong prediction for true class c; nullopt if none.
    std::optional<std::size_t> top_confusion(std::size_t c) const {
        std::optional<std::size_t> best;
        for (std::size_t p = 0; p < classes(); ++p) {
            if (p == c || at(c, p) == 0) continue;
            if (!best || at(c, p) > at(c, *best)) best = p;
        }
        return best;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::size_t> counts_;
};

inline ConfusionMatrix evaluate(const ClassifierModel& model, const TrainingSet& test) {
    validate(test);
    require(test.dims() == model.dims(), "evaluate: feature count mismatch");
    ConfusionMatrix cm(model.class_names());
    const auto predicted = model.predict_rows(test.features);
    for (std::size_t r = 0; r < test.size(); ++r) cm.add(test.labels[r], predicted[r]);
    return cm;
}

/// CSV: provenance comment lines, header "true\\predicted,<names...>", one row per true class.
inline void write_confusion_csv(std::ostream& os, const ConfusionMatrix& cm, const std::vector<std::string>& provenance = {}) {
    for (const auto& p : provenance) os << "# " << p << '\n';
    os << "true\\predicted";
    for (const auto& n : cm.class_names()) os << ',' << n;
    os << '\n';
    for (std::size_t t = 0; t < cm.classes(); ++t) {
        os << cm.class_names()[t];
        for (std::size_t p = 0; p < cm.classes(); ++p) os << ',' << cm.at(t, p);
        os << '\n';
    }
}

}  // namespace meshranger
