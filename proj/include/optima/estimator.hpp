#pragma once

#include <algorithm>
#include <map>

#include "optima/transaction.hpp"

namespace optima {

// Replaceable transaction-length estimator. The scheduler consults it
// when a batch is formed and feeds observed durations back after every
// commit or abort.
class LengthEstimator {
public:
    virtual ~LengthEstimator() = default;
    virtual double estimate(TemplateId template_id) const = 0;
    virtual void observe(TemplateId template_id, double observed_length) = 0;
};

// Running arithmetic mean per transaction type with a cold-start prior.
class MeanEstimator : public LengthEstimator {
public:
    explicit MeanEstimator(double prior = 1.0) : prior_(prior) {}

    double estimate(TemplateId template_id) const override {
        auto it = stats_.find(template_id);
        if (it == stats_.end() || it->second.count == 0) return prior_;
        // schedule lengths must stay strictly positive
        return std::max(it->second.mean, 1e-6);
    }

    void observe(TemplateId template_id, double observed_length) override {
        Stats& s = stats_[template_id];
        ++s.count;
        s.mean += (observed_length - s.mean) / static_cast<double>(s.count);
    }

private:
    struct Stats {
        long long count = 0;
        double mean = 0.0;
    };
    double prior_;
    std::map<TemplateId, Stats> stats_;
};

inline double estimate_length(const LengthEstimator& estimator, const Transaction& txn) {
    return estimator.estimate(txn.template_id);
}

}  // namespace optima
