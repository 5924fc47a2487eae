#pragma once

#include <cstddef>
#include <deque>

namespace epictrl {

/// Time series of the uncontrolled infection rate, one sample per
/// integration step, trimmed to a fixed look-back span.
class HistoryBuffer {
public:
    struct Sample {
        double t;
        double lambda_u;
    };

    /// `span` is the look-back horizon (days) that must stay readable.
    explicit HistoryBuffer(double span = 0.0);

    /// Appends a sample; times must be strictly increasing.
    void push(double t, double lambda_u);

    /// Fills [t0 - span - dt, t0) with a constant rate on a dt grid so a
    /// run can start with a full window.
    void prefill(double t0, double dt, double lambda_u);

    /// Linear interpolation at time t. Throws InsufficientHistory outside
    /// the stored range (beyond a 1e-9 day slack).
    double at(double t) const;

    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    double front_time() const;
    double back_time() const;
    double span() const { return span_; }
    const std::deque<Sample>& samples() const { return samples_; }

    /// Index of the last sample with time <= t (samples must cover t).
    std::size_t floor_index(double t) const;

private:
    double span_;
    std::deque<Sample> samples_;
};

} // namespace epictrl
