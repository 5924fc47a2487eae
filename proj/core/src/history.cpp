#include "epictrl/history.hpp"

#include "epictrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace epictrl {

namespace {
constexpr double kSlack = 1e-9;
}

HistoryBuffer::HistoryBuffer(double span)
    : span_(span)
{
    if (!(span >= 0.0)) {
        throw ParameterError("history span must be non-negative");
    }
}

void HistoryBuffer::push(double t, double lambda_u)
{
    if (!samples_.empty() && !(t > samples_.back().t)) {
        throw ParameterError("history timestamps must be strictly increasing");
    }
    samples_.push_back({t, lambda_u});
    // Keep one sample older than the horizon so at(t - span) interpolates.
    while (samples_.size() > 2 && samples_[1].t <= t - span_ - kSlack) {
        samples_.pop_front();
    }
}

void HistoryBuffer::prefill(double t0, double dt, double lambda_u)
{
    if (!(dt > 0.0)) {
        throw ParameterError("prefill step must be positive");
    }
    samples_.clear();
    const auto n = static_cast<long>(std::ceil(span_ / dt - 1e-9)) + 1;
    for (long k = n; k >= 1; --k) {
        samples_.push_back({t0 - static_cast<double>(k) * dt, lambda_u});
    }
}

double HistoryBuffer::front_time() const
{
    if (samples_.empty()) {
        throw InsufficientHistory("history is empty");
    }
    return samples_.front().t;
}

double HistoryBuffer::back_time() const
{
    if (samples_.empty()) {
        throw InsufficientHistory("history is empty");
    }
    return samples_.back().t;
}

std::size_t HistoryBuffer::floor_index(double t) const
{
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const Sample& s) { return v < s.t; });
    if (it == samples_.begin()) {
        return 0;
    }
    return static_cast<std::size_t>(std::distance(samples_.begin(), it) - 1);
}

double HistoryBuffer::at(double t) const
{
    if (samples_.empty() || t < samples_.front().t - kSlack || t > samples_.back().t + kSlack) {
        throw InsufficientHistory("history does not cover the requested time");
    }
    if (t >= samples_.back().t) {
        return samples_.back().lambda_u;
    }
    if (t <= samples_.front().t) {
        return samples_.front().lambda_u;
    }
    const std::size_t i = floor_index(t);
    const Sample& a = samples_[i];
    const Sample& b = samples_[i + 1];
    const double w = (t - a.t) / (b.t - a.t);
    return a.lambda_u + w * (b.lambda_u - a.lambda_u);
}

} // namespace epictrl
