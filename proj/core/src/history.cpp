#include "amodelay/history.hpp"

#include <cmath>
#include <sstream>

#include "amodelay/errors.hpp"

namespace amodelay {

namespace {
constexpr double kSpanTolerance = 1e-9;
}

HistoryBuffer::HistoryBuffer(double t_begin, double spacing) : t0_(t_begin), h_(spacing) {
    if (!(spacing > 0.0)) throw ConfigError("history spacing must be positive");
}

double HistoryBuffer::t_end() const {
    return values_.empty() ? t0_ : time(values_.size() - 1);
}

HistoryBuffer HistoryBuffer::resample(const Trajectory& src, double spacing, double t_end_target) {
    if (src.size() < 2) throw ConfigError("history source needs at least two samples");
    if (!(spacing > 0.0)) throw ConfigError("history spacing must be positive");
    const double s0 = src.t.front();
    const double sh = (src.t.back() - s0) / static_cast<double>(src.size() - 1);
    const double span = t_end_target - s0;
    const auto n = static_cast<std::size_t>(std::floor(span / spacing + 1e-9));
    HistoryBuffer out(t_end_target - static_cast<double>(n) * spacing, spacing);
    out.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = out.time(k);
        double u = (t - s0) / sh;
        auto j = static_cast<long long>(std::floor(u));
        if (j < 0) j = 0;
        if (j >= static_cast<long long>(src.size()) - 1) j = static_cast<long long>(src.size()) - 2;
        double fr = u - static_cast<double>(j);
        if (fr < 0.0) fr = 0.0;
        if (fr > 1.0) fr = 1.0;
        out.push_back((1.0 - fr) * src.value(j) + fr * src.value(j + 1));
    }
    return out;
}

bool HistoryBuffer::covers(double t) const {
    if (values_.empty()) return false;
    const double tol = kSpanTolerance * h_;
    return t >= t0_ - tol && t <= t_end() + tol;
}

Vec2 HistoryBuffer::at(double t) const {
    if (!covers(t)) {
        std::ostringstream os;
        os << "history lookup at t=" << t << " outside [" << t0_ << ", " << t_end() << "]";
        throw NumericalError(os.str());
    }
    const double u = (t - t0_) / h_;
    auto j = static_cast<long long>(std::floor(u));
    const auto last = static_cast<long long>(values_.size()) - 1;
    if (j >= last) return values_[last];
    if (j < 0) return values_[0];
    const double fr = u - static_cast<double>(j);
    return (1.0 - fr) * values_[j] + fr * values_[j + 1];
}

Vec2 HistoryBuffer::derivative(double t) const {
    return (at(t + h_) - at(t - h_)) / (2.0 * h_);
}

Vec2 HistoryBuffer::second_derivative(double t) const {
    return (at(t + h_) - 2.0 * at(t) + at(t - h_)) / (h_ * h_);
}

Trajectory HistoryBuffer::to_trajectory() const {
    Trajectory tr;
    for (std::size_t k = 0; k < values_.size(); ++k) tr.push(time(k), values_[k]);
    return tr;
}

}  // namespace amodelay
