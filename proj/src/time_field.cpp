#include "chemlayer/time_field.hpp"

#include "chemlayer/errors.hpp"
#include "chemlayer/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace chemlayer {

TimeGrid::TimeGrid(double T, double dt_max, double record_dt) : T_(T) {
    if (!(T > 0.0)) throw ParamError("TimeGrid: T must be > 0");
    if (!(dt_max > 0.0)) throw ParamError("TimeGrid: dt must be > 0");
    steps_ = static_cast<std::size_t>(std::ceil(T / dt_max - 1e-9));
    steps_ = std::max<std::size_t>(steps_, 1);
    dt_ = T / static_cast<double>(steps_);
    const double r = record_dt > 0.0 ? record_dt / dt_ : 1.0;
    stride_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r)));
    for (std::size_t n = 0; n <= steps_; n += stride_) recorded_.push_back(n);
    if (recorded_.back() != steps_) recorded_.push_back(steps_);
}

double TimeGrid::time(std::size_t n) const {
    if (n == steps_) return T_;
    return T_ * static_cast<double>(n) / static_cast<double>(steps_);
}

std::vector<double> TimeGrid::recorded_times() const {
    std::vector<double> t;
    t.reserve(recorded_.size());
    for (std::size_t n : recorded_) t.push_back(time(n));
    return t;
}

std::vector<double> TimeGrid::step_times() const {
    std::vector<double> t(steps_ + 1);
    for (std::size_t n = 0; n <= steps_; ++n) t[n] = time(n);
    return t;
}

bool TimeGrid::operator==(const TimeGrid& o) const {
    return T_ == o.T_ && steps_ == o.steps_ && stride_ == o.stride_;
}

TimeField::TimeField(std::shared_ptr<const std::vector<double>> nodes, std::vector<double> times,
                     bool zero_extend)
    : nodes_(std::move(nodes)), times_(std::move(times)), zero_extend_(zero_extend) {
    if (!nodes_ || nodes_->size() < 2) throw ParamError("TimeField: need at least two nodes");
    if (times_.empty()) throw ParamError("TimeField: need at least one time level");
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) throw ParamError("TimeField: time levels must increase");
    }
    values_.assign(nodes_->size() * times_.size(), 0.0);
}

std::span<double> TimeField::level(std::size_t k) {
    return std::span<double>(values_).subspan(k * size(), size());
}

std::span<const double> TimeField::level(std::size_t k) const {
    return std::span<const double>(values_).subspan(k * size(), size());
}

double TimeField::at_level(std::size_t k, double x) const {
    const auto xs = nodes();
    if (x < xs.front() || x > xs.back()) {
        if (zero_extend_) return 0.0;
        throw RangeError("TimeField: x outside the grid hull");
    }
    const auto row = level(k);
    const std::size_t i = num::bracket(xs, x);
    if (x == xs[i + 1]) return row[i + 1];
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return row[i] + w * (row[i + 1] - row[i]);
}

double TimeField::interp(double x, double t) const {
    if (t < times_.front() || t > times_.back()) throw RangeError("TimeField: t outside the time levels");
    if (times_.size() == 1) return at_level(0, x);
    const std::size_t k = num::bracket(times_, t);
    if (t == times_[k + 1]) return at_level(k + 1, x);
    const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    const double a = at_level(k, x);
    if (w == 0.0) return a;
    const double b = at_level(k + 1, x);
    return a + w * (b - a);
}

double TimeField::max_abs() const { return num::max_abs(values_); }

double interp_eval(const TimeField& field, double x, double t) { return field.interp(x, t); }

}  // namespace chemlayer
