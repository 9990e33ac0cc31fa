#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace chemlayer {

/// Uniform time stepping t_n = n·T/S, n = 0..S, with a record stride.
/// Steppers advance every step; fields are stored only at recorded steps
/// (every `stride` steps plus the final step).
class TimeGrid {
public:
    TimeGrid() = default;
    /// S = ceil(T / dt_max); the stride is round(record_dt / dt), at least 1.
    TimeGrid(double T, double dt_max, double record_dt);

    double T() const { return T_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    std::size_t stride() const { return stride_; }
    double time(std::size_t n) const;
    bool is_recorded(std::size_t n) const { return n == steps_ || n % stride_ == 0; }
    /// Step indices of the recorded levels, increasing, first 0 and last S.
    const std::vector<std::size_t>& recorded_steps() const { return recorded_; }
    std::vector<double> recorded_times() const;
    std::vector<double> step_times() const;

    bool operator==(const TimeGrid& other) const;

private:
    double T_ = 1.0;
    double dt_ = 1.0;
    std::size_t steps_ = 1;
    std::size_t stride_ = 1;
    std::vector<std::size_t> recorded_;
};

/// A scalar field on a fixed node set sampled at increasing time levels.
/// Values are piecewise linear in space and in time. Fields on truncated
/// half-lines are zero-extended beyond the node hull; fields on [0, 1] reject
/// queries outside it.
class TimeField {
public:
    TimeField() = default;
    TimeField(std::shared_ptr<const std::vector<double>> nodes, std::vector<double> times,
              bool zero_extend = false);

    std::span<const double> nodes() const { return *nodes_; }
    const std::shared_ptr<const std::vector<double>>& shared_nodes() const { return nodes_; }
    std::span<const double> times() const { return times_; }
    std::size_t levels() const { return times_.size(); }
    std::size_t size() const { return nodes_ ? nodes_->size() : 0; }
    bool zero_extend() const { return zero_extend_; }
    bool empty() const { return values_.empty(); }

    std::span<double> level(std::size_t k);
    std::span<const double> level(std::size_t k) const;
    double at(std::size_t k, std::size_t i) const { return values_[k * size() + i]; }

    /// Piecewise-linear value at node coordinate x on stored level k.
    double at_level(std::size_t k, double x) const;

    /// Bilinear space-time interpolation; throws RangeError outside [t₀, t_K].
    double interp(double x, double t) const;

    double max_abs() const;

private:
    std::shared_ptr<const std::vector<double>> nodes_;
    std::vector<double> times_;
    std::vector<double> values_;
    bool zero_extend_ = false;
};

/// Free-function form of TimeField::interp.
double interp_eval(const TimeField& field, double x, double t);

}  // namespace chemlayer
