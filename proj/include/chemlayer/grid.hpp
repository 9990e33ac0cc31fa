#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace chemlayer {

enum class GridKind { uniform, shishkin };

enum class Side { left, right };

const char* to_string(Side side);

/// Strictly increasing mesh on [0, 1] with x₀ = 0 and x_N = 1 exactly.
class Grid1D {
public:
    static Grid1D uniform(std::size_t cells);
    static Grid1D from_nodes(std::vector<double> nodes);

    std::span<const double> nodes() const { return *nodes_; }
    const std::shared_ptr<const std::vector<double>>& shared_nodes() const { return nodes_; }
    std::size_t size() const { return nodes_->size(); }
    std::size_t cells() const { return nodes_->size() - 1; }
    GridKind kind() const { return kind_; }
    double sigma_left() const { return sigma_left_; }
    double sigma_right() const { return sigma_right_; }
    double min_spacing() const;

private:
    friend Grid1D build_layer_grid(std::size_t, double, double);
    std::shared_ptr<const std::vector<double>> nodes_;
    GridKind kind_ = GridKind::uniform;
    double sigma_left_ = 0.0;
    double sigma_right_ = 0.0;
};

/// Piecewise-uniform Shishkin mesh resolving the √ε layers at both ends:
/// N/4 cells on [0, σ], N/2 on [σ, 1 − σ], N/4 on [1 − σ, 1] with
/// σ = min(1/4, c·√ε·ln N). Uniform when ε = 0 or when σ hits the 1/4 cap.
///
/// N must be even and at least 16; an even N that is not a multiple of four is
/// rounded up to the next multiple of four.
Grid1D build_layer_grid(std::size_t n_cells, double eps, double c = 4.0);

/// Transition width σ = min(1/4, c·√ε·ln N) used by build_layer_grid.
double shishkin_sigma(std::size_t n_cells, double eps, double c);

/// Truncated half-line mesh for boundary-layer profiles. Left layers live on
/// z ∈ [0, z_max]; right layers use the mirror convention ξ ∈ [−z_max, 0].
/// Nodes are always stored in increasing order; the layer boundary (z = 0 or
/// ξ = 0) is a node exactly.
class HalfLineGrid {
public:
    static HalfLineGrid make(Side side, double z_max, std::size_t cells);

    Side side() const { return side_; }
    double z_max() const { return z_max_; }
    double spacing() const { return h_; }
    std::span<const double> nodes() const { return *nodes_; }
    const std::shared_ptr<const std::vector<double>>& shared_nodes() const { return nodes_; }
    std::size_t size() const { return nodes_->size(); }
    /// Index of the node at the physical boundary (z = 0 or ξ = 0).
    std::size_t boundary_index() const { return side_ == Side::left ? 0 : size() - 1; }
    /// Index of the truncation node (z = z_max or ξ = −z_max).
    std::size_t far_index() const { return side_ == Side::left ? size() - 1 : 0; }

private:
    std::shared_ptr<const std::vector<double>> nodes_;
    Side side_ = Side::left;
    double z_max_ = 20.0;
    double h_ = 0.0;
};

}  // namespace chemlayer
