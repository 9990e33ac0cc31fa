#include "chemlayer/grid.hpp"

#include "chemlayer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chemlayer {

const char* to_string(Side side) { return side == Side::left ? "left" : "right"; }

Grid1D Grid1D::uniform(std::size_t cells) {
    if (cells < 3) throw ParamError("uniform grid needs at least 3 cells");
    std::vector<double> x(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) x[i] = static_cast<double>(i) / static_cast<double>(cells);
    x.back() = 1.0;
    Grid1D g;
    g.nodes_ = std::make_shared<const std::vector<double>>(std::move(x));
    return g;
}

Grid1D Grid1D::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 4) throw ParamError("grid needs at least 4 nodes");
    if (nodes.front() != 0.0 || nodes.back() != 1.0) throw ParamError("grid must span [0, 1] exactly");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1])) throw ParamError("grid nodes must be strictly increasing");
    }
    Grid1D g;
    g.nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
    return g;
}

double Grid1D::min_spacing() const {
    double h = 1.0;
    for (std::size_t i = 1; i < nodes_->size(); ++i) h = std::min(h, (*nodes_)[i] - (*nodes_)[i - 1]);
    return h;
}

double shishkin_sigma(std::size_t n_cells, double eps, double c) {
    return std::min(0.25, c * std::sqrt(eps) * std::log(static_cast<double>(n_cells)));
}

Grid1D build_layer_grid(std::size_t n_cells, double eps, double c) {
    if (n_cells < 16) throw ParamError("layer grid needs N >= 16 cells, got " + std::to_string(n_cells));
    if (n_cells % 2 != 0) throw ParamError("layer grid needs an even cell count, got " + std::to_string(n_cells));
    if (!(eps >= 0.0)) throw ParamError("layer grid needs eps >= 0");
    if (!(c > 0.0)) throw ParamError("layer grid needs c > 0");
    const std::size_t n = (n_cells % 4 == 0) ? n_cells : n_cells + 2;

    const double sigma = eps > 0.0 ? shishkin_sigma(n, eps, c) : 0.25;
    if (eps == 0.0 || sigma >= 0.25) return Grid1D::uniform(n);

    const std::size_t q = n / 4;
    std::vector<double> x(n + 1);
    for (std::size_t i = 0; i <= q; ++i) x[i] = sigma * static_cast<double>(i) / static_cast<double>(q);
    const double hm = (1.0 - 2.0 * sigma) / static_cast<double>(2 * q);
    for (std::size_t i = 1; i <= 2 * q; ++i) x[q + i] = sigma + hm * static_cast<double>(i);
    for (std::size_t i = 0; i <= q; ++i) {
        x[n - i] = 1.0 - sigma * static_cast<double>(i) / static_cast<double>(q);
    }
    x[3 * q] = 1.0 - sigma;
    x[n] = 1.0;
    Grid1D g = Grid1D::from_nodes(std::move(x));
    g.kind_ = GridKind::shishkin;
    g.sigma_left_ = sigma;
    g.sigma_right_ = sigma;
    return g;
}

HalfLineGrid HalfLineGrid::make(Side side, double z_max, std::size_t cells) {
    if (!(z_max > 0.0)) throw ParamError("half-line truncation z_max must be > 0");
    if (cells < 8) throw ParamError("half-line grid needs at least 8 cells");
    HalfLineGrid g;
    g.side_ = side;
    g.z_max_ = z_max;
    g.h_ = z_max / static_cast<double>(cells);
    std::vector<double> x(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double s = z_max * static_cast<double>(i) / static_cast<double>(cells);
        if (side == Side::left) {
            x[i] = s;
        } else {
            x[cells - i] = -s;
        }
    }
    if (side == Side::left) {
        x.front() = 0.0;
        x.back() = z_max;
    } else {
        x.front() = -z_max;
        x.back() = 0.0;
    }
    g.nodes_ = std::make_shared<const std::vector<double>>(std::move(x));
    return g;
}

}  // namespace chemlayer
