#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace densediv {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule make_gauss_legendre(int n);

/// Shared 20-point rule; exact for polynomials of degree 39.
const GaussRule& gauss20();

/// Composite Gauss-Legendre over [a, b] split into `pieces` equal panels.
template <class T, class F>
T integrate(F&& f, double a, double b, int pieces, const GaussRule& rule = gauss20()) {
    T acc{};
    const double width = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) {
        const double lo = a + k * width;
        const double half = 0.5 * width;
        const double mid = lo + half;
        T panel{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
        acc += half * panel;
    }
    return acc;
}

}  // namespace densediv
