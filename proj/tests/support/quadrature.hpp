#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

// Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration on the
// Legendre recurrence; exact for polynomial integrands of degree < 2n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n) {
        nodes.resize(static_cast<std::size_t>(n));
        weights.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                double dx = p0 / pp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            nodes[static_cast<std::size_t>(i)] = -x;
            nodes[static_cast<std::size_t>(n - 1 - i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[static_cast<std::size_t>(n - 1 - i)] =
                weights[static_cast<std::size_t>(i)];
        }
    }

    double integrate(const std::function<double(double)>& f, double a, double b) const {
        double mid = 0.5 * (a + b);
        double half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(mid + half * nodes[i]);
        return sum * half;
    }
};

}  // namespace testsupport
