// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace foilfem {

// Quadrature on the reference triangle {(0,0),(1,0),(0,1)}. All points are
// strictly interior and all weights positive; weights sum to the reference
// area 1/2.
struct QuadratureRule {
    struct Point {
        double xi, eta, w;
    };
    std::vector<Point> points;
    int order = 0;
};

inline QuadratureRule quadrature(int order) {
    QuadratureRule q;
    q.order = order;
    switch (order) {
        case 1:
            q.points = {{1.0 / 3.0, 1.0 / 3.0, 0.5}};
            break;
        case 2:
            q.points = {{1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
                        {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                        {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}};
            break;
        case 3:
        case 4: {
            // 6-point Dunavant rule, exact to degree 4; weights scaled to
            // the reference area 1/2
            const double a = 0.445948490915965;
            const double wa = 0.111690794839005;
            const double b = 0.091576213509771;
            const double wb = 0.054975871827661;
            q.points = {{a, a, wa},
                        {1.0 - 2.0 * a, a, wa},
                        {a, 1.0 - 2.0 * a, wa},
                        {b, b, wb},
                        {1.0 - 2.0 * b, b, wb},
                        {b, 1.0 - 2.0 * b, wb}};
            break;
        }
        default:
            throw std::invalid_argument("quadrature: unsupported order " + std::to_string(order));
    }
    return q;
}

// Gauss-Legendre rule on [0, 1], used for voltage-basis line integrals.
inline std::vector<std::array<double, 2>> gauss_legendre_01(int n_points) {
    switch (n_points) {
        case 1:
            return {{0.5, 1.0}};
        case 2: {
            const double d = 0.5 / std::sqrt(3.0);
            return {{0.5 - d, 0.5}, {0.5 + d, 0.5}};
        }
        case 3: {
            const double d = 0.5 * std::sqrt(3.0 / 5.0);
            return {{0.5 - d, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + d, 5.0 / 18.0}};
        }
        case 4: {
            const double a = 0.5 * 0.3399810435848563;
            const double b = 0.5 * 0.8611363115940526;
            const double wa = 0.5 * 0.6521451548625461;
            const double wb = 0.5 * 0.3478548451374538;
            return {{0.5 - b, wb}, {0.5 - a, wa}, {0.5 + a, wa}, {0.5 + b, wb}};
        }
        case 5: {
            const double a = 0.5 * 0.5384693101056831;
            const double b = 0.5 * 0.9061798459386640;
            const double wa = 0.5 * 0.4786286704993665;
            const double wb = 0.5 * 0.2369268850561891;
            const double w0 = 0.5 * 0.5688888888888889;
            return {{0.5 - b, wb}, {0.5 - a, wa}, {0.5, w0}, {0.5 + a, wa}, {0.5 + b, wb}};
        }
        default:
            throw std::invalid_argument("gauss_legendre_01: unsupported point count");
    }
}

}  // namespace foilfem
