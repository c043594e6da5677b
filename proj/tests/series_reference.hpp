#pragma once

// Test-suite-only reference: eigenfunction series for Brownian survival
// in an interval and, by coordinate independence, in a rectangle.

#include <cmath>

namespace series_ref {

// P^x(Brownian motion stays in (0, L) through time t), first `terms`
// odd-index terms of the Dirichlet eigenfunction expansion.
inline double interval_survival(double x, double L, double t, int terms = 50) {
    double sum = 0.0;
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < terms; ++i) {
        int n = 2 * i + 1;
        sum += (4.0 / (n * pi)) * std::sin(n * pi * x / L) *
               std::exp(-n * n * pi * pi * t / (2.0 * L * L));
    }
    return sum;
}

// P^(x,y)(stays in (-hw,hw) x (ylo,yhi) through t)
inline double rect_survival(double x, double y, double hw, double ylo, double yhi, double t,
                            int terms = 50) {
    return interval_survival(x + hw, 2.0 * hw, t, terms) *
           interval_survival(y - ylo, yhi - ylo, t, terms);
}

}  // namespace series_ref
