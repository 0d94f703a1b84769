#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mwlab/exec.hpp"
#include "mwlab/matlin.hpp"

namespace mwlab {

/// Periodic grid on the torus [0,L)^m, m in {1,2}, n points per axis
/// (power of two). Point p has coordinates x_j = j*h with h = L/n; the dual
/// lattice carries frequencies xi = 2*pi*k/L for k in [-n/2, n/2).
struct GridSpec {
    int m = 1;
    int n = 8;
    double L = 1.0;

    double spacing() const { return L / n; }
    std::int64_t points() const { return m == 1 ? n : std::int64_t(n) * n; }
    /// Quadrature cell volume h^m.
    double cell() const {
        double h = spacing();
        return m == 1 ? h : h * h;
    }

    /// Signed frequency index for axis position k in [0, n): k or k - n.
    int signed_index(int k) const { return k < n / 2 ? k : k - n; }
    /// Dual-lattice frequency for axis position k.
    double xi(int k) const { return 2.0 * 3.14159265358979323846 * signed_index(k) / L; }
    /// Smallest nonzero |xi| on the lattice.
    double xi_min() const { return 2.0 * 3.14159265358979323846 / L; }

    /// Axis positions of flat index p (row-major, axis 1 major for m = 2).
    std::array<int, 2> axis_index(std::int64_t p) const {
        if (m == 1) return {static_cast<int>(p), 0};
        return {static_cast<int>(p / n), static_cast<int>(p % n)};
    }
    std::array<double, 2> coords(std::int64_t p) const {
        const auto ij = axis_index(p);
        return {ij[0] * spacing(), ij[1] * spacing()};
    }
    /// |xi|^2 of the dual-lattice point with flat index p.
    double xi_norm2(std::int64_t p) const {
        const auto ij = axis_index(p);
        const double a = xi(ij[0]);
        if (m == 1) return a * a;
        const double b = xi(ij[1]);
        return a * a + b * b;
    }

    bool operator==(const GridSpec&) const = default;

    void validate() const;
};

/// Grid-sampled map into C^d. Storage is interleaved: values[p*d + c].
struct VectorField {
    GridSpec grid;
    int d = 1;
    std::vector<cplx> values;

    static VectorField zeros(const GridSpec& grid, int d);

    CVec at(std::int64_t p) const {
        CVec v(d);
        for (int c = 0; c < d; ++c) v(c) = values[p * d + c];
        return v;
    }
    void set(std::int64_t p, const CVec& v) {
        for (int c = 0; c < d; ++c) values[p * d + c] = v(c);
    }

    /// Grid mean (the zero-frequency mode divided by the point count).
    CVec mean() const;
    void remove_mean();

    /// L2 norm with the grid quadrature: sqrt(h^m sum_p |f(p)|^2).
    double norm2() const;

    VectorField& operator+=(const VectorField& other);
    VectorField& operator*=(cplx scale);
};

/// Discrete L2 pairing h^m sum_p (a(p), b(p)), conjugate-linear in b.
cplx dot(const VectorField& a, const VectorField& b);

}  // namespace mwlab
