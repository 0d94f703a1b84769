#include "mwlab/grid.hpp"

#include <cmath>

#include "mwlab/errors.hpp"

namespace mwlab {

void GridSpec::validate() const {
    if (m != 1 && m != 2) throw config_error("GridSpec: m must be 1 or 2");
    if (n < 8) throw config_error("GridSpec: n must be at least 8");
    if ((n & (n - 1)) != 0) throw config_error("GridSpec: n must be a power of two");
    if (!(L > 0.0) || !std::isfinite(L)) throw config_error("GridSpec: L must be positive");
}

VectorField VectorField::zeros(const GridSpec& grid, int d) {
    grid.validate();
    if (d < 1 || d > kMaxDim) throw config_error("VectorField: d must be in [1,8]");
    VectorField f;
    f.grid = grid;
    f.d = d;
    f.values.assign(static_cast<std::size_t>(grid.points()) * d, cplx(0.0, 0.0));
    return f;
}

CVec VectorField::mean() const {
    CVec m = CVec::Zero(d);
    const std::int64_t np = grid.points();
    for (std::int64_t p = 0; p < np; ++p)
        for (int c = 0; c < d; ++c) m(c) += values[p * d + c];
    return m / static_cast<double>(np);
}

void VectorField::remove_mean() {
    const CVec m = mean();
    const std::int64_t np = grid.points();
    for (std::int64_t p = 0; p < np; ++p)
        for (int c = 0; c < d; ++c) values[p * d + c] -= m(c);
}

double VectorField::norm2() const {
    double s = 0.0;
    for (const cplx& v : values) s += std::norm(v);
    return std::sqrt(grid.cell() * s);
}

VectorField& VectorField::operator+=(const VectorField& other) {
    if (!(grid == other.grid) || d != other.d)
        throw config_error("VectorField: grid mismatch in +=");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

VectorField& VectorField::operator*=(cplx scale) {
    for (cplx& v : values) v *= scale;
    return *this;
}

cplx dot(const VectorField& a, const VectorField& b) {
    if (!(a.grid == b.grid) || a.d != b.d) throw config_error("dot: grid mismatch");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += a.values[i] * std::conj(b.values[i]);
    return a.grid.cell() * s;
}

}  // namespace mwlab
