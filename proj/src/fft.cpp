#include "mwlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "mwlab/errors.hpp"

namespace mwlab {

namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
// Plans are created once per (m, n, direction) with FFTW_UNALIGNED so they
// can run on any caller buffer, in place.
class PlanCache {
  public:
    fftw_plan get(const GridSpec& grid, bool inverse) {
        const Key key{grid.m, grid.n, inverse};
        std::scoped_lock lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<cplx> scratch(static_cast<std::size_t>(grid.points()));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = grid.m == 1
                             ? fftw_plan_dft_1d(grid.n, buf, buf, sign, flags)
                             : fftw_plan_dft_2d(grid.n, grid.n, buf, buf, sign, flags);
        if (plan == nullptr) throw numeric_error("fft: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    struct Key {
        int m, n;
        bool inverse;
        bool operator<(const Key& o) const {
            if (m != o.m) return m < o.m;
            if (n != o.n) return n < o.n;
            return inverse < o.inverse;
        }
    };
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

void fft_inplace(const GridSpec& grid, cplx* data, bool inverse) {
    fftw_plan plan = plan_cache().get(grid, inverse);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, buf, buf);
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(grid.points());
        const std::int64_t np = grid.points();
        for (std::int64_t i = 0; i < np; ++i) data[i] *= scale;
    }
}

SpectralField SpectralField::analyze(const GridSpec& grid, int comps,
                                     const std::vector<cplx>& interleaved, Exec exec) {
    grid.validate();
    const std::int64_t np = grid.points();
    if (interleaved.size() != static_cast<std::size_t>(np) * comps)
        throw config_error("SpectralField: size mismatch");
    SpectralField s;
    s.grid = grid;
    s.comps = comps;
    s.hat.assign(interleaved.size(), cplx(0.0));
    for_each_index(exec, comps, [&](std::int64_t c) {
        cplx* block = s.hat.data() + c * np;
        for (std::int64_t p = 0; p < np; ++p) block[p] = interleaved[p * comps + c];
        fft_inplace(grid, block, false);
    });
    return s;
}

void SpectralField::heat_slice_into(double t, std::vector<cplx>& out, Exec exec) const {
    const std::int64_t np = grid.points();
    out.assign(static_cast<std::size_t>(np) * comps, cplx(0.0));
    for_each_index(exec, comps, [&](std::int64_t c) {
        std::vector<cplx> block(static_cast<std::size_t>(np));
        const cplx* src = hat.data() + c * np;
        for (std::int64_t p = 0; p < np; ++p)
            block[p] = src[p] * std::exp(-t * grid.xi_norm2(p));
        fft_inplace(grid, block.data(), true);
        for (std::int64_t p = 0; p < np; ++p) out[p * comps + c] = block[p];
    });
}

void SpectralField::gradient_heat_slice_into(int axis, double t, std::vector<cplx>& out,
                                             Exec exec) const {
    if (axis < 0 || axis >= grid.m) throw config_error("gradient: axis out of range");
    const std::int64_t np = grid.points();
    out.assign(static_cast<std::size_t>(np) * comps, cplx(0.0));
    for_each_index(exec, comps, [&](std::int64_t c) {
        std::vector<cplx> block(static_cast<std::size_t>(np));
        const cplx* src = hat.data() + c * np;
        for (std::int64_t p = 0; p < np; ++p) {
            const auto ij = grid.axis_index(p);
            const int k = axis == 0 ? ij[0] : ij[1];
            // The Nyquist row has no negative partner; drop it to keep
            // real data real under the odd symbol i*xi.
            double xi = grid.xi(k);
            if (grid.signed_index(k) == -grid.n / 2) xi = 0.0;
            block[p] = src[p] * cplx(0.0, xi) * std::exp(-t * grid.xi_norm2(p));
        }
        fft_inplace(grid, block.data(), true);
        for (std::int64_t p = 0; p < np; ++p) out[p * comps + c] = block[p];
    });
}

std::vector<cplx> SpectralField::eval_heat_at(const std::array<double, 2>& x, double t) const {
    const std::int64_t np = grid.points();
    std::vector<cplx> result(comps, cplx(0.0));
    const double scale = 1.0 / static_cast<double>(np);
    for (std::int64_t p = 0; p < np; ++p) {
        const auto ij = grid.axis_index(p);
        double phase = grid.xi(ij[0]) * x[0];
        if (grid.m == 2) phase += grid.xi(ij[1]) * x[1];
        const cplx e = std::exp(-t * grid.xi_norm2(p)) * cplx(std::cos(phase), std::sin(phase));
        for (int c = 0; c < comps; ++c) result[c] += hat[c * np + p] * e;
    }
    for (cplx& v : result) v *= scale;
    return result;
}

}  // namespace mwlab
