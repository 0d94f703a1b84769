#include "mwlab/weight_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace mwlab {

static_assert(std::endian::native == std::endian::little,
              "weight interchange files are little-endian");

namespace {

template <class T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_raw(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw config_error("load_field: truncated file");
    return value;
}

}  // namespace

void save_field(const WeightField& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("save_field: cannot open " + path);
    out.write("MWLF", 4);
    write_raw<std::uint32_t>(out, kWeightFormatVersion);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(w.grid.m));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(w.grid.n));
    write_raw<double>(out, w.grid.L);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(w.d));
    write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(w.grid.points()));
    // Matrix entries row-major on disk; storage is column-major in memory.
    const int d = w.d;
    for (std::int64_t p = 0; p < w.grid.points(); ++p)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const cplx v = w.values[p * d * d + c * d + r];
                const double re = v.real(), im = v.imag();
                write_raw<double>(out, re);
                write_raw<double>(out, im);
            }
    if (!out) throw config_error("save_field: write failed for " + path);
    out.close();

    nlohmann::json sidecar{
        {"magic", "MWLF"}, {"version", kWeightFormatVersion}, {"m", w.grid.m},
        {"n", w.grid.n},   {"L", w.grid.L},                   {"d", w.d},
        {"count", w.grid.points()},
    };
    std::ofstream side(path + ".json", std::ios::trunc);
    if (!side) throw config_error("save_field: cannot open sidecar for " + path);
    side << sidecar.dump(2) << "\n";
}

WeightField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("load_field: cannot open " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "MWLF", 4) != 0)
        throw config_error("load_field: malformed header (bad magic)");
    const auto version = read_raw<std::uint32_t>(in);
    if (version != kWeightFormatVersion)
        throw config_error("load_field: unsupported format version");
    GridSpec grid;
    grid.m = static_cast<int>(read_raw<std::uint32_t>(in));
    grid.n = static_cast<int>(read_raw<std::uint32_t>(in));
    grid.L = read_raw<double>(in);
    const int d = static_cast<int>(read_raw<std::uint32_t>(in));
    const auto count = read_raw<std::uint64_t>(in);
    grid.validate();
    if (count != static_cast<std::uint64_t>(grid.points()))
        throw config_error("load_field: malformed header (count mismatch)");
    if (d < 1 || d > kMaxDim) throw config_error("load_field: invalid fiber dimension");

    std::vector<cplx> samples(static_cast<std::size_t>(count) * d * d);
    for (std::uint64_t p = 0; p < count; ++p)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const double re = read_raw<double>(in);
                const double im = read_raw<double>(in);
                samples[p * d * d + static_cast<std::size_t>(c) * d + r] = cplx(re, im);
            }
    return WeightField::from_samples(grid, d, std::move(samples), Exec::serial);
}

}  // namespace mwlab
