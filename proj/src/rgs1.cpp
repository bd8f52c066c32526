#include "offreach/rgs1.hpp"

#include "offreach/error.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace offreach {

static_assert(std::endian::native == std::endian::little, "RGS1 I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'G', 'S', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagSdf = 1;

template <class T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw Error(ErrorCode::IoError, "truncated RGS1 stream");
    return v;
}

} // namespace

void write_rgs1(std::ostream& os, const GridSet& set)
{
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(set.dim()));
    put<std::uint32_t>(os, set.has_sdf() ? kFlagSdf : 0u);
    for (double v : set.frame.origin)
        put<double>(os, v);
    for (double v : set.frame.spacing)
        put<double>(os, v);
    for (auto v : set.frame.shape)
        put<std::uint64_t>(os, v);
    std::vector<std::uint8_t> bits((set.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.occ[i])
            bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    os.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (set.has_sdf())
        for (double v : set.sdf)
            put<double>(os, v);
}

GridSet read_rgs1(std::istream& is)
{
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw Error(ErrorCode::IoError, "not an RGS1 stream");
    if (get<std::uint32_t>(is) != kVersion)
        throw Error(ErrorCode::IoError, "unsupported RGS1 version");
    const auto n = get<std::uint32_t>(is);
    const auto flags = get<std::uint32_t>(is);
    if (n == 0 || n > 16)
        throw Error(ErrorCode::IoError, "bad RGS1 dimension");
    Frame f;
    for (std::uint32_t k = 0; k < n; ++k)
        f.origin.push_back(get<double>(is));
    for (std::uint32_t k = 0; k < n; ++k)
        f.spacing.push_back(get<double>(is));
    for (std::uint32_t k = 0; k < n; ++k)
        f.shape.push_back(static_cast<std::size_t>(get<std::uint64_t>(is)));
    GridSet s(f);
    std::vector<std::uint8_t> bits((s.size() + 7) / 8);
    is.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (!is)
        throw Error(ErrorCode::IoError, "truncated RGS1 occupancy");
    for (std::size_t i = 0; i < s.size(); ++i)
        s.occ[i] = (bits[i / 8] >> (i % 8)) & 1u;
    if (flags & kFlagSdf) {
        s.sdf.resize(s.size());
        for (auto& v : s.sdf)
            v = get<double>(is);
    }
    return s;
}

void save_rgs1(const std::string& path, const GridSet& set)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    write_rgs1(os, set);
}

GridSet load_rgs1(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorCode::IoError, "cannot read " + path);
    return read_rgs1(is);
}

void save_intervals_csv(const std::string& path, const std::vector<Interval>& iv)
{
    std::ofstream os(path);
    if (!os)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    os << "axis,min,max\n" << std::setprecision(17);
    for (std::size_t k = 0; k < iv.size(); ++k) {
        if (iv[k].empty())
            os << k + 1 << ",nan,nan\n";
        else
            os << k + 1 << ',' << iv[k].lo << ',' << iv[k].hi << '\n';
    }
}

std::vector<Interval> load_intervals_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorCode::IoError, "cannot read " + path);
    std::string line;
    std::getline(is, line);
    std::vector<Interval> out;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string a, lo, hi;
        std::getline(ss, a, ',');
        std::getline(ss, lo, ',');
        std::getline(ss, hi, ',');
        if (lo == "nan")
            out.push_back({std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
        else
            out.push_back({std::stod(lo), std::stod(hi)});
    }
    return out;
}

} // namespace offreach
