#include "amil/event_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "amil/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace amil::data {

namespace {

constexpr char kMagic[4] = {'A', 'M', 'I', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IntegrityError("event file truncated");
    return v;
}

} // namespace

void write_events(const EventSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open event file for writing: " + path.string());

    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(set.family.kind));
    put(out, set.theta);
    put(out, static_cast<std::uint64_t>(set.size()));
    put(out, static_cast<std::uint32_t>(set.features.cols()));
    out.write(reinterpret_cast<const char*>(set.features.data()),
              static_cast<std::streamsize>(set.features.size() * sizeof(double)));
    if (!out) throw Error("write failed: " + path.string());
}

EventSet read_events(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open event file: " + path.string());

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not an event file (bad magic): " + path.string());
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw FormatError("unsupported event file version");

    const auto tag = get<std::uint32_t>(in);
    if (tag > 1) throw FormatError("unknown event family tag");
    const auto theta = get<double>(in);
    const auto n = get<std::uint64_t>(in);
    const auto dim = get<std::uint32_t>(in);
    if (n == 0 || dim == 0) throw FormatError("empty event file header");

    // The header carries only the total dimensionality; all coordinates past
    // the first are standard normal, so dim=1 plus nuisance padding
    // reconstructs the same likelihood.
    EventSet set{EventFamily{static_cast<FamilyKind>(tag), 1, static_cast<int>(dim) - 1},
                 theta, 0, Matrix(n, dim)};
    in.read(reinterpret_cast<char*>(set.features.data()),
            static_cast<std::streamsize>(set.features.size() * sizeof(double)));
    if (!in || in.gcount() != static_cast<std::streamsize>(set.features.size() * sizeof(double)))
        throw IntegrityError("event file truncated: " + path.string());
    return set;
}

void write_events_csv(const EventSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open csv for writing: " + path.string());
    const std::size_t d = set.features.cols();
    for (std::size_t j = 0; j < d; ++j) out << (j ? ",f" : "f") << j;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double* row = set.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
}

} // namespace amil::data
