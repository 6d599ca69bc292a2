#include "nlch/conv_operator.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace nlch {

static_assert(std::endian::native == std::endian::little,
              "operator cache IO assumes a little-endian host");

namespace {

constexpr char kMagic[16] = {'N', 'L', 'C', 'H', 'C', 'O', 'N', 'V',
                             'O', 'P', '-', 'v', '1', '\0', '\0', '\0'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw FormatError("operator cache: truncated file");
    return v;
}

}  // namespace

void write_operator_cache(const std::string& path, const Eigen::MatrixXd& matrix,
                          const ConvMeta& meta) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw FormatError("operator cache: cannot open " + path + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put<std::uint64_t>(os, meta.m);
    put<std::uint64_t>(os, meta.n);
    put<double>(os, meta.eps);
    put<double>(os, meta.alpha);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(meta.mode));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(meta.kernel_id));
    put<double>(os, meta.eta);
    put<std::uint8_t>(os, meta.corrected ? 1 : 0);
    const char pad[7] = {};
    os.write(pad, sizeof(pad));

    if (meta.map_kind != ConvMeta::MapKind::none) {
        const std::uint32_t nparams = meta.map_kind == ConvMeta::MapKind::rectangle ? 4 : 1;
        put<std::uint32_t>(os, static_cast<std::uint32_t>(meta.map_kind));
        put<std::uint32_t>(os, nparams * 8);
        for (std::uint32_t i = 0; i < nparams; ++i)
            put<double>(os, meta.map_params[i]);
    }

    // Row-major f64 payload; Eigen matrices are column-major by default.
    const Eigen::Index m = matrix.rows();
    std::vector<double> row(static_cast<std::size_t>(matrix.cols()));
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Map<Eigen::RowVectorXd>(row.data(), matrix.cols()) = matrix.row(i);
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!os)
        throw FormatError("operator cache: write failed for " + path);
}

CachedOperator read_operator_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is)
        throw FormatError("operator cache: cannot open " + path);
    const std::uint64_t fsize = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0);

    char magic[16];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("operator cache: unknown magic in " + path);

    CachedOperator out;
    ConvMeta& meta = out.meta;
    meta.m = get<std::uint64_t>(is);
    meta.n = get<std::uint64_t>(is);
    meta.eps = get<double>(is);
    meta.alpha = get<double>(is);
    const auto mode = get<std::uint32_t>(is);
    const auto kid = get<std::uint32_t>(is);
    if (mode > 2)
        throw FormatError("operator cache: unknown partition mode enum");
    if (kid > 4)
        throw FormatError("operator cache: unknown kernel id enum");
    meta.mode = static_cast<ConvMeta::Mode>(mode);
    meta.kernel_id = static_cast<ConvMeta::KernelId>(kid);
    meta.eta = get<double>(is);
    meta.corrected = get<std::uint8_t>(is) != 0;
    char pad[7];
    is.read(pad, sizeof(pad));
    if (!is)
        throw FormatError("operator cache: truncated header");

    const std::uint64_t data_bytes = meta.m * meta.m * 8;
    const std::uint64_t header_bytes = 72;
    if (fsize < header_bytes + data_bytes)
        throw FormatError("operator cache: file too small for the declared size");
    std::uint64_t extra = fsize - header_bytes - data_bytes;
    if (extra > 0) {
        const auto kind = get<std::uint32_t>(is);
        const auto len = get<std::uint32_t>(is);
        if (kind == 0 || kind > 2 || extra != 8ull + len)
            throw FormatError("operator cache: malformed map block");
        meta.map_kind = static_cast<ConvMeta::MapKind>(kind);
        const std::uint32_t nparams = len / 8;
        if (nparams > meta.map_params.size() || len % 8 != 0)
            throw FormatError("operator cache: malformed map block");
        for (std::uint32_t i = 0; i < nparams; ++i)
            meta.map_params[i] = get<double>(is);
    }

    const Eigen::Index m = static_cast<Eigen::Index>(meta.m);
    out.matrix.resize(m, m);
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        is.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!is)
            throw FormatError("operator cache: truncated payload");
        out.matrix.row(i) = Eigen::Map<Eigen::RowVectorXd>(row.data(), m);
    }
    return out;
}

}  // namespace nlch
