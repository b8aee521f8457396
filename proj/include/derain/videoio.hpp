#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "derain/tensor.hpp"

namespace derain {

/// Thrown on filesystem-level failures (missing file, short write, ...).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a file exists but its contents are not in the expected format.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct YuvVideo {
    Tensor3 y, u, v;
};

/// BT.601 full-range RGB -> YUV. Grayscale inputs (R=G=B) map to Y with the
/// chroma planes at the 0.5 neutral point.
inline YuvVideo rgb_to_yuv(const ColorVideo& video) {
    const Tensor3 &r = video.red(), &g = video.green(), &b = video.blue();
    YuvVideo out{Tensor3(r.rows(), r.cols(), r.frames()), Tensor3(r.rows(), r.cols(), r.frames()),
                 Tensor3(r.rows(), r.cols(), r.frames())};
    for (std::size_t p = 0; p < r.size(); ++p) {
        const double R = r.data()[p], G = g.data()[p], B = b.data()[p];
        out.y.data()[p] = 0.299 * R + 0.587 * G + 0.114 * B;
        out.u.data()[p] = 0.5 - 0.168736 * R - 0.331264 * G + 0.5 * B;
        out.v.data()[p] = 0.5 + 0.5 * R - 0.418688 * G - 0.081312 * B;
    }
    return out;
}

/// Inverse transform; reconstructs RGB within 1e-3 after clamping to [0,1].
inline ColorVideo yuv_to_rgb(const Tensor3& y, const Tensor3& u, const Tensor3& v) {
    y.require_same_dims(u, "yuv_to_rgb");
    y.require_same_dims(v, "yuv_to_rgb");
    Tensor3 r(y.rows(), y.cols(), y.frames());
    Tensor3 g(y.rows(), y.cols(), y.frames());
    Tensor3 b(y.rows(), y.cols(), y.frames());
    for (std::size_t p = 0; p < y.size(); ++p) {
        const double Y = y.data()[p], U = u.data()[p] - 0.5, V = v.data()[p] - 0.5;
        r.data()[p] = Y + 1.402 * V;
        g.data()[p] = Y - 0.344136 * U - 0.714136 * V;
        b.data()[p] = Y + 1.772 * U;
    }
    return ColorVideo(std::move(r), std::move(g), std::move(b)); // ctor clamps
}

namespace detail {

inline void write_u32le(std::ostream& os, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xFF),
                                    static_cast<unsigned char>((v >> 8) & 0xFF),
                                    static_cast<unsigned char>((v >> 16) & 0xFF),
                                    static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(bytes), 4);
}

inline std::uint32_t read_u32le(std::istream& is) {
    unsigned char bytes[4];
    is.read(reinterpret_cast<char*>(bytes), 4);
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline std::uint32_t f32_bits(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    return u;
}

inline float bits_f32(std::uint32_t u) {
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

// write-to-temp then rename, so a failed write never leaves a partial file
template <typename WriteBody>
void atomic_write(const std::filesystem::path& path, WriteBody&& body) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open for writing: " + tmp.string());
        body(os);
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot finalize: " + path.string());
    }
}

} // namespace detail

/// Raw tensor container: magic "FDR1", then m, n, t as 32-bit little-endian
/// unsigned integers, then m*n*t 32-bit little-endian IEEE floats in storage
/// order ((k*m+i)*n + j).
inline void write_raw(const std::filesystem::path& path, const Tensor3& x) {
    detail::atomic_write(path, [&](std::ostream& os) {
        os.write("FDR1", 4);
        detail::write_u32le(os, static_cast<std::uint32_t>(x.rows()));
        detail::write_u32le(os, static_cast<std::uint32_t>(x.cols()));
        detail::write_u32le(os, static_cast<std::uint32_t>(x.frames()));
        for (std::size_t p = 0; p < x.size(); ++p)
            detail::write_u32le(os, detail::f32_bits(static_cast<float>(x.data()[p])));
    });
}

inline Tensor3 read_raw(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FDR1", 4) != 0)
        throw FormatError("not a raw tensor file (bad magic): " + path.string());
    const std::uint32_t m = detail::read_u32le(is);
    const std::uint32_t n = detail::read_u32le(is);
    const std::uint32_t t = detail::read_u32le(is);
    if (!is || m == 0 || n == 0 || t == 0)
        throw FormatError("invalid raw tensor header: " + path.string());
    // validate the advertised payload against the actual file size before
    // allocating anything; a corrupt header must not turn into a huge alloc
    const std::uint64_t voxels = static_cast<std::uint64_t>(m) * n * t;
    std::error_code ec;
    const auto actual = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat: " + path.string());
    if (actual != 16 + 4 * voxels)
        throw FormatError("raw tensor size mismatch (header says " + std::to_string(voxels) +
                          " voxels): " + path.string());
    Tensor3 x(static_cast<int>(m), static_cast<int>(n), static_cast<int>(t));
    for (std::size_t p = 0; p < x.size(); ++p) {
        const std::uint32_t bits = detail::read_u32le(is);
        if (!is) throw FormatError("truncated raw tensor payload: " + path.string());
        x.data()[p] = static_cast<double>(detail::bits_f32(bits));
    }
    return x;
}

namespace detail {

inline int pnm_token(std::istream& is) {
    // skips whitespace and '#' comments, then parses one nonnegative integer;
    // the terminating character is pushed back so the caller controls it
    int c = is.get();
    while (is && (std::isspace(c) || c == '#')) {
        if (c == '#')
            while (is && c != '\n') c = is.get();
        c = is.get();
    }
    int value = 0;
    bool any = false;
    while (is && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = is.get();
    }
    if (!any) throw FormatError("malformed PNM header");
    if (is) is.unget();
    return value;
}

struct PnmImage {
    int rows = 0, cols = 0, channels = 1;
    std::vector<std::uint8_t> bytes; // row-major, interleaved for RGB
};

inline PnmImage read_pnm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    char p = 0, kind = 0;
    is.get(p);
    is.get(kind);
    if (!is || p != 'P' || (kind != '5' && kind != '6'))
        throw FormatError("not a binary PGM/PPM file: " + path.string());
    PnmImage img;
    img.channels = kind == '6' ? 3 : 1;
    img.cols = pnm_token(is);
    img.rows = pnm_token(is);
    const int maxval = pnm_token(is);
    if (maxval != 255) throw FormatError("only 8-bit PGM/PPM supported: " + path.string());
    is.get(); // single whitespace after maxval
    img.bytes.resize(static_cast<std::size_t>(img.rows) * img.cols * img.channels);
    is.read(reinterpret_cast<char*>(img.bytes.data()), static_cast<std::streamsize>(img.bytes.size()));
    if (!is) throw FormatError("truncated PGM/PPM payload: " + path.string());
    return img;
}

inline std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".ppm") files.push_back(entry.path());
    }
    if (files.empty()) throw IoError("no .pgm/.ppm frames in: " + dir.string());
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace detail

struct LoadedVideo {
    bool is_color = false;
    Tensor3 gray;                    // valid when !is_color
    std::optional<ColorVideo> color; // valid when is_color
};

/// Loads a directory of equally sized binary PGM (grayscale) or PPM (color)
/// frames, sorted by filename, scaling [0,255] to [0,1].
inline LoadedVideo read_frames(const std::filesystem::path& dir) {
    const auto files = detail::list_frames(dir);
    const auto first = detail::read_pnm(files[0]);
    const int m = first.rows, n = first.cols, t = static_cast<int>(files.size());
    const bool color = first.channels == 3;
    Tensor3 r(m, n, t), g(m, n, t), b(m, n, t);
    for (int k = 0; k < t; ++k) {
        const auto img = k == 0 ? first : detail::read_pnm(files[static_cast<std::size_t>(k)]);
        if (img.rows != m || img.cols != n || (img.channels == 3) != color)
            throw FormatError("frame dimensions differ: " + files[static_cast<std::size_t>(k)].string());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t base =
                    (static_cast<std::size_t>(i) * n + j) * static_cast<std::size_t>(img.channels);
                if (color) {
                    r(i, j, k) = img.bytes[base] / 255.0;
                    g(i, j, k) = img.bytes[base + 1] / 255.0;
                    b(i, j, k) = img.bytes[base + 2] / 255.0;
                } else {
                    r(i, j, k) = img.bytes[base] / 255.0;
                }
            }
    }
    LoadedVideo out;
    out.is_color = color;
    if (color)
        out.color.emplace(std::move(r), std::move(g), std::move(b));
    else
        out.gray = std::move(r);
    return out;
}

namespace detail {
inline std::uint8_t to_byte(double v) {
    const long b = std::lround(std::min(std::max(v, 0.0), 1.0) * 255.0);
    return static_cast<std::uint8_t>(b);
}

inline std::filesystem::path frame_name(const std::filesystem::path& dir, int k, const char* ext) {
    char name[32];
    std::snprintf(name, sizeof name, "%06d.%s", k, ext);
    return dir / name;
}
} // namespace detail

/// Writes grayscale frames as binary PGM, one file per frame, zero-padded
/// numeric names. Round-to-nearest inverts the 8-bit scaling exactly.
inline void write_frames(const std::filesystem::path& dir, const Tensor3& x) {
    std::filesystem::create_directories(dir);
    for (int k = 0; k < x.frames(); ++k) {
        detail::atomic_write(detail::frame_name(dir, k, "pgm"), [&](std::ostream& os) {
            os << "P5\n" << x.cols() << " " << x.rows() << "\n255\n";
            for (int i = 0; i < x.rows(); ++i)
                for (int j = 0; j < x.cols(); ++j) os.put(static_cast<char>(detail::to_byte(x(i, j, k))));
        });
    }
}

inline void write_frames(const std::filesystem::path& dir, const ColorVideo& video) {
    std::filesystem::create_directories(dir);
    for (int k = 0; k < video.frames(); ++k) {
        detail::atomic_write(detail::frame_name(dir, k, "ppm"), [&](std::ostream& os) {
            os << "P6\n" << video.cols() << " " << video.rows() << "\n255\n";
            for (int i = 0; i < video.rows(); ++i)
                for (int j = 0; j < video.cols(); ++j) {
                    os.put(static_cast<char>(detail::to_byte(video.red()(i, j, k))));
                    os.put(static_cast<char>(detail::to_byte(video.green()(i, j, k))));
                    os.put(static_cast<char>(detail::to_byte(video.blue()(i, j, k))));
                }
        });
    }
}

} // namespace derain
