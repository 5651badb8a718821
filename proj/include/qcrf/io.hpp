#ifndef QCRF_IO_HPP
#define QCRF_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"

namespace qcrf {

namespace detail {

constexpr std::int64_t kMaxSide = 1 << 20;
constexpr std::int64_t kMaxPixels = 100000000;
constexpr std::int64_t kMaxLabels = 65536;

class ByteReader {
  public:
    explicit ByteReader(const std::string& path) : in_(path, std::ios::binary) {
        require(in_.good(), "cannot open file: " + path);
    }

    std::size_t offset() const { return offset_; }

    void read(void* dst, std::size_t count, const char* what) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in_.gcount()) != count)
            throw format_error(std::string("truncated file while reading ") + what, offset_);
        offset_ += count;
    }

    std::uint32_t read_u32(const char* what) {
        unsigned char b[4];
        read(b, 4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }

    float read_f32(const char* what) {
        const std::uint32_t bits = read_u32(what);
        float value;
        std::memcpy(&value, &bits, 4);
        return value;
    }

    void expect_magic(const char* magic, const char* format_name) {
        char buf[8];
        const std::size_t at = offset_;
        read(buf, 8, "magic");
        if (std::memcmp(buf, magic, 8) != 0)
            throw format_error(std::string("bad magic for ") + format_name, at);
    }

  private:
    std::ifstream in_;
    std::size_t offset_ = 0;
};

class ByteWriter {
  public:
    explicit ByteWriter(const std::string& path) : out_(path, std::ios::binary) {
        require(out_.good(), "cannot open file for writing: " + path);
    }

    void write(const void* src, std::size_t count) {
        out_.write(static_cast<const char*>(src), static_cast<std::streamsize>(count));
    }

    void write_u32(std::uint32_t value) {
        const unsigned char b[4] = {static_cast<unsigned char>(value & 0xff),
                                    static_cast<unsigned char>((value >> 8) & 0xff),
                                    static_cast<unsigned char>((value >> 16) & 0xff),
                                    static_cast<unsigned char>((value >> 24) & 0xff)};
        write(b, 4);
    }

    void write_f32(float value) {
        std::uint32_t bits;
        std::memcpy(&bits, &value, 4);
        write_u32(bits);
    }

    void close() {
        out_.flush();
        require(out_.good(), "write failed");
    }

  private:
    std::ofstream out_;
};

inline void check_sides(std::int64_t height, std::int64_t width, std::size_t at) {
    if (height < 1 || width < 1 || height > kMaxSide || width > kMaxSide ||
        height * width > kMaxPixels)
        throw format_error("dimension overflow", at);
}

}  // namespace detail

// ---- unary tensor: "QCRFUNRY", u32 height, u32 width, u32 labels, f32 data ----

inline void write_unary(const UnaryCosts& unary, const std::string& path) {
    detail::ByteWriter out(path);
    out.write("QCRFUNRY", 8);
    out.write_u32(static_cast<std::uint32_t>(unary.height));
    out.write_u32(static_cast<std::uint32_t>(unary.width));
    out.write_u32(static_cast<std::uint32_t>(unary.num_labels));
    for (double c : unary.costs) out.write_f32(static_cast<float>(c));
    out.close();
}

inline UnaryCosts read_unary(const std::string& path) {
    detail::ByteReader in(path);
    in.expect_magic("QCRFUNRY", "unary tensor");
    const std::size_t dims_at = in.offset();
    UnaryCosts unary;
    unary.height = static_cast<int>(in.read_u32("height"));
    unary.width = static_cast<int>(in.read_u32("width"));
    unary.num_labels = static_cast<int>(in.read_u32("labels"));
    detail::check_sides(unary.height, unary.width, dims_at);
    if (unary.num_labels < 2 || unary.num_labels > detail::kMaxLabels)
        throw format_error("label count out of range", dims_at + 8);
    unary.costs.resize(static_cast<std::size_t>(unary.num_pixels()) * unary.num_labels);
    for (double& c : unary.costs) {
        c = in.read_f32("unary data");
        if (!std::isfinite(c))
            throw format_error("non-finite unary cost", in.offset() - 4);
    }
    return unary;
}

// ---- superpixel map: "QCRFSPIX", u32 height, u32 width, u32 indices ----

struct SuperpixelMap {
    int height = 0;
    int width = 0;
    std::vector<int> assignment;
};

inline void write_superpixel_map(const SuperpixelPartition& partition,
                                 const std::string& path) {
    detail::ByteWriter out(path);
    out.write("QCRFSPIX", 8);
    out.write_u32(static_cast<std::uint32_t>(partition.height));
    out.write_u32(static_cast<std::uint32_t>(partition.width));
    for (int a : partition.assignment) out.write_u32(static_cast<std::uint32_t>(a));
    out.close();
}

inline SuperpixelMap read_superpixel_map(const std::string& path) {
    detail::ByteReader in(path);
    in.expect_magic("QCRFSPIX", "superpixel map");
    const std::size_t dims_at = in.offset();
    SuperpixelMap map;
    map.height = static_cast<int>(in.read_u32("height"));
    map.width = static_cast<int>(in.read_u32("width"));
    detail::check_sides(map.height, map.width, dims_at);
    const std::int64_t n = static_cast<std::int64_t>(map.height) * map.width;
    map.assignment.resize(n);
    for (std::int64_t p = 0; p < n; ++p) {
        const std::uint32_t idx = in.read_u32("superpixel index");
        if (idx >= static_cast<std::uint32_t>(n))
            throw format_error("superpixel index out of range", in.offset() - 4);
        map.assignment[p] = static_cast<int>(idx);
    }
    return map;
}

// ---- PGM (P5) images and labelings ----

namespace detail {

inline int pgm_next_int(ByteReader& in, const char* what) {
    // Skip whitespace and '#' comments, then parse a decimal integer.
    char c;
    for (;;) {
        in.read(&c, 1, what);
        if (c == '#') {
            do in.read(&c, 1, what);
            while (c != '\n');
            continue;
        }
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r') break;
    }
    if (c < '0' || c > '9') throw format_error("expected integer in PGM header",
                                               in.offset() - 1);
    std::int64_t value = 0;
    for (;;) {
        value = value * 10 + (c - '0');
        if (value > kMaxPixels) throw format_error("PGM header value overflow",
                                                   in.offset() - 1);
        in.read(&c, 1, what);
        if (c < '0' || c > '9') break;
    }
    // The terminating byte is whitespace per the format; it is consumed.
    return static_cast<int>(value);
}

struct PgmData {
    int width = 0, height = 0, maxval = 0;
    std::vector<unsigned char> bytes;
};

inline PgmData read_pgm_bytes(const std::string& path) {
    ByteReader in(path);
    char magic[2];
    in.read(magic, 2, "magic");
    if (magic[0] != 'P' || magic[1] != '5')
        throw format_error("bad magic for P5 PGM", 0);
    PgmData pgm;
    pgm.width = pgm_next_int(in, "width");
    pgm.height = pgm_next_int(in, "height");
    pgm.maxval = pgm_next_int(in, "maxval");
    check_sides(pgm.height, pgm.width, 2);
    if (pgm.maxval < 1 || pgm.maxval > 255)
        throw format_error("unsupported PGM maxval (need 1..255)", in.offset() - 1);
    pgm.bytes.resize(static_cast<std::size_t>(pgm.width) * pgm.height);
    in.read(pgm.bytes.data(), pgm.bytes.size(), "pixel data");
    return pgm;
}

inline void write_pgm_bytes(const std::vector<unsigned char>& bytes, int width, int height,
                            int maxval, const std::string& path) {
    ByteWriter out(path);
    const std::string header =
        "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
        std::to_string(maxval) + "\n";
    out.write(header.data(), header.size());
    out.write(bytes.data(), bytes.size());
    out.close();
}

}  // namespace detail

inline GridImage read_image_pgm(const std::string& path) {
    const detail::PgmData pgm = detail::read_pgm_bytes(path);
    GridImage image;
    image.width = pgm.width;
    image.height = pgm.height;
    image.intensities.resize(pgm.bytes.size());
    for (std::size_t i = 0; i < pgm.bytes.size(); ++i)
        image.intensities[i] = static_cast<double>(pgm.bytes[i]);
    return image;
}

inline void write_image_pgm(const GridImage& image, const std::string& path) {
    std::vector<unsigned char> bytes(image.intensities.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const double v = std::clamp(image.intensities[i], 0.0, 255.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v));
    }
    detail::write_pgm_bytes(bytes, image.width, image.height, 255, path);
}

struct LabelingFile {
    Labeling labeling;
    int width = 0, height = 0;
    int num_labels = 0;  // maxval + 1
};

inline void write_labeling_pgm(const Labeling& labeling, int width, int height,
                               int num_labels, const std::string& path) {
    detail::require(num_labels >= 2 && num_labels <= 256,
                    "labeling PGM supports 2..256 labels");
    detail::require(static_cast<std::int64_t>(labeling.size()) ==
                        static_cast<std::int64_t>(width) * height,
                    "labeling size does not match dimensions");
    std::vector<unsigned char> bytes(labeling.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        detail::require(labeling[i] >= 0 && labeling[i] < num_labels,
                        "label out of range for PGM maxval");
        bytes[i] = static_cast<unsigned char>(labeling[i]);
    }
    detail::write_pgm_bytes(bytes, width, height, num_labels - 1, path);
}

inline LabelingFile read_labeling_pgm(const std::string& path) {
    const detail::PgmData pgm = detail::read_pgm_bytes(path);
    LabelingFile file;
    file.width = pgm.width;
    file.height = pgm.height;
    file.num_labels = pgm.maxval + 1;
    file.labeling.resize(pgm.bytes.size());
    for (std::size_t i = 0; i < pgm.bytes.size(); ++i)
        file.labeling[i] = static_cast<int>(pgm.bytes[i]);
    return file;
}

}  // namespace qcrf

#endif
