#pragma once

// NIfTI-1 single-file (.nii, .nii.gz) and header/image pair (.hdr + .img)
// reading, single-file writing. Only the parts of the format needed for
// scalar 3D volumes are interpreted: dim, pixdim, datatype, vox_offset,
// scl_slope/scl_inter and the qform offset (reported as origin).

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "gbmos/core/error.hpp"
#include "gbmos/volumeio/volume.hpp"

namespace gbmos::nifti {

enum class Datatype : std::int16_t { UInt8 = 2, Int16 = 4, Int32 = 8, Float32 = 16, Float64 = 64 };

inline std::size_t bytes_per_voxel(Datatype t) {
    switch (t) {
    case Datatype::UInt8: return 1;
    case Datatype::Int16: return 2;
    case Datatype::Int32: return 4;
    case Datatype::Float32: return 4;
    case Datatype::Float64: return 8;
    }
    return 0;
}

inline bool is_supported_datatype(std::int16_t code) {
    return code == 2 || code == 4 || code == 8 || code == 16 || code == 64;
}

/// Failure categories; each gets its own diagnostic.
enum class ErrorKind { Io, HeaderSize, Magic, Datatype, Dimensions, Truncated, Label };

class NiftiError : public DataError {
public:
    NiftiError(ErrorKind kind, const std::string& what) : DataError(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

constexpr std::size_t kHeaderSize = 348;

/// The subset of header fields we read and write, in host byte order.
struct Header {
    std::int32_t sizeof_hdr = 348;
    std::array<std::int16_t, 8> dim{};
    std::int16_t datatype = 16;
    std::int16_t bitpix = 32;
    std::array<float, 8> pixdim{};
    float vox_offset = 352.0f;
    float scl_slope = 1.0f;
    float scl_inter = 0.0f;
    std::int16_t qform_code = 0;
    std::int16_t sform_code = 0;
    std::array<float, 3> qoffset{};
    std::array<float, 4> srow_x{}, srow_y{}, srow_z{};
    std::array<char, 4> magic{'n', '+', '1', '\0'};
};

namespace detail {

template <typename T>
T byteswap(T v) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

// File-order <-> host conversions.
template <typename T>
T get(const unsigned char* p, bool swap) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return swap ? byteswap(v) : v;
}

template <typename T>
void put(unsigned char* p, T v, bool swap) {
    if (swap) v = byteswap(v);
    std::memcpy(p, &v, sizeof(T));
}

inline bool host_is_little() { return std::endian::native == std::endian::little; }

} // namespace detail

/// Encodes a header; big_endian selects the file byte order.
inline std::array<unsigned char, kHeaderSize> encode(const Header& h, bool big_endian = false) {
    using detail::put;
    const bool swap = big_endian == detail::host_is_little();
    std::array<unsigned char, kHeaderSize> b{};
    put<std::int32_t>(&b[0], h.sizeof_hdr, swap);
    b[38] = 'r'; // "regular"
    for (int i = 0; i < 8; ++i) put<std::int16_t>(&b[40 + 2 * i], h.dim[i], swap);
    put<std::int16_t>(&b[70], h.datatype, swap);
    put<std::int16_t>(&b[72], h.bitpix, swap);
    for (int i = 0; i < 8; ++i) put<float>(&b[76 + 4 * i], h.pixdim[i], swap);
    put<float>(&b[108], h.vox_offset, swap);
    put<float>(&b[112], h.scl_slope, swap);
    put<float>(&b[116], h.scl_inter, swap);
    b[123] = 2; // xyzt_units: mm
    put<std::int16_t>(&b[252], h.qform_code, swap);
    put<std::int16_t>(&b[254], h.sform_code, swap);
    for (int i = 0; i < 3; ++i) put<float>(&b[268 + 4 * i], h.qoffset[i], swap);
    for (int i = 0; i < 4; ++i) {
        put<float>(&b[280 + 4 * i], h.srow_x[i], swap);
        put<float>(&b[296 + 4 * i], h.srow_y[i], swap);
        put<float>(&b[312 + 4 * i], h.srow_z[i], swap);
    }
    std::memcpy(&b[344], h.magic.data(), 4);
    return b;
}

/// Decodes a header. The byte order is detected from dim[0], which must lie
/// in 1..7 when read in the correct order. Returns whether the file order
/// differs from the host order.
inline Header decode(std::span<const unsigned char> bytes, bool* swapped = nullptr) {
    using detail::get;
    if (bytes.size() < kHeaderSize)
        throw NiftiError(ErrorKind::HeaderSize, "header truncated: " + std::to_string(bytes.size()) + " bytes");
    const unsigned char* b = bytes.data();
    bool swap = false;
    const auto dim0 = get<std::int16_t>(b + 40, false);
    if (dim0 < 1 || dim0 > 7) {
        swap = true;
        const auto dim0s = get<std::int16_t>(b + 40, true);
        if (dim0s < 1 || dim0s > 7) {
            if (get<std::int32_t>(b, false) != 348 && get<std::int32_t>(b, true) != 348)
                throw NiftiError(ErrorKind::HeaderSize, "sizeof_hdr is not 348 in either byte order");
            throw NiftiError(ErrorKind::Dimensions, "dim[0] is " + std::to_string(dim0) + " in either byte order");
        }
    }
    Header h;
    h.sizeof_hdr = get<std::int32_t>(b, swap);
    if (h.sizeof_hdr != 348)
        throw NiftiError(ErrorKind::HeaderSize, "sizeof_hdr is " + std::to_string(h.sizeof_hdr) + ", expected 348");
    for (int i = 0; i < 8; ++i) h.dim[i] = get<std::int16_t>(b + 40 + 2 * i, swap);
    h.datatype = get<std::int16_t>(b + 70, swap);
    h.bitpix = get<std::int16_t>(b + 72, swap);
    for (int i = 0; i < 8; ++i) h.pixdim[i] = get<float>(b + 76 + 4 * i, swap);
    h.vox_offset = get<float>(b + 108, swap);
    h.scl_slope = get<float>(b + 112, swap);
    h.scl_inter = get<float>(b + 116, swap);
    h.qform_code = get<std::int16_t>(b + 252, swap);
    h.sform_code = get<std::int16_t>(b + 254, swap);
    for (int i = 0; i < 3; ++i) h.qoffset[i] = get<float>(b + 268 + 4 * i, swap);
    for (int i = 0; i < 4; ++i) {
        h.srow_x[i] = get<float>(b + 280 + 4 * i, swap);
        h.srow_y[i] = get<float>(b + 296 + 4 * i, swap);
        h.srow_z[i] = get<float>(b + 312 + 4 * i, swap);
    }
    std::memcpy(h.magic.data(), b + 344, 4);
    if (swapped) *swapped = swap;
    return h;
}

namespace detail {

/// Reads a whole file, transparently inflating gzip streams.
inline std::vector<unsigned char> slurp(const std::string& path) {
    if (!std::filesystem::exists(path)) throw NiftiError(ErrorKind::Io, "no such file '" + path + "'");
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw NiftiError(ErrorKind::Io, "cannot open '" + path + "'");
    std::vector<unsigned char> out;
    std::array<unsigned char, 1 << 16> chunk;
    for (;;) {
        const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
        if (n < 0) {
            int errnum = 0;
            std::string msg = gzerror(f, &errnum);
            gzclose(f);
            throw NiftiError(ErrorKind::Truncated, "corrupt stream in '" + path + "': " + msg);
        }
        if (n == 0) break;
        out.insert(out.end(), chunk.begin(), chunk.begin() + n);
    }
    gzclose(f);
    return out;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename T>
double read_voxel(const unsigned char* p, bool swap) {
    return static_cast<double>(get<T>(p, swap));
}

} // namespace detail

/// Loads a scalar volume. dims come from dim[1..3] and spacing from
/// pixdim[1..3]; 4D files are accepted only with a single frame. When
/// scl_slope is nonzero, stored = slope * raw + inter.
inline VoxelVolume load_nifti(const std::string& path) {
    const auto bytes = detail::slurp(path);
    bool swap = false;
    const Header h = decode(bytes, &swap);

    const std::string magic(h.magic.data(), 3);
    const bool single_file = magic == "n+1";
    if (!single_file && magic != "ni1") throw NiftiError(ErrorKind::Magic, "'" + path + "' is not NIfTI-1 (bad magic)");

    if (!is_supported_datatype(h.datatype))
        throw NiftiError(ErrorKind::Datatype, "unsupported datatype code " + std::to_string(h.datatype));
    const auto type = static_cast<Datatype>(h.datatype);

    if (h.dim[0] != 3 && h.dim[0] != 4)
        throw NiftiError(ErrorKind::Dimensions, "dim[0] must be 3 or 4, got " + std::to_string(h.dim[0]));
    if (h.dim[0] == 4 && h.dim[4] > 1)
        throw NiftiError(ErrorKind::Dimensions, "4D files with " + std::to_string(h.dim[4]) + " frames are not supported");
    Geometry g;
    for (int a = 0; a < 3; ++a) {
        if (h.dim[a + 1] < 1) throw NiftiError(ErrorKind::Dimensions, "dim[" + std::to_string(a + 1) + "] must be positive");
        g.dims[a] = h.dim[a + 1];
        const float s = std::fabs(h.pixdim[a + 1]);
        g.spacing[a] = s > 0.0f ? static_cast<double>(s) : 1.0;
    }
    if (h.qform_code > 0) {
        g.origin = {h.qoffset[0], h.qoffset[1], h.qoffset[2]};
    } else if (h.sform_code > 0) {
        g.origin = {h.srow_x[3], h.srow_y[3], h.srow_z[3]};
    }

    std::vector<unsigned char> image_storage;
    std::span<const unsigned char> payload;
    std::size_t offset = 0;
    if (single_file) {
        offset = static_cast<std::size_t>(std::max(352.0f, h.vox_offset));
        payload = bytes;
    } else {
        std::string img = path;
        if (detail::ends_with(img, ".hdr.gz")) img.replace(img.size() - 7, 7, ".img.gz");
        else if (detail::ends_with(img, ".hdr")) img.replace(img.size() - 4, 4, ".img");
        image_storage = detail::slurp(img);
        payload = image_storage;
        offset = static_cast<std::size_t>(std::max(0.0f, h.vox_offset));
    }

    const std::size_t n = g.voxel_count();
    const std::size_t bpv = bytes_per_voxel(type);
    if (payload.size() < offset || payload.size() - offset < n * bpv)
        throw NiftiError(ErrorKind::Truncated, "payload truncated: need " + std::to_string(n * bpv) + " bytes at offset " +
                                                   std::to_string(offset) + ", file has " + std::to_string(payload.size()));

    std::vector<double> data(n);
    const unsigned char* p = payload.data() + offset;
    for (std::size_t v = 0; v < n; ++v, p += bpv) {
        switch (type) {
        case Datatype::UInt8: data[v] = *p; break;
        case Datatype::Int16: data[v] = detail::read_voxel<std::int16_t>(p, swap); break;
        case Datatype::Int32: data[v] = detail::read_voxel<std::int32_t>(p, swap); break;
        case Datatype::Float32: data[v] = detail::read_voxel<float>(p, swap); break;
        case Datatype::Float64: data[v] = detail::read_voxel<double>(p, swap); break;
        }
    }
    if (h.scl_slope != 0.0f && std::isfinite(h.scl_slope)) {
        const double slope = h.scl_slope, inter = h.scl_inter;
        if (slope != 1.0 || inter != 0.0)
            for (auto& x : data) x = slope * x + inter;
    }
    return VoxelVolume(g, std::move(data));
}

/// Loads a segmentation. Every (scaled) voxel must be within 1e-6 of one of
/// the labels 0, 1, 2, 4.
inline LabelMask load_mask(const std::string& path) {
    const VoxelVolume v = load_nifti(path);
    std::vector<std::uint8_t> labels(v.data.size());
    for (std::size_t n = 0; n < v.data.size(); ++n) {
        const double x = v.data[n];
        const double r = std::round(x);
        if (std::fabs(x - r) > 1e-6 || !is_valid_label(static_cast<int>(r)) || r < 0 || r > 4)
            throw NiftiError(ErrorKind::Label, "'" + path + "': label " + std::to_string(x) + " at voxel " +
                                                   std::to_string(n) + " is not one of {0,1,2,4}");
        labels[n] = static_cast<std::uint8_t>(r);
    }
    return LabelMask(v.geometry, std::move(labels));
}

struct WriteOptions {
    Datatype datatype = Datatype::Float32;
    bool big_endian = false;
};

namespace detail {

template <typename T>
void append(std::vector<unsigned char>& out, double x, bool swap) {
    const T v = static_cast<T>(x);
    if (static_cast<double>(v) != x && !(std::isnan(x) && std::isnan(static_cast<double>(v))))
        throw ParameterError("value " + std::to_string(x) + " is not representable in the requested NIfTI datatype");
    unsigned char buf[sizeof(T)];
    put<T>(buf, v, swap);
    out.insert(out.end(), buf, buf + sizeof(T));
}

inline void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    if (ends_with(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "wb6");
        if (!f) throw NiftiError(ErrorKind::Io, "cannot write '" + path + "'");
        const int n = gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
        gzclose(f);
        if (n != static_cast<int>(bytes.size())) throw NiftiError(ErrorKind::Io, "short write to '" + path + "'");
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw NiftiError(ErrorKind::Io, "cannot write '" + path + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
}

} // namespace detail

/// Serializes a volume as single-file NIfTI-1 (n+1, vox_offset 352). Values
/// must be exactly representable in the chosen datatype; no scaling is
/// applied, so write-then-load is bit-exact.
inline std::vector<unsigned char> encode_volume(const VoxelVolume& v, const WriteOptions& opt = {}) {
    Header h;
    h.dim = {3, static_cast<std::int16_t>(v.geometry.dims[0]), static_cast<std::int16_t>(v.geometry.dims[1]),
             static_cast<std::int16_t>(v.geometry.dims[2]), 1, 1, 1, 1};
    for (int a = 0; a < 3; ++a)
        if (v.geometry.dims[a] > std::numeric_limits<std::int16_t>::max())
            throw ParameterError("dimension too large for NIfTI-1");
    h.datatype = static_cast<std::int16_t>(opt.datatype);
    h.bitpix = static_cast<std::int16_t>(8 * bytes_per_voxel(opt.datatype));
    h.pixdim = {1.0f, static_cast<float>(v.geometry.spacing[0]), static_cast<float>(v.geometry.spacing[1]),
                static_cast<float>(v.geometry.spacing[2]), 0.0f, 0.0f, 0.0f, 0.0f};
    h.qform_code = 1;
    h.qoffset = {static_cast<float>(v.geometry.origin[0]), static_cast<float>(v.geometry.origin[1]),
                 static_cast<float>(v.geometry.origin[2])};
    const auto hdr = encode(h, opt.big_endian);
    std::vector<unsigned char> out(hdr.begin(), hdr.end());
    out.resize(352, 0); // empty extension block
    const bool swap = opt.big_endian == detail::host_is_little();
    out.reserve(352 + v.data.size() * bytes_per_voxel(opt.datatype));
    for (double x : v.data) {
        switch (opt.datatype) {
        case Datatype::UInt8: detail::append<std::uint8_t>(out, x, swap); break;
        case Datatype::Int16: detail::append<std::int16_t>(out, x, swap); break;
        case Datatype::Int32: detail::append<std::int32_t>(out, x, swap); break;
        case Datatype::Float32: detail::append<float>(out, x, swap); break;
        case Datatype::Float64: detail::append<double>(out, x, swap); break;
        }
    }
    return out;
}

/// Writes .nii, or gzip-compressed .nii.gz when the path ends in ".gz".
inline void write_nifti(const std::string& path, const VoxelVolume& v, const WriteOptions& opt = {}) {
    detail::write_bytes(path, encode_volume(v, opt));
}

inline VoxelVolume to_volume(const LabelMask& m) {
    std::vector<double> d(m.labels.begin(), m.labels.end());
    return VoxelVolume(m.geometry, std::move(d));
}

inline void write_mask(const std::string& path, const LabelMask& m) {
    write_nifti(path, to_volume(m), {Datatype::UInt8, false});
}

} // namespace gbmos::nifti
