#include <cstring>
#include <fstream>

#include <gtest/gtest.h>

#include "gbmos/core/rng.hpp"
#include "gbmos/phantoms/phantom.hpp"
#include "gbmos/volumeio/metadata.hpp"
#include "gbmos/volumeio/nifti.hpp"
#include "gbmos/volumeio/normalize.hpp"
#include "gbmos/volumeio/volume.hpp"
#include "unit/test_util.hpp"

using namespace gbmos;
using gbmos::testing::TempDir;

namespace {

// Builds a little-endian NIfTI-1 file byte by byte, independent of the
// library encoder.
std::vector<unsigned char> handcrafted(std::int16_t datatype, std::int16_t bitpix, std::array<std::int16_t, 4> dims,
                                       float slope, float inter, const std::vector<unsigned char>& payload,
                                       std::int32_t sizeof_hdr = 348, const char* magic = "n+1") {
    std::vector<unsigned char> b(352, 0);
    auto put = [&](std::size_t off, const void* v, std::size_t n) { std::memcpy(&b[off], v, n); };
    put(0, &sizeof_hdr, 4);
    std::int16_t dim[8] = {dims[0], dims[1], dims[2], dims[3], 1, 1, 1, 1};
    put(40, dim, 16);
    put(70, &datatype, 2);
    put(72, &bitpix, 2);
    float pixdim[8] = {1, 1, 1, 1, 0, 0, 0, 0};
    put(76, pixdim, 32);
    float vox_offset = 352;
    put(108, &vox_offset, 4);
    put(112, &slope, 4);
    put(116, &inter, 4);
    put(344, magic, 4);
    b.insert(b.end(), payload.begin(), payload.end());
    return b;
}

void dump(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
std::vector<unsigned char> raw(const std::vector<T>& v) {
    std::vector<unsigned char> out(v.size() * sizeof(T));
    std::memcpy(out.data(), v.data(), out.size());
    return out;
}

nifti::ErrorKind load_error_kind(const std::string& path) {
    try {
        nifti::load_nifti(path);
    } catch (const nifti::NiftiError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected a load failure";
    return nifti::ErrorKind::Io;
}

LabelMask mask_with_counts(std::size_t n1, std::size_t n2, std::size_t n4) {
    Geometry g;
    g.dims = {5, 5, 5};
    LabelMask m(g);
    std::size_t n = 0;
    for (std::size_t c = 0; c < n1; ++c) m.labels[n++] = 1;
    for (std::size_t c = 0; c < n2; ++c) m.labels[n++] = 2;
    for (std::size_t c = 0; c < n4; ++c) m.labels[n++] = 4;
    return m;
}

} // namespace

TEST(Nifti, MinimalFloat32FileLoadsAllOnes) {
    TempDir tmp;
    dump(tmp.file("ones.nii"), handcrafted(16, 32, {3, 2, 2, 2}, 0.0f, 0.0f, raw(std::vector<float>(8, 1.0f))));
    const auto v = nifti::load_nifti(tmp.file("ones.nii"));
    EXPECT_EQ(v.geometry.dims, (Index3{2, 2, 2}));
    ASSERT_EQ(v.data.size(), 8u);
    for (double x : v.data) EXPECT_EQ(x, 1.0);
}

TEST(Nifti, SlopeAndInterceptAreApplied) {
    TempDir tmp;
    dump(tmp.file("scaled.nii"), handcrafted(4, 16, {3, 1, 1, 1}, 2.0f, 1.0f, raw(std::vector<std::int16_t>{3})));
    EXPECT_EQ(nifti::load_nifti(tmp.file("scaled.nii")).data[0], 7.0);
}

TEST(Nifti, ZeroSlopeMeansNoScaling) {
    TempDir tmp;
    dump(tmp.file("raw.nii"), handcrafted(4, 16, {3, 1, 1, 1}, 0.0f, 5.0f, raw(std::vector<std::int16_t>{3})));
    EXPECT_EQ(nifti::load_nifti(tmp.file("raw.nii")).data[0], 3.0);
}

TEST(Nifti, Int16PhantomRoundTripsBitExactly) {
    TempDir tmp;
    Geometry g;
    g.dims = {4, 4, 4};
    g.spacing = {1.0, 1.5, 2.0};
    const auto mask = gen_mask(PhantomSpec{Sphere{1.6}, {1.5, 2.25, 3.0}, Label::Enhancing, g});
    const auto vol = nifti::to_volume(mask);
    nifti::write_nifti(tmp.file("p.nii"), vol, {nifti::Datatype::Int16});
    const auto back = nifti::load_nifti(tmp.file("p.nii"));
    EXPECT_EQ(back.geometry.dims, g.dims);
    EXPECT_EQ(back.geometry.spacing, g.spacing);
    EXPECT_EQ(back.data, vol.data);
}

TEST(Nifti, RoundTripPropertyAllDatatypesAndCompression) {
    TempDir tmp;
    Rng rng(2024);
    const std::array types{nifti::Datatype::UInt8, nifti::Datatype::Int16, nifti::Datatype::Int32,
                           nifti::Datatype::Float32, nifti::Datatype::Float64};
    for (int trial = 0; trial < 20; ++trial) {
        for (auto type : types) {
            Geometry g;
            g.dims = {static_cast<std::int64_t>(1 + rng.index(6)), static_cast<std::int64_t>(1 + rng.index(6)),
                      static_cast<std::int64_t>(1 + rng.index(6))};
            g.spacing = {0.5 + rng.index(4) * 0.25, 1.0, 2.0};
            VoxelVolume v(g);
            for (auto& x : v.data) {
                switch (type) {
                case nifti::Datatype::UInt8: x = static_cast<double>(rng.index(256)); break;
                case nifti::Datatype::Int16: x = static_cast<double>(rng.index(65536)) - 32768.0; break;
                case nifti::Datatype::Int32: x = static_cast<double>(rng.index(1u << 31)) - 1073741824.0; break;
                case nifti::Datatype::Float32: x = static_cast<float>(rng.normal(0, 1e3)); break;
                case nifti::Datatype::Float64: x = rng.normal(0, 1e6); break;
                }
            }
            const bool gz = trial % 2 == 0;
            const bool big = trial % 3 == 0;
            const auto path = tmp.file(std::string("rt") + (gz ? ".nii.gz" : ".nii"));
            nifti::write_nifti(path, v, {type, big});
            const auto back = nifti::load_nifti(path);
            ASSERT_EQ(back.geometry.dims, g.dims);
            ASSERT_EQ(back.data, v.data) << "datatype " << static_cast<int>(type) << " trial " << trial;
        }
    }
}

TEST(Nifti, BigEndianHeaderIsDetectedFromDim0) {
    Geometry g;
    g.dims = {3, 2, 1};
    VoxelVolume v(g, std::vector<double>{1, -2, 3, 300, 5, -6});
    const auto bytes = nifti::encode_volume(v, {nifti::Datatype::Int16, true});
    // dim[0] = 3 stored big-endian: 0x00 0x03
    EXPECT_EQ(bytes[40], 0x00);
    EXPECT_EQ(bytes[41], 0x03);
    TempDir tmp;
    dump(tmp.file("be.nii"), bytes);
    EXPECT_EQ(nifti::load_nifti(tmp.file("be.nii")).data, v.data);
}

TEST(Nifti, MalformedInputsGiveDistinctDiagnostics) {
    TempDir tmp;
    const auto payload = raw(std::vector<float>(8, 1.0f));
    dump(tmp.file("size.nii"), handcrafted(16, 32, {3, 2, 2, 2}, 1, 0, payload, 540));
    EXPECT_EQ(load_error_kind(tmp.file("size.nii")), nifti::ErrorKind::HeaderSize);

    dump(tmp.file("type.nii"), handcrafted(32, 64, {3, 2, 2, 2}, 1, 0, payload));
    EXPECT_EQ(load_error_kind(tmp.file("type.nii")), nifti::ErrorKind::Datatype);

    dump(tmp.file("dim.nii"), handcrafted(16, 32, {2, 2, 2, 2}, 1, 0, payload));
    EXPECT_EQ(load_error_kind(tmp.file("dim.nii")), nifti::ErrorKind::Dimensions);

    dump(tmp.file("short.nii"), handcrafted(16, 32, {3, 2, 2, 2}, 1, 0, raw(std::vector<float>(7, 1.0f))));
    EXPECT_EQ(load_error_kind(tmp.file("short.nii")), nifti::ErrorKind::Truncated);

    dump(tmp.file("magic.nii"), handcrafted(16, 32, {3, 2, 2, 2}, 1, 0, payload, 348, "xyz"));
    EXPECT_EQ(load_error_kind(tmp.file("magic.nii")), nifti::ErrorKind::Magic);

    EXPECT_EQ(load_error_kind(tmp.file("absent.nii")), nifti::ErrorKind::Io);
}

TEST(Nifti, HeaderImagePairIsRead) {
    TempDir tmp;
    auto hdr = handcrafted(2, 8, {3, 2, 1, 1}, 0, 0, {}, 348, "ni1");
    hdr.resize(348);
    float zero = 0.0f;
    std::memcpy(&hdr[108], &zero, 4);
    dump(tmp.file("pair.hdr"), hdr);
    dump(tmp.file("pair.img"), {7, 9});
    EXPECT_EQ(nifti::load_nifti(tmp.file("pair.hdr")).data, (std::vector<double>{7, 9}));
}

TEST(Mask, AllZeroMaskHasEmptyTumor) {
    TempDir tmp;
    Geometry g;
    g.dims = {3, 3, 3};
    nifti::write_mask(tmp.file("z.nii.gz"), LabelMask(g));
    const auto m = nifti::load_mask(tmp.file("z.nii.gz"));
    EXPECT_EQ(derive_roi(m, RoiKind::WT).count(), 0u);
}

TEST(Mask, OneVoxelOfEachLabel) {
    TempDir tmp;
    const auto m = mask_with_counts(1, 1, 1);
    nifti::write_mask(tmp.file("m.nii"), m);
    const auto back = nifti::load_mask(tmp.file("m.nii"));
    EXPECT_EQ(back.count(Label::Necrotic), 1u);
    EXPECT_EQ(back.count(Label::Edema), 1u);
    EXPECT_EQ(back.count(Label::Enhancing), 1u);
}

TEST(Mask, OutOfVocabularyLabelIsRejectedWithValueAndIndex) {
    TempDir tmp;
    Geometry g;
    g.dims = {2, 2, 1};
    nifti::write_nifti(tmp.file("bad.nii"), VoxelVolume(g, std::vector<double>{0, 1, 3, 4}), {nifti::Datatype::UInt8});
    try {
        nifti::load_mask(tmp.file("bad.nii"));
        FAIL() << "label 3 accepted";
    } catch (const nifti::NiftiError& e) {
        EXPECT_EQ(e.kind(), nifti::ErrorKind::Label);
        const std::string what = e.what();
        EXPECT_NE(what.find("label 3"), std::string::npos) << what;
        EXPECT_NE(what.find("voxel 2"), std::string::npos) << what;
    }
}

TEST(Roi, CountsFollowMembershipTable) {
    const auto m = mask_with_counts(5, 7, 3);
    EXPECT_EQ(derive_roi(m, RoiKind::WT).count(), 15u);
    EXPECT_EQ(derive_roi(m, RoiKind::TC).count(), 8u);
    EXPECT_EQ(derive_roi(m, RoiKind::ET).count(), 3u);
    EXPECT_EQ(derive_roi(m, RoiKind::Label2).count(), 7u);
    EXPECT_EQ(derive_roi(mask_with_counts(0, 0, 0), RoiKind::WT).count(), 0u);
}

TEST(Roi, PartitionPropertyOnRandomMasks) {
    Rng rng(7);
    const std::array<std::uint8_t, 4> vocab{0, 1, 2, 4};
    for (int trial = 0; trial < 50; ++trial) {
        Geometry g;
        g.dims = {6, 5, 4};
        LabelMask m(g);
        for (auto& l : m.labels) l = vocab[rng.index(4)];
        const auto c = [&](RoiKind k) { return derive_roi(m, k).count(); };
        EXPECT_EQ(c(RoiKind::Label1) + c(RoiKind::Label2) + c(RoiKind::Label4), c(RoiKind::WT));
        EXPECT_EQ(c(RoiKind::Label1) + c(RoiKind::Label4), c(RoiKind::TC));
        EXPECT_EQ(c(RoiKind::Label4), c(RoiKind::ET));
    }
}

TEST(Normalize, FullBandIsAffineMap) {
    Geometry g;
    g.dims = {102, 1, 1};
    VoxelVolume v(g);
    for (int i = 1; i <= 100; ++i) v.data[i] = i; // voxel 0 stays background
    v.data[101] = 50.5;
    const auto out = normalize_intensity(v, 0, 100);
    EXPECT_EQ(out.data[0], 0.0);
    EXPECT_EQ(out.data[1], 0.0);
    EXPECT_EQ(out.data[100], 1.0);
    EXPECT_EQ(out.data[101], 0.5);
}

TEST(Normalize, ClippedBandUsesLinearPercentiles) {
    Geometry g;
    g.dims = {100, 1, 1};
    VoxelVolume v(g);
    for (int i = 0; i < 100; ++i) v.data[i] = i + 1;
    // Oracle: sort-based linear percentile on 1..100: position p/100 * 99.
    std::vector<double> sorted(v.data);
    auto oracle = [&](double p) {
        const double pos = p / 100.0 * 99.0;
        const auto lo = static_cast<std::size_t>(pos);
        return sorted[lo] + (pos - lo) * (sorted[lo + 1] - sorted[lo]);
    };
    const double lo = oracle(1), hi = oracle(99);
    EXPECT_NEAR(lo, 1.99, 1e-12);
    EXPECT_NEAR(hi, 99.01, 1e-12);
    const auto out = normalize_intensity(v, 1, 99);
    EXPECT_EQ(out.data[0], 0.0);  // value 1 clipped up to the lower edge
    EXPECT_EQ(out.data[99], 1.0); // value 100 clipped down to the upper edge
    EXPECT_NEAR(out.data[49], (50.0 - lo) / (hi - lo), 1e-14);
}

TEST(Normalize, ConstantOrEmptyVolumesAreRejected) {
    Geometry g;
    g.dims = {4, 4, 4};
    EXPECT_THROW(normalize_intensity(VoxelVolume(g, 0.0), 0, 100), DataError);
    EXPECT_THROW(normalize_intensity(VoxelVolume(g, 3.0), 0, 100), DataError);
    EXPECT_THROW(normalize_intensity(VoxelVolume(g, 3.0), 50, 50), ParameterError);
}

TEST(Normalize, IdempotentOnFullBandWithFixedBrain) {
    Rng rng(11);
    Geometry g;
    g.dims = {8, 8, 8};
    for (int trial = 0; trial < 20; ++trial) {
        VoxelVolume v(g);
        std::vector<std::uint8_t> brain(v.data.size());
        for (std::size_t n = 0; n < v.data.size(); ++n) {
            brain[n] = rng.uniform() < 0.7;
            v.data[n] = brain[n] ? rng.uniform(10, 500) : 0.0;
        }
        const auto once = normalize_intensity(v, 0, 100, brain);
        const auto twice = normalize_intensity(once, 0, 100, brain);
        for (std::size_t n = 0; n < v.data.size(); ++n) EXPECT_NEAR(once.data[n], twice.data[n], 1e-12);
    }
}

TEST(Metadata, ParsesSurvivalTableWithMissingValues) {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("meta.csv"));
        out << "ID,Age,Survival_days,Extent_of_Resection\n"
               "A,60.5,289,GTR\n"
               "B,41,,STR\n"
               "C,70.2,ALIVE (361 days later),NA\n"
               "D,55,1000,\n";
    }
    const auto rows = read_metadata(tmp.file("meta.csv"));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].survival_days.value(), 289.0);
    EXPECT_EQ(rows[0].resection, Resection::GTR);
    EXPECT_FALSE(rows[1].survival_days);
    EXPECT_EQ(rows[1].resection, Resection::STR);
    EXPECT_FALSE(rows[2].survival_days);
    EXPECT_EQ(rows[3].resection, Resection::NA);
}

TEST(Metadata, RejectsNonPositiveAge) {
    csv::Table t;
    t.header = {"ID", "Age", "Survival_days", "Extent_of_Resection"};
    t.rows = {{"A", "0", "10", "GTR"}};
    EXPECT_THROW(read_metadata(t), DataError);
}
