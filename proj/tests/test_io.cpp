#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tsdg/io.hpp"

using namespace tsdg;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

void write_bytes(const std::string& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
void append(std::vector<char>& bytes, T v) {
    const char* p = reinterpret_cast<const char*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(T));
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fvecs: single record") {
    TempFile f("tsdg_one.fvecs");
    std::vector<char> bytes;
    append<std::int32_t>(bytes, 2);
    append<float>(bytes, 1.0f);
    append<float>(bytes, 2.0f);
    write_bytes(f.path, bytes);

    const auto set = load_fvecs(f.path);
    CHECK(set.n == 1);
    CHECK(set.d == 2);
    CHECK(set.data == std::vector<float>{1.0f, 2.0f});
}

TEST_CASE("fvecs: empty file is an error") {
    TempFile f("tsdg_empty.fvecs");
    write_bytes(f.path, {});
    CHECK_THROWS_WITH_AS(load_fvecs(f.path), doctest::Contains("empty dataset"),
                         std::runtime_error);
}

TEST_CASE("fvecs: inconsistent dimension names the record") {
    TempFile f("tsdg_dims.fvecs");
    std::vector<char> bytes;
    append<std::int32_t>(bytes, 4);
    for (int i = 0; i < 4; ++i) append<float>(bytes, 0.5f);
    append<std::int32_t>(bytes, 3);
    for (int i = 0; i < 3; ++i) append<float>(bytes, 0.5f);
    write_bytes(f.path, bytes);
    CHECK_THROWS_WITH_AS(load_fvecs(f.path),
                         doctest::Contains("inconsistent dimension at record 1"),
                         std::runtime_error);
}

TEST_CASE("fvecs: truncation and non-finite values name the byte offset") {
    TempFile f("tsdg_trunc.fvecs");
    std::vector<char> bytes;
    append<std::int32_t>(bytes, 3);
    append<float>(bytes, 1.0f);  // two components missing
    write_bytes(f.path, bytes);
    CHECK_THROWS_WITH_AS(load_fvecs(f.path), doctest::Contains("byte offset"),
                         std::runtime_error);

    TempFile g("tsdg_nan.fvecs");
    bytes.clear();
    append<std::int32_t>(bytes, 1);
    append<float>(bytes, std::numeric_limits<float>::quiet_NaN());
    write_bytes(g.path, bytes);
    CHECK_THROWS_WITH_AS(load_fvecs(g.path), doctest::Contains("non-finite"),
                         std::runtime_error);
}

TEST_CASE("fvecs: write/load round trip is bit-exact") {
    Rng64 rng(21);
    VectorSet set;
    set.n = 37;
    set.d = 9;
    set.data.resize(static_cast<std::size_t>(set.n) * set.d);
    for (auto& v : set.data) v = static_cast<float>(rng.unit() * 100.0 - 50.0);

    TempFile f("tsdg_rt.fvecs");
    write_fvecs(set, f.path);
    CHECK(load_fvecs(f.path) == set);
}

TEST_CASE("bvecs widen to float") {
    TempFile f("tsdg_b.bvecs");
    std::vector<char> bytes;
    append<std::int32_t>(bytes, 3);
    bytes.push_back(static_cast<char>(0));
    bytes.push_back(static_cast<char>(128));
    bytes.push_back(static_cast<char>(255));
    write_bytes(f.path, bytes);

    const auto set = load_vectors(f.path);
    CHECK(set.n == 1);
    CHECK(set.data == std::vector<float>{0.0f, 128.0f, 255.0f});
}

TEST_CASE("ivecs: records and errors") {
    TempFile f("tsdg_gt.ivecs");
    std::vector<char> bytes;
    append<std::int32_t>(bytes, 3);
    append<std::int32_t>(bytes, 5);
    append<std::int32_t>(bytes, 9);
    append<std::int32_t>(bytes, 2);
    write_bytes(f.path, bytes);

    const auto lists = load_ivecs(f.path);
    REQUIRE(lists.size() == 1);
    CHECK(lists[0] == std::vector<std::int32_t>{5, 9, 2});

    TempFile g("tsdg_gt_empty.ivecs");
    write_bytes(g.path, {});
    CHECK_THROWS_WITH_AS(load_ivecs(g.path), doctest::Contains("empty dataset"),
                         std::runtime_error);

    const std::vector<std::vector<std::int32_t>> out{{1, 2}, {3}};
    TempFile h("tsdg_gt_rt.ivecs");
    write_ivecs(out, h.path);
    CHECK(load_ivecs(h.path) == out);
}

}  // TEST_SUITE
