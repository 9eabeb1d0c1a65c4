#include "tsdg/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tsdg {

namespace {

// Record-structured little-endian reader that tracks byte offsets so that
// every error can name the position it failed at.
class RecordReader {
public:
    RecordReader(const std::string& path, std::ifstream& in) : path_(path), in_(in) {}

    bool at_eof() { return in_.peek() == std::ifstream::traits_type::eof(); }

    std::int32_t read_i32(const char* what) {
        std::int32_t v = 0;
        read_raw(&v, sizeof(v), what);
        return v;
    }

    void read_raw(void* dst, std::size_t bytes, const char* what) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (static_cast<std::size_t>(in_.gcount()) != bytes) {
            throw std::runtime_error(path_ + ": truncated file while reading " + what +
                                     " at byte offset " + std::to_string(offset_));
        }
        offset_ += bytes;
    }

    std::uint64_t offset() const { return offset_; }

private:
    const std::string& path_;
    std::ifstream& in_;
    std::uint64_t offset_ = 0;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

void check_record_dim(const std::string& path, std::int32_t d, std::uint32_t expected,
                      std::size_t record, std::uint64_t offset) {
    if (d > (1 << 24)) {
        throw std::runtime_error(path + ": implausible dimension " + std::to_string(d) +
                                 " at record " + std::to_string(record) +
                                 " (byte offset " + std::to_string(offset) + ")");
    }
    if (d <= 0) {
        throw std::runtime_error(path + ": invalid dimension " + std::to_string(d) +
                                 " at record " + std::to_string(record) +
                                 " (byte offset " + std::to_string(offset) + ")");
    }
    if (expected != 0 && static_cast<std::uint32_t>(d) != expected) {
        throw std::runtime_error(path + ": inconsistent dimension at record " +
                                 std::to_string(record) + " (byte offset " +
                                 std::to_string(offset) + "): got " + std::to_string(d) +
                                 ", expected " + std::to_string(expected));
    }
}

template <typename Component>
VectorSet load_vector_records(const std::string& path) {
    auto in = open_input(path);
    RecordReader r(path, in);

    VectorSet set;
    std::vector<Component> record;
    std::size_t index = 0;
    while (!r.at_eof()) {
        const std::uint64_t record_offset = r.offset();
        const std::int32_t d = r.read_i32("record dimension");
        check_record_dim(path, d, set.d, index, record_offset);
        if (set.d == 0) set.d = static_cast<std::uint32_t>(d);

        record.resize(set.d);
        r.read_raw(record.data(), sizeof(Component) * set.d, "record components");
        for (std::uint32_t j = 0; j < set.d; ++j) {
            const float v = static_cast<float>(record[j]);
            if (!std::isfinite(v)) {
                throw std::runtime_error(
                    path + ": non-finite value at record " + std::to_string(index) +
                    " component " + std::to_string(j) + " (byte offset " +
                    std::to_string(record_offset + 4 + sizeof(Component) * j) + ")");
            }
            set.data.push_back(v);
        }
        ++index;
    }
    if (index == 0) throw std::runtime_error(path + ": empty dataset");
    set.n = static_cast<std::uint32_t>(index);
    return set;
}

}  // namespace

VectorSet load_fvecs(const std::string& path) { return load_vector_records<float>(path); }

VectorSet load_bvecs(const std::string& path) {
    return load_vector_records<std::uint8_t>(path);
}

VectorSet load_vectors(const std::string& path) {
    if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".bvecs") == 0) {
        return load_bvecs(path);
    }
    return load_fvecs(path);
}

void write_fvecs(const VectorSet& set, const std::string& path) {
    auto out = open_output(path);
    const auto d = static_cast<std::int32_t>(set.d);
    for (std::uint32_t i = 0; i < set.n; ++i) {
        out.write(reinterpret_cast<const char*>(&d), sizeof(d));
        out.write(reinterpret_cast<const char*>(set.row(i)),
                  static_cast<std::streamsize>(sizeof(float) * set.d));
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<std::vector<std::int32_t>> load_ivecs(const std::string& path) {
    auto in = open_input(path);
    RecordReader r(path, in);

    std::vector<std::vector<std::int32_t>> lists;
    while (!r.at_eof()) {
        const std::uint64_t record_offset = r.offset();
        const std::int32_t k = r.read_i32("record length");
        if (k < 0) {
            throw std::runtime_error(path + ": negative record length at byte offset " +
                                     std::to_string(record_offset));
        }
        std::vector<std::int32_t> ids(static_cast<std::size_t>(k));
        r.read_raw(ids.data(), sizeof(std::int32_t) * ids.size(), "record ids");
        lists.push_back(std::move(ids));
    }
    if (lists.empty()) throw std::runtime_error(path + ": empty dataset");
    return lists;
}

void write_ivecs(const std::vector<std::vector<std::int32_t>>& lists,
                 const std::string& path) {
    auto out = open_output(path);
    for (const auto& ids : lists) {
        const auto k = static_cast<std::int32_t>(ids.size());
        out.write(reinterpret_cast<const char*>(&k), sizeof(k));
        out.write(reinterpret_cast<const char*>(ids.data()),
                  static_cast<std::streamsize>(sizeof(std::int32_t) * ids.size()));
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace tsdg
