#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace tsdg::detail {

// Little-endian stream helpers for the binary graph formats. Writers emit
// bytes explicitly so the formats do not depend on host endianness.

class LeWriter {
public:
    LeWriter(const std::string& path, std::ofstream& out) : path_(path), out_(out) {}

    void u8(std::uint8_t v) { raw(&v, 1); }
    void u16(std::uint16_t v) { put_le(v); }
    void u32(std::uint32_t v) { put_le(v); }
    void u64(std::uint64_t v) { put_le(v); }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_le(bits);
    }
    void magic(const char tag[4]) { raw(tag, 4); }

private:
    template <typename T>
    void put_le(T v) {
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf[i] = static_cast<unsigned char>(v >> (8 * i));
        }
        raw(buf, sizeof(T));
    }
    void raw(const void* p, std::size_t bytes) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
        if (!out_) throw std::runtime_error(path_ + ": write failed");
    }

    const std::string& path_;
    std::ofstream& out_;
};

class LeReader {
public:
    LeReader(const std::string& path, std::ifstream& in) : path_(path), in_(in) {}

    std::uint8_t u8() { return get_le<std::uint8_t>(); }
    std::uint16_t u16() { return get_le<std::uint16_t>(); }
    std::uint32_t u32() { return get_le<std::uint32_t>(); }
    std::uint64_t u64() { return get_le<std::uint64_t>(); }
    float f32() {
        const std::uint32_t bits = get_le<std::uint32_t>();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    void expect_magic(const char tag[4], const char* format_name) {
        char got[4];
        raw(got, 4);
        if (std::memcmp(got, tag, 4) != 0) {
            throw std::runtime_error(path_ + ": not a " + format_name + " file");
        }
    }
    std::uint64_t offset() const { return offset_; }

private:
    template <typename T>
    T get_le() {
        unsigned char buf[sizeof(T)];
        raw(buf, sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v = static_cast<T>(v | (static_cast<T>(buf[i]) << (8 * i)));
        }
        return v;
    }
    void raw(void* p, std::size_t bytes) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
        if (static_cast<std::size_t>(in_.gcount()) != bytes) {
            throw std::runtime_error(path_ + ": truncated file at byte offset " +
                                     std::to_string(offset_));
        }
        offset_ += bytes;
    }

    const std::string& path_;
    std::ifstream& in_;
    std::uint64_t offset_ = 0;
};

}  // namespace tsdg::detail
