#pragma once

#include <cstdint>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "folner/bitcodes.hpp"
#include "folner/dynamics.hpp"
#include "folner/monotiling.hpp"

namespace folner {

namespace detail {

inline void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), std::streamsize(n));
}

inline void get_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), std::streamsize(n));
    if (std::size_t(is.gcount()) != n) throw Truncated("file ends early");
}

inline void put_u16(std::ostream& os, uint16_t v) {
    uint8_t b[2] = {uint8_t(v & 0xff), uint8_t(v >> 8)};
    put_bytes(os, b, 2);
}

inline void put_u32(std::ostream& os, uint32_t v) {
    uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = uint8_t(v >> (8 * i));
    put_bytes(os, b, 4);
}

inline void put_u64(std::ostream& os, uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = uint8_t(v >> (8 * i));
    put_bytes(os, b, 8);
}

inline uint16_t get_u16(std::istream& is) {
    uint8_t b[2];
    get_bytes(is, b, 2);
    return uint16_t(b[0] | (uint16_t(b[1]) << 8));
}

inline uint32_t get_u32(std::istream& is) {
    uint8_t b[4];
    get_bytes(is, b, 4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
    return v;
}

inline uint64_t get_u64(std::istream& is) {
    uint8_t b[8];
    get_bytes(is, b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

inline void expect_magic(std::istream& is, const char* magic) {
    char got[4];
    get_bytes(is, got, 4);
    for (int i = 0; i < 4; ++i)
        if (got[i] != magic[i]) throw UnknownFormat("unrecognized file magic");
}

}  // namespace detail

// ---- bitstream container ----

// 4-byte magic, 64-bit little-endian bit count, packed payload
inline void write_program(std::ostream& os, const BitString& bits) {
    detail::put_bytes(os, "MTB1", 4);
    detail::put_u64(os, bits.size());
    const auto& payload = bits.bytes();
    detail::put_bytes(os, payload.data(), payload.size());
    if (!os) throw Truncated("write failed");
}

inline BitString read_program(std::istream& is) {
    detail::expect_magic(is, "MTB1");
    uint64_t nbits = detail::get_u64(is);
    if (nbits > (uint64_t(1) << 33)) throw ResourceLimit("bitstream too large");
    std::vector<uint8_t> payload((nbits + 7) / 8);
    detail::get_bytes(is, payload.data(), payload.size());
    return BitString::from_bytes(payload, std::size_t(nbits));
}

// ---- word container ----

struct StoredWord {
    std::string group_token;
    uint16_t alphabet = 2;
    bool tile_support = true;
    int64_t tile_index = 1;          // when the support is a tile
    std::vector<bigint> indices;     // explicit support, natural indices ascending
    std::vector<uint16_t> letters;   // natural-index order
};

// magic, group token, alphabet, support record, letters one byte each
inline void write_word(std::ostream& os, const StoredWord& sw) {
    if (sw.alphabet < 1 || sw.alphabet > 255)
        throw RangeError("word files store letters as single bytes");
    if (sw.group_token.size() > 0xffff) throw RangeError("group token too long");
    detail::put_bytes(os, "MTW1", 4);
    detail::put_u16(os, uint16_t(sw.group_token.size()));
    detail::put_bytes(os, sw.group_token.data(), sw.group_token.size());
    detail::put_u16(os, sw.alphabet);
    if (sw.tile_support) {
        uint8_t tag = 0;
        detail::put_bytes(os, &tag, 1);
        detail::put_u64(os, uint64_t(sw.tile_index));
    } else {
        uint8_t tag = 1;
        detail::put_bytes(os, &tag, 1);
        detail::put_u64(os, sw.indices.size());
        for (const auto& v : sw.indices) {
            std::vector<uint8_t> bytes;
            boost::multiprecision::export_bits(v, std::back_inserter(bytes), 8);
            if (v == 0) bytes.clear();
            detail::put_u32(os, uint32_t(bytes.size()));
            detail::put_bytes(os, bytes.data(), bytes.size());
        }
    }
    if (!sw.tile_support && sw.letters.size() != sw.indices.size())
        throw RangeError("letter count disagrees with the support");
    std::vector<uint8_t> raw(sw.letters.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (sw.letters[i] < 1 || sw.letters[i] > sw.alphabet)
            throw RangeError("letter outside the alphabet");
        raw[i] = uint8_t(sw.letters[i]);
    }
    detail::put_u64(os, raw.size());
    detail::put_bytes(os, raw.data(), raw.size());
    if (!os) throw Truncated("write failed");
}

inline StoredWord read_word(std::istream& is) {
    detail::expect_magic(is, "MTW1");
    StoredWord sw;
    uint16_t toklen = detail::get_u16(is);
    sw.group_token.resize(toklen);
    detail::get_bytes(is, sw.group_token.data(), toklen);
    sw.alphabet = detail::get_u16(is);
    if (sw.alphabet < 1 || sw.alphabet > 255) throw RangeError("alphabet out of range");
    uint8_t tag = 0;
    detail::get_bytes(is, &tag, 1);
    if (tag == 0) {
        sw.tile_support = true;
        sw.tile_index = int64_t(detail::get_u64(is));
        if (sw.tile_index < 1) throw RangeError("tile index must be positive");
    } else if (tag == 1) {
        sw.tile_support = false;
        uint64_t count = detail::get_u64(is);
        if (count > (uint64_t(1) << 28)) throw ResourceLimit("support too large");
        sw.indices.reserve(std::size_t(count));
        for (uint64_t i = 0; i < count; ++i) {
            uint32_t len = detail::get_u32(is);
            if (len > (uint32_t(1) << 20)) throw ResourceLimit("index too large");
            std::vector<uint8_t> bytes(len);
            detail::get_bytes(is, bytes.data(), len);
            bigint v = 0;
            if (!bytes.empty())
                boost::multiprecision::import_bits(v, bytes.begin(), bytes.end(), 8);
            if (!sw.indices.empty() && !(sw.indices.back() < v))
                throw RangeError("support indices must increase");
            sw.indices.push_back(std::move(v));
        }
    } else {
        throw RangeError("unknown support tag");
    }
    uint64_t nletters = detail::get_u64(is);
    if (nletters > (uint64_t(1) << 28)) throw ResourceLimit("word too large");
    if (!sw.tile_support && nletters != sw.indices.size())
        throw RangeError("letter count disagrees with the support");
    std::vector<uint8_t> raw(static_cast<std::size_t>(nletters));
    detail::get_bytes(is, raw.data(), raw.size());
    sw.letters.assign(raw.begin(), raw.end());
    for (uint16_t l : sw.letters)
        if (l < 1 || l > sw.alphabet) throw RangeError("letter outside the alphabet");
    return sw;
}

// ---- conversions ----

inline StoredWord to_stored_tile(const std::string& group_token, int64_t n, const Word& w) {
    StoredWord sw;
    sw.group_token = group_token;
    sw.alphabet = w.alphabet;
    sw.tile_support = true;
    sw.tile_index = n;
    sw.letters = w.letters;
    return sw;
}

inline StoredWord to_stored_explicit(const std::string& group_token, const Word& w) {
    StoredWord sw;
    sw.group_token = group_token;
    sw.alphabet = w.alphabet;
    sw.tile_support = false;
    sw.indices = w.support->idx;
    sw.letters = w.letters;
    return sw;
}

inline Word materialize(const StoredWord& sw, const GroupDescriptor& G, Monotiling& M) {
    Word w;
    w.alphabet = sw.alphabet;
    if (sw.tile_support) {
        w.support = M.tile(sw.tile_index);
    } else {
        WindowSet ws;
        ws.idx = sw.indices;
        ws.elems.reserve(sw.indices.size());
        for (const auto& i : sw.indices) ws.elems.push_back(G.element_at(i));
        w.support = std::make_shared<WindowSet>(std::move(ws));
    }
    if (sw.letters.size() != w.support->size())
        throw RangeError("letter count disagrees with the support");
    w.letters = sw.letters;
    return w;
}

}  // namespace folner
