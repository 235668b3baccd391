#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "folner/bigint.hpp"
#include "folner/errors.hpp"

namespace folner {

// Bits are MSB-first within each byte; bit 0 of the stream is the high bit of
// byte 0. File packing (io.hpp) reuses this layout unchanged.
class BitString {
  public:
    void append_bit(int b) {
        std::size_t byte = nbits_ / 8, off = nbits_ % 8;
        if (off == 0) data_.push_back(0);
        if (b) data_[byte] |= uint8_t(0x80u >> off);
        ++nbits_;
    }

    void append(const BitString& o) {
        for (std::size_t i = 0; i < o.nbits_; ++i) append_bit(o.bit(i));
    }

    // value in exactly `width` bits, MSB first; value must fit
    void append_uint(const bigint& v, std::size_t width) {
        if (v < 0 || (width < bitlen(v) && v != 0))
            throw RangeError("value does not fit in field width");
        for (std::size_t i = 0; i < width; ++i)
            append_bit(boost::multiprecision::bit_test(v, unsigned(width - 1 - i)) ? 1 : 0);
    }

    int bit(std::size_t i) const {
        if (i >= nbits_) throw Truncated("bit index past end of stream");
        return (data_[i / 8] >> (7 - i % 8)) & 1;
    }

    std::size_t size() const { return nbits_; }
    const std::vector<uint8_t>& bytes() const { return data_; }

    static BitString from_bytes(std::vector<uint8_t> bytes, std::size_t nbits) {
        if (nbits > bytes.size() * 8) throw Truncated("bit count exceeds payload");
        BitString s;
        s.data_ = std::move(bytes);
        s.nbits_ = nbits;
        return s;
    }

    static BitString from_string(const std::string& zeroes_ones) {
        BitString s;
        for (char ch : zeroes_ones) {
            if (ch == ' ') continue;
            s.append_bit(ch == '1');
        }
        return s;
    }

    std::string str() const {
        std::string s;
        s.reserve(nbits_);
        for (std::size_t i = 0; i < nbits_; ++i) s += bit(i) ? '1' : '0';
        return s;
    }

    bool operator==(const BitString& o) const {
        if (nbits_ != o.nbits_) return false;
        for (std::size_t i = 0; i < nbits_; ++i)
            if (bit(i) != o.bit(i)) return false;
        return true;
    }

  private:
    std::vector<uint8_t> data_;
    std::size_t nbits_ = 0;
};

class BitReader {
  public:
    explicit BitReader(const BitString& s) : s_(&s) {}

    int read_bit() {
        if (pos_ >= s_->size()) throw Truncated("stream ended early");
        return s_->bit(pos_++);
    }

    bigint read_uint(std::size_t width) {
        bigint v = 0;
        for (std::size_t i = 0; i < width; ++i) v = (v << 1) | read_bit();
        return v;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return s_->size() - pos_; }

  private:
    const BitString* s_;
    std::size_t pos_ = 0;
};

// plain binary, MSB first; 0 encodes as "0"
inline BitString encode_binary(const bigint& n) {
    if (n < 0) throw RangeError("negative integer");
    BitString s;
    s.append_uint(n, bitlen(n));
    return s;
}

inline bigint decode_binary(const BitString& s) {
    if (s.size() == 0) throw Truncated("empty binary field");
    BitReader r(s);
    return r.read_uint(s.size());
}

// doubling code: every binary digit written twice; no terminator of its own
inline BitString encode_doubling(const bigint& n) {
    BitString b = encode_binary(n), s;
    for (std::size_t i = 0; i < b.size(); ++i) {
        s.append_bit(b.bit(i));
        s.append_bit(b.bit(i));
    }
    return s;
}

inline BitString delimiter() {
    BitString s;
    s.append_bit(0);
    s.append_bit(1);
    return s;
}

// consumes doubled pairs up to and including the 01 delimiter
inline bigint decode_doubling(BitReader& r) {
    bigint v = 0;
    bool any = false;
    for (;;) {
        int a = r.read_bit(), b = r.read_bit();
        if (a == 0 && b == 1) {
            if (!any) throw MalformedPair("doubling field has no digits");
            return v;
        }
        if (a != b) throw MalformedPair("10 is neither a doubled digit nor the delimiter");
        v = (v << 1) | a;
        any = true;
    }
}

// self-delimiting integer: doubling of the binary length, delimiter, then the
// binary digits
inline BitString encode_prefix_free(const bigint& n) {
    BitString b = encode_binary(n);
    BitString s = encode_doubling(bigint(b.size()));
    s.append(delimiter());
    s.append(b);
    return s;
}

inline bigint decode_prefix_free(BitReader& r) {
    bigint l = decode_doubling(r);
    if (l <= 0 || l > 1u << 24) throw RangeError("unreasonable integer field length");
    return r.read_uint(std::size_t(l));
}

// fixed letter width: letters 1..size stored as letter-1
inline std::size_t letter_width(std::size_t alphabet_size) {
    if (alphabet_size < 1) throw RangeError("empty alphabet");
    unsigned w = std::bit_width(uint64_t(alphabet_size - 1));
    return w == 0 ? 1 : w;
}

inline BitString encode_letters(const std::vector<uint16_t>& letters, std::size_t alphabet_size) {
    std::size_t w = letter_width(alphabet_size);
    BitString s;
    for (uint16_t x : letters) {
        if (x < 1 || x > alphabet_size) throw RangeError("letter outside alphabet");
        s.append_uint(bigint(x - 1), w);
    }
    return s;
}

inline std::vector<uint16_t> decode_letters(BitReader& r, std::size_t count,
                                            std::size_t alphabet_size) {
    std::size_t w = letter_width(alphabet_size);
    std::vector<uint16_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        bigint v = r.read_uint(w) + 1;
        if (v > int64_t(alphabet_size)) throw RangeError("decoded letter outside alphabet");
        out[i] = uint16_t(v);
    }
    return out;
}

// canonical index of a finite set of naturals: sum of 2^x
inline bigint canonical_index(const std::vector<bigint>& xs) {
    bigint v = 0;
    for (const bigint& x : xs) {
        if (x < 0) throw RangeError("negative set member");
        if (boost::multiprecision::bit_test(v, unsigned(x)))
            throw RangeError("duplicate set member");
        boost::multiprecision::bit_set(v, unsigned(x));
    }
    return v;
}

}  // namespace folner
