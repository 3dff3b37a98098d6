#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace transit {

// Minimal SHA-1, enough to produce git-style blob hashes for run manifests.
class Sha1 {
 public:
  Sha1() { reset(); }

  void reset() {
    h_ = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
    buffer_.clear();
    total_ = 0;
  }

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    total_ += len;
    buffer_.insert(buffer_.end(), p, p + len);
    std::size_t off = 0;
    while (buffer_.size() - off >= 64) {
      process(buffer_.data() + off);
      off += 64;
    }
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(off));
  }

  std::string hex_digest() {
    std::vector<unsigned char> tail = buffer_;
    const std::uint64_t bits = total_ * 8;
    tail.push_back(0x80);
    while (tail.size() % 64 != 56) tail.push_back(0);
    for (int i = 7; i >= 0; --i)
      tail.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
    auto h = h_;
    for (std::size_t off = 0; off < tail.size(); off += 64)
      process_into(tail.data() + off, h);
    static const char* hexd = "0123456789abcdef";
    std::string out;
    out.reserve(40);
    for (std::uint32_t w : h)
      for (int i = 7; i >= 0; --i) out.push_back(hexd[(w >> (4 * i)) & 0xF]);
    return out;
  }

  static std::string hex(const std::string& data) {
    Sha1 s;
    s.update(data.data(), data.size());
    return s.hex_digest();
  }

  // git blob hash: sha1("blob <len>\0<content>")
  static std::string git_blob_hex(const std::string& content) {
    Sha1 s;
    const std::string header = "blob " + std::to_string(content.size());
    s.update(header.data(), header.size() + 1);  // includes the NUL
    s.update(content.data(), content.size());
    return s.hex_digest();
  }

 private:
  static std::uint32_t rol(std::uint32_t v, int n) {
    return (v << n) | (v >> (32 - n));
  }

  void process(const unsigned char* block) { process_into(block, h_); }

  static void process_into(const unsigned char* block,
                           std::array<std::uint32_t, 5>& h) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(block[4 * i]) << 24) |
             (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) |
             std::uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | ((~b) & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  std::array<std::uint32_t, 5> h_{};
  std::vector<unsigned char> buffer_;
  std::uint64_t total_ = 0;
};

}  // namespace transit
