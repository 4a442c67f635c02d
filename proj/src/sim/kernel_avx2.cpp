// AVX2 kernel: four 64-bit pattern words per instruction. Compiled with a
// target attribute so the rest of the library stays baseline x86-64; callers
// reach it only after a runtime CPU check.

#include "ifsguard/sim.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define IFSGUARD_AVX2 __attribute__((target("avx2")))
#endif

namespace ifsguard::sim::kernels {

#if defined(IFSGUARD_AVX2)

namespace {

IFSGUARD_AVX2 inline __m256i load(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}
IFSGUARD_AVX2 inline void store(std::uint64_t* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

}  // namespace

IFSGUARD_AVX2 void eval_avx2(const Program& p, std::uint64_t* slots, std::size_t lanes) {
  const std::size_t wide = lanes & ~std::size_t{3};
  const __m256i ones = _mm256_set1_epi64x(-1);
  for (const Op& op : p.ops) {
    std::uint64_t* out = slots + static_cast<std::size_t>(op.out) * lanes;
    const std::uint32_t* args = p.operands.data() + op.first;
    auto in = [&](unsigned k) { return slots + static_cast<std::size_t>(args[k]) * lanes; };
    bool invert = false;
    switch (op.code) {
      case OpCode::Zero:
      case OpCode::One: {
        const std::uint64_t v = op.code == OpCode::One ? ~0ull : 0ull;
        for (std::size_t w = 0; w < lanes; ++w) out[w] = v;
        continue;
      }
      case OpCode::Not: invert = true; [[fallthrough]];
      case OpCode::Buf: {
        const std::uint64_t* a = in(0);
        const __m256i m = invert ? ones : _mm256_setzero_si256();
        std::size_t w = 0;
        for (; w < wide; w += 4) store(out + w, _mm256_xor_si256(load(a + w), m));
        for (; w < lanes; ++w) out[w] = invert ? ~a[w] : a[w];
        continue;
      }
      case OpCode::Mux2: {
        const std::uint64_t *s = in(0), *a = in(1), *b = in(2);
        std::size_t w = 0;
        for (; w < wide; w += 4) {
          const __m256i sv = load(s + w);
          store(out + w, _mm256_or_si256(_mm256_and_si256(sv, load(b + w)), _mm256_andnot_si256(sv, load(a + w))));
        }
        for (; w < lanes; ++w) out[w] = (s[w] & b[w]) | (~s[w] & a[w]);
        continue;
      }
      case OpCode::Nand: invert = true; [[fallthrough]];
      case OpCode::And: {
        std::size_t w = 0;
        for (; w < wide; w += 4) {
          __m256i acc = load(in(0) + w);
          for (unsigned k = 1; k < op.arity; ++k) acc = _mm256_and_si256(acc, load(in(k) + w));
          store(out + w, invert ? _mm256_xor_si256(acc, ones) : acc);
        }
        for (; w < lanes; ++w) {
          std::uint64_t acc = ~0ull;
          for (unsigned k = 0; k < op.arity; ++k) acc &= in(k)[w];
          out[w] = invert ? ~acc : acc;
        }
        continue;
      }
      case OpCode::Nor: invert = true; [[fallthrough]];
      case OpCode::Or: {
        std::size_t w = 0;
        for (; w < wide; w += 4) {
          __m256i acc = load(in(0) + w);
          for (unsigned k = 1; k < op.arity; ++k) acc = _mm256_or_si256(acc, load(in(k) + w));
          store(out + w, invert ? _mm256_xor_si256(acc, ones) : acc);
        }
        for (; w < lanes; ++w) {
          std::uint64_t acc = 0;
          for (unsigned k = 0; k < op.arity; ++k) acc |= in(k)[w];
          out[w] = invert ? ~acc : acc;
        }
        continue;
      }
      case OpCode::Xnor: invert = true; [[fallthrough]];
      case OpCode::Xor: {
        std::size_t w = 0;
        for (; w < wide; w += 4) {
          __m256i acc = load(in(0) + w);
          for (unsigned k = 1; k < op.arity; ++k) acc = _mm256_xor_si256(acc, load(in(k) + w));
          store(out + w, invert ? _mm256_xor_si256(acc, ones) : acc);
        }
        for (; w < lanes; ++w) {
          std::uint64_t acc = 0;
          for (unsigned k = 0; k < op.arity; ++k) acc ^= in(k)[w];
          out[w] = invert ? ~acc : acc;
        }
        continue;
      }
    }
  }
}

#else

void eval_avx2(const Program& p, std::uint64_t* slots, std::size_t lanes) { eval_word(p, slots, lanes); }

#endif

}  // namespace ifsguard::sim::kernels
