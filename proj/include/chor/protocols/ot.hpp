#pragma once

#include <cstdint>
#include <utility>

#include <chor/choreo.hpp>

namespace chor {

// Textbook RSA at desk-test scale. Keys are small enough to factor by
// hand; the tests need functional behavior and speed, not adversarial
// strength. Key size is configurable through rsa_modulus_bits.

namespace rsa {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Deterministic Miller-Rabin; the chosen bases are exact for all
/// 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) { d >>= 1; ++r; }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < r - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

inline std::uint64_t egcd(std::uint64_t a, std::uint64_t b, std::int64_t& x, std::int64_t& y) {
  if (a == 0) { x = 0; y = 1; return b; }
  std::int64_t x1, y1;
  std::uint64_t g = egcd(b % a, a, x1, y1);
  x = y1 - static_cast<std::int64_t>(b / a) * x1;
  y = x1;
  return g;
}

inline std::uint64_t modinv(std::uint64_t a, std::uint64_t m) {
  std::int64_t x, y;
  if (egcd(a % m, m, x, y) != 1) throw error("modinv: not coprime");
  std::int64_t r = x % static_cast<std::int64_t>(m);
  if (r < 0) r += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(r);
}

struct PublicKey {
  std::uint64_t n = 0;
  std::uint64_t e = 0;
};

struct PrivateKey {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
};

inline void to_json(nlohmann::json& j, const PublicKey& k) { j = {{"n", k.n}, {"e", k.e}}; }
inline void from_json(const nlohmann::json& j, PublicKey& k) {
  k.n = j.at("n").get<std::uint64_t>();
  k.e = j.at("e").get<std::uint64_t>();
}

/// Modulus width for freshly generated keys. Small by design.
inline int rsa_modulus_bits = 32;

inline std::uint64_t random_prime(LocalEnv& env, int bits) {
  std::uint64_t lo = 1ull << (bits - 1);
  std::uint64_t hi = (1ull << bits) - 1;
  for (;;) {
    std::uint64_t candidate = random_range(env, lo, hi) | 1ull;
    if (is_prime(candidate)) return candidate;
  }
}

inline std::pair<PublicKey, PrivateKey> gen_key_pair(LocalEnv& env) {
  int half = rsa_modulus_bits / 2;
  constexpr std::uint64_t e = 65537;
  for (;;) {
    std::uint64_t p = random_prime(env, half);
    std::uint64_t q = random_prime(env, half);
    if (p == q) continue;
    std::uint64_t n = p * q;
    std::uint64_t phi = (p - 1) * (q - 1);
    std::int64_t x, y;
    if (egcd(e % phi, phi, x, y) != 1) continue;
    return {PublicKey{n, e}, PrivateKey{n, modinv(e, phi)}};
  }
}

/// A public key with no known matching private key: a fresh key pair
/// whose private half is discarded.
inline PublicKey generate_fake_pk(LocalEnv& env) { return gen_key_pair(env).first; }

/// A bit is padded with random bits before encryption so ciphertexts of
/// equal plaintexts differ.
inline std::uint64_t encrypt_bit(const PublicKey& pk, bool b, LocalEnv& env) {
  std::uint64_t r = random_range(env, 1, (pk.n >> 1) - 1);
  std::uint64_t m = (r << 1) | (b ? 1u : 0u);
  return powmod(m, pk.e, pk.n);
}

inline bool decrypt_bit(const PrivateKey& sk, std::uint64_t c) {
  return (powmod(c, sk.d, sk.n) & 1u) != 0;
}

}  // namespace rsa

/// The receiver's key material for one transfer: exactly one of the two
/// public keys has the matching private key, and the select bit decides
/// which.
struct KeyTriple {
  rsa::PublicKey pk1;
  rsa::PublicKey pk2;
  rsa::PrivateKey sk;
};

using PkPair = std::pair<rsa::PublicKey, rsa::PublicKey>;

struct CipherPair {
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
};

inline void to_json(nlohmann::json& j, const CipherPair& c) { j = {{"c1", c.c1}, {"c2", c.c2}}; }
inline void from_json(const nlohmann::json& j, CipherPair& c) {
  c.c1 = j.at("c1").get<std::uint64_t>();
  c.c2 = j.at("c2").get<std::uint64_t>();
}

/// One key is real, and one is fake - the select bit decides.
inline KeyTriple gen_keys(bool s, LocalEnv& env) {
  auto [pk, sk] = rsa::gen_key_pair(env);
  rsa::PublicKey fake_pk = rsa::generate_fake_pk(env);
  if (s) return {pk, fake_pk, sk};
  return {fake_pk, pk, sk};
}

/// Encryption based on the (sender-side oblivious) key pair.
inline CipherPair encrypt_select(const PkPair& pks, bool b1, bool b2, LocalEnv& env) {
  return {rsa::encrypt_bit(pks.first, b1, env), rsa::encrypt_bit(pks.second, b2, env)};
}

/// Decryption based on the select bit.
inline bool decrypt_select(const KeyTriple& triple, bool s, const CipherPair& pair) {
  return s ? rsa::decrypt_bit(triple.sk, pair.c1) : rsa::decrypt_bit(triple.sk, pair.c2);
}

/// One-out-of-two oblivious transfer between exactly two parties: the
/// receiver learns the selected one of the sender's two bits (s=true
/// selects the first), the sender learns nothing about s, and the
/// receiver learns nothing about the other bit. Two network messages:
/// keys to the sender, ciphertexts back.
inline Choreo<Located<bool>> ot2(const Located<std::pair<bool, bool>>& bb,
                                 const Located<bool>& s) {
  if (bb.owners().size() != 1 || s.owners().size() != 1)
    throw witness_error("ot2: inputs must each have a single owner");
  LocationList census{bb.owners()[0], s.owners()[0]};
  auto sender = listed_first(census);
  auto receiver = listed_second(census);

  auto make_keys = locally(receiver, [s](const UnwrapToken& un, LocalEnv& env) {
    return gen_keys(un(singleton(un.self()), s), env);
  });
  return bind(std::move(make_keys), [census, sender, receiver, bb,
                                     s](Located<KeyTriple> keys) {
    auto pks = local_then_send(
        receiver,
        [keys](const UnwrapToken& un, LocalEnv&) {
          const KeyTriple& k = un(singleton(un.self()), keys);
          return PkPair{k.pk1, k.pk2};
        },
        cons(sender, nobody(census)));
    return bind(std::move(pks), [census, sender, receiver, bb, s,
                                 keys](Located<PkPair> pk_pair) {
      auto encrypted = local_then_send(
          sender,
          [bb, pk_pair](const UnwrapToken& un, LocalEnv& env) {
            auto [b1, b2] = un(singleton(un.self()), bb);
            return encrypt_select(un(singleton(un.self()), pk_pair), b1, b2, env);
          },
          cons(receiver, nobody(census)));
      return bind(std::move(encrypted), [receiver, s, keys](Located<CipherPair> cipher) {
        return locally(receiver, [s, keys, cipher](const UnwrapToken& un, LocalEnv&) {
          auto self = singleton(un.self());
          return decrypt_select(un(self, keys), un(self, s), un(self, cipher));
        });
      });
    });
  });
}

}  // namespace chor
