#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include <chor/error.hpp>

namespace chor {

/// The result type of choreographic actions that are performed only
/// for their effects.
struct Unit {
  friend bool operator==(Unit, Unit) { return true; }
};

inline void to_json(nlohmann::json& j, const Unit&) { j = nullptr; }
inline void from_json(const nlohmann::json& j, Unit&) {
  if (!j.is_null()) throw codec_error("expected null for unit");
}

/// Canonical textual serialization for wire messages. Every type that
/// crosses the network registers JSON conversions; the wire form is the
/// compact JSON dump.
template <class T>
struct Codec {
  static std::string encode(const T& v) { return nlohmann::json(v).dump(); }

  static T decode(const std::string& text) {
    try {
      return nlohmann::json::parse(text).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw codec_error("decode failed on " + preview(text) + ": " + e.what());
    } catch (const codec_error&) {
      throw;
    } catch (const std::exception& e) {
      throw codec_error("decode failed on " + preview(text) + ": " + e.what());
    }
  }

 private:
  static std::string preview(const std::string& text) {
    constexpr std::size_t kMax = 64;
    if (text.size() <= kMax) return "\"" + text + "\"";
    return "\"" + text.substr(0, kMax) + "...\"";
  }
};

template <class T>
std::string encode(const T& v) {
  return Codec<T>::encode(v);
}

template <class T>
T decode(const std::string& text) {
  return Codec<T>::decode(text);
}

}  // namespace chor
