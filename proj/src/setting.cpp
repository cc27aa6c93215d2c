#include "mutdist/setting.hpp"

#include "mutdist/errors.hpp"

namespace mutdist {

std::string_view to_string(Setting s) noexcept {
  switch (s) {
    case Setting::LuriaDelbruck: return "ld";
    case Setting::LeaCoulson: return "lc";
    case Setting::Simplified: return "simplified";
  }
  return "?";
}

Setting parse_setting(std::string_view text) {
  if (text == "ld" || text == "LuriaDelbruck") return Setting::LuriaDelbruck;
  if (text == "lc" || text == "LeaCoulson") return Setting::LeaCoulson;
  if (text == "simplified" || text == "Simplified") return Setting::Simplified;
  throw ValidationError("setting: expected one of ld|lc|simplified, got '" + std::string(text) + "'");
}

}  // namespace mutdist
