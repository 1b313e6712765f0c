#pragma once

#include <array>
#include <string>

namespace typesteer {

// Closed identifier pools shared by the generator and the model vocabulary.
// The fresh-name pools used by edits are disjoint from the generator pools,
// so conflict-freedom is decidable by construction.

constexpr int kVarPool = 200;     // id0..id199
constexpr int kTypePool = 50;     // Type0..Type49
constexpr int kFieldPool = 16;    // f0..f15
constexpr int kIntLitMax = 20;    // literals 0..20
constexpr int kStrPool = 8;

constexpr int kFreshVarPool = 100;    // __tmp0..__tmp99
constexpr int kFreshTypePool = 50;    // TypeR0..TypeR49
constexpr int kFreshAliasPool = 20;   // AliasB0..AliasB19

inline std::string var_name(int i) { return "id" + std::to_string(i); }
inline std::string type_name(int i) { return "Type" + std::to_string(i); }
inline std::string field_name(int i) { return "f" + std::to_string(i); }
inline std::string fresh_var_name(int i) { return "__tmp" + std::to_string(i); }
inline std::string fresh_type_name(int i) { return "TypeR" + std::to_string(i); }
inline std::string fresh_alias_name(int i) { return "AliasB" + std::to_string(i); }

inline const std::array<const char*, kStrPool>& str_pool() {
    static const std::array<const char*, kStrPool> pool = {"a", "b", "c", "d",
                                                           "e", "f", "g", "h"};
    return pool;
}

}  // namespace typesteer
