#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "typesteer/minilang/ast.hpp"

namespace typesteer::minilang {

struct StepLimitExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownEntry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Value;
using ListVal = std::shared_ptr<std::vector<Value>>;

struct RecordVal {
    std::string typeName;
    std::map<std::string, Value> fields;
};
using RecordPtr = std::shared_ptr<RecordVal>;

// Dynamic type errors surface as a Trap value; evaluation stays total and
// deterministic.
struct Trap {
    std::string reason;
};

struct Unit {};

struct Value {
    std::variant<Unit, long long, std::string, bool, ListVal, RecordPtr, Trap> v;

    Value() : v(Unit{}) {}
    template <typename T>
    Value(T x) : v(std::move(x)) {}

    bool is_trap() const { return std::holds_alternative<Trap>(v); }
};

// Big-step evaluation of `entry` applied to `args`. Step cap 1e5 and
// recursion cap 64 keep the oracle total. Throws UnknownEntry if the entry
// function does not exist or the arity mismatches.
Value evaluate(const Program& p, const std::string& entry, const std::vector<Value>& args);

// Structural equality with record type names translated through `nameMap`
// on the left value (used to compare pre/post-edit results when a user type
// was renamed). Records compare by mapped type name and field values.
bool value_equal_mapped(const Value& a, const Value& b,
                        const std::map<std::string, std::string>& nameMap);

// Renames record type names inside a value in place (deep).
std::string value_to_string(const Value& v);

}  // namespace typesteer::minilang
