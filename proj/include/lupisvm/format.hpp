#ifndef LUPISVM_FORMAT_HPP
#define LUPISVM_FORMAT_HPP

#include <optional>
#include <string>
#include <string_view>

namespace lupisvm {

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Parses the whole of text as a double; nullopt on any trailing garbage.
[[nodiscard]] std::optional<double> parse_double(std::string_view text);
[[nodiscard]] std::optional<long long> parse_integer(std::string_view text);

}  // namespace lupisvm

#endif  // LUPISVM_FORMAT_HPP
