#include "cml/errors.hpp"

namespace cml {

namespace {
std::string locate(const std::string& source, int line, int column, const std::string& what) {
  std::string s = source;
  if (line > 0) s += ":" + std::to_string(line);
  if (column > 0) s += ":" + std::to_string(column);
  return s + ": " + what;
}
}  // namespace

ParseError::ParseError(std::string source, int line, int column, const std::string& what)
    : std::runtime_error(locate(source, line, column, what)),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

}  // namespace cml
