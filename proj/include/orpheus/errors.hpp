#pragma once

#include <stdexcept>
#include <string>

namespace orpheus {

// Parse failure with source position. Line and column are 1-based.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string message, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                             ": " + message),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

  private:
    int line_;
    int col_;
};

class SerializeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class EncodeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace orpheus
