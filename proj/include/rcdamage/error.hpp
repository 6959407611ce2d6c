#pragma once

#include <stdexcept>
#include <string>

namespace rcdamage {

// Base of every error the library raises on bad input or data. The CLI maps
// these to exit code 2; anything else escaping is treated as internal.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input values.
class input_error : public error {
public:
  using error::error;
};

// Inconsistent configuration, e.g. anchor count not matching the tensor.
class config_error : public error {
public:
  using error::error;
};

// Missing or invalid entries in a reference database.
class data_error : public error {
public:
  using error::error;
};

// Raised while decoding a raw tensor; carries the flat slot index
// ((row * grid_w + col) * num_anchors + anchor) of the offending cell.
class decode_error : public error {
public:
  decode_error(const std::string &what, std::size_t slot)
      : error(what), slot_(slot) {}

  std::size_t slot() const noexcept { return slot_; }

private:
  std::size_t slot_;
};

} // namespace rcdamage
