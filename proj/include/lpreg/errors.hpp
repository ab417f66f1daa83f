#pragma once

#include <stdexcept>
#include <string>

namespace lpreg {

// Error taxonomy mirrors the CLI exit codes: config 2, disconnected graph 3,
// I/O 4. Precondition violations inside the library throw invalid_argument.

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct disconnected_graph_error : std::runtime_error {
  explicit disconnected_graph_error(const std::string& what)
      : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lpreg
