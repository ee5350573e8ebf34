#pragma once

#include <stdexcept>
#include <string>

// Error hierarchy.  Everything thrown by the library derives from
// ionifo::error so callers can catch one type at the boundary; the
// subtypes distinguish bad arguments, singular linear systems, numeric
// breakdown (NaN, norm drift), bad run configuration, and failed fits.

namespace ionifo {

struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

struct domain_error : error {
  explicit domain_error(const std::string& what) : error(what) {}
};

struct singular_system_error : error {
  explicit singular_system_error(const std::string& what) : error(what) {}
};

struct numeric_error : error {
  explicit numeric_error(const std::string& what) : error(what) {}
};

struct config_error : error {
  explicit config_error(const std::string& what) : error(what) {}
};

struct extraction_error : error {
  explicit extraction_error(const std::string& what) : error(what) {}
};

}  // namespace ionifo
