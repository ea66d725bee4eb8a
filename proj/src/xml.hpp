#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace confokit::detail {

// Element tree of the XML subset needed for XES logs: elements, attributes,
// comments and prolog are handled; character data is ignored.
struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::size_t byte_offset = 0;  // offset of the opening '<'

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }
};

// Parses one document, returns the root element. Throws parse_error with the
// byte offset of the first offending character.
XmlNode parse_xml(std::string_view text);

}  // namespace confokit::detail
