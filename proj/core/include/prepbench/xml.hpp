#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prepbench/error.hpp"

namespace prepbench::xml {

/// Element tree for the small XML dialect VOC annotations use.
/// Attributes are parsed and discarded; entities limited to &amp; &lt; &gt;.
struct Element {
    std::string name;
    std::string text; // concatenated character data directly inside this element
    std::vector<std::unique_ptr<Element>> children;

    const Element* find(const std::string& child_name) const;
    std::vector<const Element*> find_all(const std::string& child_name) const;
};

/// Parses a single root element; throws MalformedXml with line/column context.
std::unique_ptr<Element> parse(const std::string& text);

} // namespace prepbench::xml
