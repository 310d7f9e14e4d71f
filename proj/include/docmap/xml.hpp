#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace docmap::xml {

// Minimal non-validating XML reader: elements, attributes, character data,
// CDATA, comments, processing instructions, DOCTYPE (skipped) and the
// predefined/numeric entities. Errors are ParseError with a byte offset.
struct Node {
    std::string name;  // empty for text nodes
    std::string text;  // text nodes only
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;

    bool is_text() const noexcept { return name.empty(); }

    // First direct child element with this name, or nullptr.
    const Node* child(std::string_view tag) const;
    std::vector<const Node*> children_named(std::string_view tag) const;
    // Concatenated character data of this node and all descendants.
    std::string text_content() const;
    const std::string* attribute(std::string_view key) const;
};

// Returns the document (root) element.
Node parse(std::string_view document);

// Escapes &, <, >, " and ' for use in text or attribute values.
std::string escape(std::string_view text);

}  // namespace docmap::xml
