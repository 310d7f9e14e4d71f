#include "docmap/xml.hpp"

#include <cstdint>

#include "docmap/error.hpp"

namespace docmap::xml {
namespace {

class Reader {
public:
    explicit Reader(std::string_view s) : s_(s) {}

    Node document() {
        skip_prolog();
        if (eof() || peek() != '<') fail("expected root element");
        Node root = element();
        skip_misc();
        if (!eof()) fail("content after root element");
        return root;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("XML parse error at byte offset " + std::to_string(pos_) + ": " + what);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    bool starts(std::string_view t) const { return s_.substr(pos_).starts_with(t); }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
    }

    void skip_until(std::string_view terminator, const char* what) {
        auto at = s_.find(terminator, pos_);
        if (at == std::string_view::npos) fail(std::string("unterminated ") + what);
        pos_ = at + terminator.size();
    }

    void skip_doctype() {
        pos_ += 9;  // "<!DOCTYPE"
        int bracket = 0;
        while (!eof()) {
            const char c = peek();
            if (c == '[') {
                ++bracket;
            } else if (c == ']') {
                --bracket;
            } else if (c == '"' || c == '\'') {
                auto close = s_.find(c, pos_ + 1);
                if (close == std::string_view::npos) fail("unterminated literal in DOCTYPE");
                pos_ = close;
            } else if (c == '>' && bracket == 0) {
                ++pos_;
                return;
            }
            ++pos_;
        }
        fail("unterminated DOCTYPE");
    }

    // Comments, PIs and whitespace.
    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts("<!--")) {
                skip_until("-->", "comment");
            } else if (starts("<?")) {
                skip_until("?>", "processing instruction");
            } else {
                return;
            }
        }
    }

    void skip_prolog() {
        if (starts("\xEF\xBB\xBF")) pos_ += 3;
        while (true) {
            skip_misc();
            if (starts("<!DOCTYPE")) {
                skip_doctype();
            } else {
                return;
            }
        }
    }

    static bool name_char(char c) {
        const auto u = static_cast<unsigned char>(c);
        return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string name() {
        const auto start = pos_;
        while (!eof() && name_char(peek())) ++pos_;
        if (pos_ == start) fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    static void append_utf8(std::string& out, std::uint32_t cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    void entity(std::string& out) {
        const auto semi = s_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) fail("malformed entity reference");
        const auto ref = s_.substr(pos_ + 1, semi - pos_ - 1);
        if (ref == "lt") {
            out += '<';
        } else if (ref == "gt") {
            out += '>';
        } else if (ref == "amp") {
            out += '&';
        } else if (ref == "quot") {
            out += '"';
        } else if (ref == "apos") {
            out += '\'';
        } else if (ref.size() > 1 && ref[0] == '#') {
            std::uint32_t cp = 0;
            const bool hex = ref[1] == 'x' || ref[1] == 'X';
            const auto digits = ref.substr(hex ? 2 : 1);
            if (digits.empty()) fail("empty character reference");
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') {
                    v = c - '0';
                } else if (hex && c >= 'a' && c <= 'f') {
                    v = c - 'a' + 10;
                } else if (hex && c >= 'A' && c <= 'F') {
                    v = c - 'A' + 10;
                } else {
                    fail("bad character reference");
                }
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                if (cp > 0x10FFFF) fail("character reference out of range");
            }
            append_utf8(out, cp);
        } else {
            fail("unknown entity '&" + std::string(ref) + ";'");
        }
        pos_ = semi + 1;
    }

    std::string attribute_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        const char quote = peek();
        ++pos_;
        std::string out;
        while (true) {
            if (eof()) fail("unterminated attribute value");
            const char c = peek();
            if (c == quote) {
                ++pos_;
                return out;
            }
            if (c == '<') fail("'<' in attribute value");
            if (c == '&') {
                entity(out);
            } else {
                out += c;
                ++pos_;
            }
        }
    }

    Node element() {
        ++pos_;  // '<'
        Node node;
        node.name = name();
        while (true) {
            skip_ws();
            if (eof()) fail("unterminated start tag <" + node.name + ">");
            if (starts("/>")) {
                pos_ += 2;
                return node;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            auto key = name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' after attribute name");
            ++pos_;
            skip_ws();
            node.attributes.emplace_back(std::move(key), attribute_value());
        }
        content(node);
        return node;
    }

    void flush_text(Node& parent, std::string& text) {
        if (text.empty()) return;
        Node t;
        t.text = std::move(text);
        parent.children.push_back(std::move(t));
        text.clear();
    }

    void content(Node& parent) {
        std::string text;
        while (true) {
            if (eof()) fail("missing end tag </" + parent.name + ">");
            const char c = peek();
            if (c == '<') {
                if (starts("</")) {
                    flush_text(parent, text);
                    pos_ += 2;
                    const auto start = pos_;
                    auto closing = name();
                    if (closing != parent.name) {
                        pos_ = start;
                        fail("mismatched end tag </" + closing + ">, expected </" + parent.name + ">");
                    }
                    skip_ws();
                    if (eof() || peek() != '>') fail("malformed end tag");
                    ++pos_;
                    return;
                }
                if (starts("<!--")) {
                    skip_until("-->", "comment");
                } else if (starts("<![CDATA[")) {
                    pos_ += 9;
                    auto end = s_.find("]]>", pos_);
                    if (end == std::string_view::npos) fail("unterminated CDATA section");
                    text.append(s_.substr(pos_, end - pos_));
                    pos_ = end + 3;
                } else if (starts("<?")) {
                    skip_until("?>", "processing instruction");
                } else {
                    flush_text(parent, text);
                    parent.children.push_back(element());
                }
            } else if (c == '&') {
                entity(text);
            } else {
                text += c;
                ++pos_;
            }
        }
    }
};

void collect_text(const Node& n, std::string& out) {
    if (n.is_text()) {
        out += n.text;
        return;
    }
    for (const auto& c : n.children) collect_text(c, out);
}

}  // namespace

const Node* Node::child(std::string_view tag) const {
    for (const auto& c : children) {
        if (c.name == tag) return &c;
    }
    return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view tag) const {
    std::vector<const Node*> out;
    for (const auto& c : children) {
        if (c.name == tag) out.push_back(&c);
    }
    return out;
}

std::string Node::text_content() const {
    std::string out;
    collect_text(*this, out);
    return out;
}

const std::string* Node::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

Node parse(std::string_view document) {
    return Reader(document).document();
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace docmap::xml
