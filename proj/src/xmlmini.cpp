// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cmftk authors

#include "cloudme/xmlmini.hpp"

#include "cloudme/util.hpp"

namespace cloudme::xml {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

class Parser {
  public:
    explicit Parser(std::string_view s) : s_(s) {}

    Node parse_document() {
        skip_misc();
        Node root = parse_element();
        skip_misc();
        if (pos_ != s_.size()) fail("trailing content after root element");
        return root;
    }

  private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) { throw MalformedXml(pos_, why); }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    bool starts_with(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }

    void skip_ws() {
        while (!eof() && is_space(peek())) ++pos_;
    }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_until(std::string_view end) {
        auto p = s_.find(end, pos_);
        if (p == std::string_view::npos) fail("unterminated construct");
        pos_ = p + end.size();
    }

    // Prolog, comments, PIs and DOCTYPE between elements.
    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<!DOCTYPE")) {
                pos_ += 9;
                skip_doctype();
            } else {
                return;
            }
        }
    }

    void skip_doctype() {
        int depth = 0;
        while (!eof()) {
            char c = s_[pos_++];
            if (c == '<') ++depth;
            if (c == '>') {
                if (depth == 0) return;
                --depth;
            }
        }
        fail("unterminated DOCTYPE");
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected name");
        std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            auto semi = raw.find(';', i + 1);
            if (semi == std::string_view::npos) fail("unterminated entity reference");
            auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out.push_back('&');
            else if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                std::uint32_t cp = 0;
                bool ok = ent.size() > 1;
                if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
                    for (std::size_t k = 2; k < ent.size() && ok; ++k) {
                        char c = ent[k];
                        int v = (c >= '0' && c <= '9')   ? c - '0'
                                : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                                : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                                         : -1;
                        if (v < 0) ok = false;
                        else cp = cp * 16 + static_cast<std::uint32_t>(v);
                    }
                } else {
                    for (std::size_t k = 1; k < ent.size() && ok; ++k) {
                        if (ent[k] < '0' || ent[k] > '9') ok = false;
                        else cp = cp * 10 + static_cast<std::uint32_t>(ent[k] - '0');
                    }
                }
                if (!ok || cp > 0x10FFFF) fail("bad character reference");
                // reuse UTF-8 encoder from util via a small local emit
                char tmp[4];
                int n = 0;
                if (cp < 0x80) { tmp[0] = static_cast<char>(cp); n = 1; }
                else if (cp < 0x800) {
                    tmp[0] = static_cast<char>(0xC0 | (cp >> 6));
                    tmp[1] = static_cast<char>(0x80 | (cp & 0x3F));
                    n = 2;
                } else if (cp < 0x10000) {
                    tmp[0] = static_cast<char>(0xE0 | (cp >> 12));
                    tmp[1] = static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                    tmp[2] = static_cast<char>(0x80 | (cp & 0x3F));
                    n = 3;
                } else {
                    tmp[0] = static_cast<char>(0xF0 | (cp >> 18));
                    tmp[1] = static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
                    tmp[2] = static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                    tmp[3] = static_cast<char>(0x80 | (cp & 0x3F));
                    n = 4;
                }
                out.append(tmp, static_cast<std::size_t>(n));
            } else {
                fail("unknown entity &" + std::string(ent) + ";");
            }
            i = semi;
        }
        return out;
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        char quote = peek();
        ++pos_;
        std::size_t start = pos_;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' in attribute value");
            ++pos_;
        }
        if (eof()) fail("unterminated attribute value");
        auto raw = s_.substr(start, pos_ - start);
        ++pos_;
        return decode_entities(raw);
    }

    Node parse_element() {
        expect('<');
        Node node;
        node.name = parse_name();
        while (true) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '/') {
                ++pos_;
                expect('>');
                return node;  // self-closing
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string attr = parse_name();
            skip_ws();
            expect('=');
            skip_ws();
            node.attributes.emplace_back(std::move(attr), parse_attr_value());
        }
        parse_content(node);
        return node;
    }

    void parse_content(Node& node) {
        while (true) {
            if (eof()) fail("unterminated element <" + node.name + ">");
            if (peek() == '<') {
                if (starts_with("</")) {
                    pos_ += 2;
                    std::string name = parse_name();
                    if (name != node.name) fail("mismatched end tag </" + name + ">");
                    skip_ws();
                    expect('>');
                    return;
                }
                if (starts_with("<!--")) {
                    skip_until("-->");
                    continue;
                }
                if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    auto p = s_.find("]]>", pos_);
                    if (p == std::string_view::npos) fail("unterminated CDATA");
                    node.text.append(s_.substr(pos_, p - pos_));
                    pos_ = p + 3;
                    continue;
                }
                if (starts_with("<?")) {
                    skip_until("?>");
                    continue;
                }
                node.children.push_back(parse_element());
                continue;
            }
            std::size_t start = pos_;
            while (!eof() && peek() != '<') ++pos_;
            node.text.append(decode_entities(s_.substr(start, pos_ - start)));
        }
    }
};

std::string_view strip_bom_and_transcode(std::string_view bytes, std::string& storage) {
    if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xFE) {
        storage = utf16le_to_utf8(reinterpret_cast<const std::uint8_t*>(bytes.data()) + 2,
                                  bytes.size() - 2);
        return storage;
    }
    if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xFE &&
        static_cast<unsigned char>(bytes[1]) == 0xFF) {
        storage = utf16be_to_utf8(reinterpret_cast<const std::uint8_t*>(bytes.data()) + 2,
                                  bytes.size() - 2);
        return storage;
    }
    if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") return bytes.substr(3);
    return bytes;
}

}  // namespace

std::string_view Node::local_name() const {
    auto p = name.rfind(':');
    return p == std::string::npos ? std::string_view(name)
                                  : std::string_view(name).substr(p + 1);
}

const std::string* Node::attribute(std::string_view n) const {
    for (const auto& [k, v] : attributes)
        if (k == n) return &v;
    return nullptr;
}

const std::string* Node::attribute_local(std::string_view local) const {
    for (const auto& [k, v] : attributes) {
        std::string_view kv(k);
        auto p = kv.rfind(':');
        if (p != std::string_view::npos) kv = kv.substr(p + 1);
        if (kv == local) return &v;
    }
    return nullptr;
}

const Node* Node::first_child(std::string_view local) const {
    for (const auto& c : children)
        if (c.local_name() == local) return &c;
    return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view local) const {
    std::vector<const Node*> out;
    for (const auto& c : children)
        if (c.local_name() == local) out.push_back(&c);
    return out;
}

void Node::collect(std::string_view local, std::vector<const Node*>& out) const {
    if (local_name() == local) out.push_back(this);
    for (const auto& c : children) c.collect(local, out);
}

Node parse(std::string_view bytes) {
    std::string storage;
    auto text = strip_bom_and_transcode(bytes, storage);
    Parser p(text);
    return p.parse_document();
}

std::optional<std::string> sniff_root_name(std::string_view bytes) {
    std::string storage;
    auto text = strip_bom_and_transcode(bytes, storage);
    std::size_t i = 0;
    auto skip_ws_local = [&] {
        while (i < text.size() && is_space(text[i])) ++i;
    };
    while (true) {
        skip_ws_local();
        if (i >= text.size() || text[i] != '<') return std::nullopt;
        if (text.compare(i, 2, "<?") == 0) {
            auto p = text.find("?>", i);
            if (p == std::string_view::npos) return std::nullopt;
            i = p + 2;
        } else if (text.compare(i, 4, "<!--") == 0) {
            auto p = text.find("-->", i);
            if (p == std::string_view::npos) return std::nullopt;
            i = p + 3;
        } else if (text.compare(i, 2, "<!") == 0) {
            auto p = text.find('>', i);
            if (p == std::string_view::npos) return std::nullopt;
            i = p + 1;
        } else {
            ++i;
            std::size_t start = i;
            if (i >= text.size() || !is_name_start(text[i])) return std::nullopt;
            while (i < text.size() && is_name_char(text[i])) ++i;
            std::string qname(text.substr(start, i - start));
            auto p = qname.rfind(':');
            return p == std::string::npos ? qname : qname.substr(p + 1);
        }
    }
}

}  // namespace cloudme::xml
