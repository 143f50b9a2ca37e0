#include "prepbench/xml.hpp"

#include <cctype>
#include <cstring>

namespace prepbench::xml {

const Element* Element::find(const std::string& child_name) const {
    for (const auto& c : children)
        if (c->name == child_name)
            return c.get();
    return nullptr;
}

std::vector<const Element*> Element::find_all(const std::string& child_name) const {
    std::vector<const Element*> out;
    for (const auto& c : children)
        if (c->name == child_name)
            out.push_back(c.get());
    return out;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    std::unique_ptr<Element> parse_document() {
        skip_misc();
        auto root = parse_element();
        skip_misc();
        if (pos_ != text_.size())
            fail("trailing content after root element");
        return root;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::MalformedXml, what + " at line " + std::to_string(line) +
                                                 ", column " + std::to_string(col));
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool starts_with(const char* s) const { return text_.compare(pos_, std::strlen(s), s) == 0; }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek())))
            ++pos_;
    }

    // whitespace, comments, XML declaration / processing instructions
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                auto end = text_.find("-->", pos_ + 4);
                if (end == std::string::npos)
                    fail("unterminated comment");
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                auto end = text_.find("?>", pos_ + 2);
                if (end == std::string::npos)
                    fail("unterminated processing instruction");
                pos_ = end + 2;
            } else {
                return;
            }
        }
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-' || peek() == '.' || peek() == ':'))
            ++pos_;
        if (pos_ == start)
            fail("expected element name");
        return text_.substr(start, pos_ - start);
    }

    void skip_attributes() {
        for (;;) {
            skip_ws();
            if (eof())
                fail("unterminated start tag");
            if (peek() == '>' || peek() == '/')
                return;
            parse_name();
            skip_ws();
            if (eof() || peek() != '=')
                fail("expected '=' in attribute");
            ++pos_;
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\''))
                fail("expected quoted attribute value");
            char quote = peek();
            ++pos_;
            auto end = text_.find(quote, pos_);
            if (end == std::string::npos)
                fail("unterminated attribute value");
            pos_ = end + 1;
        }
    }

    void append_text(std::string& out, std::size_t start, std::size_t end) {
        for (std::size_t i = start; i < end; ++i) {
            if (text_[i] == '&') {
                if (text_.compare(i, 5, "&amp;") == 0) {
                    out += '&';
                    i += 4;
                } else if (text_.compare(i, 4, "&lt;") == 0) {
                    out += '<';
                    i += 3;
                } else if (text_.compare(i, 4, "&gt;") == 0) {
                    out += '>';
                    i += 3;
                } else {
                    pos_ = i;
                    fail("unsupported entity");
                }
            } else {
                out += text_[i];
            }
        }
    }

    std::unique_ptr<Element> parse_element() {
        if (eof() || peek() != '<')
            fail("expected start tag");
        ++pos_;
        auto elem = std::make_unique<Element>();
        elem->name = parse_name();
        skip_attributes();
        if (peek() == '/') {
            ++pos_;
            if (eof() || peek() != '>')
                fail("malformed empty-element tag");
            ++pos_;
            return elem;
        }
        ++pos_; // '>'

        for (;;) {
            std::size_t text_start = pos_;
            while (!eof() && peek() != '<')
                ++pos_;
            append_text(elem->text, text_start, pos_);
            if (eof())
                fail("unterminated element <" + elem->name + ">");
            if (starts_with("<!--")) {
                auto end = text_.find("-->", pos_ + 4);
                if (end == std::string::npos)
                    fail("unterminated comment");
                pos_ = end + 3;
            } else if (starts_with("</")) {
                pos_ += 2;
                std::string close = parse_name();
                if (close != elem->name)
                    fail("mismatched close tag </" + close + "> for <" + elem->name + ">");
                skip_ws();
                if (eof() || peek() != '>')
                    fail("malformed close tag");
                ++pos_;
                return elem;
            } else {
                elem->children.push_back(parse_element());
            }
        }
    }
};

} // namespace

std::unique_ptr<Element> parse(const std::string& text) {
    return Parser(text).parse_document();
}

} // namespace prepbench::xml
