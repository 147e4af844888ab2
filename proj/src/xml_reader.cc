// Copyright 2026 The lex-entail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexentail/xml_reader.h"

#include <cstdint>
#include <cstdlib>

namespace lexentail {
namespace {

constexpr int kMaxDepth = 256;

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool IsNameChar(char c) {
  return !IsSpace(c) && c != '/' && c != '>' && c != '=' && c != '<' &&
         c != '"' && c != '\'' && c != '&';
}

void AppendUtf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  XmlDocument Document() {
    XmlDocument doc;
    SkipMisc(&doc);
    if (AtEnd() || Peek() != '<') Fail("expected root element");
    doc.root = Element(0);
    SkipMisc(nullptr);
    if (!AtEnd()) Fail("content after root element");
    return doc;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw XmlError(what, pos_);
  }

  bool AtEnd() const { return pos_ >= in_.size(); }
  char Peek() const { return in_[pos_]; }
  bool StartsWith(std::string_view s) const {
    return in_.substr(pos_, s.size()) == s;
  }
  void SkipSpace() {
    while (!AtEnd() && IsSpace(Peek())) ++pos_;
  }

  // Advances past `terminator`, returning the bytes before it.
  std::string_view Until(std::string_view terminator, const char* what) {
    std::size_t end = in_.find(terminator, pos_);
    if (end == std::string_view::npos) Fail(std::string("unterminated ") + what);
    std::string_view body = in_.substr(pos_, end - pos_);
    pos_ = end + terminator.size();
    return body;
  }

  // Whitespace, comments, processing instructions and DOCTYPE outside the
  // root element.
  void SkipMisc(XmlDocument* doc) {
    for (;;) {
      SkipSpace();
      if (StartsWith("<?")) {
        std::size_t start = pos_;
        pos_ += 2;
        std::string_view body = Until("?>", "processing instruction");
        if (body.substr(0, 3) == "xml" && doc != nullptr) {
          if (start != 0) Fail("XML declaration must come first");
          doc->declared_encoding = DeclaredEncoding(body);
        }
      } else if (StartsWith("<!--")) {
        pos_ += 4;
        Until("-->", "comment");
      } else if (StartsWith("<!DOCTYPE")) {
        SkipDoctype();
      } else {
        return;
      }
    }
  }

  static std::optional<std::string> DeclaredEncoding(std::string_view decl) {
    std::size_t at = decl.find("encoding");
    if (at == std::string_view::npos) return std::nullopt;
    std::size_t q = decl.find_first_of("\"'", at);
    if (q == std::string_view::npos) return std::nullopt;
    std::size_t close = decl.find(decl[q], q + 1);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(decl.substr(q + 1, close - q - 1));
  }

  void SkipDoctype() {
    int bracket = 0;
    while (!AtEnd()) {
      char c = in_[pos_++];
      if (c == '[') ++bracket;
      if (c == ']') --bracket;
      if (c == '>' && bracket <= 0) return;
    }
    Fail("unterminated DOCTYPE");
  }

  std::string Name() {
    std::size_t start = pos_;
    while (!AtEnd() && IsNameChar(Peek())) ++pos_;
    if (start == pos_) Fail("expected name");
    return std::string(in_.substr(start, pos_ - start));
  }

  void Entity(std::string& out) {
    std::size_t start = pos_;
    ++pos_;  // '&'
    std::size_t semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 10) {
      pos_ = start;
      Fail("malformed entity reference");
    }
    std::string_view ref = in_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (ref == "amp") {
      out.push_back('&');
    } else if (ref == "lt") {
      out.push_back('<');
    } else if (ref == "gt") {
      out.push_back('>');
    } else if (ref == "quot") {
      out.push_back('"');
    } else if (ref == "apos") {
      out.push_back('\'');
    } else if (ref.size() > 1 && ref[0] == '#') {
      bool hex = ref[1] == 'x' || ref[1] == 'X';
      std::string digits(ref.substr(hex ? 2 : 1));
      char* end = nullptr;
      unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (digits.empty() || *end != '\0' || cp == 0 || cp > 0x10FFFF ||
          (cp >= 0xD800 && cp <= 0xDFFF)) {
        pos_ = start;
        Fail("invalid character reference");
      }
      AppendUtf8(static_cast<std::uint32_t>(cp), out);
    } else {
      pos_ = start;
      Fail("unknown entity '&" + std::string(ref) + ";'");
    }
  }

  std::string AttributeValue() {
    if (AtEnd() || (Peek() != '"' && Peek() != '\'')) {
      Fail("expected quoted attribute value");
    }
    char quote = in_[pos_++];
    std::string value;
    for (;;) {
      if (AtEnd()) Fail("unterminated attribute value");
      char c = Peek();
      if (c == quote) break;
      if (c == '<') Fail("'<' in attribute value");
      if (c == '&') {
        Entity(value);
      } else {
        value.push_back(c);
        ++pos_;
      }
    }
    ++pos_;
    return value;
  }

  XmlElement Element(int depth) {
    if (depth > kMaxDepth) Fail("elements nested too deeply");
    XmlElement el;
    el.offset = pos_;
    ++pos_;  // '<'
    el.name = Name();
    for (;;) {
      std::size_t before = pos_;
      SkipSpace();
      if (AtEnd()) Fail("unterminated start tag <" + el.name + ">");
      if (StartsWith("/>")) {
        pos_ += 2;
        return el;
      }
      if (Peek() == '>') {
        ++pos_;
        break;
      }
      if (before == pos_) Fail("expected whitespace before attribute");
      XmlAttribute attr;
      attr.name = Name();
      SkipSpace();
      if (AtEnd() || Peek() != '=') Fail("expected '=' after attribute name");
      ++pos_;
      SkipSpace();
      attr.value = AttributeValue();
      if (el.FindAttribute(attr.name) != nullptr) {
        Fail("duplicate attribute '" + attr.name + "'");
      }
      el.attributes.push_back(std::move(attr));
    }
    Content(el, depth);
    return el;
  }

  void Content(XmlElement& el, int depth) {
    for (;;) {
      if (AtEnd()) Fail("unclosed element <" + el.name + ">");
      char c = Peek();
      if (c == '&') {
        Entity(el.text);
      } else if (c == '\r') {
        // Line-end normalization: CRLF and lone CR both become LF.
        el.text.push_back('\n');
        ++pos_;
        if (!AtEnd() && Peek() == '\n') ++pos_;
      } else if (c != '<') {
        el.text.push_back(c);
        ++pos_;
      } else if (StartsWith("</")) {
        const std::size_t tag_start = pos_;
        pos_ += 2;
        std::string close = Name();
        if (close != el.name) {
          pos_ = tag_start;
          Fail("mismatched end tag </" + close + "> for <" + el.name + ">");
        }
        SkipSpace();
        if (AtEnd() || Peek() != '>') Fail("malformed end tag");
        ++pos_;
        return;
      } else if (StartsWith("<![CDATA[")) {
        pos_ += 9;
        el.text.append(Until("]]>", "CDATA section"));
      } else if (StartsWith("<!--")) {
        pos_ += 4;
        Until("-->", "comment");
      } else if (StartsWith("<?")) {
        pos_ += 2;
        Until("?>", "processing instruction");
      } else {
        XmlElement child = Element(depth + 1);
        el.text += child.text;
        el.children.push_back(std::move(child));
      }
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

XmlError::XmlError(const std::string& what, std::size_t offset)
    : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

const std::string* XmlElement::FindAttribute(std::string_view attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a.value;
  }
  return nullptr;
}

const XmlElement* XmlElement::FindChild(std::string_view child) const {
  for (const auto& c : children) {
    if (c.name == child) return &c;
  }
  return nullptr;
}

XmlDocument ParseXml(std::string_view input) { return Reader(input).Document(); }

std::string XmlEscape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace lexentail
