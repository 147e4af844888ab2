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

#ifndef LEXENTAIL_XML_READER_H_
#define LEXENTAIL_XML_READER_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexentail/error.h"

namespace lexentail {

// Malformed markup. `offset()` is the byte position in the input where the
// reader gave up.
class XmlError : public Error {
 public:
  XmlError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct XmlAttribute {
  std::string name;
  std::string value;
};

struct XmlElement {
  std::string name;
  std::vector<XmlAttribute> attributes;
  std::vector<XmlElement> children;
  // Character data of this element and all descendants, in document order,
  // with entities and CDATA sections resolved.
  std::string text;
  // Byte offset of the opening '<'.
  std::size_t offset = 0;

  const std::string* FindAttribute(std::string_view attr) const;
  const XmlElement* FindChild(std::string_view child) const;
};

struct XmlDocument {
  std::optional<std::string> declared_encoding;
  XmlElement root;
};

// Non-validating reader for the subset of XML 1.0 used by corpus files:
// elements, attributes, character data, the five predefined entities,
// numeric character references, CDATA, comments, processing instructions
// and a skipped DOCTYPE. External entities are never resolved.
XmlDocument ParseXml(std::string_view input);

// Escapes markup characters, and CR so it survives line-end normalization.
std::string XmlEscape(std::string_view text);

}  // namespace lexentail

#endif  // LEXENTAIL_XML_READER_H_
