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

#include <gtest/gtest.h>

namespace lexentail {
namespace {

TEST(XmlReaderTest, ParsesDeclarationAttributesAndText) {
  XmlDocument doc = ParseXml(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<!-- header -->\n"
      "<dataset year='2021'><pair id=\"A\" label=\"Y\"><t1>x &amp; y</t1></pair></dataset>");
  ASSERT_TRUE(doc.declared_encoding.has_value());
  EXPECT_EQ(*doc.declared_encoding, "UTF-8");
  EXPECT_EQ(doc.root.name, "dataset");
  ASSERT_NE(doc.root.FindAttribute("year"), nullptr);
  EXPECT_EQ(*doc.root.FindAttribute("year"), "2021");
  const XmlElement* pair = doc.root.FindChild("pair");
  ASSERT_NE(pair, nullptr);
  EXPECT_EQ(*pair->FindAttribute("label"), "Y");
  EXPECT_EQ(pair->FindChild("t1")->text, "x & y");
  EXPECT_EQ(pair->FindAttribute("missing"), nullptr);
}

TEST(XmlReaderTest, DecodesEntitiesCdataAndNumericReferences) {
  XmlDocument doc =
      ParseXml("<r>&lt;&gt;&quot;&apos;&#65;&#x42;<![CDATA[<raw & text>]]>&#x3042;</r>");
  EXPECT_EQ(doc.root.text, "<>\"'AB<raw & text>\xE3\x81\x82");
}

TEST(XmlReaderTest, NormalisesLineEndings) {
  XmlDocument doc = ParseXml("<r>a\r\nb\rc</r>");
  EXPECT_EQ(doc.root.text, "a\nb\nc");
}

TEST(XmlReaderTest, TextIncludesDescendants) {
  XmlDocument doc = ParseXml("<r>one <b>two</b> three</r>");
  EXPECT_EQ(doc.root.text, "one two three");
  EXPECT_EQ(doc.root.children.size(), 1u);
}

TEST(XmlReaderTest, SkipsDoctypeAndProcessingInstructions) {
  XmlDocument doc = ParseXml("<!DOCTYPE r [<!ENTITY x 'y'>]><?pi data?><r/>");
  EXPECT_EQ(doc.root.name, "r");
  EXPECT_FALSE(doc.declared_encoding.has_value());
}

TEST(XmlReaderTest, ReportsOffsetsOfErrors) {
  try {
    ParseXml("<r><a></b></r>");
    FAIL() << "expected XmlError";
  } catch (const XmlError& e) {
    EXPECT_EQ(e.offset(), 6u);
    EXPECT_NE(std::string(e.what()).find("mismatched"), std::string::npos) << e.what();
  }
}

TEST(XmlReaderTest, RejectsMalformedInput) {
  EXPECT_THROW(ParseXml(""), XmlError);
  EXPECT_THROW(ParseXml("<r>"), XmlError);
  EXPECT_THROW(ParseXml("<r a=1/>"), XmlError);
  EXPECT_THROW(ParseXml("<r>&bogus;</r>"), XmlError);
  EXPECT_THROW(ParseXml("<r/><s/>"), XmlError);
  EXPECT_THROW(ParseXml("<r a='1' a='2'/>"), XmlError);
}

TEST(XmlReaderTest, LimitsNestingDepth) {
  std::string deep;
  for (int i = 0; i < 300; ++i) deep += "<a>";
  for (int i = 0; i < 300; ++i) deep += "</a>";
  EXPECT_THROW(ParseXml(deep), XmlError);
}

TEST(XmlReaderTest, EscapeRoundTrips) {
  const std::string raw = "a<b>&\"c'\rd";
  XmlDocument doc = ParseXml("<r>" + XmlEscape(raw) + "</r>");
  EXPECT_EQ(doc.root.text, raw);
}

}  // namespace
}  // namespace lexentail
