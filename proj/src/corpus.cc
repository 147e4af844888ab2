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

#include "lexentail/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "lexentail/digest.h"
#include "lexentail/xml_reader.h"

namespace lexentail {
namespace {

std::string_view Trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  std::size_t b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string ElementText(const XmlElement& el) {
  if (el.children.empty()) return std::string(Trim(el.text));
  std::string joined;
  for (const auto& child : el.children) {
    std::string_view part = Trim(child.text);
    if (part.empty()) continue;
    if (!joined.empty()) joined.push_back('\n');
    joined.append(part);
  }
  return joined;
}

std::string PairLabel(const XmlElement& pair) {
  const std::string* id = pair.FindAttribute("id");
  return id != nullptr ? "pair '" + *id + "'"
                       : "pair at byte " + std::to_string(pair.offset);
}

}  // namespace

std::string_view LabelName(GoldLabel label) {
  return label == GoldLabel::kYes ? "YES" : "NO";
}

const EntailmentCase* Corpus::Find(std::string_view id) const {
  for (const auto& c : cases) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool IsValidUtf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > bytes.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

Corpus ParseCorpus(std::string_view source, std::string name) {
  if (source.size() >= 2 &&
      ((source[0] == '\xFF' && source[1] == '\xFE') ||
       (source[0] == '\xFE' && source[1] == '\xFF'))) {
    throw CorpusError("corpus '" + name + "': UTF-16 input is not supported");
  }
  if (source.substr(0, 3) == "\xEF\xBB\xBF") source.remove_prefix(3);
  if (!IsValidUtf8(source)) {
    throw CorpusError("corpus '" + name + "': input is not valid UTF-8");
  }

  XmlDocument doc;
  try {
    doc = ParseXml(source);
  } catch (const XmlError& e) {
    throw CorpusError("corpus '" + name + "': malformed XML: " + e.what());
  }
  if (doc.declared_encoding) {
    std::string enc = Lower(*doc.declared_encoding);
    if (enc != "utf-8" && enc != "utf8") {
      throw CorpusError("corpus '" + name + "': unsupported encoding '" +
                        *doc.declared_encoding + "'");
    }
  }

  Corpus corpus;
  corpus.name = std::move(name);
  if (const std::string* year = doc.root.FindAttribute("year")) {
    try {
      corpus.year = std::stoi(*year);
    } catch (const std::exception&) {
      throw CorpusError("corpus '" + corpus.name + "': bad year attribute '" +
                        *year + "'");
    }
  }

  std::unordered_set<std::string> seen;
  for (const XmlElement& pair : doc.root.children) {
    if (pair.name != "pair") continue;
    const std::string* id = pair.FindAttribute("id");
    if (id == nullptr || Trim(*id).empty()) {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " has no id");
    }
    const std::string* label = pair.FindAttribute("label");
    if (label == nullptr) {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " has no label");
    }
    EntailmentCase c;
    c.id = *id;
    if (*label == "Y") {
      c.label = GoldLabel::kYes;
    } else if (*label == "N") {
      c.label = GoldLabel::kNo;
    } else {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " has label '" + *label + "' (expected Y or N)");
    }
    const XmlElement* t1 = pair.FindChild("t1");
    const XmlElement* t2 = pair.FindChild("t2");
    if (t1 == nullptr) {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " is missing <t1>");
    }
    if (t2 == nullptr) {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " is missing <t2>");
    }
    c.premise = ElementText(*t1);
    c.hypothesis = std::string(Trim(t2->text));
    if (c.premise.empty()) {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " has an empty premise");
    }
    if (c.hypothesis.empty()) {
      throw CorpusError("corpus '" + corpus.name + "': " + PairLabel(pair) +
                        " has an empty hypothesis");
    }
    if (!seen.insert(c.id).second) {
      throw CorpusError("corpus '" + corpus.name + "': duplicate id '" + c.id +
                        "'");
    }
    corpus.cases.push_back(std::move(c));
  }
  return corpus;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Corpus LoadCorpusFile(const std::filesystem::path& path) {
  return ParseCorpus(ReadFile(path), path.stem().string());
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<dataset";
  if (corpus.year) out += " year=\"" + std::to_string(*corpus.year) + "\"";
  out += ">\n";
  for (const auto& c : corpus.cases) {
    out += "<pair id=\"" + XmlEscape(c.id) + "\" label=\"";
    out += c.label == GoldLabel::kYes ? "Y" : "N";
    out += "\">\n<t1>\n" + XmlEscape(c.premise) + "\n</t1>\n<t2>\n" +
           XmlEscape(c.hypothesis) + "\n</t2>\n</pair>\n";
  }
  out += "</dataset>\n";
  return out;
}

std::string CorpusDigest(const Corpus& corpus) {
  // Length-prefixed fields so no two distinct corpora share a preimage.
  std::string canon;
  auto field = [&canon](std::string_view s) {
    canon += std::to_string(s.size());
    canon.push_back(':');
    canon.append(s);
  };
  for (const auto& c : corpus.cases) {
    field(c.id);
    field(c.premise);
    field(c.hypothesis);
    field(LabelName(c.label));
  }
  return Sha256Hex(canon);
}

std::optional<GoldLabel> ParseExemplarAnswer(std::string_view token) {
  std::string t = Lower(Trim(token));
  if (t == "y" || t == "yes" || t == "true") return GoldLabel::kYes;
  if (t == "n" || t == "no" || t == "false") return GoldLabel::kNo;
  return std::nullopt;
}

ExemplarBank ParseExemplars(std::string_view source) {
  if (Trim(source).empty()) throw CorpusError("empty exemplar bank");
  if (!IsValidUtf8(source)) {
    throw CorpusError("exemplar bank is not valid UTF-8");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorpusError(std::string("exemplar bank: malformed JSON: ") +
                      e.what());
  }
  if (!doc.is_array()) throw CorpusError("exemplar bank must be a JSON array");
  if (doc.empty()) throw CorpusError("empty exemplar bank");

  ExemplarBank bank;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    std::string where = "exemplar " + std::to_string(i);
    if (!rec.is_object()) throw CorpusError(where + " is not an object");
    auto q = rec.find("question");
    if (q == rec.end() || !q->is_string() ||
        Trim(q->get_ref<const std::string&>()).empty()) {
      throw CorpusError(where + " is missing a question");
    }
    auto a = rec.find("answer");
    if (a == rec.end()) throw CorpusError(where + " is missing an answer");
    Exemplar ex;
    ex.question = std::string(Trim(q->get_ref<const std::string&>()));
    if (a->is_boolean()) {
      ex.answer = a->get<bool>() ? GoldLabel::kYes : GoldLabel::kNo;
    } else if (a->is_string()) {
      auto label = ParseExemplarAnswer(a->get_ref<const std::string&>());
      if (!label) {
        throw CorpusError(where + " has unrecognized answer '" +
                          a->get<std::string>() + "'");
      }
      ex.answer = *label;
    } else {
      throw CorpusError(where + " has a non-string answer");
    }
    if (auto c = rec.find("commentary"); c != rec.end() && !c->is_null()) {
      if (!c->is_string()) throw CorpusError(where + " has a non-string commentary");
      ex.commentary = c->get<std::string>();
    }
    bank.exemplars.push_back(std::move(ex));
  }
  return bank;
}

ExemplarBank LoadExemplarFile(const std::filesystem::path& path) {
  return ParseExemplars(ReadFile(path));
}

}  // namespace lexentail
