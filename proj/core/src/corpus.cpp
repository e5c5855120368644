#include "litcp/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "text_util.hpp"

namespace litcp {

namespace fs = std::filesystem;

namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "a",       "about",   "above",   "after",   "again",   "against", "all",
      "also",    "am",      "an",      "and",     "any",     "are",     "as",
      "at",      "be",      "because", "been",    "before",  "being",   "below",
      "between", "both",    "but",     "by",      "can",     "could",   "did",
      "do",      "does",    "doing",   "down",    "during",  "each",    "et",
      "al",      "few",     "for",     "from",    "further", "had",     "has",
      "have",    "having",  "he",      "her",     "here",    "hers",    "herself",
      "him",     "himself", "his",     "how",     "however", "i",       "if",
      "in",      "into",    "is",      "it",      "its",     "itself",  "just",
      "may",     "me",      "might",   "more",    "most",    "must",    "my",
      "myself",  "no",      "nor",     "not",     "now",     "of",      "off",
      "on",      "once",    "only",    "or",      "other",   "our",     "ours",
      "ourselves", "out",   "over",    "own",     "same",    "she",     "should",
      "so",      "some",    "such",    "than",    "that",    "the",     "their",
      "theirs",  "them",    "themselves", "then", "there",   "these",   "they",
      "this",    "those",   "through", "thus",    "to",      "too",     "under",
      "until",   "up",      "upon",    "us",      "using",   "very",    "was",
      "we",      "were",    "what",    "when",    "where",   "whether", "which",
      "while",   "who",     "whom",    "why",     "will",    "with",    "within",
      "without", "would",   "yet",     "you",     "your",    "yours",   "yourself",
      "yourselves",
  };
  return words;
}

CleaningRules CleaningRules::defaults() {
  CleaningRules r;
  r.stopwords.insert(default_stopwords().begin(), default_stopwords().end());
  return r;
}

void CleaningRules::validate() const {
  if (min_token_length < 1) throw std::invalid_argument("min_token_length must be >= 1");
  if (dna_min_length < 1) throw std::invalid_argument("dna_min_length must be >= 1");
  if (max_char_repeat < 2) throw std::invalid_argument("max_char_repeat must be >= 2");
  if (max_consonant_run < 1) throw std::invalid_argument("max_consonant_run must be >= 1");
  if (!(non_english_threshold >= 0.0 && non_english_threshold <= 1.0)) {
    throw std::invalid_argument("non_english_threshold must lie in [0, 1]");
  }
  for (const auto& w : stopwords) {
    for (char c : w) {
      if (c >= 'A' && c <= 'Z') {
        throw std::invalid_argument("stopword '" + w + "' is not lower-case");
      }
    }
  }
}

std::unordered_set<std::string> load_stopwords(const fs::path& file) {
  const std::string text = detail::read_file(file);
  std::unordered_set<std::string> out;
  for (auto line : detail::split_lines(text)) {
    std::string w = normalize_whitespace(line);
    if (w.empty() || w[0] == '#') continue;
    std::transform(w.begin(), w.end(), w.begin(), ascii_lower);
    out.insert(std::move(w));
  }
  return out;
}

CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "csv") return CorpusFormat::kCsv;
  if (s == "tsv") return CorpusFormat::kTsv;
  throw std::invalid_argument("unknown corpus format '" + std::string(s) +
                              "' (expected csv or tsv)");
}

namespace {

struct Row {
  std::vector<std::string> fields;
  bool malformed = false;
};

// RFC 4180 reader. Quotes open a field only at its start; a doubled quote
// inside a quoted field is a literal quote.
std::vector<Row> parse_delimited(std::string_view text, char delim) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool after_quote = false;
  bool field_started = false;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    after_quote = false;
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty() && !row.malformed;
    if (!blank) rows.push_back(std::move(row));
    row = Row{};
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == delim) {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else {
      if (after_quote) row.malformed = true;
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) row.malformed = true;
  if (field_started || !row.fields.empty() || row.malformed) end_row();
  return rows;
}

}  // namespace

std::vector<CorpusRecord> load_corpus(std::istream& in, CorpusFormat format,
                                      const fs::path& base_dir, LoadStats* stats) {
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  st = LoadStats{};

  auto rows = parse_delimited(text, format == CorpusFormat::kCsv ? ',' : '\t');
  std::vector<CorpusRecord> out;
  if (rows.empty()) return out;

  const Row header = std::move(rows.front());
  if (header.malformed) throw std::runtime_error("corpus header row is malformed");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    col.emplace(normalize_whitespace(header.fields[i]), i);
  }
  auto column = [&](const char* name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };
  const auto c_title = column("title");
  const auto c_abstract = column("abstract");
  const auto c_author = column("first_author");
  const auto c_journal = column("journal");
  const auto c_body = column("body");
  const auto c_body_path = column("body_path");
  for (auto [name, c] : {std::pair{"title", c_title}, std::pair{"abstract", c_abstract},
                         std::pair{"first_author", c_author}, std::pair{"journal", c_journal}}) {
    if (!c) throw std::runtime_error(std::string("corpus is missing the '") + name + "' column");
  }
  if (!c_body && !c_body_path) {
    throw std::runtime_error("corpus needs a 'body' or 'body_path' column");
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    Row& row = rows[r];
    ++st.rows;
    if (row.malformed || row.fields.size() != header.fields.size()) {
      ++st.malformed;
      spdlog::warn("corpus row {} skipped: {}", r + 1,
                   row.malformed ? "bad quoting"
                                 : "expected " + std::to_string(header.fields.size()) +
                                       " fields, found " + std::to_string(row.fields.size()));
      continue;
    }
    CorpusRecord rec;
    rec.title = std::move(row.fields[*c_title]);
    rec.abstract = std::move(row.fields[*c_abstract]);
    rec.first_author = std::move(row.fields[*c_author]);
    rec.journal = std::move(row.fields[*c_journal]);
    if (c_body) rec.body = std::move(row.fields[*c_body]);
    if (rec.body.empty() && c_body_path && !row.fields[*c_body_path].empty()) {
      fs::path p = row.fields[*c_body_path];
      if (p.is_relative()) p = base_dir / p;
      try {
        rec.body = detail::read_file(p);
      } catch (const std::runtime_error&) {
        ++st.unreadable_bodies;
        spdlog::warn("corpus row {}: cannot read body file {}", r + 1, p.string());
      }
    }
    out.push_back(std::move(rec));
  }
  if (st.malformed > 0) spdlog::warn("{} malformed corpus rows skipped", st.malformed);
  return out;
}

std::vector<CorpusRecord> load_corpus(const fs::path& file, CorpusFormat format,
                                      LoadStats* stats) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus " + file.string());
  return load_corpus(in, format, file.parent_path(), stats);
}

std::string clean_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_ascii_letter(c)) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += ascii_lower(c);
    } else if (is_space(c) || !(c >= '0' && c <= '9')) {
      // Digits vanish in place ("covid19" -> "covid"); everything else
      // separates words.
      pending_space = true;
    }
  }
  return out;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = true;
    } else {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

double non_ascii_letter_fraction(std::string_view text) {
  std::size_t ascii = 0;
  std::size_t other = 0;
  for (char ch : text) {
    const auto b = static_cast<unsigned char>(ch);
    if (b < 0x80) {
      if (is_ascii_letter(ch)) ++ascii;
    } else if ((b & 0xC0) != 0x80) {
      // Lead byte of a multi-byte code point.
      ++other;
    }
  }
  const std::size_t total = ascii + other;
  return total == 0 ? 0.0 : static_cast<double>(other) / static_cast<double>(total);
}

std::vector<CorpusRecord> clean_and_filter(std::vector<CorpusRecord> records,
                                           const CleaningRules& rules) {
  rules.validate();
  std::vector<CorpusRecord> out;
  out.reserve(records.size());
  std::size_t empty = 0;
  std::size_t foreign = 0;
  for (auto& r : records) {
    if (normalize_whitespace(r.body).empty()) {
      ++empty;
      continue;
    }
    if (non_ascii_letter_fraction(r.body) > rules.non_english_threshold) {
      ++foreign;
      continue;
    }
    r.title = clean_text(r.title);
    r.journal = clean_text(r.journal);
    r.first_author = normalize_whitespace(r.first_author);
    out.push_back(std::move(r));
  }
  if (empty + foreign > 0) {
    spdlog::info("dropped {} records without body and {} non-English records", empty,
                 foreign);
  }
  return out;
}

std::vector<CorpusRecord> dedup(std::vector<CorpusRecord> records) {
  std::unordered_set<std::string> titles;
  std::unordered_set<std::string> abstracts;
  std::vector<CorpusRecord> out;
  out.reserve(records.size());
  for (auto& r : records) {
    const std::string t = clean_text(r.title);
    const std::string a = clean_text(r.abstract);
    if (!t.empty() && titles.contains(t)) continue;
    if (!a.empty() && abstracts.contains(a)) continue;
    if (!t.empty()) titles.insert(t);
    if (!a.empty()) abstracts.insert(a);
    out.push_back(std::move(r));
  }
  return out;
}

bool is_nucleotide_run(std::string_view token, const CleaningRules& rules) {
  if (token.size() < rules.dna_min_length) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    return c == 'a' || c == 'c' || c == 'g' || c == 't' || c == 'u';
  });
}

bool is_nonsense(std::string_view token, const CleaningRules& rules) {
  bool has_vowel = false;
  std::size_t repeat = 0;
  std::size_t consonants = 0;
  char prev = '\0';
  for (char c : token) {
    repeat = (c == prev) ? repeat + 1 : 1;
    if (repeat >= rules.max_char_repeat) return true;
    if (is_vowel(c)) {
      has_vowel = true;
      consonants = 0;
    } else if (++consonants >= rules.max_consonant_run) {
      return true;
    }
    prev = c;
  }
  return rules.require_vowel && !has_vowel;
}

namespace {

// Calls fn(raw_token) for every maximal run of ASCII letters.
template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_ascii_letter(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && is_ascii_letter(text[j])) ++j;
    if (j > i) fn(text.substr(i, j - i));
    i = j;
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view body, const CleaningRules& rules) {
  std::vector<std::string> out;
  for_each_word(body, [&](std::string_view raw) {
    if (raw.size() < rules.min_token_length) return;
    std::string w = lower(raw);
    if (rules.stopwords.contains(w)) return;
    if (is_nucleotide_run(w, rules)) return;
    if (is_nonsense(w, rules)) return;
    out.push_back(std::move(w));
  });
  return out;
}

std::unordered_set<std::string> find_name_tokens(const std::vector<CorpusRecord>& records,
                                                 const CleaningRules& rules) {
  std::unordered_set<std::string> names;
  if (rules.name_df_floor == 0) return names;
  struct Usage {
    bool lower_seen = false;
    std::size_t docs = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::unordered_map<std::string, Usage> usage;
  for (std::size_t d = 0; d < records.size(); ++d) {
    for_each_word(records[d].body, [&](std::string_view raw) {
      Usage& u = usage[lower(raw)];
      if (!(raw[0] >= 'A' && raw[0] <= 'Z')) u.lower_seen = true;
      if (u.last_doc != d) {
        u.last_doc = d;
        ++u.docs;
      }
    });
  }
  for (auto& [word, u] : usage) {
    if (!u.lower_seen && u.docs < rules.name_df_floor) names.insert(word);
  }
  return names;
}

QuadCounts build_counts(const std::vector<CorpusRecord>& records,
                        const CleaningRules& rules) {
  rules.validate();
  const auto names = find_name_tokens(records, rules);
  QuadCounts q;
  for (std::size_t d = 0; d < records.size(); ++d) {
    const CorpusRecord& r = records[d];
    auto tokens = tokenize(r.body, rules);
    std::erase_if(tokens, [&](const std::string& w) { return names.contains(w); });
    if (tokens.empty()) {
      ++q.skipped_records;
      spdlog::info("record {} ('{}') has no tokens after filtering; skipped", d, r.title);
      continue;
    }
    std::string author = normalize_whitespace(r.first_author);
    if (author.empty()) author = kUnknownAuthor;
    std::string title = r.title.empty() ? "(untitled:" + std::to_string(d) + ")" : r.title;
    std::string journal = r.journal.empty() ? std::string(kUnknownJournal) : r.journal;

    const auto a = static_cast<Coord>(q.axes[kAuthorMode].intern(author));
    const std::size_t docs_before = q.axes[kDocumentMode].size();
    const auto p = static_cast<Coord>(q.axes[kDocumentMode].intern(title));
    if (q.axes[kDocumentMode].size() == docs_before) {
      throw std::invalid_argument("duplicate document title '" + title +
                                  "'; run dedup() before build_counts()");
    }
    const auto j = static_cast<Coord>(q.axes[kJournalMode].intern(journal));
    for (const auto& w : tokens) {
      const auto wi = static_cast<Coord>(q.axes[kWordMode].intern(w));
      ++q.counts[QuadKey{a, p, j, wi}];
    }
  }
  return q;
}

SparseTensor counts_to_tensor(const QuadCounts& q) {
  std::vector<SparseTensor::Entry> entries;
  entries.reserve(q.counts.size());
  for (const auto& [key, count] : q.counts) {
    if (count == 0) continue;
    entries.push_back({std::vector<Coord>(key.begin(), key.end()),
                       std::log(1.0 + static_cast<double>(count))});
  }
  std::vector<std::size_t> shape;
  for (const auto& ax : q.axes) shape.push_back(std::max<std::size_t>(ax.size(), 1));
  return SparseTensor::from_entries(std::move(entries), std::move(shape));
}

LabeledTensor counts_to_labeled_tensor(const QuadCounts& q) {
  for (const auto& ax : q.axes) {
    if (ax.size() == 0) throw std::invalid_argument("corpus produced no tokens");
  }
  LabeledTensor lt;
  lt.tensor = counts_to_tensor(q);
  lt.mode_names.assign(kQuadModeNames.begin(), kQuadModeNames.end());
  lt.axes.assign(q.axes.begin(), q.axes.end());
  return lt;
}

}  // namespace litcp
