#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "litcp/sparse_tensor.hpp"

namespace litcp {

struct CorpusRecord {
  std::string first_author;
  std::string title;
  std::string journal;
  std::string abstract;
  std::string body;

  bool operator==(const CorpusRecord&) const = default;
};

/// Rule-based replacements for the statistical NLP cleanup of article text.
struct CleaningRules {
  std::unordered_set<std::string> stopwords;
  std::size_t min_token_length = 3;
  /// Tokens made only of a/c/g/t/u with at least this many letters are
  /// treated as nucleotide sequences.
  std::size_t dna_min_length = 8;
  /// A token containing the same letter this many times in a row is nonsense.
  std::size_t max_char_repeat = 4;
  /// A token containing this many consonants in a row is nonsense.
  std::size_t max_consonant_run = 6;
  /// Tokens without any vowel (a, e, i, o, u, y) are nonsense.
  bool require_vowel = true;
  /// A body is non-English when non-ASCII code points make up more than this
  /// fraction of its letters.
  double non_english_threshold = 0.3;
  /// Words that only ever occur capitalized and in fewer than this many
  /// documents are treated as personal names and removed. 0 disables it.
  std::size_t name_df_floor = 2;

  /// Built-in English stopword list with the defaults above.
  static CleaningRules defaults();

  void validate() const;
};

/// Built-in English stopword list.
const std::vector<std::string>& default_stopwords();
/// One word per line; blank lines and lines starting with '#' are ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& file);

enum class CorpusFormat { kCsv, kTsv };
CorpusFormat parse_corpus_format(std::string_view s);

struct LoadStats {
  std::size_t rows = 0;
  std::size_t malformed = 0;
  std::size_t unreadable_bodies = 0;
};

/// Reads a delimited table with a header row. Required columns: title,
/// abstract, first_author, journal and either body or body_path (relative
/// paths resolve against `base_dir`). Column order is free; unknown columns
/// are ignored. Fields follow RFC 4180 quoting.
///
/// Rows with the wrong field count are skipped and counted. A body_path that
/// cannot be read yields an empty body. A missing required column is a hard
/// error (std::runtime_error).
std::vector<CorpusRecord> load_corpus(std::istream& in, CorpusFormat format,
                                      const std::filesystem::path& base_dir,
                                      LoadStats* stats = nullptr);
/// Throws std::runtime_error when the file cannot be opened.
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& file,
                                      CorpusFormat format, LoadStats* stats = nullptr);

/// Lower-cases ASCII letters, turns every other character into a separator,
/// and joins the remaining words with single spaces.
std::string clean_text(std::string_view s);

/// Collapses whitespace runs to one space and trims.
std::string normalize_whitespace(std::string_view s);

/// Fraction of a text's letters that are non-ASCII code points. 0 for text
/// without letters.
double non_ascii_letter_fraction(std::string_view text);

/// Drops records with an empty body or a body that fails the non-English
/// heuristic; cleans title and journal with clean_text() and normalizes the
/// author's whitespace. Order is preserved.
std::vector<CorpusRecord> clean_and_filter(std::vector<CorpusRecord> records,
                                           const CleaningRules& rules);

/// Keeps the first record per cleaned title and per cleaned abstract.
/// Empty titles and empty abstracts never collide.
std::vector<CorpusRecord> dedup(std::vector<CorpusRecord> records);

/// Splits on anything that is not an ASCII letter, lower-cases, and removes
/// stopwords, short tokens, nucleotide runs and nonsense words.
std::vector<std::string> tokenize(std::string_view body, const CleaningRules& rules);

/// True when `token` (lower case) passes the DNA and nonsense filters.
bool is_nucleotide_run(std::string_view token, const CleaningRules& rules);
bool is_nonsense(std::string_view token, const CleaningRules& rules);

/// Lower-cased words that only ever appear capitalized and occur in fewer
/// than rules.name_df_floor documents.
std::unordered_set<std::string> find_name_tokens(const std::vector<CorpusRecord>& records,
                                                 const CleaningRules& rules);

inline constexpr std::string_view kUnknownJournal = "(unknown-journal)";
inline constexpr std::string_view kUnknownAuthor = "(unknown-author)";

enum QuadMode : std::size_t { kAuthorMode = 0, kDocumentMode = 1, kJournalMode = 2, kWordMode = 3 };
inline const std::array<std::string, 4> kQuadModeNames{"author", "document", "journal",
                                                       "word"};

using QuadKey = std::array<Coord, 4>;

/// (author, document, journal, word) -> token count, with the label maps.
struct QuadCounts {
  std::map<QuadKey, std::uint64_t> counts;
  std::array<AxisMap, 4> axes;
  std::size_t skipped_records = 0;
};

/// Aggregates token counts. Axis labels are assigned in first-seen order
/// over records (authors, titles, journals) and tokens (words). Records
/// whose token list is empty after filtering contribute nothing and get no
/// axis entries. An empty title is labelled "(untitled:<n>)" with n the
/// record's position; an empty journal maps to kUnknownJournal.
QuadCounts build_counts(const std::vector<CorpusRecord>& records,
                        const CleaningRules& rules);

/// One nonzero per count with value ln(1 + count).
SparseTensor counts_to_tensor(const QuadCounts& q);
/// counts_to_tensor() plus mode names and axes.
LabeledTensor counts_to_labeled_tensor(const QuadCounts& q);

}  // namespace litcp
