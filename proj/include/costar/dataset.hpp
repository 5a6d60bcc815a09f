#pragma once

#include "costar/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace costar {

enum class Format : std::uint8_t { Jsonl, Csv };

std::optional<Format> format_from_string(std::string_view s);
/// Picks the format from the file extension (.csv, otherwise JSONL).
Format format_for_path(const std::filesystem::path& path);

struct RecordError {
    std::size_t row = 0;             ///< 1-based line (JSONL) or record (CSV) number
    std::vector<std::string> codes;  ///< schema codes or validation rule codes
    std::string message;
};

struct IngestResult {
    std::vector<Post> posts;
    std::vector<Annotation> annotations;
    std::vector<RecordError> errors;
};

/// Loads records; a record is loaded only if its schema is sound and its
/// annotation passes validate_annotation. Throws std::runtime_error when
/// the file cannot be opened or a CSV header is missing a column.
IngestResult ingest(const std::filesystem::path& path, Format format);
IngestResult ingest_jsonl(std::istream& in);
IngestResult ingest_csv(std::istream& in);

/// Writes the canonical JSONL record format, one annotation per line.
void export_jsonl(std::ostream& out, const std::vector<Post>& posts,
                  const std::vector<Annotation>& annotations);

struct ManifestEntry {
    Source source = Source::Reddit;
    std::string sub_source;
    std::size_t n_posts = 0;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries; ///< sorted by (source, sub_source)
    std::map<Source, std::size_t> subtotals;
    std::size_t total = 0;
};

CorpusManifest make_manifest(const std::vector<Post>& posts);

struct HistogramEntry {
    std::string value;
    std::size_t count = 0;

    friend bool operator==(const HistogramEntry&, const HistogramEntry&) = default;
};

struct DemographicRow {
    std::string category;
    std::size_t count = 0;
    double percent = 0.0;
};

struct DemographicTable {
    std::size_t reported = 0;
    std::vector<DemographicRow> rows; ///< every category, in table order
};

struct CorpusStats {
    std::size_t total_annotations = 0;
    std::vector<HistogramEntry> targeted_groups;
    std::vector<HistogramEntry> implied_statements;
    std::vector<HistogramEntry> conceptualisations;
    DemographicTable gender;
    DemographicTable race;
    DemographicTable age;
    /// Distinct annotators: by id when present, otherwise one per annotation
    /// that carries annotator info.
    std::size_t unique_annotators = 0;
};

/// Normalization used by every histogram: lowercase, whitespace collapsed.
std::string histogram_key(std::string_view s);

/// Top-k histograms, ties broken lexicographically. Throws for k == 0.
CorpusStats compute_stats(const std::vector<Annotation>& annotations, std::size_t k);

/// Exact top-k over arbitrary values using the same normalization.
std::vector<HistogramEntry> top_k(const std::vector<std::string>& values, std::size_t k);

struct Split {
    std::vector<std::string> train;
    std::vector<std::string> dev;
};

/// Seeded partition of the distinct ids. |dev| = round(dev_fraction * n).
/// Throws std::invalid_argument unless 0 < dev_fraction < 1 and both sides
/// end up non-empty.
Split split_posts(const std::vector<std::string>& post_ids, double dev_fraction, std::uint64_t seed);

std::vector<std::string> post_ids(const std::vector<Post>& posts);

} // namespace costar
