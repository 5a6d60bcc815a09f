#include "costar/dataset.hpp"

#include "costar/rng.hpp"
#include "costar/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace costar {

using json = nlohmann::json;

std::optional<Format> format_from_string(std::string_view s) {
    const std::string key = text::to_lower(text::normalize_whitespace(s));
    if (key == "jsonl") {
        return Format::Jsonl;
    }
    if (key == "csv") {
        return Format::Csv;
    }
    return std::nullopt;
}

Format format_for_path(const std::filesystem::path& path) {
    return text::to_lower(path.extension().string()) == ".csv" ? Format::Csv : Format::Jsonl;
}

namespace {

// One record before validation; std::nullopt marks a field absent from input.
struct RawRecord {
    std::optional<std::string> post_id;
    std::optional<std::string> post_text;
    std::optional<std::string> source;
    std::optional<std::string> sub_source;
    std::optional<std::string> targeted_group;
    std::optional<std::string> relation;
    std::optional<std::string> implied_statement;
    std::optional<std::string> conceptualisation;
    std::optional<std::string> annotator_id;
    std::optional<std::string> gender;
    std::optional<std::string> race;
    std::optional<std::string> age_band;
};

class RecordLoader {
  public:
    explicit RecordLoader(IngestResult& result) : result_(result) {}

    void add(const RawRecord& raw, std::size_t row) {
        RecordError err{row, {}, {}};
        auto require = [&](const std::optional<std::string>& field, const char* name) {
            if (!field) {
                err.codes.push_back("MISSING_FIELD");
                err.message += std::string(err.message.empty() ? "" : "; ") + "missing " + name;
            }
        };
        require(raw.post_id, "post_id");
        require(raw.post_text, "post_text");
        require(raw.source, "source");
        require(raw.targeted_group, "targeted_group");
        require(raw.relation, "relation");
        require(raw.implied_statement, "implied_statement");
        require(raw.conceptualisation, "conceptualisation");
        if (!err.codes.empty()) {
            result_.errors.push_back(std::move(err));
            return;
        }

        Post post;
        post.id = text::normalize_whitespace(*raw.post_id);
        post.text = *raw.post_text;
        post.sub_source = text::normalize_whitespace(raw.sub_source.value_or(""));
        if (post.id.empty()) {
            err.codes.push_back("EMPTY_POST_ID");
        }
        if (auto src = source_from_string(*raw.source)) {
            post.source = *src;
        } else {
            err.codes.push_back("BAD_SOURCE");
            err.message = "unknown source '" + *raw.source + "'";
        }
        if (text::normalize_whitespace(post.text).empty()) {
            err.codes.push_back("EMPTY_POST");
        } else if (text::contains_marker(post.text)) {
            err.codes.push_back("POST_HAS_MARKER");
        }

        Annotation ann;
        ann.post_id = post.id;
        ann.targeted_group = *raw.targeted_group;
        ann.relation = *raw.relation;
        ann.implied_statement = *raw.implied_statement;
        ann.conceptualisation = *raw.conceptualisation;
        if (raw.annotator_id || raw.gender || raw.race || raw.age_band) {
            AnnotatorInfo info;
            bool bad = false;
            if (raw.annotator_id && !text::normalize_whitespace(*raw.annotator_id).empty()) {
                info.id = text::normalize_whitespace(*raw.annotator_id);
            }
            auto parse_axis = [&](const std::optional<std::string>& field, auto parser, auto& slot) {
                if (!field || text::normalize_whitespace(*field).empty()) {
                    return;
                }
                if (auto v = parser(*field)) {
                    slot = *v;
                } else {
                    bad = true;
                }
            };
            parse_axis(raw.gender, gender_from_string, info.gender);
            parse_axis(raw.race, race_from_string, info.race);
            parse_axis(raw.age_band, age_band_from_string, info.age_band);
            if (bad) {
                err.codes.push_back("BAD_DEMOGRAPHIC");
            }
            if (info != AnnotatorInfo{}) {
                ann.annotator = info;
            }
        }

        for (const RuleCode code : validate_annotation(ann)) {
            err.codes.emplace_back(to_string(code));
        }

        const auto seen = post_index_.find(post.id);
        if (seen != post_index_.end()) {
            const Post& prev = result_.posts[seen->second];
            if (prev.text != post.text || prev.source != post.source ||
                prev.sub_source != post.sub_source) {
                err.codes.push_back("DUPLICATE_POST_ID");
            }
        }

        if (!err.codes.empty()) {
            if (err.message.empty()) {
                err.message = "record rejected";
            }
            result_.errors.push_back(std::move(err));
            return;
        }
        if (seen == post_index_.end()) {
            post_index_.emplace(post.id, result_.posts.size());
            result_.posts.push_back(std::move(post));
        }
        result_.annotations.push_back(std::move(ann));
    }

  private:
    IngestResult& result_;
    std::unordered_map<std::string, std::size_t> post_index_;
};

std::optional<std::string> string_field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number()) {
        return it->dump();
    }
    return std::nullopt;
}

// RFC 4180 reader: quoted fields may contain commas, quotes ("") and newlines.
class CsvReader {
  public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string>& fields) {
        fields.clear();
        std::string field;
        bool in_quotes = false;
        bool any = false;
        char c = 0;
        while (in_.get(c)) {
            any = true;
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get(c);
                        field += '"';
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field += c;
                }
            } else if (c == '"') {
                in_quotes = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                fields.push_back(std::move(field));
                return true;
            } else if (c != '\r') {
                field += c;
            }
        }
        if (!any) {
            return false;
        }
        fields.push_back(std::move(field));
        return true;
    }

  private:
    std::istream& in_;
};

} // namespace

IngestResult ingest_jsonl(std::istream& in) {
    IngestResult result;
    RecordLoader loader(result);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            result.errors.push_back({row, {"BAD_JSON"}, e.what()});
            continue;
        }
        if (!j.is_object()) {
            result.errors.push_back({row, {"BAD_JSON"}, "record is not an object"});
            continue;
        }
        RawRecord raw;
        raw.post_id = string_field(j, "post_id");
        raw.post_text = string_field(j, "post_text");
        raw.source = string_field(j, "source");
        raw.sub_source = string_field(j, "sub_source");
        raw.targeted_group = string_field(j, "targeted_group");
        raw.relation = string_field(j, "relation");
        raw.implied_statement = string_field(j, "implied_statement");
        raw.conceptualisation = string_field(j, "conceptualisation");
        if (const auto it = j.find("annotator"); it != j.end() && it->is_object()) {
            raw.annotator_id = string_field(*it, "id");
            raw.gender = string_field(*it, "gender");
            raw.race = string_field(*it, "race");
            raw.age_band = string_field(*it, "age_band");
        }
        loader.add(raw, row);
    }
    return result;
}

IngestResult ingest_csv(std::istream& in) {
    IngestResult result;
    RecordLoader loader(result);
    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) {
        throw std::runtime_error("CSV input has no header row");
    }
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        column[text::normalize_whitespace(header[i])] = i;
    }
    for (const char* required : {"post_id", "post_text", "source", "targeted_group", "relation",
                                 "implied_statement", "conceptualisation"}) {
        if (!column.contains(required)) {
            throw std::runtime_error(std::string("CSV header missing column '") + required + "'");
        }
    }

    std::vector<std::string> fields;
    std::size_t row = 0;
    while (reader.next(fields)) {
        ++row;
        if (fields.size() == 1 && text::normalize_whitespace(fields[0]).empty()) {
            continue;
        }
        auto get = [&](const char* name) -> std::optional<std::string> {
            const auto it = column.find(name);
            if (it == column.end() || it->second >= fields.size()) {
                return std::nullopt;
            }
            return fields[it->second];
        };
        RawRecord raw;
        raw.post_id = get("post_id");
        raw.post_text = get("post_text");
        raw.source = get("source");
        raw.sub_source = get("sub_source");
        raw.targeted_group = get("targeted_group");
        raw.relation = get("relation");
        raw.implied_statement = get("implied_statement");
        raw.conceptualisation = get("conceptualisation");
        raw.annotator_id = get("annotator_id");
        raw.gender = get("annotator_gender");
        raw.race = get("annotator_race");
        raw.age_band = get("annotator_age_band");
        loader.add(raw, row);
    }
    return result;
}

IngestResult ingest(const std::filesystem::path& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    return format == Format::Csv ? ingest_csv(in) : ingest_jsonl(in);
}

void export_jsonl(std::ostream& out, const std::vector<Post>& posts,
                  const std::vector<Annotation>& annotations) {
    std::unordered_map<std::string, const Post*> by_id;
    for (const auto& p : posts) {
        by_id.emplace(p.id, &p);
    }
    for (const auto& ann : annotations) {
        const auto it = by_id.find(ann.post_id);
        if (it == by_id.end()) {
            throw std::invalid_argument("annotation refers to unknown post '" + ann.post_id + "'");
        }
        const Post& post = *it->second;
        json j = {
            {"post_id", post.id},
            {"post_text", post.text},
            {"source", std::string(to_string(post.source))},
            {"sub_source", post.sub_source},
            {"targeted_group", ann.targeted_group},
            {"relation", ann.relation},
            {"implied_statement", ann.implied_statement},
            {"conceptualisation", ann.conceptualisation},
        };
        if (ann.annotator) {
            json a = json::object();
            if (ann.annotator->id) {
                a["id"] = *ann.annotator->id;
            }
            if (ann.annotator->gender) {
                a["gender"] = std::string(to_string(*ann.annotator->gender));
            }
            if (ann.annotator->race) {
                a["race"] = std::string(to_string(*ann.annotator->race));
            }
            if (ann.annotator->age_band) {
                a["age_band"] = std::string(to_string(*ann.annotator->age_band));
            }
            j["annotator"] = std::move(a);
        }
        out << j.dump() << '\n';
    }
}

CorpusManifest make_manifest(const std::vector<Post>& posts) {
    std::map<std::pair<Source, std::string>, std::size_t> counts;
    for (const auto& p : posts) {
        ++counts[{p.source, p.sub_source}];
    }
    CorpusManifest m;
    for (const auto& [key, n] : counts) {
        m.entries.push_back({key.first, key.second, n});
        m.subtotals[key.first] += n;
        m.total += n;
    }
    return m;
}

std::string histogram_key(std::string_view s) {
    return text::to_lower(text::normalize_whitespace(s));
}

std::vector<HistogramEntry> top_k(const std::vector<std::string>& values, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("k must be >= 1");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& v : values) {
        std::string key = histogram_key(v);
        if (!key.empty()) {
            ++counts[std::move(key)];
        }
    }
    std::vector<HistogramEntry> entries;
    entries.reserve(counts.size());
    for (auto& [value, n] : counts) {
        entries.push_back({value, n});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const HistogramEntry& a, const HistogramEntry& b) { return a.count > b.count; });
    if (entries.size() > k) {
        entries.resize(k);
    }
    return entries;
}

namespace {

template <typename Enum, std::size_t N>
DemographicTable demographic_table(const std::vector<AnnotatorInfo>& annotators,
                                   std::optional<Enum> AnnotatorInfo::*axis,
                                   const std::array<Enum, N>& categories) {
    DemographicTable table;
    std::array<std::size_t, N> counts{};
    for (const auto& a : annotators) {
        if (const auto& v = a.*axis) {
            ++counts[static_cast<std::size_t>(*v)];
            ++table.reported;
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        const double pct = table.reported == 0
                               ? 0.0
                               : 100.0 * static_cast<double>(counts[i]) /
                                     static_cast<double>(table.reported);
        table.rows.push_back({std::string(to_string(categories[i])), counts[i], pct});
    }
    return table;
}

} // namespace

CorpusStats compute_stats(const std::vector<Annotation>& annotations, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("k must be >= 1");
    }
    CorpusStats stats;
    stats.total_annotations = annotations.size();
    std::vector<std::string> groups;
    std::vector<std::string> statements;
    std::vector<std::string> concepts;
    std::vector<AnnotatorInfo> annotators;
    std::map<std::string, std::size_t> annotator_by_id;
    for (const auto& a : annotations) {
        groups.push_back(a.targeted_group);
        statements.push_back(a.implied_statement);
        concepts.push_back(a.conceptualisation);
        if (!a.annotator) {
            continue;
        }
        if (a.annotator->id) {
            if (annotator_by_id.contains(*a.annotator->id)) {
                continue;
            }
            annotator_by_id.emplace(*a.annotator->id, annotators.size());
        }
        annotators.push_back(*a.annotator);
    }
    stats.targeted_groups = top_k(groups, k);
    stats.implied_statements = top_k(statements, k);
    stats.conceptualisations = top_k(concepts, k);
    stats.gender = demographic_table(annotators, &AnnotatorInfo::gender, kAllGenders);
    stats.race = demographic_table(annotators, &AnnotatorInfo::race, kAllRaces);
    stats.age = demographic_table(annotators, &AnnotatorInfo::age_band, kAllAgeBands);
    stats.unique_annotators = annotators.size();
    return stats;
}

Split split_posts(const std::vector<std::string>& ids, double dev_fraction, std::uint64_t seed) {
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
        throw std::invalid_argument("dev_fraction must lie strictly between 0 and 1");
    }
    std::vector<std::string> order(ids);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());

    const auto n_dev =
        static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(order.size())));
    if (n_dev == 0 || n_dev >= order.size()) {
        throw std::invalid_argument("dev_fraction leaves an empty train or dev side");
    }
    seeded_shuffle(std::span<std::string>(order), seed);

    Split s;
    s.dev.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_dev));
    s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_dev), order.end());
    std::sort(s.dev.begin(), s.dev.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

std::vector<std::string> post_ids(const std::vector<Post>& posts) {
    std::vector<std::string> ids;
    ids.reserve(posts.size());
    for (const auto& p : posts) {
        ids.push_back(p.id);
    }
    return ids;
}

} // namespace costar
