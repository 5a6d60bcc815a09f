#include "costar/eval.hpp"

#include <cstdio>
#include <sstream>

namespace costar {

using json = nlohmann::json;

namespace {

constexpr const char* kProxyNote =
    "All numbers are automatic proxies (well-formedness, lexical overlap, generic-output "
    "rate). They do not measure whether an output is accurate or context-specific; that "
    "judgment is left to the human reader of the side-by-side blocks.";

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// a, b, ..., z, aa, ab, ...
std::string post_label(std::size_t i) {
    std::string s;
    ++i;
    while (i > 0) {
        --i;
        s.insert(s.begin(), static_cast<char>('a' + i % 26));
        i /= 26;
    }
    return s;
}

std::string relations_summary(const ProxyMetrics& m) {
    std::string out;
    for (const auto& [rel, n] : m.relation_histogram) {
        if (!out.empty()) {
            out += ", ";
        }
        out += rel + "=" + std::to_string(n);
    }
    return out.empty() ? "-" : out;
}

std::string joined_candidates(const std::vector<CandidateRecord>& cands) {
    std::string out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (i > 0) {
            out += " / ";
        }
        out += cands[i].padded ? std::string(cands[i].failed ? "(failed)" : "(missing)")
                               : cands[i].raw;
    }
    return out;
}

std::string joined(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += " / ";
        }
        out += parts[i];
    }
    return out.empty() ? "-" : out;
}

std::string md_cell(std::string_view s) {
    std::string out;
    for (const char c : s) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n') {
            out += "<br>";
        } else if (c != '\r') {
            out += c;
        }
    }
    return out;
}

std::string html_escape(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "<br>"; break;
        default: out += c;
        }
    }
    return out;
}

std::size_t disagreements(const EvalRun& run) {
    std::size_t n = 0;
    for (const auto& c : run.ablation) {
        n += c.disagree ? 1 : 0;
    }
    return n;
}

} // namespace

std::string report_markdown(const EvalRun& run) {
    std::ostringstream md;
    md << "# Side-by-side generation report\n\n";
    md << "> " << kProxyNote << "\n\n";
    md << "Posts: " << run.posts.size() << ". Candidates per post: " << run.num_candidates
       << ". Max new tokens: " << run.max_new_tokens << ".\n\n";

    md << "## Proxy metrics\n\n";
    md << "| backend | scheme | well-formed rate | post overlap | reference overlap | generic rate | "
          "padded | relations |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& br : run.backends) {
        const auto& m = br.metrics;
        md << "| " << md_cell(br.descriptor.label()) << " | " << to_string(br.descriptor.scheme)
           << " | " << fixed(m.well_formed_rate) << " | " << fixed(m.post_overlap) << " | "
           << fixed(m.reference_overlap) << " | " << fixed(m.generic_rate) << " | " << m.padded
           << " | " << relations_summary(m) << " |\n";
    }
    md << "\n";

    if (!run.ablation.empty()) {
        md << "## Ablated-instance cross-check\n\n";
        md << disagreements(run) << " of " << run.ablation.size()
           << " (post, instance pair) comparisons disagree.\n\n";
        for (const auto& c : run.ablation) {
            if (c.disagree) {
                md << "- " << md_cell(c.post_id) << ": " << md_cell(c.first) << " vs "
                   << md_cell(c.second) << "\n";
            }
        }
        md << "\n";
    }

    for (const auto& br : run.backends) {
        if (!br.errors.empty()) {
            md << "## Errors from " << md_cell(br.descriptor.label()) << "\n\n";
            for (const auto& e : br.errors) {
                md << "- " << md_cell(e) << "\n";
            }
            md << "\n";
        }
    }

    if (!run.posts.empty()) {
        md << "## Outputs\n\n";
    }
    for (std::size_t p = 0; p < run.posts.size(); ++p) {
        const auto& post = run.posts[p];
        md << "### post (" << post_label(p) << ") `" << md_cell(post.id) << "`\n\n";
        md << "| | |\n|---|---|\n";
        md << "| post | *" << md_cell(post.text) << "* |\n";
        for (const auto& br : run.backends) {
            md << "| " << md_cell(br.descriptor.label()) << " | "
               << md_cell(joined_candidates(br.candidates[p])) << " |\n";
        }
        md << "| references | " << md_cell(joined(post.references)) << " |\n\n";
    }
    return md.str();
}

std::string report_html(const EvalRun& run) {
    std::ostringstream h;
    h << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>Side-by-side generation report</title>\n"
      << "<style>table{border-collapse:collapse}td,th{border:1px solid #999;padding:4px;"
         "vertical-align:top;text-align:left}</style>\n"
      << "</head>\n<body>\n";
    h << "<h1>Side-by-side generation report</h1>\n";
    h << "<p><em>" << html_escape(kProxyNote) << "</em></p>\n";
    h << "<p>Posts: " << run.posts.size() << ". Candidates per post: " << run.num_candidates
      << ". Max new tokens: " << run.max_new_tokens << ".</p>\n";

    h << "<h2>Proxy metrics</h2>\n<table>\n<tr><th>backend</th><th>scheme</th>"
         "<th>well-formed rate</th><th>post overlap</th><th>reference overlap</th>"
         "<th>generic rate</th><th>padded</th><th>relations</th></tr>\n";
    for (const auto& br : run.backends) {
        const auto& m = br.metrics;
        h << "<tr><td>" << html_escape(br.descriptor.label()) << "</td><td>"
          << to_string(br.descriptor.scheme) << "</td><td>" << fixed(m.well_formed_rate)
          << "</td><td>" << fixed(m.post_overlap) << "</td><td>" << fixed(m.reference_overlap)
          << "</td><td>" << fixed(m.generic_rate) << "</td><td>" << m.padded << "</td><td>"
          << html_escape(relations_summary(m)) << "</td></tr>\n";
    }
    h << "</table>\n";

    if (!run.ablation.empty()) {
        h << "<h2>Ablated-instance cross-check</h2>\n<p>" << disagreements(run) << " of "
          << run.ablation.size() << " (post, instance pair) comparisons disagree.</p>\n<ul>\n";
        for (const auto& c : run.ablation) {
            if (c.disagree) {
                h << "<li>" << html_escape(c.post_id) << ": " << html_escape(c.first) << " vs "
                  << html_escape(c.second) << "</li>\n";
            }
        }
        h << "</ul>\n";
    }

    for (const auto& br : run.backends) {
        if (!br.errors.empty()) {
            h << "<h2>Errors from " << html_escape(br.descriptor.label()) << "</h2>\n<ul>\n";
            for (const auto& e : br.errors) {
                h << "<li>" << html_escape(e) << "</li>\n";
            }
            h << "</ul>\n";
        }
    }

    if (!run.posts.empty()) {
        h << "<h2>Outputs</h2>\n";
    }
    for (std::size_t p = 0; p < run.posts.size(); ++p) {
        const auto& post = run.posts[p];
        h << "<h3>post (" << post_label(p) << ") <code>" << html_escape(post.id) << "</code></h3>\n";
        h << "<table>\n<tr><th>post</th><td><em>" << html_escape(post.text) << "</em></td></tr>\n";
        for (const auto& br : run.backends) {
            h << "<tr><th>" << html_escape(br.descriptor.label()) << "</th><td>"
              << html_escape(joined_candidates(br.candidates[p])) << "</td></tr>\n";
        }
        h << "<tr><th>references</th><td>" << html_escape(joined(post.references))
          << "</td></tr>\n</table>\n";
    }
    h << "</body>\n</html>\n";
    return h.str();
}

std::string metrics_jsonl(const EvalRun& run) {
    std::string out;
    for (const auto& br : run.backends) {
        const auto& m = br.metrics;
        const json line = {
            {"backend", br.descriptor.label()},
            {"name", br.descriptor.name},
            {"scheme", std::string(to_string(br.descriptor.scheme))},
            {"instance_id", br.descriptor.instance_id},
            {"posts", run.posts.size()},
            {"candidates", m.candidates},
            {"padded", m.padded},
            {"parsed", m.parsed},
            {"well_formed", m.well_formed},
            {"well_formed_rate", m.well_formed_rate},
            {"post_overlap", m.post_overlap},
            {"reference_overlap", m.reference_overlap},
            {"generic_rate", m.generic_rate},
            {"relations", m.relation_histogram},
            {"errors", br.errors.size()},
        };
        out += line.dump();
        out += '\n';
    }
    return out;
}

} // namespace costar
