#include "costar/core.hpp"
#include "costar/dataset.hpp"
#include "costar/grammar.hpp"
#include "costar/serializer.hpp"
#include "costar/text.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace costar;

namespace {

Scheme scheme_arg(const std::string& s) {
    const auto scheme = scheme_from_string(s);
    if (!scheme) {
        throw py::value_error("unknown scheme: " + s);
    }
    return *scheme;
}

py::dict tuple_dict(const StereotypeTuple& t) {
    py::dict d;
    d["targeted_group"] = t.targeted_group();
    d["relation"] = std::string(to_string(t.relation()));
    d["implied_statement"] = t.implied_statement();
    return d;
}

Annotation annotation_arg(const py::dict& d) {
    Annotation a;
    a.post_id = d.contains("post_id") ? d["post_id"].cast<std::string>() : "";
    a.targeted_group = d["targeted_group"].cast<std::string>();
    a.relation = d["relation"].cast<std::string>();
    a.implied_statement = d["implied_statement"].cast<std::string>();
    a.conceptualisation = d["conceptualisation"].cast<std::string>();
    return a;
}

py::dict annotation_dict(const Annotation& a) {
    py::dict d;
    d["post_id"] = a.post_id;
    d["targeted_group"] = a.targeted_group;
    d["relation"] = a.relation;
    d["implied_statement"] = a.implied_statement;
    d["conceptualisation"] = a.conceptualisation;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stereotype tuple grammar, serializer and dataset tools";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.attr("SEP") = std::string(kSepMarker);
    m.attr("EOS") = std::string(kEosMarker);

    m.def("relations", [] {
        std::vector<std::string> out;
        for (const Relation r : kAllRelations) {
            out.emplace_back(to_string(r));
        }
        return out;
    });

    m.def("parse_tuple", [](const std::string& text) { return tuple_dict(parse_tuple(text)); },
          py::arg("text"));

    m.def("render_tuple",
          [](const std::string& group, const std::string& relation, const std::string& statement) {
              return StereotypeTuple::make(group, parse_relation(relation), statement).render();
          },
          py::arg("targeted_group"), py::arg("relation"), py::arg("implied_statement"));

    m.def("parse_output",
          [](const std::string& text, const std::string& scheme) {
              const ParsedOutput p = parse_scheme_output(text, scheme_arg(scheme));
              py::dict d;
              d["well_formed"] = p.well_formed;
              d["tuple"] = p.tuple ? py::object(tuple_dict(*p.tuple)) : py::none();
              d["conceptualisation"] =
                  p.conceptualisation ? py::object(py::str(p.conceptualisation->text())) : py::none();
              d["failure"] = p.failure_reason ? py::object(py::str(std::string(to_string(*p.failure_reason))))
                                              : py::none();
              return d;
          },
          py::arg("text"), py::arg("scheme"));

    m.def("validate",
          [](const py::dict& ann) {
              std::vector<std::string> codes;
              for (const RuleCode c : validate_annotation(annotation_arg(ann))) {
                  codes.emplace_back(to_string(c));
              }
              return codes;
          },
          py::arg("annotation"));

    m.def("serialize",
          [](const std::string& post_text, const py::dict& ann, const std::string& scheme,
             std::size_t max_length_tokens) {
              const Post post{"", post_text, Source::Reddit, ""};
              return serialize(post, annotation_arg(ann), scheme_arg(scheme), max_length_tokens).text;
          },
          py::arg("post_text"), py::arg("annotation"), py::arg("scheme"),
          py::arg("max_length_tokens") = kDefaultMaxLengthTokens);

    m.def("eval_prefix", [](const std::string& post_text) {
        return eval_prefix(Post{"", post_text, Source::Reddit, ""});
    }, py::arg("post_text"));

    m.def("ingest",
          [](const std::filesystem::path& path) {
              const IngestResult r = ingest(path, format_for_path(path));
              py::list posts;
              for (const auto& p : r.posts) {
                  py::dict d;
                  d["post_id"] = p.id;
                  d["post_text"] = p.text;
                  d["source"] = std::string(to_string(p.source));
                  d["sub_source"] = p.sub_source;
                  posts.append(d);
              }
              py::list anns;
              for (const auto& a : r.annotations) {
                  anns.append(annotation_dict(a));
              }
              py::list errors;
              for (const auto& e : r.errors) {
                  py::dict d;
                  d["row"] = e.row;
                  d["codes"] = e.codes;
                  d["message"] = e.message;
                  errors.append(d);
              }
              py::dict out;
              out["posts"] = posts;
              out["annotations"] = anns;
              out["errors"] = errors;
              return out;
          },
          py::arg("path"));

    m.def("split_posts",
          [](const std::vector<std::string>& ids, double dev_fraction, std::uint64_t seed) {
              const Split s = split_posts(ids, dev_fraction, seed);
              return py::make_tuple(s.train, s.dev);
          },
          py::arg("post_ids"), py::arg("dev_fraction"), py::arg("seed") = 0);
}
